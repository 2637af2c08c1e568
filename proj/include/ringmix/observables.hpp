// Copyright 2026 The ringmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/model.hpp"
#include "ringmix/solver.hpp"

namespace ringmix {

/// Output-field moments <a_o^dag a_o>, <b_o^dag b_o>, <a_o b_o> at frequency omega.
struct MomentSet {
    double n_a = 0.0;
    double n_b = 0.0;
    Complex m_ab{};
    double omega = 0.0;
};

struct SqueezingResult {
    double delta_min = 2.0;
    double s_db = 0.0;
    double phi_star = 0.0;
};

struct GainResult {
    Complex ratio{1.0};
    double g_db = 0.0;
    double g0_db = 0.0;
    std::optional<double> reduction;  // (G - G0) / G0
};

/// Iteration counts and residuals of the solves behind one point.
struct SolveLog {
    std::vector<std::string> labels;
    std::vector<SolveReport> reports;

    void add(std::string label, SolveReport report);
    int total_iterations() const;
    double worst_residual() const;
};

/// The four states used by the output formulas: the steady state, the two
/// resolvent solves on V_{+1}, and the linear-response state for the gain.
struct ResponseStates {
    BlockState rho;
    BlockState y_b;     // (L + i w)^{-1} [b rho]
    BlockState y_a;     // (L + i w)^{-1} [rho a^dag]
    BlockState rho1;    // L rho1 = -sqrt(kappa_a) [a^dag, rho]
};

/// Right-hand sides on V_{+1} built from a V_0 state.
BlockState rhs_b_rho(const BlockState& rho);
BlockState rhs_rho_adag(const BlockState& rho);
BlockState rhs_gain(const BlockState& rho, double kappa_a);

/// Moments from solved response states (three V_{+1} traces plus complex conjugation).
MomentSet moments_from(const BlockState& y_b, const BlockState& y_a, double kappa_a, double kappa_b,
                       double omega);
/// Amplitude ratio sqrt(kappa_a) Tr(a rho1) - 1.
Complex gain_ratio_from(const BlockState& rho1, double kappa_a);

ResponseStates solve_response(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc,
                              double omega, const SolverConfig& cfg, SolveLog* log = nullptr);

MomentSet output_moments(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc,
                         double omega, const SolverConfig& cfg, SolveLog* log = nullptr);

/// Throws std::domain_error when the moments give delta_min <= 0.
SqueezingResult squeezing(const MomentSet& m);

GainResult gain(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc,
                const SolverConfig& cfg, double g0_db = 0.0, SolveLog* log = nullptr);

/// Gain record from an amplitude ratio.
GainResult gain_from_ratio(Complex ratio, double g0_db);

struct PointResult {
    double g0_db = 0.0;
    double epsilon = 0.0;
    TruncationConfig trunc;
    MomentSet moments;
    std::optional<SqueezingResult> squeezing;
    GainResult gain;
    SolveLog log;
    bool ok = false;
    std::string status;
};

/// Full evaluation of one operating point sharing one steady state.
PointResult evaluate_point(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc,
                           double omega, const SolverConfig& cfg, double g0_db = 0.0);

struct SweepOptions {
    std::optional<int> n;    // override of the gain-based cutoff
    std::optional<int> n_c;  // override of the beta-based pump cutoff
    double omega = 0.0;
    int jobs = 1;
};

/// Truncation for one sweep point.
TruncationConfig sweep_truncation(HamiltonianKind kind, double g0_db, double beta, const SweepOptions& opt);

/// Runs f(0) .. f(count - 1) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& f);

/// One point per expected gain; failures are recorded in the point and do not stop the sweep.
std::vector<PointResult> sweep(HamiltonianKind kind, const ModelParams& p, const std::vector<double>& g0_list,
                               const SweepOptions& opt, const SolverConfig& cfg);

/// Same, with explicit pump amplitudes instead of expected gains (G0 is then the NDPA gain of each).
std::vector<PointResult> sweep_epsilon(HamiltonianKind kind, const ModelParams& p,
                                       const std::vector<double>& epsilons, const SweepOptions& opt,
                                       const SolverConfig& cfg);

}  // namespace ringmix
