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

#include <optional>
#include <string>
#include <vector>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/model.hpp"
#include "ringmix/ndpa.hpp"
#include "ringmix/observables.hpp"
#include "ringmix/solver.hpp"

namespace ringmix {

/// H3 in the frame where the pump is displaced by its coherent amplitude. The drive
/// disappears, the three-wave term splits into the NDPA coupling g3 alpha^* (part of L0)
/// and the bare three-wave term lambda L1.
struct DisplacedFrame {
    ModelParams params;
    Complex alpha{};   // pump amplitude removed by the displacement
    NdpaParams ndpa;   // NDPA content of L0

    SuperOp l0(const TruncationConfig& trunc, int k, Complex shift = {}) const;
    CouplingList l1(const TruncationConfig& trunc, int k) const;
    /// L0 + lambda L1
    SuperOp full(const TruncationConfig& trunc, int k, double lambda, Complex shift = {}) const;
    /// Two-mode squeezed thermal state times the pump vacuum.
    BlockState zeroth_order_state(const TruncationConfig& trunc) const;
};

DisplacedFrame displaced_frame(const ModelParams& p);

enum class SeriesObservable { Na, Nb, Mab, AmplitudeGain };

std::string to_string(SeriesObservable o);

/// Power series in lambda; index = order. Odd entries are exactly zero unless
/// they were computed on request.
struct SeriesCoeffs {
    SeriesObservable observable = SeriesObservable::AmplitudeGain;
    std::vector<Complex> c;

    int max_order() const { return static_cast<int>(c.size()) - 1; }
    /// Coefficients in z = lambda^2.
    std::vector<Complex> z_coeffs() const;
    /// Sum of the terms of order <= `order` at lambda.
    Complex partial_sum(double lambda, int order) const;
};

struct SeriesSet {
    TruncationConfig trunc;
    double omega = 0.0;
    SeriesCoeffs n_a, n_b, m_ab, ratio;
    SolveLog log;

    const SeriesCoeffs& get(SeriesObservable o) const;
    /// Moments from the partial sums through `order` at lambda.
    MomentSet moments(double lambda, int order) const;
};

struct SeriesOptions {
    int max_order = 8;
    double omega = 0.0;
    /// Evaluate odd orders instead of setting them to zero (structural check).
    bool compute_odd = false;
};

/// Pump cutoff that makes the chain exact through `max_order`: a pump level above
/// max_order / 2 cannot return to the trace in time.
int series_pump_levels(int max_order);

/// Gain-table signal cutoff together with the exact pump cutoff.
TruncationConfig series_truncation(double g0_db, int max_order);

SeriesSet series_set(const ModelParams& p, const TruncationConfig& trunc, const SeriesOptions& opt,
                     const SolverConfig& cfg);

SeriesCoeffs series_coeffs(SeriesObservable o, const ModelParams& p, const TruncationConfig& trunc,
                           int max_order, const SolverConfig& cfg);

/// Displaced-frame result at a given lambda (lambda = 1 is the full H3 model).
struct DisplacedPoint {
    MomentSet moments;
    Complex ratio{};
    SolveLog log;
};

DisplacedPoint displaced_point(const ModelParams& p, const TruncationConfig& trunc, double lambda,
                               double omega, const SolverConfig& cfg);

/// Rational function P(z) / Q(z) with Q(0) = 1.
struct PadeApproximant {
    std::vector<Complex> num;
    std::vector<Complex> den;

    int p() const { return static_cast<int>(num.size()) - 1; }
    int q() const { return static_cast<int>(den.size()) - 1; }
    /// Taylor coefficients of P / Q through z^order.
    std::vector<Complex> taylor(int order) const;
};

/// Thrown for a singular Pade system.
class PadeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// [p/q] approximant of a series given by its z coefficients.
PadeApproximant pade(const std::vector<Complex>& z_coeffs, int p, int q);
PadeApproximant pade(const SeriesCoeffs& series, int p, int q);

struct PadeValue {
    Complex value{};
    /// A zero of Q lies on the segment from 0 to z (or Q(z) vanishes).
    bool pole_crossing = false;
};

PadeValue evaluate(const PadeApproximant& approx, double lambda);

/// Staircase [1/1], [2/1], [2/2] limited by the available coefficients.
std::vector<std::pair<int, int>> pade_staircase(int max_order);

}  // namespace ringmix
