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

#include "ringmix/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ringmix/ndpa.hpp"

namespace ringmix {

void SolveLog::add(std::string label, SolveReport report) {
    labels.push_back(std::move(label));
    reports.push_back(std::move(report));
}

int SolveLog::total_iterations() const {
    int total = 0;
    for (const auto& r : reports) total += r.iterations;
    return total;
}

double SolveLog::worst_residual() const {
    double worst = 0.0;
    for (const auto& r : reports) worst = std::max(worst, r.residual);
    return worst;
}

BlockState rhs_b_rho(const BlockState& rho) { return mode_action(rho, ModeAction::BLeft); }

BlockState rhs_rho_adag(const BlockState& rho) { return mode_action(rho, ModeAction::ADagRight); }

BlockState rhs_gain(const BlockState& rho, double kappa_a) {
    BlockState x = mode_action(rho, ModeAction::ADagCommutator);
    x.data *= -std::sqrt(kappa_a);
    return x;
}

MomentSet moments_from(const BlockState& y_b, const BlockState& y_a, double kappa_a, double kappa_b,
                       double omega) {
    const Complex tr_a_yb = trace_product(y_b, Mode::A, Ladder::Lower);
    const Complex tr_bdag_ya = trace_product(y_a, Mode::B, Ladder::Raise);
    const Complex tr_a_ya = trace_product(y_a, Mode::A, Ladder::Lower);
    const Complex tr_bdag_yb = trace_product(y_b, Mode::B, Ladder::Raise);
    MomentSet m;
    m.omega = omega;
    m.m_ab = -std::sqrt(kappa_a * kappa_b) * (tr_a_yb + std::conj(tr_bdag_ya));
    m.n_a = -2.0 * kappa_a * tr_a_ya.real();
    m.n_b = -2.0 * kappa_b * tr_bdag_yb.real();
    return m;
}

Complex gain_ratio_from(const BlockState& rho1, double kappa_a) {
    return std::sqrt(kappa_a) * trace_product(rho1, Mode::A, Ladder::Lower) - 1.0;
}

namespace {

BlockState solve_logged(const char* label, HamiltonianKind kind, const ModelParams& p,
                        const TruncationConfig& trunc, double omega, const BlockState& rhs,
                        const BlockState& guess, const SolverConfig& cfg, SolveLog* log) {
    SolveReport report;
    BlockState x = resolvent_solve(kind, p, trunc, omega, rhs, &guess, cfg, &report);
    if (log) log->add(label, std::move(report));
    return x;
}

}  // namespace

ResponseStates solve_response(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in,
                              double omega, const SolverConfig& cfg, SolveLog* log) {
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    SolveReport report;
    BlockState rho = steady_state(kind, p, trunc, cfg, &report);
    if (log) log->add("steady", std::move(report));

    const BlockState rb = rhs_b_rho(rho);
    const BlockState ra = rhs_rho_adag(rho);
    const BlockState rg = rhs_gain(rho, p.kappa_a);
    BlockState yb = solve_logged("resolvent_b", kind, p, trunc, omega, rb,
                                 initial_guess(GuessKind::ResolventB, kind, p, trunc, omega), cfg, log);
    BlockState ya = solve_logged("resolvent_a", kind, p, trunc, omega, ra,
                                 initial_guess(GuessKind::ResolventA, kind, p, trunc, omega), cfg, log);
    BlockState r1 = solve_logged("gain_rho1", kind, p, trunc, 0.0, rg,
                                 initial_guess(GuessKind::GainRho1, kind, p, trunc, 0.0), cfg, log);
    return {std::move(rho), std::move(yb), std::move(ya), std::move(r1)};
}

MomentSet output_moments(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in,
                         double omega, const SolverConfig& cfg, SolveLog* log) {
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    SolveReport report;
    const BlockState rho = steady_state(kind, p, trunc, cfg, &report);
    if (log) log->add("steady", std::move(report));
    const BlockState yb = solve_logged("resolvent_b", kind, p, trunc, omega, rhs_b_rho(rho),
                                       initial_guess(GuessKind::ResolventB, kind, p, trunc, omega), cfg, log);
    const BlockState ya = solve_logged("resolvent_a", kind, p, trunc, omega, rhs_rho_adag(rho),
                                       initial_guess(GuessKind::ResolventA, kind, p, trunc, omega), cfg, log);
    return moments_from(yb, ya, p.kappa_a, p.kappa_b, omega);
}

SqueezingResult squeezing(const MomentSet& m) {
    SqueezingResult s;
    s.delta_min = 2.0 * (m.n_a + m.n_b + 1.0 - 2.0 * std::abs(m.m_ab));
    if (!(s.delta_min > 0.0)) throw std::domain_error("unphysical moments: delta_min <= 0");
    s.s_db = 10.0 * std::log10(2.0 / s.delta_min);
    s.phi_star = m.m_ab == Complex{} ? 0.0 : -std::arg(m.m_ab);
    return s;
}

GainResult gain_from_ratio(Complex ratio, double g0_db) {
    GainResult g;
    g.ratio = ratio;
    g.g_db = 10.0 * std::log10(std::norm(ratio));
    g.g0_db = g0_db;
    if (g0_db > 0.0) g.reduction = (g.g_db - g0_db) / g0_db;
    return g;
}

GainResult gain(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in,
                const SolverConfig& cfg, double g0_db, SolveLog* log) {
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    SolveReport report;
    const BlockState rho = steady_state(kind, p, trunc, cfg, &report);
    if (log) log->add("steady", std::move(report));
    const BlockState r1 = solve_logged("gain_rho1", kind, p, trunc, 0.0, rhs_gain(rho, p.kappa_a),
                                       initial_guess(GuessKind::GainRho1, kind, p, trunc, 0.0), cfg, log);
    return gain_from_ratio(gain_ratio_from(r1, p.kappa_a), g0_db);
}

PointResult evaluate_point(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in,
                           double omega, const SolverConfig& cfg, double g0_db) {
    PointResult r;
    r.g0_db = g0_db;
    r.epsilon = p.epsilon;
    r.trunc = effective_truncation(kind, trunc_in);
    try {
        const ResponseStates s = solve_response(kind, p, r.trunc, omega, cfg, &r.log);
        r.moments = moments_from(s.y_b, s.y_a, p.kappa_a, p.kappa_b, omega);
        r.gain = gain_from_ratio(gain_ratio_from(s.rho1, p.kappa_a), g0_db);
        try {
            r.squeezing = squeezing(r.moments);
            r.status = "ok";
        } catch (const std::domain_error& e) {
            r.status = e.what();
        }
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.status = e.what();
    }
    return r;
}

TruncationConfig sweep_truncation(HamiltonianKind kind, double g0_db, double beta, const SweepOptions& opt) {
    TruncationConfig t = default_truncation(std::max(g0_db, 0.0), beta);
    if (opt.n) t.n = *opt.n;
    if (opt.n_c) t.n_c = *opt.n_c;
    return effective_truncation(kind, t);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& f) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::vector<PointResult> sweep(HamiltonianKind kind, const ModelParams& p, const std::vector<double>& g0_list,
                               const SweepOptions& opt, const SolverConfig& cfg) {
    std::vector<PointResult> out(g0_list.size());
    parallel_for(g0_list.size(), opt.jobs, [&](std::size_t i) {
        const double g0 = g0_list[i];
        ModelParams q = p;
        try {
            q.epsilon = expected_gain_to_pump(g0, p);
        } catch (const std::exception& e) {
            out[i].g0_db = g0;
            out[i].status = e.what();
            return;
        }
        out[i] = evaluate_point(kind, q, sweep_truncation(kind, g0, p.beta, opt), opt.omega, cfg, g0);
    });
    return out;
}

std::vector<PointResult> sweep_epsilon(HamiltonianKind kind, const ModelParams& p,
                                       const std::vector<double>& epsilons, const SweepOptions& opt,
                                       const SolverConfig& cfg) {
    std::vector<PointResult> out(epsilons.size());
    parallel_for(epsilons.size(), opt.jobs, [&](std::size_t i) {
        ModelParams q = p;
        q.epsilon = epsilons[i];
        const NdpaParams np = NdpaParams::from_model(q);
        if (!np.below_threshold() || !(q.epsilon >= 0.0)) {
            out[i].epsilon = q.epsilon;
            out[i].status = "pump at or above the NDPA threshold";
            return;
        }
        const double g0 = ndpa_gain(np);
        out[i] = evaluate_point(kind, q, sweep_truncation(kind, g0, p.beta, opt), opt.omega, cfg, g0);
    });
    return out;
}

}  // namespace ringmix
