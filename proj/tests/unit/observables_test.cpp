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

#include "doctest.h"

#include <atomic>
#include <cmath>
#include <random>

#include "ringmix/dense_oracle.hpp"
#include "ringmix/ndpa.hpp"
#include "ringmix/observables.hpp"
#include "support.hpp"

using namespace ringmix;

namespace {

ModelParams at_gain(double g0, double beta = 3.0) {
    ModelParams p = ModelParams::reference_point(beta);
    p.epsilon = expected_gain_to_pump(g0, p);
    return p;
}

struct DenseMoments {
    MomentSet m;
    Complex ratio;
};

/// Output moments and amplitude ratio from direct sparse-LU solves on the full space.
DenseMoments dense_moments(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& t, double w) {
    const DenseOracle o = dense_oracle(kind, p, t);
    const auto ops = dense_mode_ops(t);
    const Eigen::MatrixXcd rho = o.unvec(o.steady_state());
    auto vec = [&](const Eigen::MatrixXcd& x) {
        Eigen::VectorXcd v(x.size());
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) v[static_cast<long>(i) * x.cols() + j] = x(i, j);
        return v;
    };
    const Eigen::MatrixXcd yb = o.unvec(o.solve(vec(ops.b * rho), Complex(0, w)));
    const Eigen::MatrixXcd ya = o.unvec(o.solve(vec(rho * ops.a.adjoint()), Complex(0, w)));
    const Eigen::MatrixXcd comm = ops.a.adjoint() * rho - rho * ops.a.adjoint();
    const Eigen::MatrixXcd r1 = o.unvec(o.solve(vec(-std::sqrt(p.kappa_a) * comm), 0.0));
    DenseMoments d;
    d.m.m_ab = -std::sqrt(p.kappa_a * p.kappa_b) * ((ops.a * yb).trace() + std::conj((ops.b.adjoint() * ya).trace()));
    d.m.n_a = -2 * p.kappa_a * (ops.a * ya).trace().real();
    d.m.n_b = -2 * p.kappa_b * (ops.b.adjoint() * yb).trace().real();
    d.ratio = std::sqrt(p.kappa_a) * (ops.a * r1).trace() - 1.0;
    return d;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("undriven system: vacuum output, no squeezing, unit gain") {
    const ModelParams p = ModelParams::reference_point(3.0);
    for (auto kind : {HamiltonianKind::H3s, HamiltonianKind::H3, HamiltonianKind::HJ1}) {
        const PointResult r = evaluate_point(kind, p, {4, 3}, 0.0, {}, 0.0);
        REQUIRE(r.ok);
        CHECK(std::abs(r.moments.n_a) < 1e-12);
        CHECK(std::abs(r.moments.n_b) < 1e-12);
        CHECK(std::abs(r.moments.m_ab) < 1e-12);
        REQUIRE(r.squeezing);
        CHECK(std::abs(r.squeezing->s_db) < 1e-10);
        CHECK(std::abs(r.gain.g_db) < 1e-10);
        CHECK(std::abs(r.gain.ratio - 1.0) < 1e-10);
        CHECK_FALSE(r.gain.reduction);
    }
}

TEST_CASE("squeezing from moments") {
    const SqueezingResult z = squeezing({});
    CHECK(z.delta_min == 2.0);
    CHECK(z.s_db == 0.0);

    NdpaParams np;
    np.g = 0.25;
    const NdpaMoments nm = ndpa_output_moments(np, 0.0);
    MomentSet m{nm.n_a, nm.n_b, nm.m_ab, 0.0};
    const SqueezingResult s = squeezing(m);
    CHECK(s.s_db == doctest::Approx(9.542).epsilon(1e-4));
    CHECK(s.delta_min < 2.0);
    for (double phi : {0.3, 1.9, -2.7}) {
        MomentSet r = m;
        r.m_ab *= std::polar(1.0, phi);
        const SqueezingResult q = squeezing(r);
        CHECK(q.s_db == doctest::Approx(s.s_db).epsilon(1e-14));
        CHECK(std::abs(std::polar(1.0, q.phi_star - s.phi_star + phi) - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(squeezing({0.0, 0.0, Complex(0.6, 0.0), 0.0}), std::domain_error);
}

TEST_CASE("gain record") {
    const GainResult g = gain_from_ratio(Complex(0.0, -std::sqrt(10.0)), 12.0);
    CHECK(g.g_db == doctest::Approx(10.0).epsilon(1e-14));
    REQUIRE(g.reduction);
    CHECK(*g.reduction == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("two-mode master equation reproduces the analytic amplifier") {
    for (double g0 : {2.0, 6.0, 10.0}) {
        const ModelParams p = at_gain(g0);
        const NdpaParams np = NdpaParams::from_model(p);
        for (double w : {0.0, 0.5 * p.kappa_a}) {
            const MomentSet m = output_moments(HamiltonianKind::H3s, p, {40, 1}, w, {});
            const NdpaMoments ref = ndpa_output_moments(np, w);
            CHECK(std::abs(m.n_a - ref.n_a) <= 1e-6 * ref.n_a);
            CHECK(std::abs(m.n_b - ref.n_b) <= 1e-6 * ref.n_b);
            CHECK(std::abs(m.m_ab - ref.m_ab) <= 1e-6 * std::abs(ref.m_ab));
        }
        const GainResult g = gain(HamiltonianKind::H3s, p, {40, 1}, {}, g0);
        CHECK(std::abs(g.g_db - ndpa_gain(np)) < 1e-8);
        CHECK(std::abs(g.ratio - scattering(np, 0.0).s11) < 1e-8 * std::abs(g.ratio));
    }
}

TEST_CASE("quantum-pump moments against dense direct solves") {
    std::mt19937 rng(401);
    for (auto kind : {HamiltonianKind::H3, HamiltonianKind::H5, HamiltonianKind::HJ1}) {
        const ModelParams p = test::moderate_params(rng);
        const TruncationConfig t{3, 3};
        const double w = 0.3 * p.kappa_a;
        const DenseMoments ref = dense_moments(kind, p, t, w);
        const MomentSet m = output_moments(kind, p, t, w, {});
        const double scale = std::max({ref.m.n_a, ref.m.n_b, std::abs(ref.m.m_ab)});
        CHECK(std::abs(m.n_a - ref.m.n_a) < 1e-8 * scale);
        CHECK(std::abs(m.n_b - ref.m.n_b) < 1e-8 * scale);
        CHECK(std::abs(m.m_ab - ref.m.m_ab) < 1e-8 * scale);
        const GainResult g = gain(kind, p, t, {});
        CHECK(std::abs(g.ratio - ref.ratio) < 1e-8 * std::abs(ref.ratio));
    }
}

TEST_CASE("moments are physical and witness entanglement") {
    std::mt19937 rng(402);
    for (int i = 0; i < 4; ++i) {
        const ModelParams p = test::moderate_params(rng);
        const PointResult r = evaluate_point(HamiltonianKind::HJ1, p, {5, 4}, 0.0, {});
        REQUIRE(r.ok);
        CHECK(r.moments.n_a >= -1e-10);
        CHECK(r.moments.n_b >= -1e-10);
        CHECK(std::norm(r.moments.m_ab) <= (r.moments.n_a + 1) * (r.moments.n_b + 1) * (1 + 1e-10));
        REQUIRE(r.squeezing);
        CHECK(r.squeezing->delta_min < 2.0);
        CHECK(r.log.worst_residual() <= 1e-10);
        CHECK(r.log.reports.size() == 4);
    }
}

TEST_CASE("V_-1 solve through the adjoint matches the V_+1 moments") {
    // <a_o^dag a_o> from (L + i w)^{-1}[a rho] on V_-1 equals the value from the V_+1 solve
    std::mt19937 rng(403);
    const ModelParams p = test::moderate_params(rng);
    const TruncationConfig t{4, 3};
    const double w = 0.2 * p.kappa_a;
    const BlockState rho = steady_state(HamiltonianKind::H3, p, t, {});
    SolverConfig cfg;
    cfg.rel_tol = 1e-12;
    const BlockState ya = resolvent_solve(HamiltonianKind::H3, p, t, w, rhs_rho_adag(rho), nullptr, cfg);
    const BlockState arho = mode_action(rho, ModeAction::ALeft);
    const BlockState ym = resolvent_solve_adjoint(HamiltonianKind::H3, p, t, -w, arho, cfg);
    const Complex via_plus = trace_product(ya, Mode::A, Ladder::Lower);
    const Complex via_minus = trace_product(ym, Mode::A, Ladder::Raise);
    CHECK(std::abs(via_plus - std::conj(via_minus)) < 1e-9 * std::abs(via_plus));
}

TEST_CASE("sweep records") {
    ModelParams p = ModelParams::reference_point(3.0);
    SweepOptions opt;
    opt.n = 30;
    opt.jobs = 2;
    const std::vector<PointResult> r = sweep(HamiltonianKind::H3s, p, {0.0, 3.0, 7.0}, opt, {});
    REQUIRE(r.size() == 3);
    CHECK(r[0].ok);
    CHECK(std::abs(r[0].squeezing->s_db) < 1e-10);
    CHECK(std::abs(r[0].gain.g_db) < 1e-10);
    for (std::size_t i = 1; i < r.size(); ++i) {
        REQUIRE(r[i].ok);
        CHECK(r[i].trunc == TruncationConfig{30, 1});
        const double x = 2 * std::abs(stiff_pump_g([&] { ModelParams q = p; q.epsilon = r[i].epsilon; return q; }())) / p.kappa_a;
        CHECK(r[i].squeezing->s_db == doctest::Approx(20 * std::log10((1 + x) / (1 - x))).epsilon(1e-5));
        CHECK(r[i].gain.g_db == doctest::Approx(r[i].g0_db).epsilon(1e-6));
    }
    const std::vector<PointResult> e =
        sweep_epsilon(HamiltonianKind::H3s, p, {0.5 * threshold_pump(p), 1.2 * threshold_pump(p)}, opt, {});
    CHECK(e[0].ok);
    CHECK_FALSE(e[1].ok);
    CHECK_FALSE(e[1].status.empty());

    CHECK(sweep_truncation(HamiltonianKind::HJ1, 10.0, 3.0, {}) == TruncationConfig{20, 20});
    SweepOptions o2;
    o2.n_c = 6;
    CHECK(sweep_truncation(HamiltonianKind::H3, 16.0, 3.0, o2) == TruncationConfig{30, 6});
    CHECK(sweep_truncation(HamiltonianKind::H5s, 16.0, 3.0, o2) == TruncationConfig{30, 1});
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    parallel_for(0, 3, [](std::size_t) { FAIL("no work expected"); });
}

}  // TEST_SUITE
