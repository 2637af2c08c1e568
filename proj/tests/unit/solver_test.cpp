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

#include <random>

#include "ringmix/dense_oracle.hpp"
#include "ringmix/liouvillian.hpp"
#include "ringmix/ndpa.hpp"
#include "ringmix/solver.hpp"
#include "support.hpp"

using namespace ringmix;

namespace {

LinearOperator matrix_op(const Eigen::MatrixXcd& a) {
    return [a](const Vector& x, Vector& y) { y = a * x; };
}

const HamiltonianKind kModelKinds[] = {HamiltonianKind::H3s, HamiltonianKind::H5s, HamiltonianKind::H3,
                                       HamiltonianKind::H5, HamiltonianKind::HJ1};

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("identity system") {
    std::mt19937 rng(301);
    std::normal_distribution<double> g;
    Vector b(17);
    for (auto& v : b) v = Complex(g(rng), g(rng));
    SolveReport rep;
    const Vector x = bicgstab(matrix_op(Eigen::MatrixXcd::Identity(17, 17)), b, Vector::Zero(17), nullptr, {}, &rep);
    CHECK((x - b).norm() <= 1e-14 * b.norm());
    CHECK(rep.iterations <= 1);
    CHECK(rep.converged);
}

TEST_CASE("random diagonally dominant system against a direct solve") {
    std::mt19937 rng(302);
    std::normal_distribution<double> g;
    const int n = 200;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng)) / double(n);
    for (int i = 0; i < n; ++i) a(i, i) += Complex(3.0 + g(rng), g(rng));
    Vector b(n);
    for (auto& v : b) v = Complex(g(rng), g(rng));
    const Vector direct = a.partialPivLu().solve(b);
    for (bool strict : {false, true}) {
        SolverConfig cfg;
        cfg.strict_reduction = strict;
        SolveReport rep;
        const Vector x = bicgstab(matrix_op(a), b, Vector::Zero(n), nullptr, cfg, &rep);
        CHECK(test::rel_diff(x, direct) < 1e-9);
        CHECK(rep.residual <= 1e-10);
        CHECK((b - a * x).norm() / b.norm() == doctest::Approx(rep.residual).epsilon(1e-3));
    }
    // a Jacobi preconditioner still reports the true residual
    const Vector d = a.diagonal();
    const LinearOperator jac = [d](const Vector& r, Vector& z) { z = r.cwiseQuotient(d); };
    SolveReport rep;
    const Vector x = bicgstab(matrix_op(a), b, Vector::Zero(n), &jac, {}, &rep);
    CHECK((b - a * x).norm() / b.norm() <= 1e-10);
}

TEST_CASE("breakdown and iteration limit are reported separately") {
    Eigen::MatrixXcd rot(2, 2);
    rot << 0, 1, -1, 0;
    Vector b(2);
    b << 1, 0;
    try {
        bicgstab(matrix_op(rot), b, Vector::Zero(2), nullptr, {});
        FAIL("expected breakdown");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::Breakdown);
        CHECK(e.report().restarts == 1);
    }

    std::mt19937 rng(303);
    std::normal_distribution<double> g;
    const int n = 60;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    Vector c(n);
    for (auto& v : c) v = Complex(g(rng), 0.0);
    SolverConfig cfg;
    cfg.max_iter = 3;
    try {
        bicgstab(matrix_op(a), c, Vector::Zero(n), nullptr, cfg);
        FAIL("expected iteration limit");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::MaxIterations);
        CHECK(e.best_iterate().size() == n);
        const double best = (c - a * e.best_iterate()).norm() / c.norm();
        CHECK(best == doctest::Approx(*std::min_element(e.report().history.begin(), e.report().history.end())).epsilon(1e-6));
    }
    CHECK_THROWS_AS(bicgstab(matrix_op(a), c, Vector::Zero(n - 1), nullptr, {}), std::invalid_argument);
}

TEST_CASE("strict mode is bit-reproducible") {
    std::mt19937 rng(304);
    const ModelParams p = test::moderate_params(rng);
    SolverConfig cfg;
    cfg.strict_reduction = true;
    SolveReport r1, r2;
    const BlockState x1 = steady_state(HamiltonianKind::H3, p, {5, 4}, cfg, &r1);
    const BlockState x2 = steady_state(HamiltonianKind::H3, p, {5, 4}, cfg, &r2);
    CHECK(r1.history == r2.history);
    CHECK((x1.data - x2.data).norm() == 0.0);
}

TEST_CASE("reference solve without interaction is exact") {
    std::mt19937 rng(305);
    const ModelParams p = test::moderate_params(rng);
    const TruncationConfig t{4, 4};
    for (int k : {0, 1, -2}) {
        const SuperOp op = make_superop(HamiltonianKind::PrecondDrive, p, t, k, Complex(0, 0.3 * p.kappa_a));
        const SectorSystem sys(op, 0.0, PrecondKind::GaussSeidel);
        const BlockState r = test::random_state(t, k, rng);
        Vector z(r.size()), y(r.size());
        sys.precondition(r.data, z);
        sys.apply(z, y);
        CHECK((y - r.data).norm() / r.data.norm() < 1e-12);
    }
    // regularized V_0 at zero shift
    const SuperOp op0 = make_superop(HamiltonianKind::PrecondDrive, p, t, 0);
    const SectorSystem sys0(op0, p.kappa_a, PrecondKind::GaussSeidel);
    const BlockState r = test::random_state(t, 0, rng);
    Vector z(r.size()), y(r.size());
    sys0.precondition(r.data, z);
    sys0.apply(z, y);
    CHECK((y - r.data).norm() / r.data.norm() < 1e-12);
}

TEST_CASE("preconditioner is linear and inverts the structured part") {
    std::mt19937 rng(306);
    const ModelParams p = test::moderate_params(rng);
    const TruncationConfig t{3, 3};
    const SuperOp op = make_superop(HamiltonianKind::H3, p, t, 1, Complex(0, 0.2 * p.kappa_a));
    const RedBlackPreconditioner m(op, 0.0, PrecondKind::GaussSeidel);
    const BlockState x = test::random_state(t, 1, rng);
    const BlockState y = test::random_state(t, 1, rng);
    Vector mx(x.size()), my(x.size()), mz(x.size());
    m.apply(x.data, mx);
    m.apply(y.data, my);
    const Complex al(0.7, 0.1), be(-1.1, 2.0);
    m.apply(al * x.data + be * y.data, mz);
    CHECK(test::rel_diff(mz, al * mx + be * my) < 1e-13);

    Vector rx(x.size()), back(x.size());
    op.apply_reference(x.data, rx);
    m.reference_solve(rx, back);
    CHECK(test::rel_diff(back, x.data) < 1e-12);
}

TEST_CASE("steady state of an undriven system is the vacuum") {
    ModelParams p = ModelParams::reference_point(3.0);
    for (auto kind : kModelKinds) {
        const TruncationConfig t = effective_truncation(kind, {4, 3});
        SolveReport rep;
        const BlockState x = steady_state(kind, p, t, {}, &rep);
        CHECK((x.data - vacuum_projector(t).data).norm() < 1e-12);
    }
}

TEST_CASE("steady state against the dense null space") {
    std::mt19937 rng(307);
    for (int seed = 0; seed < 3; ++seed) {
        const ModelParams p = test::moderate_params(rng);
        for (auto kind : kModelKinds) {
            const TruncationConfig t = effective_truncation(kind, {3, 3});
            const DenseOracle o = dense_oracle(kind, p, t);
            Eigen::VectorXcd ref = o.steady_state_svd();
            SolveReport rep;
            const BlockState x = steady_state(kind, p, t, {}, &rep);
            CHECK(rep.residual <= 1e-10);
            const BlockState xr = o.restrict(ref, x.map);
            CHECK((x.data - xr.data).cwiseAbs().maxCoeff() < 1e-8);
            CHECK(std::abs(trace(x) - 1.0) < 1e-13);
            const Eigen::MatrixXcd d = test::to_dense(x);
            CHECK((d - d.adjoint()).norm() < 1e-13);
            CHECK(smallest_eigenvalue(x) > -1e-8);
        }
    }
}

TEST_CASE("two-mode steady state reproduces the analytic occupation") {
    ModelParams p = ModelParams::reference_point(3.0);
    for (double g0 : {4.0, 10.0, 14.0}) {
        p.epsilon = expected_gain_to_pump(g0, p);
        const BlockState x = steady_state(HamiltonianKind::H3s, p, {40, 1}, {});
        const double ref = steady_covariance(NdpaParams::from_model(p)).s1 - 0.5;
        CHECK(std::abs(expect(Observable::NumberA, x).real() - ref) <= 1e-3 * ref);
    }
}

TEST_CASE("resolvent solves against the dense oracle") {
    std::mt19937 rng(308);
    const ModelParams p = test::moderate_params(rng);
    for (auto kind : kModelKinds) {
        const TruncationConfig t = effective_truncation(kind, {3, 3});
        const DenseOracle o = dense_oracle(kind, p, t);
        for (auto [k, w] : {std::pair{1, 0.0}, std::pair{1, 0.6 * p.kappa_a}, std::pair{-1, 0.2 * p.kappa_a},
                            std::pair{0, 0.5 * p.kappa_a}}) {
            const BlockState rhs = test::random_state(t, k, rng);
            SolveReport rep;
            const BlockState x = resolvent_solve(kind, p, t, w, rhs, nullptr, {}, &rep);
            CHECK(rep.residual <= 1e-10);
            const BlockState ref = o.restrict(o.solve(o.embed(rhs), Complex(0, w)), rhs.map);
            CHECK(test::rel_diff(x.data, ref.data) < 1e-8);
        }
        const BlockState zero = zero_state(t, 1);
        CHECK(resolvent_solve(kind, p, t, 0.0, zero, nullptr, {}).data.norm() == 0.0);
    }
}

TEST_CASE("adjoint shortcut for V_-1 solves") {
    std::mt19937 rng(309);
    const ModelParams p = test::moderate_params(rng);
    const TruncationConfig t{4, 3};
    for (double w : {0.0, 0.35 * p.kappa_a}) {
        const BlockState rhs = test::random_state(t, -1, rng);
        SolverConfig cfg;
        cfg.rel_tol = 1e-13;
        const BlockState direct = resolvent_solve(HamiltonianKind::HJ1, p, t, w, rhs, nullptr, cfg);
        const BlockState via = resolvent_solve_adjoint(HamiltonianKind::HJ1, p, t, w, rhs, cfg);
        CHECK(via.sector() == -1);
        CHECK(test::rel_diff(via.data, direct.data) < 1e-10);
    }
}

TEST_CASE("V_0 resolvent at zero frequency needs a traceless rhs") {
    const ModelParams p = ModelParams::reference_point(3.0);
    const TruncationConfig t{3, 2};
    CHECK_THROWS_AS(resolvent_solve(HamiltonianKind::H3, p, t, 0.0, vacuum_projector(t), nullptr, {}),
                    std::invalid_argument);
}

TEST_CASE("preconditioning reduces the iteration count") {
    ModelParams p = ModelParams::reference_point(3.0);
    p.epsilon = expected_gain_to_pump(8.0, p);
    const TruncationConfig t{6, 6};
    const BlockState guess = initial_guess(GuessKind::Steady, HamiltonianKind::H3, p, t, 0.0);
    SolverConfig with, without;
    without.precond = PrecondKind::None;
    SolveReport r1, r2, r3;
    solve_steady(make_superop(HamiltonianKind::H3, p, t, 0), p.kappa_a, guess, with, &r1);
    solve_steady(make_superop(HamiltonianKind::H3, p, t, 0), p.kappa_a, guess, without, &r2);
    SolverConfig jacobi;
    jacobi.precond = PrecondKind::BlockJacobi;
    solve_steady(make_superop(HamiltonianKind::H3, p, t, 0), p.kappa_a, guess, jacobi, &r3);
    CHECK(r1.iterations < r2.iterations);
    CHECK(r1.iterations <= r3.iterations);
    CHECK(r1.residual <= 1e-10);
    CHECK(r2.residual <= 1e-10);
}

TEST_CASE("dense oracle self-consistency") {
    std::mt19937 rng(310);
    const ModelParams p = test::moderate_params(rng);
    const DenseOracle o = dense_oracle(HamiltonianKind::H3, p, {3, 2});
    const Eigen::VectorXcd ss = o.steady_state();
    CHECK(std::abs(o.unvec(ss).trace() - 1.0) < 1e-12);
    CHECK((ss - o.steady_state_svd()).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::VectorXcd ev = o.eigenvalues();
    CHECK(ev.real().maxCoeff() <= 1e-10 * p.kappa_a);
    // operator-product form and the superoperator matrix agree
    std::normal_distribution<double> g;
    Eigen::MatrixXcd x(o.dimension(), o.dimension());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) x(i, j) = Complex(g(rng), g(rng));
    const Eigen::VectorXcd vx = Eigen::Map<const Eigen::VectorXcd>(Eigen::MatrixXcd(x.transpose()).data(), x.size());
    const Eigen::MatrixXcd lx = o.unvec(o.liouvillian() * vx);
    CHECK((lx - o.apply(x)).norm() < 1e-12 * lx.norm());
    CHECK_THROWS_AS(dense_oracle(HamiltonianKind::H3, p, {6, 5}), std::invalid_argument);
}

TEST_CASE("sector matrix equals the dense sub-block") {
    std::mt19937 rng(311);
    const ModelParams p = test::moderate_params(rng);
    const TruncationConfig t{3, 3};
    const DenseOracle o = dense_oracle(HamiltonianKind::HJ1, p, t);
    const Eigen::MatrixXcd full = o.dense();
    for (int k : {0, 1}) {
        const BlockMapPtr map = build_block_map(t, k);
        const Eigen::MatrixXcd sub = o.sector_matrix(*map);
        double worst = 0.0;
        for (std::size_t i = 0; i < map->size(); ++i)
            for (std::size_t j = 0; j < map->size(); ++j)
                worst = std::max(worst, std::abs(sub(i, j) - full(o.embed(map->element(i)), o.embed(map->element(j)))));
        CHECK(worst == 0.0);
    }
}

}  // TEST_SUITE
