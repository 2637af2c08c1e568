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
#include <set>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/model.hpp"
#include "support.hpp"

using namespace ringmix;
using ringmix::test::to_dense;

TEST_SUITE("fock_blocks") {

TEST_CASE("sector sizes of small truncations") {
    CHECK(build_block_map({1, 1}, 0)->size() == 1);
    CHECK(build_block_map({2, 1}, 0)->size() == 6);
    const auto m2 = build_block_map({2, 1}, 2);
    REQUIRE(m2->size() == 1);
    const BasisElement e = m2->element(0);
    CHECK(e.a1 == 1);
    CHECK(e.b1 == 0);
    CHECK(e.a2 == 0);
    CHECK(e.b2 == 1);
    CHECK(build_block_map({2, 1}, 3)->empty());
}

TEST_CASE("invalid truncations are rejected") {
    CHECK_THROWS_AS(build_block_map({0, 1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_block_map({2, 0}, 0), std::invalid_argument);
}

TEST_CASE("enumeration is complete, ordered and k-consistent") {
    const TruncationConfig t{4, 3};
    std::size_t total = 0;
    for (int k = -6; k <= 6; ++k) {
        const auto m = build_block_map(t, k);
        total += m->size();
        CHECK(m->size() == build_block_map(t, -k)->size());
        std::set<BasisElement> seen;
        BasisElement prev{};
        for (std::size_t i = 0; i < m->size(); ++i) {
            const BasisElement e = m->element(i);
            CHECK(e.sector() == k);
            CHECK(e.adjoint().sector() == -k);
            CHECK(e.within(t));
            CHECK(m->index_of(e) == static_cast<std::ptrdiff_t>(i));
            if (i > 0) {
                auto key = [](const BasisElement& x) { return std::tuple(x.a1, x.b1, x.a2, x.b2, x.c1, x.c2); };
                CHECK(key(prev) < key(e));
            }
            prev = e;
            seen.insert(e);
        }
        CHECK(seen.size() == m->size());
    }
    // every unit of the full space sits in exactly one sector
    const std::size_t dim = static_cast<std::size_t>(t.n * t.n * t.n_c);
    CHECK(total == dim * dim);
}

TEST_CASE("V_0 grows like n^3 n_c^2") {
    for (int n : {3, 6, 10}) {
        const auto m = build_block_map({n, 2}, 0);
        // sum over a1-a2 = b1-b2 = d of (n-|d|)^2
        std::size_t blocks = 0;
        for (int d = -(n - 1); d <= n - 1; ++d) blocks += static_cast<std::size_t>((n - std::abs(d)) * (n - std::abs(d)));
        CHECK(m->block_count() == blocks);
        CHECK(m->size() == blocks * 4);
    }
}

TEST_CASE("builds are deterministic") {
    const auto x = build_block_map({5, 3}, 1);
    const auto y = build_block_map({5, 3}, 1);
    REQUIRE(x->size() == y->size());
    for (std::size_t i = 0; i < x->size(); ++i) CHECK(x->element(i) == y->element(i));
}

TEST_CASE("adjoint map") {
    const TruncationConfig t{3, 2};
    const BlockState vac = vacuum_projector(t);
    const BlockState vac2 = adjoint_map(vac);
    CHECK(vac2.sector() == 0);
    CHECK((vac2.data - vac.data).norm() == 0.0);

    BlockState x = zero_state(t, 1);
    x[{1, 0, 0, 0, 0, 0}] = 1.0;
    const BlockState y = adjoint_map(x);
    CHECK(y.sector() == -1);
    CHECK(y[BasisElement{0, 0, 0, 1, 0, 0}] == Complex(1.0));
    CHECK(y.data.norm() == doctest::Approx(1.0));

    std::mt19937 rng(3);
    const BlockState r = test::random_state(t, 0, rng);
    const BlockState rr = adjoint_map(adjoint_map(r));
    CHECK((rr.data - r.data).norm() == 0.0);
    BlockState h = r;
    h.data += adjoint_map(r).data;
    const Eigen::MatrixXcd hd = to_dense(h);
    CHECK((hd - hd.adjoint()).norm() < 1e-14);

    const BlockState r2 = test::random_state(t, 2, rng);
    const Eigen::MatrixXcd d = to_dense(adjoint_map(r2));
    CHECK((d - to_dense(r2).adjoint()).norm() < 1e-14);
}

TEST_CASE("ladder actions on simple states") {
    const TruncationConfig t{3, 2};
    const BlockState vac = vacuum_projector(t);
    const BlockState av = mode_action(vac, ModeAction::ALeft);
    CHECK(av.sector() == -1);
    CHECK(av.data.norm() == 0.0);

    BlockState one = zero_state(t, 0);
    one[{1, 0, 0, 1, 0, 0}] = 1.0;
    const BlockState a1 = mode_action(one, ModeAction::ALeft);
    CHECK(a1[BasisElement{0, 0, 0, 1, 0, 0}] == Complex(1.0));
    CHECK(a1.data.norm() == doctest::Approx(1.0));

    BlockState two = zero_state(t, 0);
    two[{2, 0, 0, 2, 0, 0}] = 1.0;
    CHECK(std::abs(mode_action(two, ModeAction::ALeft)[BasisElement{1, 0, 0, 2, 0, 0}] - std::sqrt(2.0)) < 1e-15);
    // a^dagger pushes level 2 out of a 3-level cutoff
    CHECK(multiply(two, Mode::A, Ladder::Raise, Side::Left).data.norm() == 0.0);
}

TEST_CASE("sector shifts of the mode actions") {
    const TruncationConfig t{3, 2};
    std::mt19937 rng(5);
    const BlockState x = test::random_state(t, 0, rng);
    CHECK(mode_action(x, ModeAction::ALeft).sector() == -1);
    CHECK(mode_action(x, ModeAction::ADagRight).sector() == 1);
    CHECK(mode_action(x, ModeAction::ADagCommutator).sector() == 1);
    CHECK(mode_action(x, ModeAction::BLeft).sector() == 1);
    CHECK(mode_action(x, ModeAction::BDagRight).sector() == -1);
    CHECK(mode_action(x, ModeAction::BDagCommutator).sector() == -1);
    CHECK(mode_action(x, ModeAction::CLeft).sector() == 0);
    CHECK(mode_action(x, ModeAction::CDagRight).sector() == 0);
    CHECK(mode_action(x, ModeAction::CDagCommutator).sector() == 0);
}

TEST_CASE("mode actions match dense products") {
    const TruncationConfig t{3, 3};
    std::mt19937 rng(11);
    const Eigen::MatrixXcd a = test::dense_lower(t, Mode::A);
    const Eigen::MatrixXcd b = test::dense_lower(t, Mode::B);
    const Eigen::MatrixXcd c = test::dense_lower(t, Mode::C);
    for (int k : {-1, 0, 2}) {
        const BlockState x = test::random_state(t, k, rng);
        const Eigen::MatrixXcd X = to_dense(x);
        auto check = [&](ModeAction act, const Eigen::MatrixXcd& expect) {
            const BlockState y = mode_action(x, act);
            CHECK((to_dense(y) - expect).norm() < 1e-12);
            // nothing of the dense product leaks outside the output sector
            CHECK((test::from_dense(expect, t, y.sector()).data - y.data).norm() < 1e-12);
        };
        check(ModeAction::ALeft, a * X);
        check(ModeAction::ADagRight, X * a.adjoint());
        check(ModeAction::ADagCommutator, a.adjoint() * X - X * a.adjoint());
        check(ModeAction::BLeft, b * X);
        check(ModeAction::BDagRight, X * b.adjoint());
        check(ModeAction::BDagCommutator, b.adjoint() * X - X * b.adjoint());
        check(ModeAction::CLeft, c * X);
        check(ModeAction::CDagRight, X * c.adjoint());
        check(ModeAction::CDagCommutator, c.adjoint() * X - X * c.adjoint());
    }
}

TEST_CASE("traces and expectation values") {
    const TruncationConfig t{3, 2};
    const BlockState vac = vacuum_projector(t);
    CHECK(trace(vac) == Complex(1.0));
    CHECK(std::abs(expect(Observable::NumberA, vac)) == 0.0);

    std::mt19937 rng(17);
    const Eigen::MatrixXcd rho = test::random_density(t, rng);
    const BlockState x = test::from_dense(rho, t, 0);
    const Eigen::MatrixXcd a = test::dense_lower(t, Mode::A);
    const Eigen::MatrixXcd b = test::dense_lower(t, Mode::B);
    const Eigen::MatrixXcd c = test::dense_lower(t, Mode::C);
    CHECK(std::abs(trace(x) - 1.0) < 1e-14);
    CHECK(std::abs(expect(Observable::NumberA, x) - (a.adjoint() * a * rho).trace()) < 1e-14);
    CHECK(std::abs(expect(Observable::NumberB, x) - (b.adjoint() * b * rho).trace()) < 1e-14);
    CHECK(std::abs(expect(Observable::NumberC, x) - (c.adjoint() * c * rho).trace()) < 1e-14);
    CHECK(std::abs(expect(Observable::PairAB, x) - (a * b * rho).trace()) < 1e-14);

    // Tr(a^dag (a rho)) through the sector machinery
    const BlockState ax = mode_action(x, ModeAction::ALeft);
    CHECK(std::abs(trace_product(ax, Mode::A, Ladder::Raise) - (a.adjoint() * a * rho).trace()) < 1e-14);
    // Tr(a X) needs X on V_{+1}
    const BlockState xr = mode_action(x, ModeAction::ADagRight);
    CHECK(std::abs(trace_product(xr, Mode::A, Ladder::Lower) - (a * rho * a.adjoint()).trace()) < 1e-14);
}

TEST_CASE("sector mismatches are rejected") {
    const TruncationConfig t{3, 2};
    const BlockState x = zero_state(t, 1);
    CHECK_THROWS_AS(trace(x), std::invalid_argument);
    CHECK_THROWS_AS(expect(Observable::NumberA, x), std::invalid_argument);
    CHECK_THROWS_AS(trace_product(vacuum_projector(t), Mode::A, Ladder::Lower), std::invalid_argument);
    CHECK_THROWS_AS((void)BlockState(build_block_map(t, 0), Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("generated couplings never leave their sector") {
    std::mt19937 rng(23);
    const ModelParams p = test::moderate_params(rng);
    for (auto kind : {HamiltonianKind::H3s, HamiltonianKind::H5s, HamiltonianKind::H3, HamiltonianKind::H5,
                      HamiltonianKind::HJ1, HamiltonianKind::PrecondDrive}) {
        const TruncationConfig t = effective_truncation(kind, {4, 3});
        for (int k = -3; k <= 3; ++k) {
            const CouplingList cl = build_hamiltonian(kind, p, t, k);
            for (const auto& c : cl.couplings()) {
                CHECK(c.source.sector() == k);
                CHECK(c.destination.sector() == k);
            }
        }
    }
}

}  // TEST_SUITE
