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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ringmix/solver.hpp"

namespace ringmix {

// The pump block operator L_c is shared by every (a1, b1, a2, b2) block; block B
// only adds the scalar s_B. One complex Schur form L_c = Q T Q^* therefore gives
// all inner solves as triangular solves with T + s_B.
struct RedBlackPreconditioner::Impl {
    struct Group {
        Eigen::Index start;
        Eigen::Index count;
        Complex s;
    };
    struct Color {
        std::vector<std::size_t> order;  // block indices in processing order
        std::vector<Group> groups;
    };

    const SuperOp* op = nullptr;
    PrecondKind kind = PrecondKind::GaussSeidel;
    Eigen::Index m = 0;
    int nc = 0;
    Eigen::MatrixXcd q;
    Eigen::MatrixXcd t;
    Color colors[2];
    std::vector<Eigen::Index> position;  // column of each block inside its color's workspace

    double eta = 0.0;
    std::ptrdiff_t special = -1;  // regularized vacuum block, solved in the original basis
    Eigen::PartialPivLU<Eigen::MatrixXcd> special_lu;
    std::vector<std::size_t> diagonal_blocks;

    void solve_color(int color, const Vector& r, Vector& z) const;
};

namespace {

bool is_diagonal_block(const BlockIndexMap::Block& b) { return b.a1 == b.a2 && b.b1 == b.b2; }

}  // namespace

RedBlackPreconditioner::RedBlackPreconditioner(const SuperOp& op, double eta, PrecondKind kind)
    : impl_(std::make_unique<Impl>()) {
    auto& d = *impl_;
    if (!op.has_reference()) throw std::invalid_argument("preconditioner needs a structured reference part");
    d.op = &op;
    d.kind = kind;
    d.eta = eta;
    const auto& map = op.map();
    d.nc = map.truncation().n_c;
    d.m = static_cast<Eigen::Index>(map.inner_size());
    const Eigen::MatrixXcd lc = Eigen::MatrixXcd(op.pump_operator());
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(lc);
    if (schur.info() != Eigen::Success) throw std::runtime_error("preconditioner: Schur decomposition failed");
    d.q = schur.matrixU();
    d.t = schur.matrixT();

    const auto nb = map.block_count();
    if (eta > 0.0) {
        if (map.sector() != 0) throw std::invalid_argument("trace regularization applies to V_0 only");
        d.special = map.block_index(0, 0, 0, 0);
        for (std::size_t jb = 0; jb < nb; ++jb) {
            if (is_diagonal_block(map.block(jb)) && static_cast<std::ptrdiff_t>(jb) != d.special) {
                d.diagonal_blocks.push_back(jb);
            }
        }
        Eigen::MatrixXcd a = lc;
        a.diagonal().array() += op.block_scalar(static_cast<std::size_t>(d.special)) + op.shift();
        for (int c = 0; c < d.nc; ++c) a(0, c * d.nc + c) += eta;
        d.special_lu.compute(a);
        const double rc = d.special_lu.rcond();
        if (!std::isfinite(rc) || rc < 1e-14) {
            throw std::runtime_error("preconditioner: regularized vacuum block is singular");
        }
    }

    const double scale = d.t.cwiseAbs().maxCoeff() + std::abs(op.shift()) +
                         std::abs(op.block_scalar(nb - 1)) + 1e-300;
    d.position.assign(nb, -1);
    for (int color = 0; color < 2; ++color) {
        auto& c = d.colors[color];
        for (std::size_t jb = 0; jb < nb; ++jb) {
            if (map.block(jb).parity() == color && static_cast<std::ptrdiff_t>(jb) != d.special) {
                c.order.push_back(jb);
            }
        }
        auto key = [&](std::size_t jb) {
            const Complex s = op.block_scalar(jb);
            return std::make_tuple(-map.block(jb).level(), s.real(), s.imag());
        };
        std::stable_sort(c.order.begin(), c.order.end(),
                         [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
        for (std::size_t j = 0; j < c.order.size();) {
            std::size_t e = j;
            while (e < c.order.size() && key(c.order[e]) == key(c.order[j])) ++e;
            const Complex s = op.block_scalar(c.order[j]) + op.shift();
            for (Eigen::Index i = 0; i < d.m; ++i) {
                if (std::abs(d.t(i, i) + s) <= 1e-12 * scale) {
                    throw std::runtime_error("preconditioner: singular inner block");
                }
            }
            c.groups.push_back({static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(e - j), s});
            j = e;
        }
        for (std::size_t j = 0; j < c.order.size(); ++j) {
            d.position[c.order[j]] = static_cast<Eigen::Index>(j);
        }
    }
}

RedBlackPreconditioner::~RedBlackPreconditioner() = default;
RedBlackPreconditioner::RedBlackPreconditioner(RedBlackPreconditioner&&) noexcept = default;

void RedBlackPreconditioner::Impl::solve_color(int color, const Vector& r, Vector& z) const {
    const auto& c = colors[color];
    const auto k = static_cast<Eigen::Index>(c.order.size());
    if (k > 0) {
        Eigen::MatrixXcd w(m, k);
        for (Eigen::Index j = 0; j < k; ++j) {
            w.col(j) = r.segment(static_cast<Eigen::Index>(c.order[j]) * m, m);
        }
        Eigen::MatrixXcd v = q.adjoint() * w;
        Eigen::MatrixXcd shifted = t;
        for (const auto& g : c.groups) {
            for (Eigen::Index j = g.start; j < g.start + g.count; ++j) {
                const std::size_t jb = c.order[j];
                const auto ja = op->jump_a_source(jb);
                const auto jbb = op->jump_b_source(jb);
                if (ja >= 0) v.col(j) -= op->jump_a_weight(jb) * v.col(position[ja]);
                if (jbb >= 0) v.col(j) -= op->jump_b_weight(jb) * v.col(position[jbb]);
            }
            shifted.diagonal() = t.diagonal().array() + g.s;
            shifted.triangularView<Eigen::Upper>().solveInPlace(v.middleCols(g.start, g.count));
        }
        w.noalias() = q * v;
        for (Eigen::Index j = 0; j < k; ++j) {
            z.segment(static_cast<Eigen::Index>(c.order[j]) * m, m) = w.col(j);
        }
    }
    if (color == 0 && special >= 0) {
        const auto s = static_cast<std::size_t>(special);
        Eigen::VectorXcd rhs = r.segment(special * m, m);
        const auto ja = op->jump_a_source(s);
        const auto jbb = op->jump_b_source(s);
        if (ja >= 0) rhs -= op->jump_a_weight(s) * z.segment(ja * m, m);
        if (jbb >= 0) rhs -= op->jump_b_weight(s) * z.segment(jbb * m, m);
        Complex tr{};
        for (std::size_t jb : diagonal_blocks) {
            for (int cc = 0; cc < nc; ++cc) tr += z[static_cast<Eigen::Index>(jb) * m + cc * nc + cc];
        }
        rhs[0] -= eta * tr;
        z.segment(special * m, m) = special_lu.solve(rhs);
    }
}

void RedBlackPreconditioner::reference_solve(const Vector& r, Vector& z) const {
    z.resize(r.size());
    impl_->solve_color(0, r, z);
    impl_->solve_color(1, r, z);
}

void RedBlackPreconditioner::apply(const Vector& r, Vector& z) const {
    const auto& d = *impl_;
    z.setZero(r.size());
    d.solve_color(0, r, z);
    if (d.kind == PrecondKind::GaussSeidel && !d.op->couplings().empty()) {
        Vector corrected;
        d.op->apply_couplings(z, corrected, false);
        corrected = r - corrected;
        d.solve_color(1, corrected, z);
    } else {
        d.solve_color(1, r, z);
    }
}

}  // namespace ringmix
