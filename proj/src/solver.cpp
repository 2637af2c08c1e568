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

#include "ringmix/solver.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ringmix/ndpa.hpp"

namespace ringmix {

SectorSystem::SectorSystem(SuperOp op, double eta, PrecondKind precond)
    : op_(std::make_unique<SuperOp>(std::move(op))), eta_(eta) {
    const auto& map = op_->map();
    if (eta_ > 0.0) {
        if (map.sector() != 0) throw std::invalid_argument("SectorSystem: regularization needs V_0");
        diag_ = map.diagonal_indices();
        vacuum_ = map.index_of({});
    } else if (map.sector() == 0 && op_->shift() == Complex{} && op_->has_reference()) {
        throw std::invalid_argument("SectorSystem: L is singular on V_0 without shift or regularization");
    }
    if (precond != PrecondKind::None && !map.empty()) {
        precond_ = std::make_unique<RedBlackPreconditioner>(*op_, eta_, precond);
    }
}

void SectorSystem::apply(const Vector& x, Vector& y) const {
    op_->apply(x, y);
    if (eta_ > 0.0) {
        Complex tr{};
        for (auto i : diag_) tr += x[static_cast<Eigen::Index>(i)];
        y[vacuum_] += eta_ * tr;
    }
}

void SectorSystem::precondition(const Vector& r, Vector& z) const {
    if (precond_) precond_->apply(r, z);
    else z = r;
}

BlockState SectorSystem::solve(const BlockState& rhs, const BlockState& guess, const SolverConfig& cfg,
                               SolveReport* report) const {
    if (!(*rhs.map == op_->map()) || !(*guess.map == op_->map())) {
        throw std::invalid_argument("SectorSystem::solve: sector mismatch");
    }
    LinearOperator a = [this](const Vector& x, Vector& y) { apply(x, y); };
    LinearOperator m = [this](const Vector& r, Vector& z) { precondition(r, z); };
    BlockState out(op_->map_ptr());
    out.data = bicgstab(a, rhs.data, guess.data, precond_ ? &m : nullptr, cfg, report);
    return out;
}

double regularization_scale(const ModelParams& p) { return p.kappa_a; }

BlockState solve_steady(SuperOp op, double eta, const BlockState& guess, const SolverConfig& cfg,
                        SolveReport* report) {
    const BlockMapPtr map = op.map_ptr();
    SectorSystem sys(std::move(op), eta, cfg.precond);
    BlockState rhs(map);
    rhs.data[map->index_of({})] = eta;
    BlockState x = sys.solve(rhs, guess, cfg, report);
    BlockState adj = adjoint_map(x);
    x.data = 0.5 * (x.data + adj.data);
    const Complex tr = trace(x);
    if (std::abs(tr) == 0.0) throw std::runtime_error("steady state has zero trace");
    x.data /= tr;
    return x;
}

BlockState steady_state(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in,
                        const SolverConfig& cfg, SolveReport* report) {
    p.validate();
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    const BlockState guess = initial_guess(GuessKind::Steady, kind, p, trunc, 0.0);
    BlockState rho = solve_steady(make_superop(kind, p, trunc, 0), regularization_scale(p), guess, cfg, report);
    const auto dim = static_cast<long>(trunc.n) * trunc.n * trunc.n_c;
    if (report && dim <= 400) {
        const double lowest = smallest_eigenvalue(rho);
        if (lowest < -1e-8) report->status += "; negative eigenvalue " + std::to_string(lowest);
    }
    return rho;
}

BlockState resolvent_solve(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in,
                           double omega, const BlockState& rhs, const BlockState* guess,
                           const SolverConfig& cfg, SolveReport* report) {
    p.validate();
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    if (!(rhs.truncation() == trunc)) throw std::invalid_argument("resolvent_solve: truncation mismatch");
    const int k = rhs.sector();
    SuperOp op = make_superop(kind, p, trunc, k, Complex(0, omega));
    double eta = 0.0;
    if (k == 0 && omega == 0.0) {
        eta = regularization_scale(p);
        const double scale = std::max(rhs.data.cwiseAbs().maxCoeff(), 1e-300);
        if (std::abs(trace(rhs)) > 1e-10 * scale * std::sqrt(double(rhs.size()))) {
            throw std::invalid_argument("resolvent_solve: rhs on V_0 at omega = 0 must be traceless");
        }
    }
    SectorSystem sys(std::move(op), eta, cfg.precond);
    const BlockState zero(rhs.map);
    return sys.solve(rhs, guess ? *guess : zero, cfg, report);
}

BlockState resolvent_solve_adjoint(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc,
                                   double omega, const BlockState& rhs, const SolverConfig& cfg,
                                   SolveReport* report) {
    const BlockState flipped = adjoint_map(rhs);
    return adjoint_map(resolvent_solve(kind, p, trunc, -omega, flipped, nullptr, cfg, report));
}

double smallest_eigenvalue(const BlockState& rho) {
    if (rho.sector() != 0) throw std::invalid_argument("smallest_eigenvalue: expected a V_0 state");
    const auto& t = rho.truncation();
    const int dim = t.n * t.n * t.n_c;
    if (dim > 2000) throw std::invalid_argument("smallest_eigenvalue: truncation too large");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    auto idx = [&t](int a, int b, int c) { return (a * t.n + b) * t.n_c + c; };
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const auto e = rho.map->element(i);
        m(idx(e.a1, e.b1, e.c1), idx(e.a2, e.b2, e.c2)) = rho.data[static_cast<Eigen::Index>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace ringmix
