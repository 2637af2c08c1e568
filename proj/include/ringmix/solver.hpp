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
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/liouvillian.hpp"
#include "ringmix/model.hpp"

namespace ringmix {

enum class PrecondKind {
    None,
    BlockJacobi,  // independent reference solves on both colors
    GaussSeidel,  // red solve, then black solve with the red correction
};

struct SolverConfig {
    double rel_tol = 1e-10;
    int max_iter = 3000;
    bool strict_reduction = false;
    PrecondKind precond = PrecondKind::GaussSeidel;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    int restarts = 0;
    double residual = 0.0;  // final true relative residual
    std::vector<double> history;
    std::string status;
};

class SolverError : public std::runtime_error {
public:
    enum class Kind { Breakdown, MaxIterations };

    SolverError(Kind kind, const std::string& what, SolveReport report, Vector best)
        : std::runtime_error(what), kind_(kind), report_(std::move(report)), best_(std::move(best)) {}

    Kind kind() const { return kind_; }
    const SolveReport& report() const { return report_; }
    const Vector& best_iterate() const { return best_; }

private:
    Kind kind_;
    SolveReport report_;
    Vector best_;
};

using LinearOperator = std::function<void(const Vector&, Vector&)>;

/// Right-preconditioned BiCGSTAB for A x = b. The stopping rule is the true
/// relative residual |b - A x| / |b| <= rel_tol. Throws SolverError on breakdown
/// (after one restart) or when max_iter is exceeded.
Vector bicgstab(const LinearOperator& apply_a, const Vector& b, const Vector& x0,
                const LinearOperator* precond, const SolverConfig& cfg, SolveReport* report = nullptr);

/// Exact inverse of the structured part of a SuperOp restricted to one parity color,
/// together with the red/black sweep built from it.
class RedBlackPreconditioner {
public:
    /// `eta` > 0 adds the trace regularization eta Tr(x) |0><0| on V_0.
    RedBlackPreconditioner(const SuperOp& op, double eta, PrecondKind kind);
    ~RedBlackPreconditioner();
    RedBlackPreconditioner(RedBlackPreconditioner&&) noexcept;

    /// z = M^{-1} r
    void apply(const Vector& r, Vector& z) const;
    /// Exact inverse of the structured part (plus regularization) on all blocks.
    void reference_solve(const Vector& r, Vector& z) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// L + shift (+ eta Tr(.) sigma) on one sector with its preconditioner.
class SectorSystem {
public:
    SectorSystem(SuperOp op, double eta, PrecondKind precond);

    const SuperOp& op() const { return *op_; }
    double eta() const { return eta_; }
    const BlockMapPtr& map() const { return op_->map_ptr(); }

    void apply(const Vector& x, Vector& y) const;
    void precondition(const Vector& r, Vector& z) const;

    BlockState solve(const BlockState& rhs, const BlockState& guess, const SolverConfig& cfg,
                     SolveReport* report = nullptr) const;

private:
    std::unique_ptr<SuperOp> op_;
    double eta_;
    std::vector<std::size_t> diag_;
    std::ptrdiff_t vacuum_ = -1;
    std::unique_ptr<RedBlackPreconditioner> precond_;
};

/// Regularization scale used for steady states.
double regularization_scale(const ModelParams& p);

/// Solves the trace-regularized steady-state system from the given guess and returns the
/// Hermitian, unit-trace result.
BlockState solve_steady(SuperOp op, double eta, const BlockState& guess, const SolverConfig& cfg,
                        SolveReport* report = nullptr);

BlockState steady_state(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc,
                        const SolverConfig& cfg, SolveReport* report = nullptr);

/// Solves (L + i omega) x = rhs on the sector of `rhs`. A null guess starts from zero.
/// On V_0 with omega = 0 the trace-regularized operator is used (rhs must be traceless).
BlockState resolvent_solve(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc,
                           double omega, const BlockState& rhs, const BlockState* guess,
                           const SolverConfig& cfg, SolveReport* report = nullptr);

/// Solve on V_{-k} through the adjoint of the V_k problem with omega -> -omega.
BlockState resolvent_solve_adjoint(HamiltonianKind kind, const ModelParams& p,
                                   const TruncationConfig& trunc, double omega, const BlockState& rhs,
                                   const SolverConfig& cfg, SolveReport* report = nullptr);

/// Smallest eigenvalue of the density matrix built from a V_0 state (dense; small truncations).
double smallest_eigenvalue(const BlockState& rho);

}  // namespace ringmix
