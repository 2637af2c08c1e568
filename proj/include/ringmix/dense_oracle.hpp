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

#include <vector>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/model.hpp"

namespace ringmix {

/// Brute-force Lindblad superoperator on the full (unreduced) truncated space.
///
/// Operators act on the product basis |a, b, c> with index (a n + b) n_c + c, and
/// density matrices are vectorized row-major, so vec(A X B) = (A (x) B^T) vec(X).
class DenseOracle {
public:
    static constexpr long kMaxRows = 20000;

    DenseOracle(const TruncationConfig& trunc, Eigen::MatrixXcd hamiltonian,
                std::vector<std::pair<double, Eigen::MatrixXcd>> jumps, double eta);

    const TruncationConfig& truncation() const { return trunc_; }
    int dimension() const { return dim_; }
    long rows() const { return static_cast<long>(dim_) * dim_; }
    const Eigen::MatrixXcd& hamiltonian() const { return h_; }
    const Eigen::SparseMatrix<Complex>& liouvillian() const { return l_; }
    Eigen::MatrixXcd dense() const;

    long embed(const BasisElement& e) const;
    Eigen::VectorXcd embed(const BlockState& x) const;
    /// Entries of `v` on the elements of `map`.
    BlockState restrict(const Eigen::VectorXcd& v, const BlockMapPtr& map) const;
    /// Operator matrix of a vectorized density matrix.
    Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v) const;

    /// Sub-matrix of the superoperator on the elements of `map`.
    Eigen::MatrixXcd sector_matrix(const BlockIndexMap& map) const;

    /// Steady state by a direct solve of the trace-regularized matrix.
    Eigen::VectorXcd steady_state() const;
    /// Steady state from the right singular vector of the smallest singular value.
    Eigen::VectorXcd steady_state_svd() const;
    /// Solves (L + shift) x = rhs; shift 0 uses the trace-regularized matrix.
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs, Complex shift) const;
    Eigen::VectorXcd eigenvalues() const;

    /// L[X] evaluated with operator products (no superoperator matrix).
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;

private:
    TruncationConfig trunc_;
    int dim_;
    Eigen::MatrixXcd h_;
    std::vector<std::pair<double, Eigen::MatrixXcd>> jumps_;
    double eta_;
    Eigen::SparseMatrix<Complex> l_;
};

/// Single-mode ladder operators embedded in the product space.
struct DenseModeOps {
    Eigen::MatrixXcd a, b, c;
};

DenseModeOps dense_mode_ops(const TruncationConfig& trunc);

/// Lowering matrix of size `levels`.
Eigen::MatrixXcd dense_lowering(int levels);

/// Matrix of sin(alpha x), x = (a + a^dag)/sqrt(2), on the first `levels` Fock states,
/// computed from the eigendecomposition of x in a padded basis.
Eigen::MatrixXd dense_sine(double alpha, int levels, int padding = 60);

/// Hamiltonian of `kind` built from dense operator products.
Eigen::MatrixXcd dense_hamiltonian(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc);

DenseOracle dense_oracle(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc);

/// Displaced-frame H3: detunings, stiff-pump coupling and lambda times the three-wave term.
DenseOracle dense_displaced_oracle(const ModelParams& p, const TruncationConfig& trunc, double lambda);

}  // namespace ringmix
