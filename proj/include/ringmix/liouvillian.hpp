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
#include <vector>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/model.hpp"

namespace ringmix {

/// Sector-restricted Lindblad superoperator L + shift.
///
/// The operator is stored in two pieces: an optional block-structured part
/// (detunings, pump drive and the three dissipators) applied directly on the
/// n_c^2 x blocks layout, and a sparse list of remaining Hamiltonian couplings.
class SuperOp {
public:
    SuperOp(BlockMapPtr map, std::optional<ReferencePart> reference, CouplingList couplings,
            Complex shift = {});

    const BlockIndexMap& map() const { return *map_; }
    const BlockMapPtr& map_ptr() const { return map_; }
    int sector() const { return map_->sector(); }
    std::size_t size() const { return map_->size(); }

    Complex shift() const { return shift_; }
    void set_shift(Complex s) { shift_ = s; }

    bool has_reference() const { return reference_.has_value(); }
    const ReferencePart& reference() const;
    const CouplingList& couplings() const { return couplings_; }
    CouplingList& couplings() { return couplings_; }

    /// y = (L + shift) x
    void apply(const Vector& x, Vector& y) const;
    BlockState apply(const BlockState& x) const;
    /// Structured part plus shift only.
    void apply_reference(const Vector& x, Vector& y) const;
    /// Coupling list only (no shift); accumulate adds into y.
    void apply_couplings(const Vector& x, Vector& y, bool accumulate) const;

    /// Pump-mode part of the structured operator on one n_c^2 block (index c1 n_c + c2).
    const Eigen::SparseMatrix<Complex>& pump_operator() const { return pump_op_; }
    /// Diagonal scalar of block jb contributed by signal/idler detuning and decay (no shift).
    Complex block_scalar(std::size_t jb) const { return block_scalar_[jb]; }
    /// Jump-term source blocks: (a1+1, b1, a2+1, b2) and (a1, b1+1, a2, b2+1), -1 if absent.
    std::ptrdiff_t jump_a_source(std::size_t jb) const { return jump_a_[jb]; }
    std::ptrdiff_t jump_b_source(std::size_t jb) const { return jump_b_[jb]; }
    double jump_a_weight(std::size_t jb) const { return jump_a_w_[jb]; }
    double jump_b_weight(std::size_t jb) const { return jump_b_w_[jb]; }

private:
    BlockMapPtr map_;
    std::optional<ReferencePart> reference_;
    CouplingList couplings_;
    Complex shift_;
    Eigen::SparseMatrix<Complex> pump_op_;
    std::vector<Complex> block_scalar_;
    std::vector<std::ptrdiff_t> jump_a_, jump_b_;
    std::vector<double> jump_a_w_, jump_b_w_;
};

/// Pump-mode block operator for the given structured part (n_c^2 x n_c^2).
Eigen::SparseMatrix<Complex> pump_block_operator(const ReferencePart& ref, int n_c);

/// Full model Liouvillian on V_k: structured part from the model, couplings from its interaction.
SuperOp make_superop(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc, int k,
                     Complex shift = {});

enum class SplitKind {
    Preconditioner,  // structured drive/decay part vs. the remaining couplings
    Perturbation,    // displaced-frame NDPA part vs. the three-wave coupling
};

struct SuperOpSplit {
    SuperOp reference;
    SuperOp interaction;

    void apply(const Vector& x, Vector& y) const;
};

/// Splits the Liouvillian of `kind`. The perturbation split exists only for H3 and is
/// taken in the frame where the pump is displaced by its coherent amplitude.
SuperOpSplit split(SplitKind split_kind, HamiltonianKind kind, const ModelParams& p,
                   const TruncationConfig& trunc, int k, Complex shift = {});

/// Three-wave coupling g3 [ab c^dag - a^dag b^dag c, .] scaled by lambda, as couplings on V_k.
CouplingList three_wave_couplings(const ModelParams& p, const TruncationConfig& trunc, int k,
                                  double lambda = 1.0);

/// Displaced-frame H3 Liouvillian L0 + lambda L1 on V_k.
SuperOp displaced_superop(const ModelParams& p, const TruncationConfig& trunc, int k, double lambda,
                          Complex shift = {});

/// True when every coupling changes the parity of a1 - a2.
bool couplings_flip_parity(const CouplingList& c);

}  // namespace ringmix
