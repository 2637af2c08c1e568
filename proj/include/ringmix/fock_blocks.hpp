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

#include <complex>
#include <compare>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ringmix {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

/// Fock cutoffs: signal and idler keep levels 0..n-1, the pump keeps 0..n_c-1.
struct TruncationConfig {
    int n = 1;
    int n_c = 1;

    void validate() const;
    friend bool operator==(const TruncationConfig&, const TruncationConfig&) = default;
};

enum class Mode { A, B, C };
enum class Ladder { Lower, Raise };
enum class Side { Left, Right };

/// Matrix unit |a1,b1,c1><a2,b2,c2|.
struct BasisElement {
    int a1 = 0, b1 = 0, c1 = 0;
    int a2 = 0, b2 = 0, c2 = 0;

    /// Conserved label a1 - b1 - a2 + b2.
    constexpr int sector() const { return a1 - b1 - a2 + b2; }
    constexpr BasisElement adjoint() const { return {a2, b2, c2, a1, b1, c1}; }
    bool within(const TruncationConfig& t) const;

    friend auto operator<=>(const BasisElement&, const BasisElement&) = default;
};

/// Enumeration of the density-matrix units in sector V_k.
///
/// Elements are ordered lexicographically in (a1, b1, a2, b2, c1, c2). Because
/// b2 is fixed by (a1, b1, a2, k), every (a1, b1, a2, b2) group is a contiguous
/// run of n_c^2 pump coefficients, stored row-major in (c1, c2). The state
/// vector of a sector can therefore be viewed as an n_c^2 x block_count()
/// column-major matrix with one column per (a1, b1, a2, b2) block.
class BlockIndexMap {
public:
    struct Block {
        int a1, b1, a2, b2;
        int parity() const { return ((a1 - a2) % 2 + 2) % 2; }
        int level() const { return a1 + b1 + a2 + b2; }
    };

    BlockIndexMap(TruncationConfig trunc, int k);

    int sector() const { return k_; }
    const TruncationConfig& truncation() const { return trunc_; }
    std::size_t size() const { return blocks_.size() * inner_size(); }
    bool empty() const { return blocks_.empty(); }
    std::size_t inner_size() const { return static_cast<std::size_t>(trunc_.n_c) * trunc_.n_c; }
    std::size_t block_count() const { return blocks_.size(); }
    const Block& block(std::size_t i) const { return blocks_[i]; }
    const std::vector<Block>& blocks() const { return blocks_; }

    /// Block position of (a1, b1, a2, b2), or -1 when the block is not in this sector.
    std::ptrdiff_t block_index(int a1, int b1, int a2, int b2) const;
    /// Contiguous position of `e`, or -1 when `e` is outside the sector or truncation.
    std::ptrdiff_t index_of(const BasisElement& e) const;
    BasisElement element(std::size_t i) const;

    /// Positions of the diagonal units (a1=a2, b1=b2, c1=c2); empty unless k = 0.
    const std::vector<std::size_t>& diagonal_indices() const { return diagonal_; }

    friend bool operator==(const BlockIndexMap& x, const BlockIndexMap& y) {
        return x.trunc_ == y.trunc_ && x.k_ == y.k_;
    }

private:
    TruncationConfig trunc_;
    int k_;
    std::vector<Block> blocks_;
    std::vector<std::ptrdiff_t> lookup_;  // n^3 table over (a1, b1, a2)
    std::vector<std::size_t> diagonal_;
};

using BlockMapPtr = std::shared_ptr<const BlockIndexMap>;

/// Builds the sector map; an empty map is returned when |k| > 2(n-1).
BlockMapPtr build_block_map(const TruncationConfig& trunc, int k);

/// Coefficients of an operator supported on one sector.
struct BlockState {
    BlockMapPtr map;
    Vector data;

    BlockState() = default;
    BlockState(BlockMapPtr m);
    BlockState(BlockMapPtr m, Vector d);

    int sector() const { return map->sector(); }
    const TruncationConfig& truncation() const { return map->truncation(); }
    std::size_t size() const { return static_cast<std::size_t>(data.size()); }
    Complex& operator[](const BasisElement& e);
    Complex operator[](const BasisElement& e) const;
};

BlockState zero_state(const TruncationConfig& trunc, int k);
BlockState vacuum_projector(const TruncationConfig& trunc);

/// x -> x^dagger; maps V_k onto V_{-k}.
BlockState adjoint_map(const BlockState& x);

/// One-sided multiplication by a single ladder operator, e.g.
/// (Mode::A, Ladder::Lower, Side::Left) is a*rho and
/// (Mode::A, Ladder::Raise, Side::Right) is rho*a^dagger.
/// Components pushed beyond the cutoffs are dropped.
BlockState multiply(const BlockState& x, Mode mode, Ladder ladder, Side side);
/// [op, rho] for op = a, a^dagger, b, ... .
BlockState commutator(const BlockState& x, Mode mode, Ladder ladder);

enum class ModeAction {
    ALeft,           // a rho
    ADagRight,       // rho a^dagger
    ADagCommutator,  // [a^dagger, rho]
    BLeft,           // b rho
    BDagRight,       // rho b^dagger
    BDagCommutator,  // [b^dagger, rho]
    CLeft,           // c rho
    CDagRight,       // rho c^dagger
    CDagCommutator,  // [c^dagger, rho]
};

BlockState mode_action(const BlockState& x, ModeAction action);

/// Sector change produced by multiplying with a ladder operator on the given side.
int sector_shift(Mode mode, Ladder ladder, Side side);

Complex trace(const BlockState& x);

/// Tr(op * x) for a single ladder operator; throws unless x lives in the
/// only sector where this trace can be nonzero.
Complex trace_product(const BlockState& x, Mode mode, Ladder ladder);

enum class Observable { NumberA, NumberB, NumberC, PairAB };

/// Tr(O x). Number operators and ab pair with V_0.
Complex expect(Observable observable, const BlockState& x);

}  // namespace ringmix
