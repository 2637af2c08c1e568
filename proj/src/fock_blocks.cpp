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

#include "ringmix/fock_blocks.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ringmix {

void TruncationConfig::validate() const {
    if (n < 1 || n_c < 1) {
        throw std::invalid_argument("invalid truncation: n=" + std::to_string(n) +
                                    ", n_c=" + std::to_string(n_c));
    }
}

bool BasisElement::within(const TruncationConfig& t) const {
    auto in = [](int v, int hi) { return v >= 0 && v < hi; };
    return in(a1, t.n) && in(b1, t.n) && in(a2, t.n) && in(b2, t.n) && in(c1, t.n_c) &&
           in(c2, t.n_c);
}

BlockIndexMap::BlockIndexMap(TruncationConfig trunc, int k) : trunc_(trunc), k_(k) {
    trunc_.validate();
    const int n = trunc_.n;
    lookup_.assign(static_cast<std::size_t>(n) * n * n, -1);
    for (int a1 = 0; a1 < n; ++a1) {
        for (int b1 = 0; b1 < n; ++b1) {
            for (int a2 = 0; a2 < n; ++a2) {
                const int b2 = k - a1 + b1 + a2;
                if (b2 < 0 || b2 >= n) continue;
                lookup_[(static_cast<std::size_t>(a1) * n + b1) * n + a2] =
                    static_cast<std::ptrdiff_t>(blocks_.size());
                blocks_.push_back({a1, b1, a2, b2});
            }
        }
    }
    if (k_ == 0) {
        const std::size_t inner = inner_size();
        for (std::size_t j = 0; j < blocks_.size(); ++j) {
            const auto& b = blocks_[j];
            if (b.a1 != b.a2 || b.b1 != b.b2) continue;
            for (int c = 0; c < trunc_.n_c; ++c) {
                diagonal_.push_back(j * inner + static_cast<std::size_t>(c) * trunc_.n_c + c);
            }
        }
    }
}

std::ptrdiff_t BlockIndexMap::block_index(int a1, int b1, int a2, int b2) const {
    const int n = trunc_.n;
    if (a1 < 0 || b1 < 0 || a2 < 0 || b2 < 0 || a1 >= n || b1 >= n || a2 >= n || b2 >= n) {
        return -1;
    }
    if (a1 - b1 - a2 + b2 != k_) return -1;
    return lookup_[(static_cast<std::size_t>(a1) * n + b1) * n + a2];
}

std::ptrdiff_t BlockIndexMap::index_of(const BasisElement& e) const {
    if (e.c1 < 0 || e.c2 < 0 || e.c1 >= trunc_.n_c || e.c2 >= trunc_.n_c) return -1;
    const auto j = block_index(e.a1, e.b1, e.a2, e.b2);
    if (j < 0) return -1;
    return j * static_cast<std::ptrdiff_t>(inner_size()) + e.c1 * trunc_.n_c + e.c2;
}

BasisElement BlockIndexMap::element(std::size_t i) const {
    const std::size_t inner = inner_size();
    const auto& b = blocks_[i / inner];
    const int c = static_cast<int>(i % inner);
    return {b.a1, b.b1, c / trunc_.n_c, b.a2, b.b2, c % trunc_.n_c};
}

BlockMapPtr build_block_map(const TruncationConfig& trunc, int k) {
    return std::make_shared<const BlockIndexMap>(trunc, k);
}

BlockState::BlockState(BlockMapPtr m) : map(std::move(m)), data(Vector::Zero(map->size())) {}

BlockState::BlockState(BlockMapPtr m, Vector d) : map(std::move(m)), data(std::move(d)) {
    if (static_cast<std::size_t>(data.size()) != map->size()) {
        throw std::invalid_argument("BlockState: data length does not match the sector map");
    }
}

Complex& BlockState::operator[](const BasisElement& e) {
    const auto i = map->index_of(e);
    if (i < 0) throw std::out_of_range("BlockState: element outside sector");
    return data[i];
}

Complex BlockState::operator[](const BasisElement& e) const {
    const auto i = map->index_of(e);
    return i < 0 ? Complex{} : data[i];
}

BlockState zero_state(const TruncationConfig& trunc, int k) {
    return BlockState(build_block_map(trunc, k));
}

BlockState vacuum_projector(const TruncationConfig& trunc) {
    BlockState s = zero_state(trunc, 0);
    s[BasisElement{}] = 1.0;
    return s;
}

BlockState adjoint_map(const BlockState& x) {
    BlockState out(build_block_map(x.truncation(), -x.sector()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto e = x.map->element(i);
        out.data[out.map->index_of(e.adjoint())] = std::conj(x.data[i]);
    }
    return out;
}

namespace {

int& left_index(BasisElement& e, Mode m) {
    return m == Mode::A ? e.a1 : (m == Mode::B ? e.b1 : e.c1);
}

int& right_index(BasisElement& e, Mode m) {
    return m == Mode::A ? e.a2 : (m == Mode::B ? e.b2 : e.c2);
}

int cutoff(const TruncationConfig& t, Mode m) { return m == Mode::C ? t.n_c : t.n; }

}  // namespace

int sector_shift(Mode mode, Ladder ladder, Side side) {
    // Left multiplication moves the row index by +-1, right multiplication the column
    // index by -+1 (rho a^dagger lowers the bra index).
    const int row_or_col = side == Side::Left ? (ladder == Ladder::Raise ? 1 : -1)
                                              : (ladder == Ladder::Raise ? -1 : 1);
    switch (mode) {
        case Mode::A: return side == Side::Left ? row_or_col : -row_or_col;
        case Mode::B: return side == Side::Left ? -row_or_col : row_or_col;
        case Mode::C: return 0;
    }
    return 0;
}

BlockState multiply(const BlockState& x, Mode mode, Ladder ladder, Side side) {
    const auto& t = x.truncation();
    BlockState out(build_block_map(t, x.sector() + sector_shift(mode, ladder, side)));
    const int hi = cutoff(t, mode);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x.data[i] == Complex{}) continue;
        BasisElement e = x.map->element(i);
        int& idx = side == Side::Left ? left_index(e, mode) : right_index(e, mode);
        double factor;
        // Left: op|idx>.  Right: <idx|op = (op^dagger|idx>)^dagger.
        const bool up = (side == Side::Left) == (ladder == Ladder::Raise);
        if (up) {
            if (idx + 1 >= hi) continue;
            factor = std::sqrt(static_cast<double>(idx + 1));
            ++idx;
        } else {
            if (idx == 0) continue;
            factor = std::sqrt(static_cast<double>(idx));
            --idx;
        }
        out.data[out.map->index_of(e)] += factor * x.data[i];
    }
    return out;
}

BlockState commutator(const BlockState& x, Mode mode, Ladder ladder) {
    BlockState left = multiply(x, mode, ladder, Side::Left);
    BlockState right = multiply(x, mode, ladder, Side::Right);
    if (left.sector() != right.sector()) {
        throw std::logic_error("commutator: left and right products land in different sectors");
    }
    left.data -= right.data;
    return left;
}

BlockState mode_action(const BlockState& x, ModeAction action) {
    switch (action) {
        case ModeAction::ALeft: return multiply(x, Mode::A, Ladder::Lower, Side::Left);
        case ModeAction::ADagRight: return multiply(x, Mode::A, Ladder::Raise, Side::Right);
        case ModeAction::ADagCommutator: return commutator(x, Mode::A, Ladder::Raise);
        case ModeAction::BLeft: return multiply(x, Mode::B, Ladder::Lower, Side::Left);
        case ModeAction::BDagRight: return multiply(x, Mode::B, Ladder::Raise, Side::Right);
        case ModeAction::BDagCommutator: return commutator(x, Mode::B, Ladder::Raise);
        case ModeAction::CLeft: return multiply(x, Mode::C, Ladder::Lower, Side::Left);
        case ModeAction::CDagRight: return multiply(x, Mode::C, Ladder::Raise, Side::Right);
        case ModeAction::CDagCommutator: return commutator(x, Mode::C, Ladder::Raise);
    }
    throw std::invalid_argument("mode_action: unknown action");
}

Complex trace(const BlockState& x) {
    if (x.sector() != 0) throw std::invalid_argument("trace: state is not in V_0");
    Complex t{};
    for (auto i : x.map->diagonal_indices()) t += x.data[i];
    return t;
}

Complex trace_product(const BlockState& x, Mode mode, Ladder ladder) {
    // Tr(op X) = sum X_{p1,p2} <p2|op|p1>, nonzero only for p2 = p1 + d e_mode.
    const int d = ladder == Ladder::Raise ? 1 : -1;
    const int needed = mode == Mode::A ? -d : (mode == Mode::B ? d : 0);
    if (x.sector() != needed) {
        throw std::invalid_argument("trace_product: state sector " + std::to_string(x.sector()) +
                                    " cannot pair with this operator (needs " +
                                    std::to_string(needed) + ")");
    }
    Complex t{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto e = x.map->element(i);
        int p1[3] = {e.a1, e.b1, e.c1};
        int p2[3] = {e.a2, e.b2, e.c2};
        const int m = static_cast<int>(mode);
        bool match = p2[m] == p1[m] + d;
        for (int o = 0; o < 3 && match; ++o) {
            if (o != m && p1[o] != p2[o]) match = false;
        }
        if (!match) continue;
        t += std::sqrt(static_cast<double>(std::max(p1[m], p2[m]))) * x.data[i];
    }
    return t;
}

Complex expect(Observable observable, const BlockState& x) {
    if (x.sector() != 0) {
        throw std::invalid_argument("expect: observable pairs with V_0 only, got sector " +
                                    std::to_string(x.sector()));
    }
    Complex t{};
    if (observable == Observable::PairAB) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto e = x.map->element(i);
            if (e.a2 == e.a1 - 1 && e.b2 == e.b1 - 1 && e.c1 == e.c2) {
                t += std::sqrt(static_cast<double>(e.a1) * e.b1) * x.data[i];
            }
        }
        return t;
    }
    for (auto i : x.map->diagonal_indices()) {
        const auto e = x.map->element(i);
        const int count = observable == Observable::NumberA   ? e.a1
                          : observable == Observable::NumberB ? e.b1
                                                              : e.c1;
        t += static_cast<double>(count) * x.data[i];
    }
    return t;
}

}  // namespace ringmix
