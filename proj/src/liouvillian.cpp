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

#include "ringmix/liouvillian.hpp"

#include <cmath>
#include <stdexcept>

namespace ringmix {

Eigen::SparseMatrix<Complex> pump_block_operator(const ReferencePart& ref, int nc) {
    const int m = nc * nc;
    std::vector<Eigen::Triplet<Complex>> trip;
    auto at = [nc](int c1, int c2) { return c1 * nc + c2; };
    const Complex dr = ref.drive;
    for (int c1 = 0; c1 < nc; ++c1) {
        for (int c2 = 0; c2 < nc; ++c2) {
            const int row = at(c1, c2);
            const Complex diag(-0.5 * ref.kappa_c * (c1 + c2), -ref.delta_c * (c1 - c2));
            if (diag != Complex{}) trip.emplace_back(row, row, diag);
            // (eps c^dag - eps^* c) rho - rho (eps c^dag - eps^* c)
            if (dr != Complex{}) {
                if (c1 > 0) trip.emplace_back(row, at(c1 - 1, c2), dr * std::sqrt(double(c1)));
                if (c1 + 1 < nc) trip.emplace_back(row, at(c1 + 1, c2), -std::conj(dr) * std::sqrt(c1 + 1.0));
                if (c2 + 1 < nc) trip.emplace_back(row, at(c1, c2 + 1), -dr * std::sqrt(c2 + 1.0));
                if (c2 > 0) trip.emplace_back(row, at(c1, c2 - 1), std::conj(dr) * std::sqrt(double(c2)));
            }
            if (c1 + 1 < nc && c2 + 1 < nc && ref.kappa_c != 0.0) {
                trip.emplace_back(row, at(c1 + 1, c2 + 1),
                                  ref.kappa_c * std::sqrt((c1 + 1.0) * (c2 + 1.0)));
            }
        }
    }
    Eigen::SparseMatrix<Complex> op(m, m);
    op.setFromTriplets(trip.begin(), trip.end());
    return op;
}

SuperOp::SuperOp(BlockMapPtr map, std::optional<ReferencePart> reference, CouplingList couplings,
                 Complex shift)
    : map_(std::move(map)),
      reference_(std::move(reference)),
      couplings_(std::move(couplings)),
      shift_(shift) {
    if (!(couplings_.map() == *map_)) throw std::invalid_argument("SuperOp: coupling sector mismatch");
    const auto nb = map_->block_count();
    const int nc = map_->truncation().n_c;
    block_scalar_.assign(nb, Complex{});
    jump_a_.assign(nb, -1);
    jump_b_.assign(nb, -1);
    jump_a_w_.assign(nb, 0.0);
    jump_b_w_.assign(nb, 0.0);
    if (!reference_) {
        pump_op_.resize(nc * nc, nc * nc);
        return;
    }
    const auto& r = *reference_;
    pump_op_ = pump_block_operator(r, nc);
    for (std::size_t jb = 0; jb < nb; ++jb) {
        const auto& b = map_->block(jb);
        block_scalar_[jb] = Complex(-0.5 * r.kappa_a * (b.a1 + b.a2) - 0.5 * r.kappa_b * (b.b1 + b.b2),
                                    -r.delta_a * (b.a1 - b.a2) - r.delta_b * (b.b1 - b.b2));
        if (r.kappa_a != 0.0) {
            jump_a_[jb] = map_->block_index(b.a1 + 1, b.b1, b.a2 + 1, b.b2);
            jump_a_w_[jb] = r.kappa_a * std::sqrt((b.a1 + 1.0) * (b.a2 + 1.0));
        }
        if (r.kappa_b != 0.0) {
            jump_b_[jb] = map_->block_index(b.a1, b.b1 + 1, b.a2, b.b2 + 1);
            jump_b_w_[jb] = r.kappa_b * std::sqrt((b.b1 + 1.0) * (b.b2 + 1.0));
        }
    }
}

const ReferencePart& SuperOp::reference() const {
    if (!reference_) throw std::logic_error("SuperOp has no structured part");
    return *reference_;
}

void SuperOp::apply_reference(const Vector& x, Vector& y) const {
    const auto m = static_cast<Eigen::Index>(map_->inner_size());
    const auto nb = static_cast<Eigen::Index>(map_->block_count());
    if (x.size() != m * nb) throw std::invalid_argument("SuperOp::apply: size mismatch");
    y.resize(x.size());
    Eigen::Map<const Eigen::MatrixXcd> X(x.data(), m, nb);
    Eigen::Map<Eigen::MatrixXcd> Y(y.data(), m, nb);
    if (!reference_) {
        Y = shift_ * X;
        return;
    }
    Y.noalias() = pump_op_ * X;
    for (Eigen::Index jb = 0; jb < nb; ++jb) {
        auto col = Y.col(jb);
        col += (block_scalar_[jb] + shift_) * X.col(jb);
        if (jump_a_[jb] >= 0) col += jump_a_w_[jb] * X.col(jump_a_[jb]);
        if (jump_b_[jb] >= 0) col += jump_b_w_[jb] * X.col(jump_b_[jb]);
    }
}

void SuperOp::apply_couplings(const Vector& x, Vector& y, bool accumulate) const {
    couplings_.apply(x, y, accumulate);
}

void SuperOp::apply(const Vector& x, Vector& y) const {
    apply_reference(x, y);
    couplings_.apply(x, y, true);
}

BlockState SuperOp::apply(const BlockState& x) const {
    if (!(*x.map == *map_)) throw std::invalid_argument("SuperOp::apply: sector mismatch");
    BlockState y(map_);
    apply(x.data, y.data);
    return y;
}

SuperOp make_superop(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in, int k,
                     Complex shift) {
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    trunc.validate();
    auto map = build_block_map(trunc, k);
    return SuperOp(map, reference_part(kind, p), build_couplings(interaction_terms(kind, p, trunc), map),
                   shift);
}

void SuperOpSplit::apply(const Vector& x, Vector& y) const {
    reference.apply(x, y);
    Vector t;
    interaction.apply(x, t);
    y += t;
}

CouplingList three_wave_couplings(const ModelParams& p, const TruncationConfig& trunc, int k,
                                  double lambda) {
    ModelParams q = p;
    q.epsilon = 0.0;
    HamiltonianTerms h = interaction_terms(HamiltonianKind::H3, q, trunc);
    for (auto& t : h.terms) t.coef *= lambda;
    return build_couplings(h, build_block_map(trunc, k));
}

namespace {

// Stiff-pump coupling; it leaves the pump index untouched.
HamiltonianTerms displaced_ndpa_terms(const ModelParams& p, const TruncationConfig& trunc) {
    return interaction_terms(HamiltonianKind::H3s, p, trunc);
}

ReferencePart displaced_reference(const ModelParams& p) {
    ReferencePart r = reference_part(HamiltonianKind::H3, p);
    r.drive = 0.0;
    return r;
}

}  // namespace

SuperOp displaced_superop(const ModelParams& p, const TruncationConfig& trunc, int k, double lambda,
                          Complex shift) {
    trunc.validate();
    auto map = build_block_map(trunc, k);
    HamiltonianTerms h = displaced_ndpa_terms(p, trunc);
    ModelParams q = p;
    q.epsilon = 0.0;
    HamiltonianTerms l1 = interaction_terms(HamiltonianKind::H3, q, trunc);
    for (auto& t : l1.terms) t.coef *= lambda;
    h.append(l1);
    return SuperOp(map, displaced_reference(p), build_couplings(h, map), shift);
}

SuperOpSplit split(SplitKind split_kind, HamiltonianKind kind, const ModelParams& p,
                   const TruncationConfig& trunc_in, int k, Complex shift) {
    if (split_kind == SplitKind::Preconditioner) {
        const TruncationConfig trunc = effective_truncation(kind, trunc_in);
        trunc.validate();
        auto map = build_block_map(trunc, k);
        SuperOp ref(map, reference_part(kind, p), build_couplings({}, map), shift);
        SuperOp inter(map, std::nullopt, build_couplings(interaction_terms(kind, p, trunc), map));
        return {std::move(ref), std::move(inter)};
    }
    if (kind != HamiltonianKind::H3) {
        throw std::invalid_argument("perturbation split is defined for the h3 model only");
    }
    trunc_in.validate();
    auto map = build_block_map(trunc_in, k);
    SuperOp ref(map, displaced_reference(p), build_couplings(displaced_ndpa_terms(p, trunc_in), map), shift);
    SuperOp inter(map, std::nullopt, three_wave_couplings(p, trunc_in, k));
    return {std::move(ref), std::move(inter)};
}

bool couplings_flip_parity(const CouplingList& c) {
    for (const auto& e : c.couplings()) {
        const int ps = ((e.source.a1 - e.source.a2) % 2 + 2) % 2;
        const int pd = ((e.destination.a1 - e.destination.a2) % 2 + 2) % 2;
        if (ps == pd) return false;
    }
    return true;
}

}  // namespace ringmix
