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

#include "ringmix/dense_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace ringmix {

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;

SpMat sparse(const Eigen::MatrixXcd& m) { return m.sparseView(0.0, 0.0); }

}  // namespace

Eigen::MatrixXcd dense_lowering(int levels) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
    for (int j = 1; j < levels; ++j) a(j - 1, j) = std::sqrt(double(j));
    return a;
}

DenseModeOps dense_mode_ops(const TruncationConfig& t) {
    const Eigen::MatrixXcd in = Eigen::MatrixXcd::Identity(t.n, t.n);
    const Eigen::MatrixXcd ic = Eigen::MatrixXcd::Identity(t.n_c, t.n_c);
    const Eigen::MatrixXcd low = dense_lowering(t.n);
    DenseModeOps ops;
    ops.a = Eigen::kroneckerProduct(Eigen::kroneckerProduct(low, in).eval(), ic).eval();
    ops.b = Eigen::kroneckerProduct(Eigen::kroneckerProduct(in, low).eval(), ic).eval();
    ops.c = Eigen::kroneckerProduct(Eigen::kroneckerProduct(in, in).eval(), dense_lowering(t.n_c)).eval();
    return ops;
}

Eigen::MatrixXd dense_sine(double alpha, int levels, int padding) {
    const int big = levels + padding;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(big, big);
    for (int j = 1; j < big; ++j) a(j - 1, j) = std::sqrt(double(j));
    const Eigen::MatrixXd x = (a + a.transpose()) / std::sqrt(2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    const Eigen::VectorXd s = (alpha * es.eigenvalues()).array().sin();
    const Eigen::MatrixXd full = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
    return full.topLeftCorner(levels, levels);
}

Eigen::MatrixXcd dense_hamiltonian(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in) {
    const TruncationConfig t = effective_truncation(kind, trunc_in);
    const auto ops = dense_mode_ops(t);
    const int d = t.n * t.n * t.n_c;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
    const Complex I(0, 1);
    const auto& a = ops.a;
    const auto& b = ops.b;
    const auto& c = ops.c;
    const Eigen::MatrixXcd ad = a.adjoint(), bd = b.adjoint(), cd = c.adjoint();

    Eigen::MatrixXcd h = p.delta_a * ad * a + p.delta_b * bd * b;
    if (!is_stiff_pump(kind)) {
        h += p.delta_c * cd * c + I * p.epsilon * (cd - c);
    }
    auto add_hc = [&h](const Eigen::MatrixXcd& k) { h += k + k.adjoint(); };
    const double g3 = coupling_g3(p);
    const double g5 = coupling_g5(p);
    switch (kind) {
        case HamiltonianKind::PrecondDrive: break;
        case HamiltonianKind::H3:
        case HamiltonianKind::H5: {
            const Eigen::MatrixXcd abcd = a * b * cd;
            add_hc(I * g3 * abcd);
            if (kind == HamiltonianKind::H5) {
                add_hc(-I * g5 *
                       (0.5 * p.omega_a * (ad * a + id) * abcd + 0.5 * p.omega_b * (bd * b + id) * abcd +
                        p.omega_c * abcd * (cd * c + id)));
            }
            break;
        }
        case HamiltonianKind::HJ1: {
            const auto f = flux_scaling(p);
            auto lowering_part = [](const Eigen::MatrixXd& s) {
                Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(s.rows(), s.cols());
                for (int j = 0; j + 1 < s.rows(); ++j) out(j, j + 1) = s(j, j + 1);
                return out;
            };
            const Eigen::MatrixXcd sa = lowering_part(dense_sine(f.alpha_a, t.n));
            const Eigen::MatrixXcd sb = lowering_part(dense_sine(f.alpha_b, t.n));
            const Eigen::MatrixXcd sc = lowering_part(dense_sine(f.alpha_c, t.n_c)).transpose();
            const Eigen::MatrixXcd term =
                Eigen::kroneckerProduct(Eigen::kroneckerProduct(sa, sb).eval(), sc).eval();
            add_hc(I * 4.0 * p.omega_J * term);
            break;
        }
        case HamiltonianKind::H3s:
        case HamiltonianKind::H5s: {
            const Complex g = stiff_pump_g(p);
            const Eigen::MatrixXcd ab = a * b;
            add_hc(I * g * ab);
            if (kind == HamiltonianKind::H5s) {
                const double n_pump = std::norm(pump_amplitude(p));
                add_hc(-I * g / (2 * p.beta * p.omega_J) *
                       (0.5 * p.omega_a * (ad * a + id) * ab + 0.5 * p.omega_b * (bd * b + id) * ab +
                        p.omega_c * (n_pump + 1.0) * ab));
            }
            break;
        }
    }
    return h;
}

DenseOracle::DenseOracle(const TruncationConfig& trunc, Eigen::MatrixXcd hamiltonian,
                         std::vector<std::pair<double, Eigen::MatrixXcd>> jumps, double eta)
    : trunc_(trunc), dim_(static_cast<int>(hamiltonian.rows())), h_(std::move(hamiltonian)),
      jumps_(std::move(jumps)), eta_(eta) {
    if (rows() > kMaxRows) throw std::invalid_argument("dense oracle: truncation too large");
    const SpMat id = sparse(Eigen::MatrixXcd::Identity(dim_, dim_));
    const SpMat h = sparse(h_);
    const SpMat ht = sparse(h_.transpose());
    const Complex I(0, 1);
    l_ = SpMat(Eigen::kroneckerProduct(h, id)) * (-I) + SpMat(Eigen::kroneckerProduct(id, ht)) * I;
    for (const auto& [rate, m] : jumps_) {
        const Eigen::MatrixXcd mm = m.adjoint() * m;
        const SpMat jump = Eigen::kroneckerProduct(sparse(m), sparse(m.conjugate()));
        const SpMat left = Eigen::kroneckerProduct(sparse(mm), id);
        const SpMat right = Eigen::kroneckerProduct(id, sparse(mm.transpose()));
        l_ += (0.5 * rate) * (2.0 * jump - left - right);
    }
    l_.makeCompressed();
}

Eigen::MatrixXcd DenseOracle::dense() const { return Eigen::MatrixXcd(l_); }

long DenseOracle::embed(const BasisElement& e) const {
    const int n = trunc_.n, nc = trunc_.n_c;
    const long row = (static_cast<long>(e.a1) * n + e.b1) * nc + e.c1;
    const long col = (static_cast<long>(e.a2) * n + e.b2) * nc + e.c2;
    return row * dim_ + col;
}

Eigen::VectorXcd DenseOracle::embed(const BlockState& x) const {
    if (!(x.truncation() == trunc_)) throw std::invalid_argument("dense oracle: truncation mismatch");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(rows());
    for (std::size_t i = 0; i < x.size(); ++i) v[embed(x.map->element(i))] = x.data[static_cast<Eigen::Index>(i)];
    return v;
}

BlockState DenseOracle::restrict(const Eigen::VectorXcd& v, const BlockMapPtr& map) const {
    BlockState out(map);
    for (std::size_t i = 0; i < map->size(); ++i) out.data[static_cast<Eigen::Index>(i)] = v[embed(map->element(i))];
    return out;
}

Eigen::MatrixXcd DenseOracle::unvec(const Eigen::VectorXcd& v) const {
    Eigen::MatrixXcd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) m(i, j) = v[static_cast<long>(i) * dim_ + j];
    }
    return m;
}

Eigen::MatrixXcd DenseOracle::sector_matrix(const BlockIndexMap& map) const {
    const auto s = static_cast<Eigen::Index>(map.size());
    std::vector<long> idx(map.size());
    for (std::size_t i = 0; i < map.size(); ++i) idx[i] = embed(map.element(i));
    const Eigen::MatrixXcd full = dense();
    Eigen::MatrixXcd out(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
        for (Eigen::Index j = 0; j < s; ++j) out(i, j) = full(idx[i], idx[j]);
    }
    return out;
}

Eigen::VectorXcd DenseOracle::solve(const Eigen::VectorXcd& rhs, Complex shift) const {
    SpMat a = l_;
    if (shift != Complex{}) {
        SpMat id(rows(), rows());
        id.setIdentity();
        a += shift * id;
    } else {
        // + eta |vac><vac| Tr(.)
        std::vector<Eigen::Triplet<Complex>> trip;
        for (int i = 0; i < dim_; ++i) trip.emplace_back(0, static_cast<long>(i) * dim_ + i, eta_);
        SpMat reg(rows(), rows());
        reg.setFromTriplets(trip.begin(), trip.end());
        a += reg;
    }
    a.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("dense oracle: factorization failed");
    Eigen::VectorXcd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("dense oracle: solve failed");
    return x;
}

Eigen::VectorXcd DenseOracle::steady_state() const {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rows());
    rhs[0] = eta_;
    Eigen::VectorXcd x = solve(rhs, 0.0);
    const Eigen::MatrixXcd m = unvec(x);
    return x / m.trace();
}

Eigen::VectorXcd DenseOracle::steady_state_svd() const {
    if (rows() > 3000) throw std::invalid_argument("dense oracle: SVD only for tiny truncations");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense(), Eigen::ComputeFullV);
    Eigen::VectorXcd x = svd.matrixV().col(rows() - 1);
    return x / unvec(x).trace();
}

Eigen::VectorXcd DenseOracle::eigenvalues() const {
    if (rows() > 3000) throw std::invalid_argument("dense oracle: spectrum only for tiny truncations");
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dense(), false);
    return es.eigenvalues();
}

Eigen::MatrixXcd DenseOracle::apply(const Eigen::MatrixXcd& x) const {
    const Complex I(0, 1);
    Eigen::MatrixXcd y = -I * (h_ * x - x * h_);
    for (const auto& [rate, m] : jumps_) {
        const Eigen::MatrixXcd mm = m.adjoint() * m;
        y += 0.5 * rate * (2.0 * m * x * m.adjoint() - x * mm - mm * x);
    }
    return y;
}

DenseOracle dense_oracle(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in) {
    const TruncationConfig t = effective_truncation(kind, trunc_in);
    const auto ops = dense_mode_ops(t);
    std::vector<std::pair<double, Eigen::MatrixXcd>> jumps{{p.kappa_a, ops.a}, {p.kappa_b, ops.b}};
    if (!is_stiff_pump(kind)) jumps.emplace_back(p.kappa_c, ops.c);
    return DenseOracle(t, dense_hamiltonian(kind, p, t), std::move(jumps), p.kappa_a);
}

DenseOracle dense_displaced_oracle(const ModelParams& p, const TruncationConfig& t, double lambda) {
    const auto ops = dense_mode_ops(t);
    const Complex I(0, 1);
    const Eigen::MatrixXcd ad = ops.a.adjoint(), bd = ops.b.adjoint(), cd = ops.c.adjoint();
    const Complex g = stiff_pump_g(p);
    Eigen::MatrixXcd h = p.delta_a * ad * ops.a + p.delta_b * bd * ops.b + p.delta_c * cd * ops.c;
    const Eigen::MatrixXcd ndpa = I * g * ops.a * ops.b;
    const Eigen::MatrixXcd three = I * lambda * coupling_g3(p) * ops.a * ops.b * cd;
    h += ndpa + ndpa.adjoint() + three + three.adjoint();
    std::vector<std::pair<double, Eigen::MatrixXcd>> jumps{
        {p.kappa_a, ops.a}, {p.kappa_b, ops.b}, {p.kappa_c, ops.c}};
    return DenseOracle(t, std::move(h), std::move(jumps), p.kappa_a);
}

}  // namespace ringmix
