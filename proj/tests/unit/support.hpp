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

#include <cmath>
#include <random>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/model.hpp"

namespace ringmix::test {

inline int dense_index(const TruncationConfig& t, int a, int b, int c) { return (a * t.n + b) * t.n_c + c; }

inline int dense_dim(const TruncationConfig& t) { return t.n * t.n * t.n_c; }

/// Operator matrix of a sector state in the |a, b, c> product basis.
inline Eigen::MatrixXcd to_dense(const BlockState& x) {
    const TruncationConfig& t = x.truncation();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dense_dim(t), dense_dim(t));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const BasisElement e = x.map->element(i);
        m(dense_index(t, e.a1, e.b1, e.c1), dense_index(t, e.a2, e.b2, e.c2)) = x.data[static_cast<Eigen::Index>(i)];
    }
    return m;
}

/// Sector-k part of a dense operator.
inline BlockState from_dense(const Eigen::MatrixXcd& m, const TruncationConfig& t, int k) {
    BlockState x(build_block_map(t, k));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const BasisElement e = x.map->element(i);
        x.data[static_cast<Eigen::Index>(i)] =
            m(dense_index(t, e.a1, e.b1, e.c1), dense_index(t, e.a2, e.b2, e.c2));
    }
    return x;
}

inline BlockState random_state(const TruncationConfig& t, int k, std::mt19937& rng) {
    std::normal_distribution<double> g;
    BlockState x(build_block_map(t, k));
    for (Eigen::Index i = 0; i < x.data.size(); ++i) x.data[i] = Complex(g(rng), g(rng));
    return x;
}

/// Random density matrix on the full truncated space.
inline Eigen::MatrixXcd random_density(const TruncationConfig& t, std::mt19937& rng) {
    std::normal_distribution<double> g;
    const int d = dense_dim(t);
    Eigen::MatrixXcd a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    Eigen::MatrixXcd rho = a * a.adjoint();
    return rho / rho.trace();
}

/// Lowering operator of one mode in the product basis.
inline Eigen::MatrixXcd dense_lower(const TruncationConfig& t, Mode mode) {
    const int d = dense_dim(t);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < t.n; ++a)
        for (int b = 0; b < t.n; ++b)
            for (int c = 0; c < t.n_c; ++c) {
                int a2 = a, b2 = b, c2 = c, q = 0;
                if (mode == Mode::A) q = a2--;
                if (mode == Mode::B) q = b2--;
                if (mode == Mode::C) q = c2--;
                if (q == 0) continue;
                m(dense_index(t, a2, b2, c2), dense_index(t, a, b, c)) = std::sqrt(double(q));
            }
    return m;
}

inline double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline double rel_diff(const Vector& x, const Vector& ref) {
    const double s = max_abs(ref);
    return max_abs(x - ref) / (s > 0 ? s : 1.0);
}

/// Reference operating point with kappas and detunings jittered, pumped at 30-60% of threshold.
inline ModelParams moderate_params(std::mt19937& rng, double beta = 3.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ModelParams p = ModelParams::reference_point(beta);
    const double k = p.kappa_a;
    p.kappa_a = k * (1.0 + 0.3 * u(rng));
    p.kappa_b = k * (1.0 + 0.3 * u(rng));
    p.kappa_c = k * (1.0 + 0.3 * u(rng));
    p.delta_a = 0.2 * k * u(rng);
    p.delta_b = 0.2 * k * u(rng);
    p.delta_c = 0.2 * k * u(rng);
    p.epsilon = (0.3 + 0.15 * (u(rng) + 1.0)) * threshold_pump(p);
    return p;
}

}  // namespace ringmix::test
