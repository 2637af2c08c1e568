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

#include "ringmix/ndpa.hpp"

#include <cmath>
#include <stdexcept>

#include "ringmix/special_functions.hpp"

namespace ringmix {

namespace {

void require_stable(const NdpaParams& p, const char* what) {
    if (!p.below_threshold()) {
        throw std::domain_error(std::string(what) + ": NDPA parameters are at or above threshold");
    }
}

}  // namespace

NdpaParams NdpaParams::from_model(const ModelParams& m) {
    NdpaParams p;
    const Complex g = stiff_pump_g(m);
    p.g = std::abs(g);
    p.theta = p.g == 0.0 ? 0.0 : -std::arg(g);
    p.delta_a = m.delta_a;
    p.delta_b = m.delta_b;
    p.kappa_a = m.kappa_a;
    p.kappa_b = m.kappa_b;
    return p;
}

Complex NdpaParams::coupling() const { return g * std::polar(1.0, -theta); }

double NdpaParams::stability_denominator() const {
    const double k = total_kappa();
    const double d = total_delta();
    return k * k * (kappa_a * kappa_b - 4 * g * g) + 4 * kappa_a * kappa_b * d * d;
}

double NdpaParams::threshold_coupling() const {
    const double k = total_kappa();
    const double d = total_delta();
    return std::sqrt(kappa_a * kappa_b * (k * k + 4 * d * d) / (4 * k * k));
}

ScatteringMatrix scattering(const NdpaParams& p, double omega) {
    const Complex inv_a(0.5 * p.kappa_a, p.delta_a - omega);
    const Complex inv_b(0.5 * p.kappa_b, p.delta_b + omega);
    const double g2 = p.g * p.g;
    const Complex den = inv_a * std::conj(inv_b) - g2;
    const double root = std::sqrt(p.kappa_a * p.kappa_b);
    ScatteringMatrix s;
    s.s11 = (g2 + std::conj(inv_a) * std::conj(inv_b)) / den;
    s.s12 = -p.g * root * std::polar(1.0, p.theta) / den;
    s.s21 = -p.g * root * std::polar(1.0, -p.theta) / den;
    s.s22 = (g2 + inv_a * inv_b) / den;
    return s;
}

NdpaMoments ndpa_output_moments(const NdpaParams& p, double omega) {
    require_stable(p, "ndpa_output_moments");
    const auto s = scattering(p, omega);
    return {std::norm(s.s12), std::norm(s.s21), s.s11 * std::conj(s.s21)};
}

NdpaCovariance steady_covariance(const NdpaParams& p) {
    require_stable(p, "steady_covariance");
    const double ka = p.kappa_a, kb = p.kappa_b, k = p.total_kappa(), d = p.total_delta();
    const double g2 = p.g * p.g;
    const double den = p.stability_denominator();
    NdpaCovariance c;
    c.s1 = (ka * kb * (k * k + 4 * d * d) + 4 * g2 * (kb * kb - ka * ka)) / (2 * den);
    c.s4 = (ka * kb * (k * k + 4 * d * d) + 4 * g2 * (ka * ka - kb * kb)) / (2 * den);
    c.s2 = -2 * ka * kb * Complex(k, -2 * d) * p.g * std::polar(1.0, p.theta) / den;
    c.s3 = -2 * ka * kb * Complex(k, 2 * d) * p.g * std::polar(1.0, -p.theta) / den;
    return c;
}

BlockState tmst_number_coeffs(const NdpaParams& p, const TruncationConfig& trunc_in) {
    require_stable(p, "tmst_number_coeffs");
    const TruncationConfig trunc{trunc_in.n, 1};
    BlockState out(build_block_map(trunc, 0));
    const double ka = p.kappa_a, kb = p.kappa_b, k = p.total_kappa(), d = p.total_delta();
    const double g2 = p.g * p.g;
    const double q = k * k + 4 * d * d;
    const double den = q - 4 * g2;
    const double prefactor = 4 * (ka * kb * q - 4 * k * k * g2) / (4 * ka * kb * den);
    const double ca = 4 * kb * g2 / ka / den;
    const double cb = 4 * ka * g2 / kb / den;
    const Complex cc = -2.0 * Complex(k, -2 * d) * p.g * std::polar(1.0, p.theta) / den;
    const Complex cd = -2.0 * Complex(k, 2 * d) * p.g * std::polar(1.0, -p.theta) / den;
    const double z = 4 * g2 / q;

    const auto& map = *out.map;
    for (std::size_t jb = 0; jb < map.block_count(); ++jb) {
        const auto& b = map.block(jb);
        const int shift = b.a1 - b.b1;  // equal to a2 - b2 on V_0
        const int l = std::abs(shift);
        const int nn = shift >= 0 ? b.b1 : b.a1;
        const int mm = shift >= 0 ? b.b2 : b.a2;
        const double log_norm =
            0.5 * (log_factorial(nn + l) + log_factorial(mm + l) - log_factorial(nn) -
                   log_factorial(mm)) -
            log_factorial(l);
        const double base = shift >= 0 ? ca : cb;
        Complex v = prefactor * std::exp(log_norm) * std::pow(base, l) * std::pow(cc, nn) *
                    std::pow(cd, mm) * hyp2f1_terminating(nn, mm, l + 1, z);
        if (l == 0 && nn == 0 && mm == 0) v = prefactor;
        out.data[static_cast<Eigen::Index>(jb)] = v;
    }
    return out;
}

Eigen::Matrix2cd degree1_generator(const NdpaParams& p) {
    Eigen::Matrix2cd m;
    m << Complex(-0.5 * p.kappa_a, p.delta_a), p.g * std::polar(1.0, -p.theta),
        p.g * std::polar(1.0, p.theta), Complex(-0.5 * p.kappa_b, -p.delta_b);
    return m;
}

Degree1Modes degree1_eigenvalues(const NdpaParams& p) {
    const Complex x = -Complex(0.5 * p.kappa_a, -p.delta_a);  // -(chi_a^*)^{-1}
    const Complex y = Complex(0.5 * p.kappa_b, p.delta_b);    // chi_b^{-1}
    const Complex root = std::sqrt((x + y) * (x + y) + 4 * p.g * p.g);
    return {0.5 * (x - y + root), 0.5 * (x - y - root), x + y + root};
}

double ndpa_gain(const NdpaParams& p) {
    require_stable(p, "ndpa_gain");
    return 20.0 * std::log10(std::abs(scattering(p, 0.0).s11));
}

Eigen::MatrixXcd coherent_projector(Complex alpha, int n_c) {
    Eigen::VectorXcd amp(n_c);
    const double norm = std::exp(-0.5 * std::norm(alpha));
    for (int j = 0; j < n_c; ++j) {
        amp[j] = norm * std::exp(-0.5 * log_factorial(j)) * std::pow(alpha, j);
        if (j == 0) amp[j] = norm;
    }
    return amp * amp.adjoint();
}

BlockState tensor_with_pump(const BlockState& two_mode, const Eigen::MatrixXcd& pump,
                            const TruncationConfig& trunc) {
    if (two_mode.sector() != 0 || two_mode.truncation().n != trunc.n ||
        two_mode.truncation().n_c != 1) {
        throw std::invalid_argument("tensor_with_pump: expected a two-mode V_0 state");
    }
    if (pump.rows() != trunc.n_c || pump.cols() != trunc.n_c) {
        throw std::invalid_argument("tensor_with_pump: pump factor has the wrong size");
    }
    BlockState out(build_block_map(trunc, 0));
    const auto m = static_cast<Eigen::Index>(out.map->inner_size());
    for (std::size_t jb = 0; jb < out.map->block_count(); ++jb) {
        const Complex v = two_mode.data[static_cast<Eigen::Index>(jb)];
        auto col = out.data.segment(static_cast<Eigen::Index>(jb) * m, m);
        for (int c1 = 0; c1 < trunc.n_c; ++c1) {
            for (int c2 = 0; c2 < trunc.n_c; ++c2) col[c1 * trunc.n_c + c2] = v * pump(c1, c2);
        }
    }
    return out;
}

namespace {

// Combination u1 [rho, a^dag] + u2 [rho, b] of the degree-1 modes in V_{+1}.
BlockState degree1_state(const BlockState& rho, const Eigen::Vector2cd& u) {
    BlockState x = commutator(rho, Mode::A, Ladder::Raise);
    BlockState y = commutator(rho, Mode::B, Ladder::Lower);
    x.data = -u[0] * x.data - u[1] * y.data;  // commutator() returns [op, rho]
    return x;
}

}  // namespace

BlockState initial_guess(GuessKind kind, const NdpaParams& p, Complex pump_amp,
                         const TruncationConfig& trunc, double omega) {
    const BlockState two_mode = tmst_number_coeffs(p, trunc);
    const Eigen::MatrixXcd pump =
        trunc.n_c == 1 ? Eigen::MatrixXcd::Ones(1, 1) : coherent_projector(pump_amp, trunc.n_c);
    const BlockState rho = tensor_with_pump(two_mode, pump, trunc);
    if (kind == GuessKind::Steady) return rho;

    // L acts on span{[rho,a^dag], [rho,b]} through the conjugate of the (alpha, beta^*) generator.
    const Eigen::Matrix2cd gen = degree1_generator(p).conjugate();
    const auto cov = steady_covariance(p);
    const Complex iw(0, omega);
    Eigen::Vector2cd rhs;
    switch (kind) {
        case GuessKind::ResolventB: rhs << -cov.s2, cov.s4 - 0.5; break;
        case GuessKind::ResolventA: rhs << -(cov.s1 - 0.5), cov.s3; break;
        case GuessKind::GainRho1: rhs << std::sqrt(p.kappa_a), 0.0; break;
        case GuessKind::Steady: break;
    }
    const Eigen::Matrix2cd sys =
        kind == GuessKind::GainRho1 ? gen : Eigen::Matrix2cd(gen + iw * Eigen::Matrix2cd::Identity());
    return degree1_state(rho, sys.partialPivLu().solve(rhs));
}

BlockState initial_guess(GuessKind kind, HamiltonianKind model, const ModelParams& p,
                         const TruncationConfig& trunc, double omega) {
    const TruncationConfig t = effective_truncation(model, trunc);
    NdpaParams np = NdpaParams::from_model(p);
    if (!np.below_threshold()) np.g = 0.0;
    if (model == HamiltonianKind::PrecondDrive) np.g = 0.0;
    return initial_guess(kind, np, pump_amplitude(p), t, omega);
}

}  // namespace ringmix
