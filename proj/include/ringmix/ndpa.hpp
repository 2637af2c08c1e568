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

#include <array>

#include "ringmix/fock_blocks.hpp"
#include "ringmix/model.hpp"

namespace ringmix {

/// Ideal NDPA, H = Delta_a a^dag a + Delta_b b^dag b + i g (e^{-i theta} ab - e^{i theta} a^dag b^dag).
struct NdpaParams {
    double g = 0.0;
    double theta = 0.0;
    double delta_a = 0.0;
    double delta_b = 0.0;
    double kappa_a = 1.0;
    double kappa_b = 1.0;

    /// Stiff-pump reduction of a three-mode model: g e^{-i theta} = g3 eps / (kappa_c/2 - i Delta_c).
    static NdpaParams from_model(const ModelParams& p);

    Complex coupling() const;  // g e^{-i theta}
    double total_kappa() const { return kappa_a + kappa_b; }
    double total_delta() const { return delta_a + delta_b; }
    /// kappa^2 (kappa_a kappa_b - 4 g^2) + 4 kappa_a kappa_b Delta^2
    double stability_denominator() const;
    bool below_threshold() const { return stability_denominator() > 0.0; }
    /// Coupling magnitude where the stability denominator vanishes.
    double threshold_coupling() const;
};

struct ScatteringMatrix {
    Complex s11, s12, s21, s22;
};

/// Input-output scattering matrix at frequency omega (closed-form entries).
ScatteringMatrix scattering(const NdpaParams& p, double omega);

struct NdpaMoments {
    double n_a = 0.0;
    double n_b = 0.0;
    Complex m_ab{};
};

/// <a_o^dag a_o> = |S12|^2, <b_o^dag b_o> = |S21|^2, <a_o b_o> = S11 S21^*.
NdpaMoments ndpa_output_moments(const NdpaParams& p, double omega);

/// Symmetrized steady-state moments of the intracavity two-mode squeezed thermal state.
struct NdpaCovariance {
    double s1 = 0.5;   // <a^dag a> + 1/2
    Complex s2{};      // <ab>
    Complex s3{};      // <a^dag b^dag>
    double s4 = 0.5;   // <b^dag b> + 1/2
};

NdpaCovariance steady_covariance(const NdpaParams& p);

/// Number-basis coefficients of the steady state on V_0 of the two-mode (n_c = 1) space.
BlockState tmst_number_coeffs(const NdpaParams& p, const TruncationConfig& trunc);

/// Degree-1 eigenvalues of the NDPA Liouvillian in the (alpha, beta^*) variables.
struct Degree1Modes {
    Complex lambda_plus;
    Complex lambda_minus;
    Complex xi;
};

Degree1Modes degree1_eigenvalues(const NdpaParams& p);

/// Generator of the NDPA Liouvillian on span{[rho,a], [rho,b^dag]} (the alpha, beta^* modes).
Eigen::Matrix2cd degree1_generator(const NdpaParams& p);

/// Low-signal gain 20 log10 |S11(0)|.
double ndpa_gain(const NdpaParams& p);

enum class GuessKind {
    Steady,       // rho_ss
    ResolventA,   // (L + i w)^{-1} [rho a^dag]  on V_{+1}
    ResolventB,   // (L + i w)^{-1} [b rho]      on V_{+1}
    GainRho1,     // L^{-1} [-sqrt(kappa_a) [a^dag, rho]]  on V_{+1}
};

/// Analytic initial guess built from the NDPA state. The pump factor is the
/// projector on the coherent state `pump_amplitude` truncated to n_c levels.
BlockState initial_guess(GuessKind kind, const NdpaParams& p, Complex pump_amplitude,
                         const TruncationConfig& trunc, double omega);

/// Same, with the NDPA reduction and pump amplitude taken from the model.
BlockState initial_guess(GuessKind kind, HamiltonianKind model, const ModelParams& p,
                         const TruncationConfig& trunc, double omega);

/// Truncated coherent-state projector coefficients |alpha><alpha| (n_c x n_c, row-major).
Eigen::MatrixXcd coherent_projector(Complex alpha, int n_c);

/// Tensor product of a two-mode V_0 state with an n_c x n_c pump matrix.
BlockState tensor_with_pump(const BlockState& two_mode, const Eigen::MatrixXcd& pump,
                            const TruncationConfig& trunc);

}  // namespace ringmix
