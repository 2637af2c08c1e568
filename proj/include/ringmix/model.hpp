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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ringmix/fock_blocks.hpp"

namespace ringmix {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

/// Josephson frequency i_c / (2e) in rad/s for a critical current in amperes.
double omega_J_from_critical_current(double critical_current);

double derive_omega_c(double omega_a, double omega_b);

/// Physical parameters, all frequencies in rad/s.
struct ModelParams {
    double omega_a = 2 * kPi * 7.5e9;
    double omega_b = 2 * kPi * 5.0e9;
    double omega_c = derive_omega_c(2 * kPi * 7.5e9, 2 * kPi * 5.0e9);
    double omega_J = omega_J_from_critical_current(1e-6);
    double beta = 3.0;
    double kappa_a = 2 * kPi * 100e6;
    double kappa_b = 2 * kPi * 100e6;
    double kappa_c = 2 * kPi * 100e6;
    double delta_a = 0.0;
    double delta_b = 0.0;
    double delta_c = 0.0;
    double epsilon = 0.0;

    /// Defaults of the reference operating point (signal 7.5 GHz, idler 5 GHz,
    /// 100 MHz linewidths, i_c = 1 uA, resonant drive).
    static ModelParams reference_point(double beta = 3.0);

    void validate() const;
};

enum class HamiltonianKind { H3s, H5s, H3, H5, HJ1, PrecondDrive };

std::string_view to_string(HamiltonianKind kind);
HamiltonianKind parse_hamiltonian_kind(std::string_view name);

/// Stiff-pump kinds have no quantized pump mode.
bool is_stiff_pump(HamiltonianKind kind);

/// For stiff-pump kinds the pump cutoff collapses to a single level.
TruncationConfig effective_truncation(HamiltonianKind kind, TruncationConfig trunc);

/// Arguments of sin(alpha x) for the three modes.
struct FluxScaling {
    double alpha_a;
    double alpha_b;
    double alpha_c;
};

FluxScaling flux_scaling(const ModelParams& p);

/// Third-order three-wave mixing rate sqrt(w_a w_b w_c / (2 beta^3 w_J)).
double coupling_g3(const ModelParams& p);
/// Fifth-order prefactor sqrt(w_a w_b w_c / (8 beta^5 w_J^3)).
double coupling_g5(const ModelParams& p);
/// Coherent pump amplitude eps / (kappa_c/2 + i Delta_c).
Complex pump_amplitude(const ModelParams& p);
/// Stiff-pump NDPA coupling g3 eps / (kappa_c/2 - i Delta_c).
Complex stiff_pump_g(const ModelParams& p);

/// Pump amplitude at which the linearized NDPA response diverges.
double threshold_pump(const ModelParams& p);
/// Pump amplitude giving the requested NDPA gain (dB); throws when unreachable.
double expected_gain_to_pump(double gain_db, const ModelParams& p);

/// Truncation used for a target gain: n from the gain, n_c from beta.
TruncationConfig default_truncation(double gain_db, double beta);

/// One ladder monomial T = coef * prod_m f_m with <p + shift|T|p> = coef * prod_m weight_m[p_m].
/// Weight tables are indexed by the source Fock number; an empty table means 1.
struct LadderTerm {
    Complex coef{};
    std::array<int, 3> shift{0, 0, 0};
    std::array<std::vector<double>, 3> weight;

    double weight_at(int mode, int source) const;
    LadderTerm adjoint(const TruncationConfig& trunc) const;
};

/// A Hermitian operator written as a list of ladder monomials (adjoints included).
struct HamiltonianTerms {
    std::vector<LadderTerm> terms;

    void append(const HamiltonianTerms& other);
    /// Adds `t` and its Hermitian conjugate.
    void add_with_adjoint(const LadderTerm& t, const TruncationConfig& trunc);
};

/// Detunings plus a coherent pump drive i(drive c^dagger - drive^* c), together with the
/// three decay channels. This is the part of every Liouvillian that keeps the
/// (a1, b1, a2, b2) block structure.
struct ReferencePart {
    double delta_a = 0.0;
    double delta_b = 0.0;
    double delta_c = 0.0;
    Complex drive{};
    double kappa_a = 0.0;
    double kappa_b = 0.0;
    double kappa_c = 0.0;
};

/// A Liouvillian split into its block-structured reference part and the remaining
/// Hamiltonian couplings.
struct LiouvillianSpec {
    ReferencePart reference;
    HamiltonianTerms interaction;
};

/// Three-wave (and higher) interaction terms of the given model; empty for PrecondDrive.
HamiltonianTerms interaction_terms(HamiltonianKind kind, const ModelParams& p,
                                   const TruncationConfig& trunc);
/// Detuning and drive terms as ladder monomials.
HamiltonianTerms reference_terms(const ReferencePart& ref, const TruncationConfig& trunc);
ReferencePart reference_part(HamiltonianKind kind, const ModelParams& p);
LiouvillianSpec liouvillian_spec(HamiltonianKind kind, const ModelParams& p,
                                 const TruncationConfig& trunc);

/// Sparse -i[H, .] restricted to a sector, stored row-wise by destination.
class CouplingList {
public:
    struct Coupling {
        BasisElement source;
        BasisElement destination;
        Complex coefficient;
    };

    CouplingList(BlockMapPtr map, std::vector<std::size_t> row_ptr,
                 std::vector<std::uint32_t> columns, std::vector<Complex> values);

    const BlockIndexMap& map() const { return *map_; }
    const BlockMapPtr& map_ptr() const { return map_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    std::vector<Coupling> couplings() const;
    /// Coefficient from source position `src` into destination position `dst` (0 if absent).
    Complex coefficient(std::size_t dst, std::size_t src) const;
    /// Mutable access for negative-control checks.
    std::vector<Complex>& values() { return values_; }
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> to_sparse() const;

    /// y (+)= C x
    void apply(const Vector& x, Vector& y, bool accumulate) const;

private:
    BlockMapPtr map_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> columns_;
    std::vector<Complex> values_;
};

/// Builds -i[H, .] on the sector described by `map`.
CouplingList build_couplings(const HamiltonianTerms& h, const BlockMapPtr& map);

/// Full -i[H, .] for the model, including detunings and drive.
CouplingList build_hamiltonian(HamiltonianKind kind, const ModelParams& p,
                               const TruncationConfig& trunc, int k);

/// Largest |C_k[d, s] - conj(C_{-k}[d^dagger, s^dagger])| over both lists.
double hermiticity_defect(const CouplingList& plus, const CouplingList& minus);

}  // namespace ringmix
