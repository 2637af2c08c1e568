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

#include "ringmix/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ringmix/ndpa.hpp"
#include "ringmix/special_functions.hpp"

namespace ringmix {

double omega_J_from_critical_current(double critical_current) {
    if (!(critical_current > 0)) throw std::invalid_argument("critical current must be positive");
    return critical_current / (2.0 * kElementaryCharge);
}

double derive_omega_c(double omega_a, double omega_b) {
    if (!(omega_a > 0) || !(omega_b > 0)) {
        throw std::invalid_argument("derive_omega_c: frequencies must be positive");
    }
    return std::sqrt(0.5 * (omega_a * omega_a + omega_b * omega_b));
}

ModelParams ModelParams::reference_point(double beta) {
    ModelParams p;
    p.beta = beta;
    return p;
}

void ModelParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("ModelParams: ") + name + " must be positive");
        }
    };
    positive(omega_a, "omega_a");
    positive(omega_b, "omega_b");
    positive(omega_c, "omega_c");
    positive(omega_J, "omega_J");
    positive(beta, "beta");
    positive(kappa_a, "kappa_a");
    positive(kappa_b, "kappa_b");
    positive(kappa_c, "kappa_c");
    if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("ModelParams: epsilon must be non-negative");
    }
}

std::string_view to_string(HamiltonianKind kind) {
    switch (kind) {
        case HamiltonianKind::H3s: return "h3s";
        case HamiltonianKind::H5s: return "h5s";
        case HamiltonianKind::H3: return "h3";
        case HamiltonianKind::H5: return "h5";
        case HamiltonianKind::HJ1: return "hj1";
        case HamiltonianKind::PrecondDrive: return "precond";
    }
    return "?";
}

HamiltonianKind parse_hamiltonian_kind(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "h3s" || s == "ndpa") return HamiltonianKind::H3s;
    if (s == "h5s") return HamiltonianKind::H5s;
    if (s == "h3") return HamiltonianKind::H3;
    if (s == "h5") return HamiltonianKind::H5;
    if (s == "hj1") return HamiltonianKind::HJ1;
    if (s == "precond") return HamiltonianKind::PrecondDrive;
    throw std::invalid_argument("unknown hamiltonian kind: " + s);
}

bool is_stiff_pump(HamiltonianKind kind) {
    return kind == HamiltonianKind::H3s || kind == HamiltonianKind::H5s;
}

TruncationConfig effective_truncation(HamiltonianKind kind, TruncationConfig trunc) {
    if (is_stiff_pump(kind)) trunc.n_c = 1;
    return trunc;
}

FluxScaling flux_scaling(const ModelParams& p) {
    return {std::sqrt(p.omega_a / (2 * p.beta * p.omega_J)),
            std::sqrt(p.omega_b / (2 * p.beta * p.omega_J)),
            std::sqrt(p.omega_c / (p.beta * p.omega_J))};
}

double coupling_g3(const ModelParams& p) {
    return std::sqrt(p.omega_a * p.omega_b * p.omega_c / (2 * std::pow(p.beta, 3) * p.omega_J));
}

double coupling_g5(const ModelParams& p) {
    return std::sqrt(p.omega_a * p.omega_b * p.omega_c /
                     (8 * std::pow(p.beta, 5) * std::pow(p.omega_J, 3)));
}

Complex pump_amplitude(const ModelParams& p) {
    return p.epsilon / Complex(0.5 * p.kappa_c, p.delta_c);
}

Complex stiff_pump_g(const ModelParams& p) {
    return coupling_g3(p) * p.epsilon / Complex(0.5 * p.kappa_c, -p.delta_c);
}

namespace {

double pump_per_coupling(const ModelParams& p) {
    return std::abs(Complex(0.5 * p.kappa_c, -p.delta_c)) / coupling_g3(p);
}

}  // namespace

double threshold_pump(const ModelParams& p) {
    NdpaParams n = NdpaParams::from_model(p);
    return n.threshold_coupling() * pump_per_coupling(p);
}

double expected_gain_to_pump(double gain_db, const ModelParams& p) {
    if (!(gain_db >= 0) || !std::isfinite(gain_db)) {
        throw std::invalid_argument("expected gain must be finite and non-negative");
    }
    if (gain_db == 0.0) return 0.0;
    NdpaParams n = NdpaParams::from_model(p);
    const double g_th = n.threshold_coupling();
    double g = 0.0;
    if (p.delta_a == 0.0 && p.delta_b == 0.0) {
        // S11(0) = (g^2 + ka kb/4) / (ka kb/4 - g^2)
        const double r = std::pow(10.0, gain_db / 20.0);
        g = std::sqrt(0.25 * p.kappa_a * p.kappa_b * (r - 1) / (r + 1));
    } else {
        double lo = 0.0, hi = g_th;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * g_th; ++it) {
            n.g = 0.5 * (lo + hi);
            (ndpa_gain(n) < gain_db ? lo : hi) = n.g;
        }
        g = 0.5 * (lo + hi);
        n.g = g;
        if (std::abs(ndpa_gain(n) - gain_db) > 1e-8) {
            throw std::invalid_argument("expected gain is not reachable below threshold");
        }
    }
    if (!(g < g_th)) throw std::invalid_argument("expected gain is not reachable below threshold");
    return g * pump_per_coupling(p);
}

TruncationConfig default_truncation(double gain_db, double beta) {
    const double g0 = std::ceil(gain_db - 1e-9);
    int n = 40;
    if (g0 <= 14) n = 20;
    else if (g0 <= 17) n = 30;
    else if (g0 <= 18) n = 34;
    else if (g0 <= 19) n = 36;
    return {n, beta <= 7.0 + 1e-12 ? 20 : 30};
}

double LadderTerm::weight_at(int mode, int source) const {
    const auto& w = weight[mode];
    if (w.empty()) return 1.0;
    if (source < 0 || source >= static_cast<int>(w.size())) return 0.0;
    return w[source];
}

LadderTerm LadderTerm::adjoint(const TruncationConfig& trunc) const {
    LadderTerm t;
    t.coef = std::conj(coef);
    for (int m = 0; m < 3; ++m) {
        t.shift[m] = -shift[m];
        if (weight[m].empty()) continue;
        const int cut = m == 2 ? trunc.n_c : trunc.n;
        t.weight[m].assign(cut, 0.0);
        // <q - d|T^dag|q> = conj(<q|T|q - d>)
        for (int q = 0; q < cut; ++q) t.weight[m][q] = weight_at(m, q - shift[m]);
    }
    return t;
}

void HamiltonianTerms::append(const HamiltonianTerms& other) {
    terms.insert(terms.end(), other.terms.begin(), other.terms.end());
}

void HamiltonianTerms::add_with_adjoint(const LadderTerm& t, const TruncationConfig& trunc) {
    terms.push_back(t);
    terms.push_back(t.adjoint(trunc));
}

namespace {

std::vector<double> table(int cut, auto&& f) {
    std::vector<double> w(cut);
    for (int s = 0; s < cut; ++s) w[s] = f(s);
    return w;
}

double sq(int s) { return std::sqrt(static_cast<double>(s)); }

LadderTerm ladder(Complex coef, std::array<int, 3> shift, std::vector<double> wa,
                  std::vector<double> wb, std::vector<double> wc) {
    LadderTerm t;
    t.coef = coef;
    t.shift = shift;
    t.weight = {std::move(wa), std::move(wb), std::move(wc)};
    return t;
}

}  // namespace

HamiltonianTerms interaction_terms(HamiltonianKind kind, const ModelParams& p,
                                   const TruncationConfig& trunc_in) {
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    const int n = trunc.n;
    const int nc = trunc.n_c;
    const Complex I(0, 1);
    HamiltonianTerms h;

    // Source-indexed ladder weights: a|s> = sqrt(s)|s-1>, c^dag|s> = sqrt(s+1)|s+1>.
    const auto lower = table(n, [](int s) { return sq(s); });
    const auto lower_weighted = table(n, [](int s) { return s * sq(s); });  // (n+1) a
    const auto raise_c = table(nc, [](int s) { return sq(s + 1); });
    const auto raise_c_weighted = table(nc, [](int s) { return (s + 1) * sq(s + 1); });

    const double g3 = coupling_g3(p);
    const double g5 = coupling_g5(p);
    switch (kind) {
        case HamiltonianKind::PrecondDrive: break;
        case HamiltonianKind::H3:
        case HamiltonianKind::H5:
            h.add_with_adjoint(ladder(I * g3, {-1, -1, 1}, lower, lower, raise_c), trunc);
            if (kind == HamiltonianKind::H5) {
                h.add_with_adjoint(ladder(-I * g5 * (0.5 * p.omega_a), {-1, -1, 1},
                                          lower_weighted, lower, raise_c),
                                   trunc);
                h.add_with_adjoint(ladder(-I * g5 * (0.5 * p.omega_b), {-1, -1, 1}, lower,
                                          lower_weighted, raise_c),
                                   trunc);
                h.add_with_adjoint(
                    ladder(-I * g5 * p.omega_c, {-1, -1, 1}, lower, lower, raise_c_weighted),
                    trunc);
            }
            break;
        case HamiltonianKind::HJ1: {
            const auto f = flux_scaling(p);
            const double xa = 0.5 * f.alpha_a * f.alpha_a;  // w_a / (4 beta w_J)
            const double xb = 0.5 * f.alpha_b * f.alpha_b;
            const double xc = 0.5 * f.alpha_c * f.alpha_c;  // w_c / (2 beta w_J)
            const double damping =
                std::exp(-(p.omega_a + p.omega_b + 2 * p.omega_c) / (8 * p.beta * p.omega_J));
            // |n_a,n_b,n_c+1><n_a+1,n_b+1,n_c| L1(n_a) L1(n_b) L1(n_c) / sqrt((n_a+1)(n_b+1)(n_c+1))
            auto ab_weight = [&](double x) {
                return table(n, [x](int s) { return s == 0 ? 0.0 : laguerre_gen(s - 1, 1, x) / sq(s); });
            };
            auto c_weight = table(nc, [xc](int s) { return laguerre_gen(s, 1, xc) / sq(s + 1); });
            h.add_with_adjoint(
                ladder(I * g3 * damping, {-1, -1, 1}, ab_weight(xa), ab_weight(xb), c_weight),
                trunc);
            break;
        }
        case HamiltonianKind::H3s:
        case HamiltonianKind::H5s: {
            const Complex g = stiff_pump_g(p);
            h.add_with_adjoint(ladder(I * g, {-1, -1, 0}, lower, lower, {}), trunc);
            if (kind == HamiltonianKind::H5s) {
                const Complex g5s = -I * g / (2 * p.beta * p.omega_J);
                const double pump_number = std::norm(pump_amplitude(p));
                h.add_with_adjoint(
                    ladder(g5s * (0.5 * p.omega_a), {-1, -1, 0}, lower_weighted, lower, {}), trunc);
                h.add_with_adjoint(
                    ladder(g5s * (0.5 * p.omega_b), {-1, -1, 0}, lower, lower_weighted, {}), trunc);
                h.add_with_adjoint(
                    ladder(g5s * (p.omega_c * (pump_number + 1.0)), {-1, -1, 0}, lower, lower, {}),
                    trunc);
            }
            break;
        }
    }
    return h;
}

ReferencePart reference_part(HamiltonianKind kind, const ModelParams& p) {
    ReferencePart r;
    r.delta_a = p.delta_a;
    r.delta_b = p.delta_b;
    r.kappa_a = p.kappa_a;
    r.kappa_b = p.kappa_b;
    r.kappa_c = p.kappa_c;
    if (!is_stiff_pump(kind)) {
        r.delta_c = p.delta_c;
        r.drive = p.epsilon;
    }
    return r;
}

HamiltonianTerms reference_terms(const ReferencePart& ref, const TruncationConfig& trunc) {
    HamiltonianTerms h;
    auto number = [](int cut) { return table(cut, [](int s) { return static_cast<double>(s); }); };
    if (ref.delta_a != 0.0) h.terms.push_back(ladder(ref.delta_a, {0, 0, 0}, number(trunc.n), {}, {}));
    if (ref.delta_b != 0.0) h.terms.push_back(ladder(ref.delta_b, {0, 0, 0}, {}, number(trunc.n), {}));
    if (ref.delta_c != 0.0) {
        h.terms.push_back(ladder(ref.delta_c, {0, 0, 0}, {}, {}, number(trunc.n_c)));
    }
    if (ref.drive != Complex{}) {
        h.add_with_adjoint(ladder(Complex(0, 1) * ref.drive, {0, 0, 1}, {}, {},
                                  table(trunc.n_c, [](int s) { return sq(s + 1); })),
                           trunc);
    }
    return h;
}

LiouvillianSpec liouvillian_spec(HamiltonianKind kind, const ModelParams& p,
                                 const TruncationConfig& trunc) {
    return {reference_part(kind, p), interaction_terms(kind, p, trunc)};
}

CouplingList::CouplingList(BlockMapPtr map, std::vector<std::size_t> row_ptr,
                           std::vector<std::uint32_t> columns, std::vector<Complex> values)
    : map_(std::move(map)),
      row_ptr_(std::move(row_ptr)),
      columns_(std::move(columns)),
      values_(std::move(values)) {}

std::vector<CouplingList::Coupling> CouplingList::couplings() const {
    std::vector<Coupling> out;
    out.reserve(values_.size());
    for (std::size_t row = 0; row + 1 < row_ptr_.size(); ++row) {
        for (std::size_t j = row_ptr_[row]; j < row_ptr_[row + 1]; ++j) {
            out.push_back({map_->element(columns_[j]), map_->element(row), values_[j]});
        }
    }
    return out;
}

Complex CouplingList::coefficient(std::size_t dst, std::size_t src) const {
    for (std::size_t j = row_ptr_[dst]; j < row_ptr_[dst + 1]; ++j) {
        if (columns_[j] == src) return values_[j];
    }
    return {};
}

Eigen::SparseMatrix<Complex, Eigen::RowMajor> CouplingList::to_sparse() const {
    const auto n = static_cast<Eigen::Index>(map_->size());
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(values_.size());
    for (std::size_t row = 0; row + 1 < row_ptr_.size(); ++row) {
        for (std::size_t j = row_ptr_[row]; j < row_ptr_[row + 1]; ++j) {
            trip.emplace_back(static_cast<Eigen::Index>(row), columns_[j], values_[j]);
        }
    }
    Eigen::SparseMatrix<Complex, Eigen::RowMajor> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

void CouplingList::apply(const Vector& x, Vector& y, bool accumulate) const {
    const std::size_t rows = map_->size();
    if (!accumulate) y.setZero(static_cast<Eigen::Index>(rows));
    if (values_.empty()) return;
    const Complex* xp = x.data();
    Complex* yp = y.data();
    for (std::size_t row = 0; row < rows; ++row) {
        Complex acc{};
        for (std::size_t j = row_ptr_[row]; j < row_ptr_[row + 1]; ++j) acc += values_[j] * xp[columns_[j]];
        yp[row] += acc;
    }
}

CouplingList build_couplings(const HamiltonianTerms& h, const BlockMapPtr& map) {
    const auto& m = *map;
    const auto& t = m.truncation();
    const int nc = t.n_c;
    for (const auto& term : h.terms) {
        if (term.shift[0] != term.shift[1]) {
            throw std::logic_error("build_couplings: term does not conserve a1 - b1 - a2 + b2");
        }
    }
    std::vector<std::size_t> row_ptr(m.size() + 1, 0);
    std::vector<std::uint32_t> cols;
    std::vector<Complex> vals;
    if (h.terms.empty()) return CouplingList(map, std::move(row_ptr), {}, {});
    cols.reserve(m.size() * h.terms.size());
    vals.reserve(m.size() * h.terms.size());

    const Complex minus_i(0, -1);
    std::vector<std::pair<std::uint32_t, Complex>> row;
    const std::size_t inner = m.inner_size();
    for (std::size_t jb = 0; jb < m.block_count(); ++jb) {
        const auto& blk = m.block(jb);
        for (int c1 = 0; c1 < nc; ++c1) {
            for (int c2 = 0; c2 < nc; ++c2) {
                row.clear();
                for (const auto& term : h.terms) {
                    const int da = term.shift[0], db = term.shift[1], dc = term.shift[2];
                    // (H rho)_{p1,p2} = <p1|T|p1-d> rho_{p1-d,p2}
                    {
                        const int sa = blk.a1 - da, sb = blk.b1 - db, sc = c1 - dc;
                        const auto src_block = m.block_index(sa, sb, blk.a2, blk.b2);
                        if (src_block >= 0 && sc >= 0 && sc < nc) {
                            const double w =
                                term.weight_at(0, sa) * term.weight_at(1, sb) * term.weight_at(2, sc);
                            if (w != 0.0) {
                                row.emplace_back(
                                    static_cast<std::uint32_t>(src_block * inner + sc * nc + c2),
                                    minus_i * term.coef * w);
                            }
                        }
                    }
                    // (rho H)_{p1,p2} = rho_{p1,p2+d} <p2+d|T|p2>
                    {
                        const int sa = blk.a2 + da, sb = blk.b2 + db, sc = c2 + dc;
                        const auto src_block = m.block_index(blk.a1, blk.b1, sa, sb);
                        if (src_block >= 0 && sc >= 0 && sc < nc) {
                            const double w = term.weight_at(0, blk.a2) * term.weight_at(1, blk.b2) *
                                             term.weight_at(2, c2);
                            if (w != 0.0) {
                                row.emplace_back(
                                    static_cast<std::uint32_t>(src_block * inner + c1 * nc + sc),
                                    -minus_i * term.coef * w);
                            }
                        }
                    }
                }
                std::sort(row.begin(), row.end(),
                          [](const auto& x, const auto& y) { return x.first < y.first; });
                for (std::size_t i = 0; i < row.size();) {
                    std::size_t j = i;
                    Complex v{};
                    while (j < row.size() && row[j].first == row[i].first) v += row[j++].second;
                    if (v != Complex{}) {
                        cols.push_back(row[i].first);
                        vals.push_back(v);
                    }
                    i = j;
                }
                row_ptr[jb * inner + c1 * nc + c2 + 1] = vals.size();
            }
        }
    }
    return CouplingList(map, std::move(row_ptr), std::move(cols), std::move(vals));
}

CouplingList build_hamiltonian(HamiltonianKind kind, const ModelParams& p,
                               const TruncationConfig& trunc_in, int k) {
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    trunc.validate();
    if (std::abs(k) > 2 * (trunc.n - 1)) {
        throw std::invalid_argument("build_hamiltonian: sector " + std::to_string(k) +
                                    " is outside the truncation");
    }
    HamiltonianTerms h = reference_terms(reference_part(kind, p), trunc);
    h.append(interaction_terms(kind, p, trunc));
    return build_couplings(h, build_block_map(trunc, k));
}

double hermiticity_defect(const CouplingList& plus, const CouplingList& minus) {
    if (plus.map().sector() != -minus.map().sector()) {
        throw std::invalid_argument("hermiticity_defect: lists are not on opposite sectors");
    }
    double worst = 0.0;
    auto check = [&worst](const CouplingList& x, const CouplingList& y) {
        for (const auto& c : x.couplings()) {
            const auto d = y.map().index_of(c.destination.adjoint());
            const auto s = y.map().index_of(c.source.adjoint());
            const Complex mirror = (d < 0 || s < 0) ? Complex{}
                                                    : y.coefficient(static_cast<std::size_t>(d),
                                                                    static_cast<std::size_t>(s));
            worst = std::max(worst, std::abs(c.coefficient - std::conj(mirror)));
        }
    };
    check(plus, minus);
    check(minus, plus);
    return worst;
}

}  // namespace ringmix
