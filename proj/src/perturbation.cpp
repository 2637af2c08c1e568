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

#include "ringmix/perturbation.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "ringmix/liouvillian.hpp"

namespace ringmix {

SuperOp DisplacedFrame::l0(const TruncationConfig& trunc, int k, Complex shift) const {
    return displaced_superop(params, trunc, k, 0.0, shift);
}

CouplingList DisplacedFrame::l1(const TruncationConfig& trunc, int k) const {
    return three_wave_couplings(params, trunc, k, 1.0);
}

SuperOp DisplacedFrame::full(const TruncationConfig& trunc, int k, double lambda, Complex shift) const {
    return displaced_superop(params, trunc, k, lambda, shift);
}

BlockState DisplacedFrame::zeroth_order_state(const TruncationConfig& trunc) const {
    Eigen::MatrixXcd vac = Eigen::MatrixXcd::Zero(trunc.n_c, trunc.n_c);
    vac(0, 0) = 1.0;
    return tensor_with_pump(tmst_number_coeffs(ndpa, trunc), vac, trunc);
}

DisplacedFrame displaced_frame(const ModelParams& p) {
    p.validate();
    if (!(p.kappa_c > 0.0)) throw std::invalid_argument("displaced_frame: kappa_c must be positive");
    DisplacedFrame f;
    f.params = p;
    f.alpha = pump_amplitude(p);
    f.ndpa = NdpaParams::from_model(p);
    return f;
}

std::string to_string(SeriesObservable o) {
    switch (o) {
        case SeriesObservable::Na: return "N_a";
        case SeriesObservable::Nb: return "N_b";
        case SeriesObservable::Mab: return "M_ab";
        case SeriesObservable::AmplitudeGain: return "amplitude_gain";
    }
    return "?";
}

std::vector<Complex> SeriesCoeffs::z_coeffs() const {
    std::vector<Complex> z;
    for (std::size_t j = 0; j < c.size(); j += 2) z.push_back(c[j]);
    return z;
}

Complex SeriesCoeffs::partial_sum(double lambda, int order) const {
    Complex sum{};
    double lp = 1.0;
    for (int j = 0; j <= std::min(order, max_order()); ++j) {
        sum += c[static_cast<std::size_t>(j)] * lp;
        lp *= lambda;
    }
    return sum;
}

const SeriesCoeffs& SeriesSet::get(SeriesObservable o) const {
    switch (o) {
        case SeriesObservable::Na: return n_a;
        case SeriesObservable::Nb: return n_b;
        case SeriesObservable::Mab: return m_ab;
        case SeriesObservable::AmplitudeGain: return ratio;
    }
    return ratio;
}

MomentSet SeriesSet::moments(double lambda, int order) const {
    MomentSet m;
    m.omega = omega;
    m.n_a = n_a.partial_sum(lambda, order).real();
    m.n_b = n_b.partial_sum(lambda, order).real();
    m.m_ab = m_ab.partial_sum(lambda, order);
    return m;
}

int series_pump_levels(int max_order) { return max_order / 2 + 1; }

TruncationConfig series_truncation(double g0_db, int max_order) {
    TruncationConfig t = default_truncation(std::max(g0_db, 0.0), 3.0);
    t.n_c = series_pump_levels(max_order);
    return t;
}

namespace {

BlockState apply_l1(const CouplingList& l1, const BlockState& x) {
    BlockState y(x.map);
    l1.apply(x.data, y.data, false);
    return y;
}

}  // namespace

SeriesSet series_set(const ModelParams& p, const TruncationConfig& trunc, const SeriesOptions& opt,
                     const SolverConfig& cfg) {
    if (opt.max_order < 0) throw std::invalid_argument("series_set: negative order");
    trunc.validate();
    const DisplacedFrame frame = displaced_frame(p);
    if (!frame.ndpa.below_threshold()) throw std::invalid_argument("series_set: pump at or above threshold");

    const double eta = regularization_scale(p);
    const double ka = p.kappa_a, kb = p.kappa_b;
    const Complex iw(0, opt.omega);
    const bool same_shift = opt.omega == 0.0;

    SeriesSet out;
    out.trunc = trunc;
    out.omega = opt.omega;
    const auto n = static_cast<std::size_t>(opt.max_order + 1);
    out.n_a = {SeriesObservable::Na, std::vector<Complex>(n)};
    out.n_b = {SeriesObservable::Nb, std::vector<Complex>(n)};
    out.m_ab = {SeriesObservable::Mab, std::vector<Complex>(n)};
    out.ratio = {SeriesObservable::AmplitudeGain, std::vector<Complex>(n)};

    const SectorSystem sys0(frame.l0(trunc, 0), eta, cfg.precond);
    const SectorSystem sys_r(frame.l0(trunc, 1), 0.0, cfg.precond);
    std::optional<SectorSystem> sys_y_store;
    if (!same_shift) sys_y_store.emplace(frame.l0(trunc, 1, iw), 0.0, cfg.precond);
    const SectorSystem& sys_y = same_shift ? sys_r : std::as_const(*sys_y_store);
    const CouplingList l1_0 = frame.l1(trunc, 0);
    const CouplingList l1_1 = frame.l1(trunc, 1);

    auto solve = [&](const char* label, int order, const SectorSystem& sys, const BlockState& rhs,
                     const BlockState& guess) {
        SolveReport report;
        BlockState x = sys.solve(rhs, guess, cfg, &report);
        out.log.add(std::string(label) + "[" + std::to_string(order) + "]", std::move(report));
        return x;
    };

    // Order 0: the NDPA problem with the pump in vacuum.
    SolveReport report;
    const BlockState guess0 = initial_guess(GuessKind::Steady, frame.ndpa, Complex{}, trunc, 0.0);
    BlockState rho = solve_steady(frame.l0(trunc, 0), eta, guess0, cfg, &report);
    out.log.add("rho[0]", std::move(report));
    BlockState yb = solve("y_b", 0, sys_y, rhs_b_rho(rho),
                          initial_guess(GuessKind::ResolventB, frame.ndpa, Complex{}, trunc, opt.omega));
    BlockState ya = solve("y_a", 0, sys_y, rhs_rho_adag(rho),
                          initial_guess(GuessKind::ResolventA, frame.ndpa, Complex{}, trunc, opt.omega));
    BlockState r1 = solve("rho1", 0, sys_r, rhs_gain(rho, ka),
                          initial_guess(GuessKind::GainRho1, frame.ndpa, Complex{}, trunc, 0.0));

    auto record = [&](int order) {
        const auto j = static_cast<std::size_t>(order);
        const MomentSet m = moments_from(yb, ya, ka, kb, opt.omega);
        out.n_a.c[j] = m.n_a;
        out.n_b.c[j] = m.n_b;
        out.m_ab.c[j] = m.m_ab;
        out.ratio.c[j] = std::sqrt(ka) * trace_product(r1, Mode::A, Ladder::Lower) - (order == 0 ? 1.0 : 0.0);
    };
    record(0);

    const BlockState zero0(rho.map), zero1(yb.map);
    for (int m = 1; m <= opt.max_order; ++m) {
        BlockState rhs0 = apply_l1(l1_0, rho);
        rhs0.data = -rhs0.data;
        rho = solve("rho", m, sys0, rhs0, zero0);

        BlockState rb = rhs_b_rho(rho);
        rb.data -= apply_l1(l1_1, yb).data;
        BlockState ra = rhs_rho_adag(rho);
        ra.data -= apply_l1(l1_1, ya).data;
        BlockState rg = rhs_gain(rho, ka);
        rg.data -= apply_l1(l1_1, r1).data;
        yb = solve("y_b", m, sys_y, rb, zero1);
        ya = solve("y_a", m, sys_y, ra, zero1);
        r1 = solve("rho1", m, sys_r, rg, zero1);

        if (m % 2 == 0 || opt.compute_odd) record(m);
    }
    return out;
}

SeriesCoeffs series_coeffs(SeriesObservable o, const ModelParams& p, const TruncationConfig& trunc,
                           int max_order, const SolverConfig& cfg) {
    SeriesOptions opt;
    opt.max_order = max_order;
    return series_set(p, trunc, opt, cfg).get(o);
}

DisplacedPoint displaced_point(const ModelParams& p, const TruncationConfig& trunc, double lambda,
                               double omega, const SolverConfig& cfg) {
    trunc.validate();
    const DisplacedFrame frame = displaced_frame(p);
    const double eta = regularization_scale(p);
    const Complex iw(0, omega);
    DisplacedPoint out;

    SolveReport report;
    const BlockState guess0 = initial_guess(GuessKind::Steady, frame.ndpa, Complex{}, trunc, 0.0);
    const BlockState rho = solve_steady(frame.full(trunc, 0, lambda), eta, guess0, cfg, &report);
    out.log.add("steady", std::move(report));

    const SectorSystem sys_r(frame.full(trunc, 1, lambda), 0.0, cfg.precond);
    std::optional<SectorSystem> sys_y_store;
    if (omega != 0.0) sys_y_store.emplace(frame.full(trunc, 1, lambda, iw), 0.0, cfg.precond);
    const SectorSystem& sys_y = omega == 0.0 ? sys_r : std::as_const(*sys_y_store);

    auto solve = [&](const char* label, const SectorSystem& sys, const BlockState& rhs, GuessKind g, double w) {
        SolveReport r;
        BlockState x = sys.solve(rhs, initial_guess(g, frame.ndpa, Complex{}, trunc, w), cfg, &r);
        out.log.add(label, std::move(r));
        return x;
    };
    const BlockState yb = solve("resolvent_b", sys_y, rhs_b_rho(rho), GuessKind::ResolventB, omega);
    const BlockState ya = solve("resolvent_a", sys_y, rhs_rho_adag(rho), GuessKind::ResolventA, omega);
    const BlockState r1 = solve("gain_rho1", sys_r, rhs_gain(rho, p.kappa_a), GuessKind::GainRho1, 0.0);
    out.moments = moments_from(yb, ya, p.kappa_a, p.kappa_b, omega);
    out.ratio = gain_ratio_from(r1, p.kappa_a);
    return out;
}

std::vector<Complex> PadeApproximant::taylor(int order) const {
    // Q t = P, solved term by term with Q(0) = 1.
    std::vector<Complex> t(static_cast<std::size_t>(order + 1));
    for (int k = 0; k <= order; ++k) {
        Complex v = k <= p() ? num[static_cast<std::size_t>(k)] : Complex{};
        for (int j = 1; j <= std::min(k, q()); ++j) {
            v -= den[static_cast<std::size_t>(j)] * t[static_cast<std::size_t>(k - j)];
        }
        t[static_cast<std::size_t>(k)] = v;
    }
    return t;
}

PadeApproximant pade(const std::vector<Complex>& a, int p, int q) {
    if (p < 0 || q < 0) throw std::invalid_argument("pade: negative order");
    if (static_cast<std::size_t>(p + q + 1) > a.size()) {
        throw std::invalid_argument("pade: p + q + 1 exceeds the number of known coefficients");
    }
    auto coef = [&a](int k) { return k < 0 ? Complex{} : a[static_cast<std::size_t>(k)]; };
    PadeApproximant r;
    r.den.assign(static_cast<std::size_t>(q + 1), Complex{});
    r.den[0] = 1.0;
    if (q > 0) {
        // sum_{j=1..q} b_j a_{k-j} = -a_k for k = p+1 .. p+q
        Eigen::MatrixXcd m(q, q);
        Eigen::VectorXcd rhs(q);
        for (int i = 0; i < q; ++i) {
            const int k = p + 1 + i;
            for (int j = 1; j <= q; ++j) m(i, j - 1) = coef(k - j);
            rhs[i] = -coef(k);
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
        double scale = 0.0;
        for (int k = 0; k <= p + q; ++k) scale = std::max(scale, std::abs(coef(k)));
        lu.setThreshold(1e-13);
        if (scale == 0.0 || !lu.isInvertible()) throw PadeError("pade: singular system (degenerate series)");
        const Eigen::VectorXcd b = lu.solve(rhs);
        for (int j = 1; j <= q; ++j) r.den[static_cast<std::size_t>(j)] = b[j - 1];
    }
    r.num.assign(static_cast<std::size_t>(p + 1), Complex{});
    for (int k = 0; k <= p; ++k) {
        Complex v{};
        for (int j = 0; j <= std::min(k, q); ++j) v += r.den[static_cast<std::size_t>(j)] * coef(k - j);
        r.num[static_cast<std::size_t>(k)] = v;
    }
    return r;
}

PadeApproximant pade(const SeriesCoeffs& series, int p, int q) { return pade(series.z_coeffs(), p, q); }

namespace {

Complex horner(const std::vector<Complex>& c, Complex z) {
    Complex v{};
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
    return v;
}

}  // namespace

PadeValue evaluate(const PadeApproximant& approx, double lambda) {
    const Complex z = lambda * lambda;
    PadeValue out;
    const Complex qz = horner(approx.den, z);
    double qscale = 0.0;
    for (std::size_t j = 0; j < approx.den.size(); ++j) qscale += std::abs(approx.den[j]) * std::pow(std::abs(z), j);
    if (std::abs(qz) <= 1e-12 * qscale) {
        out.pole_crossing = true;
        out.value = Complex(std::nan(""), std::nan(""));
        return out;
    }
    out.value = horner(approx.num, z) / qz;

    // Roots of Q in the z-plane; a root on [0, z] means the path from the expansion point
    // passes through a pole.
    int deg = approx.q();
    while (deg > 0 && approx.den[static_cast<std::size_t>(deg)] == Complex{}) --deg;
    if (deg > 0 && std::abs(z) > 0.0) {
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
        const Complex lead = approx.den[static_cast<std::size_t>(deg)];
        for (int i = 0; i < deg; ++i) companion(0, i) = -approx.den[static_cast<std::size_t>(deg - 1 - i)] / lead;
        for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
        const Eigen::VectorXcd roots = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(companion).eigenvalues();
        for (Eigen::Index i = 0; i < roots.size(); ++i) {
            const Complex t = roots[i] / z;
            if (t.real() > 0.0 && t.real() <= 1.0 && std::abs(t.imag()) <= 1e-3 * std::max(1.0, std::abs(t))) {
                out.pole_crossing = true;
            }
        }
    }
    return out;
}

std::vector<std::pair<int, int>> pade_staircase(int max_order) {
    const int known = max_order / 2 + 1;  // z coefficients
    std::vector<std::pair<int, int>> out;
    for (const auto& pq : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}}) {
        if (pq.first + pq.second + 1 <= known) out.push_back(pq);
    }
    return out;
}

}  // namespace ringmix
