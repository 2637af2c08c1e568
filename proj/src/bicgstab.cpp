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

#include <cmath>
#include <limits>

#include "ringmix/solver.hpp"

namespace ringmix {

namespace {

Complex dot(const Vector& x, const Vector& y, bool strict) {
    if (!strict) return x.dot(y);
    Complex s{};
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double norm(const Vector& x, bool strict) {
    if (!strict) return x.norm();
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::norm(x[i]);
    return std::sqrt(s);
}

}  // namespace

Vector bicgstab(const LinearOperator& apply_a, const Vector& b, const Vector& x0,
                const LinearOperator* precond, const SolverConfig& cfg, SolveReport* report_out) {
    const bool strict = cfg.strict_reduction;
    SolveReport report;
    const auto n = b.size();
    if (x0.size() != n) throw std::invalid_argument("bicgstab: initial guess has the wrong size");
    const double bnorm = norm(b, strict);
    Vector x = x0;
    if (bnorm == 0.0) {
        x.setZero();
        report.converged = true;
        report.status = "zero rhs";
        report.history.push_back(0.0);
        if (report_out) *report_out = report;
        return x;
    }

    auto precondition = [&](const Vector& in, Vector& out) {
        if (precond) (*precond)(in, out);
        else out = in;
    };

    Vector r(n), ax(n);
    apply_a(x, ax);
    r = b - ax;
    double rel = norm(r, strict) / bnorm;
    report.history.push_back(rel);
    Vector best = x;
    double best_rel = rel;
    if (rel <= cfg.rel_tol) {
        report.converged = true;
        report.residual = rel;
        report.status = "converged";
        if (report_out) *report_out = report;
        return x;
    }

    Vector r_hat = r, p = Vector::Zero(n), v = Vector::Zero(n);
    Vector p_hat(n), s(n), s_hat(n), t(n);
    Complex rho(1.0), alpha(1.0), omega(1.0);
    const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

    auto restart = [&](const char* why) {
        if (report.restarts >= 1) {
            report.residual = best_rel;
            report.status = std::string("breakdown: ") + why;
            if (report_out) *report_out = report;
            throw SolverError(SolverError::Kind::Breakdown, "BiCGSTAB breakdown (" + std::string(why) + ")",
                              report, best);
        }
        ++report.restarts;
        apply_a(x, ax);
        r = b - ax;
        r_hat = r;
        p.setZero();
        v.setZero();
        rho = alpha = omega = 1.0;
    };

    // Accept x if its true residual meets the tolerance; otherwise resume from it.
    auto accept = [&]() {
        apply_a(x, ax);
        r = b - ax;
        const double true_rel = norm(r, strict) / bnorm;
        if (true_rel < best_rel) {
            best_rel = true_rel;
            best = x;
        }
        if (true_rel <= cfg.rel_tol) {
            report.converged = true;
            report.residual = true_rel;
            report.status = "converged";
            return true;
        }
        r_hat = r;
        p.setZero();
        v.setZero();
        rho = alpha = omega = 1.0;
        return false;
    };

    for (int it = 1; it <= cfg.max_iter; ++it) {
        report.iterations = it;
        const Complex rho_new = dot(r_hat, r, strict);
        if (std::abs(rho_new) < tiny * bnorm * bnorm) {
            restart("rho");
            continue;
        }
        const Complex beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        p = r + beta * (p - omega * v);
        precondition(p, p_hat);
        apply_a(p_hat, v);
        const Complex rv = dot(r_hat, v, strict);
        if (std::abs(rv) < tiny * bnorm * bnorm) {
            restart("alpha");
            continue;
        }
        alpha = rho / rv;
        s = r - alpha * v;
        const double srel = norm(s, strict) / bnorm;
        if (srel <= cfg.rel_tol) {
            x += alpha * p_hat;
            report.history.push_back(srel);
            if (accept()) break;
            continue;
        }
        precondition(s, s_hat);
        apply_a(s_hat, t);
        const double tt = std::pow(norm(t, strict), 2);
        if (tt == 0.0) {
            x += alpha * p_hat;
            restart("omega");
            continue;
        }
        omega = dot(t, s, strict) / tt;
        x += alpha * p_hat + omega * s_hat;
        r = s - omega * t;
        rel = norm(r, strict) / bnorm;
        report.history.push_back(rel);
        if (!std::isfinite(rel)) {
            restart("non-finite residual");
            continue;
        }
        if (rel <= cfg.rel_tol) {
            if (accept()) break;
            continue;
        }
        if (std::abs(omega) < tiny) restart("omega");
    }

    if (!report.converged) {
        apply_a(x, ax);
        const double last_rel = norm(b - ax, strict) / bnorm;
        if (last_rel < best_rel) {
            best_rel = last_rel;
            best = x;
        }
        report.residual = best_rel;
        report.status = "max iterations";
        if (report_out) *report_out = report;
        throw SolverError(SolverError::Kind::MaxIterations,
                          "BiCGSTAB did not converge in " + std::to_string(cfg.max_iter) +
                              " iterations (best residual " + std::to_string(best_rel) + ")",
                          report, best);
    }
    if (report_out) *report_out = report;
    return x;
}

}  // namespace ringmix
