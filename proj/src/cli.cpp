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

#include "ringmix/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "ringmix/dense_oracle.hpp"
#include "ringmix/liouvillian.hpp"
#include "ringmix/ndpa.hpp"
#include "ringmix/observables.hpp"
#include "ringmix/perturbation.hpp"

namespace ringmix::cli {

using nlohmann::json;

ModelParams RunConfig::resolved_params() const {
    ModelParams p = params;
    if (critical_current) p.omega_J = omega_J_from_critical_current(*critical_current);
    p.omega_c = omega_c ? *omega_c : derive_omega_c(p.omega_a, p.omega_b);
    return p;
}

SolverConfig RunConfig::solver() const {
    SolverConfig s;
    s.rel_tol = tol;
    s.max_iter = max_iter;
    s.strict_reduction = strict;
    if (precond == "gauss-seidel") s.precond = PrecondKind::GaussSeidel;
    else if (precond == "block-jacobi") s.precond = PrecondKind::BlockJacobi;
    else if (precond == "none") s.precond = PrecondKind::None;
    else throw std::invalid_argument("unknown preconditioner '" + precond + "'");
    return s;
}

namespace {

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < v.size() && std::isspace(static_cast<unsigned char>(v[used]))) ++used;
    if (used == 0 || used != v.size()) throw std::invalid_argument("bad number for '" + key + "': " + v);
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw std::invalid_argument("bad integer for '" + key + "': " + v);
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("bad boolean for '" + key + "': " + v);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::string t = trim(text);
    if (t.empty()) return out;
    if (t.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(t);
        std::string piece;
        while (std::getline(ss, piece, ':')) parts.push_back(to_double("range", trim(piece)));
        if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("bad range: " + text);
        const double step = parts.size() == 3 ? parts[2] : 1.0;
        if (!(step > 0.0)) throw std::invalid_argument("range step must be positive: " + text);
        const double tol = 1e-9 * step;
        for (int i = 0;; ++i) {
            const double v = parts[0] + i * step;
            if (v > parts[1] + tol) break;
            out.push_back(v);
        }
        return out;
    }
    for (char& c : t) {
        if (c == ',' || c == ';') c = ' ';
    }
    std::stringstream ss(t);
    std::string piece;
    while (ss >> piece) out.push_back(to_double("list", piece));
    return out;
}

void set_key(RunConfig& cfg, const std::string& key_in, const std::string& value_in) {
    const std::string value = trim(value_in);
    std::string key = trim(key_in);
    for (char& c : key) c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    double scale = 1.0;
    if (key.size() > 3 && key.compare(key.size() - 3, 3, "_hz") == 0) {
        scale = 2 * kPi;
        key.resize(key.size() - 3);
    }
    auto freq = [&] { return scale * to_double(key, value); };
    auto& p = cfg.params;

    if (key == "hamiltonian") cfg.kind = parse_hamiltonian_kind(value);
    else if (key == "beta") p.beta = to_double(key, value);
    else if (key == "g0") cfg.g0_db = parse_number_list(value);
    else if (key == "epsilon") {
        cfg.epsilon = parse_number_list(value);
        for (double& e : cfg.epsilon) e *= scale;
    }
    else if (key == "omega") cfg.omega = freq();
    else if (key == "omega_a") p.omega_a = freq();
    else if (key == "omega_b") p.omega_b = freq();
    else if (key == "omega_c") cfg.omega_c = freq();
    else if (key == "omega_j") {
        p.omega_J = freq();
        cfg.critical_current.reset();
    }
    else if (key == "i_c") cfg.critical_current = to_double(key, value);
    else if (key == "kappa_a") p.kappa_a = freq();
    else if (key == "kappa_b") p.kappa_b = freq();
    else if (key == "kappa_c") p.kappa_c = freq();
    else if (key == "delta_a") p.delta_a = freq();
    else if (key == "delta_b") p.delta_b = freq();
    else if (key == "delta_c") p.delta_c = freq();
    else if (key == "n") cfg.n = to_int(key, value);
    else if (key == "nc" || key == "n_c") cfg.n_c = to_int(key, value);
    else if (key == "tol") cfg.tol = to_double(key, value);
    else if (key == "max_iter") cfg.max_iter = to_int(key, value);
    else if (key == "jobs") cfg.jobs = std::max(1, to_int(key, value));
    else if (key == "strict") cfg.strict = to_bool(key, value);
    else if (key == "precond") cfg.precond = value;
    else if (key == "out") cfg.out = value;
    else if (key == "omega_max") cfg.omega_max = freq();
    else if (key == "points") cfg.points = to_int(key, value);
    else if (key == "max_order") cfg.max_order = to_int(key, value);
    else if (key == "numeric_nc") cfg.numeric_nc = to_int(key, value);
    else if (key == "level") cfg.level = to_int(key, value);
    else throw std::invalid_argument("unknown configuration key '" + key_in + "'");
}

void load_ini(RunConfig& cfg, std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        set_key(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

namespace {

std::string json_scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return {};
    return v.dump();
}

}  // namespace

void load_json(RunConfig& cfg, const json& j_in) {
    const json& j = j_in.contains("config") ? j_in.at("config") : j_in;
    if (!j.is_object()) throw std::invalid_argument("JSON config must be an object");
    for (const auto& [key, v] : j.items()) {
        if (v.is_null()) continue;
        if (v.is_array()) {
            std::string joined;
            for (const auto& e : v) joined += json_scalar(e) + ",";
            set_key(cfg, key, joined);
        } else {
            set_key(cfg, key, json_scalar(v));
        }
    }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool is_json = (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) ||
                         (first != std::string::npos && text[first] == '{');
    if (is_json) {
        load_json(cfg, json::parse(text));
    } else {
        std::istringstream s(text);
        load_ini(cfg, s);
    }
}

json to_json(const RunConfig& cfg) {
    const ModelParams& p = cfg.params;
    json j;
    j["hamiltonian"] = std::string(to_string(cfg.kind));
    j["beta"] = p.beta;
    j["omega_a"] = p.omega_a;
    j["omega_b"] = p.omega_b;
    if (cfg.omega_c) j["omega_c"] = *cfg.omega_c;
    if (cfg.critical_current) j["i_c"] = *cfg.critical_current;
    else j["omega_j"] = p.omega_J;
    j["kappa_a"] = p.kappa_a;
    j["kappa_b"] = p.kappa_b;
    j["kappa_c"] = p.kappa_c;
    j["delta_a"] = p.delta_a;
    j["delta_b"] = p.delta_b;
    j["delta_c"] = p.delta_c;
    j["g0"] = cfg.g0_db;
    j["epsilon"] = cfg.epsilon;
    j["omega"] = cfg.omega;
    if (cfg.n) j["n"] = *cfg.n;
    if (cfg.n_c) j["nc"] = *cfg.n_c;
    j["tol"] = cfg.tol;
    j["max_iter"] = cfg.max_iter;
    j["jobs"] = cfg.jobs;
    j["strict"] = cfg.strict;
    j["precond"] = cfg.precond;
    j["omega_max"] = cfg.omega_max;
    j["points"] = cfg.points;
    j["max_order"] = cfg.max_order;
    j["numeric_nc"] = cfg.numeric_nc;
    j["level"] = cfg.level;
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double v) {
    if (!std::isfinite(v)) return {};
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

std::string csv_opt(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cells[i]);
    }
    return out;
}

std::string sidecar_path(const std::string& out) {
    if (out.size() > 4 && out.compare(out.size() - 4, 4, ".csv") == 0) return out.substr(0, out.size() - 4) + ".json";
    return out + ".json";
}

// CSV goes to --out when given, stdout otherwise; the JSON sidecar only with --out.
void emit(const RunConfig& cfg, const std::string& csv, const json& sidecar, std::ostream& log) {
    if (cfg.out.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw std::runtime_error("cannot write " + cfg.out);
    f << csv;
    const std::string side = sidecar_path(cfg.out);
    std::ofstream s(side);
    if (!s) throw std::runtime_error("cannot write " + side);
    s << sidecar.dump(2) << "\n";
    log << "wrote " << cfg.out << " and " << side << "\n";
}

std::string unit_header(const RunConfig& cfg, const char* command) {
    const ModelParams p = cfg.resolved_params();
    std::ostringstream h;
    h << "# ringmix " << command << " hamiltonian=" << to_string(cfg.kind) << " beta=" << p.beta << "\n";
    h << "# frequencies in rad/s; omega_J=" << p.omega_J << " kappa_a=" << p.kappa_a << " kappa_b=" << p.kappa_b
      << " kappa_c=" << p.kappa_c << " omega=" << cfg.omega << "\n";
    return h.str();
}

json solve_log_json(const SolveLog& log) {
    json a = json::array();
    for (std::size_t i = 0; i < log.reports.size(); ++i) {
        const auto& r = log.reports[i];
        a.push_back({{"label", log.labels[i]},
                     {"iterations", r.iterations},
                     {"restarts", r.restarts},
                     {"residual", r.residual},
                     {"converged", r.converged},
                     {"status", r.status}});
    }
    return a;
}

double pump_power_norm(double epsilon, double kappa_c) { return std::pow(2.0 * epsilon / kappa_c, 2); }

}  // namespace

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    const ModelParams p = cfg.resolved_params();
    p.validate();
    SweepOptions opt;
    opt.n = cfg.n;
    opt.n_c = cfg.n_c;
    opt.omega = cfg.omega;
    opt.jobs = cfg.jobs;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<PointResult> points = cfg.epsilon.empty()
                                                ? sweep(cfg.kind, p, cfg.g0_db, opt, cfg.solver())
                                                : sweep_epsilon(cfg.kind, p, cfg.epsilon, opt, cfg.solver());
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream csv;
    csv << unit_header(cfg, "sweep");
    csv << "# units: G0_dB dB, epsilon_rad_s rad/s, pump_power_norm (2 epsilon/kappa_c)^2, S_dB dB, G_dB dB, "
           "reduction_pct percent of G0, residual worst relative residual\n";
    csv << "G0_dB,epsilon_rad_s,pump_power_norm,S_dB,G_dB,reduction_pct,n,n_c,iterations,residual,status\n";
    json rows = json::array();
    int failures = 0;
    for (const auto& r : points) {
        if (!r.ok) ++failures;
        std::optional<double> s_db, g_db, red;
        if (r.ok) {
            g_db = r.gain.g_db;
            if (r.squeezing) s_db = r.squeezing->s_db;
            if (r.gain.reduction) red = 100.0 * *r.gain.reduction;
        }
        csv << join_row({csv_number(r.g0_db), csv_number(r.epsilon), csv_number(pump_power_norm(r.epsilon, p.kappa_c)),
                         csv_opt(s_db), csv_opt(g_db), csv_opt(red), std::to_string(r.trunc.n),
                         std::to_string(r.trunc.n_c), std::to_string(r.log.total_iterations()),
                         csv_number(r.log.worst_residual()), r.status})
            << "\n";
        json row = {{"G0_dB", r.g0_db}, {"epsilon", r.epsilon}, {"n", r.trunc.n}, {"n_c", r.trunc.n_c},
                    {"ok", r.ok}, {"status", r.status}, {"solves", solve_log_json(r.log)}};
        if (r.ok) {
            row["N_a"] = r.moments.n_a;
            row["N_b"] = r.moments.n_b;
            row["M_ab"] = {r.moments.m_ab.real(), r.moments.m_ab.imag()};
            row["G_dB"] = r.gain.g_db;
            if (r.squeezing) {
                row["S_dB"] = r.squeezing->s_db;
                row["delta_min"] = r.squeezing->delta_min;
                row["phi_star"] = r.squeezing->phi_star;
            }
        }
        rows.push_back(std::move(row));
    }
    json sidecar = {{"command", "sweep"}, {"config", to_json(cfg)}, {"points", rows}, {"elapsed_s", elapsed}};
    emit(cfg, csv.str(), sidecar, log);
    log << "sweep: " << points.size() << " points, " << failures << " failed, " << elapsed << " s\n";
    return (!points.empty() && failures == static_cast<int>(points.size())) ? 1 : 0;
}

int cmd_ndpa(const RunConfig& cfg, std::ostream& log) {
    ModelParams p = cfg.resolved_params();
    p.validate();
    if (!cfg.epsilon.empty()) p.epsilon = cfg.epsilon.front();
    else p.epsilon = expected_gain_to_pump(cfg.g0_db.empty() ? 10.0 : cfg.g0_db.front(), p);
    const NdpaParams np = NdpaParams::from_model(p);
    const bool stable = np.below_threshold();
    const double omega_max = cfg.omega_max > 0.0 ? cfg.omega_max : 2.0 * (p.kappa_a + p.kappa_b);
    const int points = std::max(1, cfg.points);

    std::ostringstream csv;
    csv << unit_header(cfg, "ndpa");
    csv << "# g_rad_s=" << csv_number(np.g) << " theta=" << csv_number(np.theta) << " epsilon_rad_s="
        << csv_number(p.epsilon) << " epsilon_threshold_rad_s=" << csv_number(threshold_pump(p))
        << " gain_dB=" << (stable ? csv_number(ndpa_gain(np)) : std::string("nan")) << "\n";
    if (stable) {
        const NdpaCovariance c = steady_covariance(np);
        csv << "# covariance s1=" << csv_number(c.s1) << " s2=" << csv_number(c.s2.real()) << "+"
            << csv_number(c.s2.imag()) << "i s3=" << csv_number(c.s3.real()) << "+" << csv_number(c.s3.imag())
            << "i s4=" << csv_number(c.s4) << "\n";
    }
    csv << "# units: omega_rad_s rad/s, S_dB dB; unitarity = |S11|^2 - |S12|^2\n";
    csv << "omega_rad_s,S11_re,S11_im,S12_re,S12_im,S21_re,S21_im,S22_re,S22_im,unitarity,N_a,N_b,M_ab_abs,S_dB,"
           "status\n";
    json rows = json::array();
    for (int i = 0; i < points; ++i) {
        const double w = points == 1 ? 0.0 : -omega_max + 2.0 * omega_max * i / (points - 1);
        if (!stable) {
            csv << join_row({csv_number(w), "", "", "", "", "", "", "", "", "", "", "", "", "", "above_threshold"})
                << "\n";
            continue;
        }
        const ScatteringMatrix s = scattering(np, w);
        const NdpaMoments m = ndpa_output_moments(np, w);
        std::string status = "ok";
        std::string s_db;
        try {
            s_db = csv_number(squeezing(MomentSet{m.n_a, m.n_b, m.m_ab, w}).s_db);
        } catch (const std::domain_error& e) {
            status = e.what();
        }
        csv << join_row({csv_number(w), csv_number(s.s11.real()), csv_number(s.s11.imag()), csv_number(s.s12.real()),
                         csv_number(s.s12.imag()), csv_number(s.s21.real()), csv_number(s.s21.imag()),
                         csv_number(s.s22.real()), csv_number(s.s22.imag()),
                         csv_number(std::norm(s.s11) - std::norm(s.s12)), csv_number(m.n_a), csv_number(m.n_b),
                         csv_number(std::abs(m.m_ab)), s_db, status})
            << "\n";
        rows.push_back({{"omega", w}, {"S11", {s.s11.real(), s.s11.imag()}}, {"S12", {s.s12.real(), s.s12.imag()}}});
    }
    json sidecar = {{"command", "ndpa"},        {"config", to_json(cfg)},   {"g", np.g},
                    {"theta", np.theta},        {"epsilon", p.epsilon},     {"threshold_epsilon", threshold_pump(p)},
                    {"below_threshold", stable}, {"rows", rows}};
    emit(cfg, csv.str(), sidecar, log);
    if (!stable) log << "ndpa: pump is at or above threshold\n";
    return 0;
}

int cmd_perturb(const RunConfig& cfg, std::ostream& log) {
    const ModelParams base = cfg.resolved_params();
    base.validate();
    const int max_order = cfg.max_order - cfg.max_order % 2;
    if (max_order < 0) throw std::invalid_argument("max_order must be non-negative");
    const auto stair = pade_staircase(max_order);
    const SolverConfig scfg = cfg.solver();

    std::vector<std::string> header = {"G0_dB", "epsilon_rad_s"};
    for (int k = 0; k <= max_order; k += 2) {
        header.push_back("S_order" + std::to_string(k));
        header.push_back("reduction_pct_order" + std::to_string(k));
    }
    for (const auto& [pp, qq] : stair) {
        const std::string tag = "pade" + std::to_string(pp) + std::to_string(qq);
        header.push_back("S_" + tag);
        header.push_back("reduction_pct_" + tag);
    }
    header.insert(header.end(), {"S_numeric", "reduction_pct_numeric", "n", "n_c", "status"});

    struct Row {
        std::vector<std::string> cells;
        json record;
        bool ok = false;
    };
    std::vector<Row> rows(cfg.g0_db.size());
    parallel_for(cfg.g0_db.size(), cfg.jobs, [&](std::size_t i) {
        const double g0 = cfg.g0_db[i];
        Row& row = rows[i];
        std::vector<std::string> notes;
        ModelParams p = base;
        TruncationConfig trunc = series_truncation(g0, max_order);
        if (cfg.n) trunc.n = *cfg.n;
        row.cells = {csv_number(g0)};
        auto reduction = [g0](Complex ratio) -> std::optional<double> {
            const double g = 10.0 * std::log10(std::norm(ratio));
            if (!(g0 > 0.0) || !std::isfinite(g)) return std::nullopt;
            return 100.0 * (g - g0) / g0;
        };
        auto s_of = [&notes](const MomentSet& m, const std::string& tag) -> std::optional<double> {
            try {
                return squeezing(m).s_db;
            } catch (const std::domain_error&) {
                notes.push_back(tag + " undefined S");
                return std::nullopt;
            }
        };
        try {
            p.epsilon = expected_gain_to_pump(g0, p);
            row.cells.push_back(csv_number(p.epsilon));
            SeriesOptions sopt;
            sopt.max_order = max_order;
            sopt.omega = cfg.omega;
            const SeriesSet ss = series_set(p, trunc, sopt, scfg);
            json orders = json::array();
            for (int k = 0; k <= max_order; k += 2) {
                const std::string tag = "order" + std::to_string(k);
                const auto s = s_of(ss.moments(1.0, k), tag);
                const auto red = reduction(ss.ratio.partial_sum(1.0, k));
                row.cells.push_back(csv_opt(s));
                row.cells.push_back(csv_opt(red));
                orders.push_back({{"order", k}, {"S_dB", s ? json(*s) : json()}, {"reduction_pct", red ? json(*red) : json()}});
            }
            json pades = json::array();
            for (const auto& [pp, qq] : stair) {
                const std::string tag = "pade" + std::to_string(pp) + "/" + std::to_string(qq);
                std::optional<double> s, red;
                try {
                    const PadeValue na = evaluate(pade(ss.n_a, pp, qq), 1.0);
                    const PadeValue nb = evaluate(pade(ss.n_b, pp, qq), 1.0);
                    const PadeValue mab = evaluate(pade(ss.m_ab, pp, qq), 1.0);
                    if (na.pole_crossing || nb.pole_crossing || mab.pole_crossing) {
                        notes.push_back(tag + " moment pole crossing");
                    } else {
                        s = s_of(MomentSet{na.value.real(), nb.value.real(), mab.value, cfg.omega}, tag);
                    }
                    const PadeValue r = evaluate(pade(ss.ratio, pp, qq), 1.0);
                    if (r.pole_crossing) notes.push_back(tag + " gain pole crossing");
                    else red = reduction(r.value);
                } catch (const PadeError& e) {
                    notes.push_back(tag + " " + e.what());
                }
                row.cells.push_back(csv_opt(s));
                row.cells.push_back(csv_opt(red));
                pades.push_back({{"p", pp}, {"q", qq}, {"S_dB", s ? json(*s) : json()}, {"reduction_pct", red ? json(*red) : json()}});
            }
            TruncationConfig nt{trunc.n, cfg.numeric_nc};
            const DisplacedPoint num = displaced_point(p, nt, 1.0, cfg.omega, scfg);
            const auto s = s_of(num.moments, "numeric");
            const auto red = reduction(num.ratio);
            row.cells.push_back(csv_opt(s));
            row.cells.push_back(csv_opt(red));
            row.record = {{"G0_dB", g0}, {"epsilon", p.epsilon}, {"orders", orders}, {"pade", pades},
                          {"numeric", {{"S_dB", s ? json(*s) : json()}, {"reduction_pct", red ? json(*red) : json()},
                                       {"n_c", nt.n_c}, {"solves", solve_log_json(num.log)}}},
                          {"series_solves", solve_log_json(ss.log)}};
            row.ok = true;
        } catch (const std::exception& e) {
            notes.push_back(e.what());
            row.record = {{"G0_dB", g0}, {"error", e.what()}};
        }
        while (row.cells.size() < header.size() - 3) row.cells.emplace_back();
        row.cells.push_back(std::to_string(trunc.n));
        row.cells.push_back(std::to_string(trunc.n_c));
        std::string status = "ok";
        if (!notes.empty()) {
            status.clear();
            for (std::size_t k = 0; k < notes.size(); ++k) status += (k ? "; " : "") + notes[k];
        }
        row.cells.push_back(status);
        row.record["status"] = status;
    });

    std::ostringstream csv;
    csv << unit_header(cfg, "perturb");
    csv << "# series in the three-wave coupling evaluated at full strength; n_c is the exact pump cutoff of the "
           "series, numeric columns use n_c=" << cfg.numeric_nc << "\n";
    csv << "# units: S dB, reduction_pct percent of G0; empty cells are undefined values explained in status\n";
    csv << join_row(header) << "\n";
    json records = json::array();
    int failures = 0;
    for (const auto& r : rows) {
        csv << join_row(r.cells) << "\n";
        records.push_back(r.record);
        if (!r.ok) ++failures;
    }
    json sidecar = {{"command", "perturb"}, {"config", to_json(cfg)}, {"points", records}};
    emit(cfg, csv.str(), sidecar, log);
    return (!rows.empty() && failures == static_cast<int>(rows.size())) ? 1 : 0;
}

namespace {

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

double relative_mismatch(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

// Worst relative max-norm mismatch of the steady state, both resolvent states and rho1.
double dense_mismatch(HamiltonianKind kind, const ModelParams& p, const TruncationConfig& trunc_in) {
    const TruncationConfig trunc = effective_truncation(kind, trunc_in);
    SolverConfig cfg;
    cfg.rel_tol = 1e-12;
    const ResponseStates r = solve_response(kind, p, trunc, 0.0, cfg);
    const DenseOracle orc = dense_oracle(kind, p, trunc);
    const BlockState rho = orc.restrict(orc.steady_state(), r.rho.map);
    double worst = relative_mismatch(r.rho.data, rho.data);
    auto resolvent = [&](const BlockState& rhs, const BlockState& got) {
        const BlockState want = orc.restrict(orc.solve(orc.embed(rhs), 0.0), got.map);
        worst = std::max(worst, relative_mismatch(got.data, want.data));
    };
    resolvent(rhs_b_rho(rho), r.y_b);
    resolvent(rhs_rho_adag(rho), r.y_a);
    resolvent(rhs_gain(rho, p.kappa_a), r.rho1);
    return worst;
}

ModelParams moderate_params(std::mt19937& rng, double beta) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ModelParams p = ModelParams::reference_point(beta);
    const double k = p.kappa_a;
    p.kappa_a = k * (1.0 + 0.3 * u(rng));
    p.kappa_b = k * (1.0 + 0.3 * u(rng));
    p.kappa_c = k * (1.0 + 0.3 * u(rng));
    p.delta_a = 0.2 * k * u(rng);
    p.delta_b = 0.2 * k * u(rng);
    p.delta_c = 0.2 * k * u(rng);
    p.epsilon = (0.3 + 0.3 * (u(rng) + 1.0)) * threshold_pump(p);
    return p;
}

}  // namespace

json selfcheck_report(int level, bool* passed) {
    std::vector<Check> checks;
    const std::vector<HamiltonianKind> kinds = {HamiltonianKind::H3s, HamiltonianKind::H5s, HamiltonianKind::H3,
                                                HamiltonianKind::H5, HamiltonianKind::HJ1};
    std::mt19937 rng(20240607u);
    ModelParams base = moderate_params(rng, 3.0);

    // Sector closure and Hermiticity of every coupling list.
    for (auto kind : {HamiltonianKind::H3s, HamiltonianKind::H5s, HamiltonianKind::H3, HamiltonianKind::H5,
                      HamiltonianKind::HJ1, HamiltonianKind::PrecondDrive}) {
        const TruncationConfig t = effective_truncation(kind, {3, 3});
        Check c{"structure_" + std::string(to_string(kind)), true, 0.0, 1e-9, ""};
        try {
            for (int k = 0; k <= 2; ++k) {
                const CouplingList plus = build_hamiltonian(kind, base, t, k);
                const CouplingList minus = build_hamiltonian(kind, base, t, -k);
                double scale = 1e-300;
                for (const auto& e : plus.couplings()) {
                    scale = std::max(scale, std::abs(e.coefficient));
                    if (e.source.sector() != k || e.destination.sector() != k) c.passed = false;
                }
                c.value = std::max(c.value, hermiticity_defect(plus, minus) / scale);
            }
            c.passed = c.passed && c.value <= c.tolerance;
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail = e.what();
        }
        checks.push_back(c);
    }
    {
        // Negative control: one corrupted coefficient must be caught.
        const TruncationConfig t{3, 3};
        CouplingList plus = build_hamiltonian(HamiltonianKind::H3, base, t, 1);
        const CouplingList minus = build_hamiltonian(HamiltonianKind::H3, base, t, -1);
        double scale = 0.0;
        for (const auto& v : plus.values()) scale = std::max(scale, std::abs(v));
        plus.values().front() += 1e-3 * scale;
        const double defect = hermiticity_defect(plus, minus) / scale;
        checks.push_back({"negative_control_corrupted_coupling", defect > 1e-9, defect, 1e-9,
                          "a corrupted coefficient must exceed the Hermiticity tolerance"});
    }

    // Dense-oracle equivalence.
    std::vector<TruncationConfig> truncs = {{3, 2}, {3, 3}};
    if (level >= 2) truncs.push_back({4, 3});
    for (auto kind : kinds) {
        for (const auto& t : truncs) {
            if (is_stiff_pump(kind) && t.n_c != truncs.front().n_c) continue;
            Check c{"dense_" + std::string(to_string(kind)) + "_" + std::to_string(t.n) + "x" + std::to_string(t.n_c),
                    false, 0.0, 1e-8, ""};
            try {
                c.value = dense_mismatch(kind, base, t);
                c.passed = c.value <= c.tolerance;
            } catch (const std::exception& e) {
                c.detail = e.what();
            }
            checks.push_back(c);
        }
    }

    // Two-mode master equation against the analytic amplifier.
    for (double g0 : {3.0, 6.0}) {
        Check c{"ndpa_analytic_G0_" + csv_number(g0), false, 0.0, 1e-6, ""};
        try {
            ModelParams p = ModelParams::reference_point(3.0);
            p.epsilon = expected_gain_to_pump(g0, p);
            const NdpaParams np = NdpaParams::from_model(p);
            SolverConfig cfg;
            const PointResult r = evaluate_point(HamiltonianKind::H3s, p, {30, 1}, 0.0, cfg, g0);
            const NdpaMoments m = ndpa_output_moments(np, 0.0);
            const double e1 = std::abs(r.moments.n_a - m.n_a) / m.n_a;
            const double e2 = std::abs(r.moments.m_ab - m.m_ab) / std::abs(m.m_ab);
            const double e3 = std::abs(r.gain.g_db - ndpa_gain(np)) / ndpa_gain(np);
            c.value = std::max({e1, e2, e3});
            c.passed = r.ok && c.value <= c.tolerance;
        } catch (const std::exception& e) {
            c.detail = e.what();
        }
        checks.push_back(c);
    }

    // Preconditioned against unpreconditioned iteration counts.
    {
        Check c{"precond_iterations", false, 0.0, 0.0, ""};
        try {
            ModelParams p = ModelParams::reference_point(3.0);
            p.epsilon = expected_gain_to_pump(6.0, p);
            const TruncationConfig t{6, 4};
            const BlockState guess = initial_guess(GuessKind::Steady, HamiltonianKind::H3, p, t, 0.0);
            SolverConfig with, without;
            without.precond = PrecondKind::None;
            SolveReport rw, rn;
            solve_steady(make_superop(HamiltonianKind::H3, p, t, 0), regularization_scale(p), guess, with, &rw);
            try {
                solve_steady(make_superop(HamiltonianKind::H3, p, t, 0), regularization_scale(p), guess, without, &rn);
            } catch (const SolverError&) {
                rn.iterations = without.max_iter;
            }
            c.value = rw.iterations;
            c.tolerance = rn.iterations;
            c.passed = rw.iterations < rn.iterations;
            c.detail = "gauss-seidel " + std::to_string(rw.iterations) + " vs none " + std::to_string(rn.iterations);
        } catch (const std::exception& e) {
            c.detail = e.what();
        }
        checks.push_back(c);
    }

    bool all = true;
    json arr = json::array();
    for (const auto& c : checks) {
        all = all && c.passed;
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance},
                       {"detail", c.detail}});
    }
    if (passed) *passed = all;
    return {{"command", "selfcheck"}, {"level", level}, {"passed", all}, {"checks", arr}};
}

int cmd_selfcheck(const RunConfig& cfg, std::ostream& log) {
    bool passed = false;
    const json report = selfcheck_report(cfg.level, &passed);
    for (const auto& c : report["checks"]) {
        log << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " value="
            << c["value"].get<double>() << " tol=" << c["tolerance"].get<double>();
        const auto detail = c["detail"].get<std::string>();
        if (!detail.empty()) log << " (" << detail << ")";
        log << "\n";
    }
    if (cfg.out.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw std::runtime_error("cannot write " + cfg.out);
        f << report.dump(2) << "\n";
    }
    return passed ? 0 : 1;
}

int run(int argc, char** argv) {
    CLI::App app{"ringmix: master-equation squeezing and gain of a three-wave mixing amplifier"};
    app.require_subcommand(1);

    struct Flag {
        const char* name;
        const char* key;
        const char* help;
    };
    static const Flag flags[] = {
        {"--hamiltonian", "hamiltonian", "h3s (ndpa), h5s, h3, h5, hj1"},
        {"--beta", "beta", "inductance ratio L_J / L_in"},
        {"--g0", "g0", "expected gains in dB: \"1:20\", \"a:b:step\" or a list"},
        {"--epsilon", "epsilon", "pump amplitudes in rad/s (instead of --g0)"},
        {"--omega", "omega", "measurement frequency in rad/s"},
        {"--n", "n", "signal/idler cutoff"},
        {"--nc", "nc", "pump cutoff"},
        {"--tol", "tol", "relative residual tolerance"},
        {"--max-iter", "max_iter", "iteration limit per solve"},
        {"--jobs", "jobs", "parallel sweep points (fallback: RINGMIX_THREADS)"},
        {"--precond", "precond", "gauss-seidel, block-jacobi or none"},
        {"--out", "out", "output path (CSV; JSON sidecar next to it)"},
        {"--omega-max", "omega_max", "ndpa: half-width of the frequency grid in rad/s"},
        {"--points", "points", "ndpa: number of grid points"},
        {"--max-order", "max_order", "perturb: highest series order"},
        {"--numeric-nc", "numeric_nc", "perturb: pump cutoff of the numeric overlay"},
        {"--level", "level", "selfcheck: 1 or 2"},
    };

    std::map<std::string, std::string> values;
    std::vector<std::string> extra;
    std::string config_path;
    bool strict = false;
    std::vector<CLI::App*> subs;
    for (const char* name : {"sweep", "ndpa", "perturb", "selfcheck"}) {
        CLI::App* sub = app.add_subcommand(name);
        for (const auto& f : flags) sub->add_option(f.name, values[f.key], f.help);
        sub->add_option("--config", config_path, "INI (key = value) or JSON configuration file");
        sub->add_option("--set", extra, "extra KEY=VALUE settings (e.g. kappa_a_hz=1e8, i_c=1e-6)");
        sub->add_flag("--strict", strict, "deterministic reductions");
        subs.push_back(sub);
    }
    subs[0]->description("S and G over expected gains");
    subs[1]->description("analytic amplifier: scattering, covariances, threshold");
    subs[2]->description("displaced-frame series and Pade approximants against the numeric result");
    subs[3]->description("dense-oracle, analytic and structural checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig cfg;
        if (const char* env = std::getenv("RINGMIX_THREADS")) set_key(cfg, "jobs", env);
        if (!config_path.empty()) load_config_file(cfg, config_path);
        for (CLI::App* sub : subs) {
            if (!sub->parsed()) continue;
            for (const auto& f : flags) {
                if (sub->get_option(f.name)->count() > 0) set_key(cfg, f.key, values[f.key]);
            }
            if (sub->get_option("--strict")->count() > 0) cfg.strict = strict;
        }
        for (const auto& kv : extra) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--set expects KEY=VALUE, got " + kv);
            set_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (subs[0]->parsed()) return cmd_sweep(cfg, std::cerr);
        if (subs[1]->parsed()) return cmd_ndpa(cfg, std::cerr);
        if (subs[2]->parsed()) return cmd_perturb(cfg, std::cerr);
        return cmd_selfcheck(cfg, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "ringmix: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ringmix::cli
