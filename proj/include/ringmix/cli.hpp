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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ringmix/model.hpp"
#include "ringmix/solver.hpp"

namespace ringmix::cli {

/// Everything a run needs. Frequencies are stored in rad/s.
struct RunConfig {
    HamiltonianKind kind = HamiltonianKind::HJ1;
    ModelParams params;
    std::optional<double> critical_current;  // amperes; overrides omega_J when set
    std::optional<double> omega_c;           // derived from omega_a, omega_b unless set
    std::vector<double> g0_db;
    std::vector<double> epsilon;              // alternative to g0_db
    double omega = 0.0;
    std::optional<int> n;
    std::optional<int> n_c;
    double tol = 1e-10;
    int max_iter = 3000;
    int jobs = 1;
    bool strict = false;
    std::string precond = "gauss-seidel";
    std::string out;

    // ndpa
    double omega_max = 0.0;  // 0 means 2 (kappa_a + kappa_b)
    int points = 41;
    // perturb
    int max_order = 8;
    int numeric_nc = 8;
    // selfcheck
    int level = 1;

    /// Parameters with the critical current and the pump frequency applied.
    ModelParams resolved_params() const;
    SolverConfig solver() const;
};

/// Parses "a:b" (unit step), "a:b:step" or a comma/space separated list.
std::vector<double> parse_number_list(const std::string& text);

/// Key-value setters shared by the INI and JSON readers. Keys ending in _hz are
/// multiplied by 2 pi; plain keys are rad/s.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

void load_ini(RunConfig& cfg, std::istream& in);
void load_json(RunConfig& cfg, const nlohmann::json& j);
/// Loads a file, choosing JSON when the extension is .json or the text starts with '{'.
void load_config_file(RunConfig& cfg, const std::string& path);

/// Full configuration in the key format accepted by load_json.
nlohmann::json to_json(const RunConfig& cfg);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_number(double v);

/// Subcommands; each returns the process exit code.
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_ndpa(const RunConfig& cfg, std::ostream& log);
int cmd_perturb(const RunConfig& cfg, std::ostream& log);
int cmd_selfcheck(const RunConfig& cfg, std::ostream& log);

/// Machine-readable self-check report; `passed` is set to the overall verdict.
nlohmann::json selfcheck_report(int level, bool* passed);

/// Entry point used by the ringmix executable.
int run(int argc, char** argv);

}  // namespace ringmix::cli
