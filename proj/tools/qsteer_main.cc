// Copyright 2026 The qsteer Authors
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

// Command-line front end. Angles on the command line are degrees; config
// files use radians.
//
// Exit codes: 0 success, 1 internal error, 2 usage or config error,
// 3 degenerate or non-ellipsoidal fit, 4 I/O error.

#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "qsteer/experiment.h"
#include "qsteer/io.h"
#include "qsteer/random.h"

namespace {

using namespace qsteer;

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFit = 3;
constexpr int kExitIo = 4;

double radians(double degrees) {
    return degrees * std::numbers::pi / 180.0;
}

struct StateFlags {
    std::vector<double> family;
    double two_qubit = 0.0;
    bool mixed_w = false;
    std::vector<double> bell_diagonal;
    CLI::Option *two_qubit_option = nullptr;

    void attach(CLI::App *app) {
        app->add_option("--family", family, "family state angles alpha beta in degrees")->expected(2);
        two_qubit_option = app->add_option("--two-qubit", two_qubit, "two-qubit state angle gamma in degrees");
        app->add_flag("--mixed-w", mixed_w, "the mixed W-class state");
        app->add_option("--bell-diagonal", bell_diagonal, "Bell-diagonal weights of psi-, psi+, phi-, phi+")
            ->expected(4);
    }

    int count() const {
        return (!family.empty()) + (two_qubit_option->count() > 0) + mixed_w + (!bell_diagonal.empty());
    }

    std::optional<StateSpec> spec() const {
        if (count() > 1) {
            throw ConfigError("give only one of --family, --two-qubit, --mixed-w, --bell-diagonal");
        }
        if (!family.empty()) {
            return FamilySpec{radians(family[0]), radians(family[1])};
        }
        if (two_qubit_option->count() > 0) {
            return TwoQubitSpec{radians(two_qubit)};
        }
        if (mixed_w) {
            return MixedWSpec{};
        }
        if (!bell_diagonal.empty()) {
            BellDiagonalSpec b;
            std::copy(bell_diagonal.begin(), bell_diagonal.end(), b.weights.begin());
            return b;
        }
        return std::nullopt;
    }

    StateSpec required_spec() const {
        auto s = spec();
        if (!s) {
            throw ConfigError("a state is required: --family A B, --two-qubit G, --mixed-w or --bell-diagonal p1 p2 p3 p4");
        }
        return *s;
    }
};

uint64_t resolve_seed(const std::optional<uint64_t> &seed) {
    if (seed) {
        return *seed;
    }
    std::random_device entropy;
    const uint64_t s = (static_cast<uint64_t>(entropy()) << 32) ^ entropy();
    std::cerr << fmt::format("qsteer: no --seed given, using seed {}\n", s);
    return s;
}

std::string join_path(const std::string &dir, const std::string &name) {
    return dir.empty() || dir == "." ? name : dir + "/" + name;
}

std::string dump(const Json &j) {
    return j.dump(2) + "\n";
}

void emit(const std::string &out_path, const std::string &text) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(fmt::format("cannot open {}", path));
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
}

void warn_skipped(const SimulationOutcome &outcome) {
    for (const PartyCloud &cloud : outcome.experiment.parties) {
        if (!cloud.skipped.empty()) {
            std::cerr << fmt::format("qsteer: warning: {} of Alice's directions gave a zero-probability {} branch "
                                     "and were skipped\n",
                                     cloud.skipped.size(), cloud.label);
        }
    }
}

int run(int argc, char **argv) {
    CLI::App app{"Quantum steering ellipsoids: analytic geometry, simulated tomography, quadric fits, monogamy."};
    app.require_subcommand(1);

    // ellipsoid
    CLI::App *ellipsoid_cmd = app.add_subcommand("ellipsoid", "analytic steering ellipsoids of a state");
    StateFlags ellipsoid_state;
    ellipsoid_state.attach(ellipsoid_cmd);
    std::string ellipsoid_out;
    bool ellipsoid_mesh = false;
    ellipsoid_cmd->add_option("--out", ellipsoid_out, "output directory (JSON to stdout when absent)");
    ellipsoid_cmd->add_flag("--mesh", ellipsoid_mesh, "also write surface meshes as CSV (needs --out)");

    // simulate
    CLI::App *simulate_cmd = app.add_subcommand("simulate", "simulated steering experiment with fits");
    StateFlags simulate_state;
    simulate_state.attach(simulate_cmd);
    std::string config_path, scheme = "uniform", simulate_out = ".";
    std::size_t directions = 1000;
    int64_t events = 50000;
    std::optional<uint64_t> seed;
    double noise = 0.0;
    int threads = 1;
    bool refine_fit = false, flip_mixing = false;
    simulate_cmd->add_option("--config", config_path, "JSON config (angles in radians)");
    auto *scheme_opt = simulate_cmd->add_option("--scheme", scheme, "uniform | icosahedron | icosahedron-9");
    auto *directions_opt = simulate_cmd->add_option("--directions", directions, "number of uniform directions");
    auto *events_opt = simulate_cmd->add_option("--events", events, "detections per steered point");
    simulate_cmd->add_option("--seed", seed, "master seed");
    auto *noise_opt = simulate_cmd->add_option("--noise", noise, "white-noise weight in [0, 1]");
    auto *threads_opt = simulate_cmd->add_option("--threads", threads, "worker threads");
    auto *refine_opt = simulate_cmd->add_flag("--refine", refine_fit, "refine fits by damped least squares");
    auto *flip_opt = simulate_cmd->add_flag("--flip-mixing", flip_mixing,
                                            "sample the mixed-W state from chi1 with flipped measurements");
    auto *simulate_out_opt = simulate_cmd->add_option("--out", simulate_out, "output directory");

    // fit
    CLI::App *fit_cmd = app.add_subcommand("fit", "fit an ellipsoid to a CSV point cloud");
    std::string fit_input, fit_out;
    bool fit_refine = false, fit_verbatim = false;
    fit_cmd->add_option("input", fit_input, "CSV with bx,by,bz or x,y,z columns")->required();
    fit_cmd->add_flag("--refine", fit_refine, "refine by damped least squares");
    fit_cmd->add_flag("--verbatim", fit_verbatim, "take geometry from the z^2 regression");
    fit_cmd->add_option("--out", fit_out, "output JSON path (stdout when absent)");

    // monogamy
    CLI::App *monogamy_cmd = app.add_subcommand("monogamy", "volume monogamy of three-qubit states");
    StateFlags monogamy_state;
    monogamy_state.attach(monogamy_cmd);
    bool w_grid = false;
    int grid = 0;
    std::string monogamy_out;
    monogamy_cmd->add_flag("--w-grid", w_grid, "CSV over the seven W-class benchmark states");
    monogamy_cmd->add_option("--grid", grid, "CSV over an N x N grid of family angles in [0, 90] degrees");
    monogamy_cmd->add_option("--out", monogamy_out, "output path (stdout when absent)");

    // table-s1
    CLI::App *table_cmd = app.add_subcommand("table-s1", "the twelve benchmark states, theory and simulation");
    TableOptions table;
    std::optional<uint64_t> table_seed;
    std::string table_out;
    table_cmd->add_option("--samples", table.samples, "Monte Carlo resamples per row");
    table_cmd->add_option("--events", table.events_per_point, "detections per steered point");
    table_cmd->add_option("--directions", table.directions, "directions per state");
    table_cmd->add_option("--seed", table_seed, "master seed");
    table_cmd->add_option("--threads", table.threads, "worker threads");
    table_cmd->add_flag("--theory-only", table.theory_only, "skip the simulated columns");
    table_cmd->add_option("--out", table_out, "output CSV path (stdout when absent)");

    // icosahedron-robustness
    CLI::App *ico_cmd = app.add_subcommand("icosahedron-robustness", "fits from rotated icosahedron settings");
    RobustnessOptions robust;
    std::vector<double> robust_weights;
    std::optional<uint64_t> robust_seed;
    std::string robust_out;
    ico_cmd->add_option("--runs", robust.runs, "independent runs");
    ico_cmd->add_option("--events", robust.events_per_point, "detections per steered point");
    ico_cmd->add_option("--bell-diagonal", robust_weights, "Bell-diagonal weights of psi-, psi+, phi-, phi+")
        ->expected(4);
    ico_cmd->add_option("--seed", robust_seed, "master seed");
    ico_cmd->add_option("--threads", robust.threads, "worker threads");
    ico_cmd->add_option("--out", robust_out, "output JSON path (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (ellipsoid_cmd->parsed()) {
        StateSpec spec = ellipsoid_state.required_spec();
        AnalyticSummary summary = analyze(spec);
        Json j = analytic_json(spec, summary);
        if (ellipsoid_out.empty()) {
            if (ellipsoid_mesh) {
                throw ConfigError("--mesh needs --out");
            }
            std::cout << dump(j);
            return 0;
        }
        write_text_file(join_path(ellipsoid_out, "ellipsoid.json"), dump(j));
        if (ellipsoid_mesh) {
            for (const PartyEllipsoid &p : summary.parties) {
                std::string name = p.label == "B|A" ? "mesh_BA.csv" : "mesh_CA.csv";
                write_text_file(join_path(ellipsoid_out, name), surface_mesh_csv(p.ellipsoid));
            }
        }
        return 0;
    }

    if (simulate_cmd->parsed()) {
        ExperimentConfig config;
        if (!config_path.empty()) {
            config = parse_config(read_json_file(config_path));
            if (simulate_state.count() > 0) {
                config.state = simulate_state.required_spec();
            }
        } else {
            config.state = simulate_state.required_spec();
        }
        if (scheme_opt->count() || config_path.empty()) {
            config.scheme = parse_scheme(scheme);
        }
        if (directions_opt->count() || config_path.empty()) {
            config.directions = directions;
        }
        if (events_opt->count() || config_path.empty()) {
            config.events_per_point = events;
        }
        if (noise_opt->count()) {
            config.noise = noise;
        }
        if (threads_opt->count()) {
            config.threads = threads;
        }
        if (refine_opt->count()) {
            config.refine = true;
        }
        if (flip_opt->count()) {
            config.flip_mixing = true;
        }
        if (simulate_out_opt->count() || config_path.empty()) {
            config.out_dir = simulate_out;
        }
        if (seed) {
            config.seed = seed;
        }
        validate_config(config);
        const uint64_t s = resolve_seed(config.seed);
        SimulationOutcome outcome = simulate(config, s);
        warn_skipped(outcome);
        for (const PartyCloud &cloud : outcome.experiment.parties) {
            std::ostringstream csv;
            write_point_cloud_csv(csv, cloud);
            write_text_file(join_path(config.out_dir, cloud.party == 1 ? "cloud_BA.csv" : "cloud_CA.csv"), csv.str());
        }
        Json report = simulation_json(config, outcome);
        write_text_file(join_path(config.out_dir, "simulation.json"), dump(report));
        if (outcome.monogamy) {
            write_text_file(join_path(config.out_dir, "monogamy.json"), dump(monogamy_json(*outcome.monogamy)));
        }
        for (std::size_t i = 0; i < outcome.fits.size(); i++) {
            const CloudFit &f = outcome.fits[i];
            const std::string &label = outcome.experiment.parties[i].label;
            if (!f.fit) {
                std::cout << fmt::format("{}: {} cloud, not fitted\n", label, verdict_name(f.spread.verdict));
            } else if (!f.fit->recovered) {
                std::cout << fmt::format("{}: fitted quadric is not an ellipsoid, R2 {}\n", label, f.fit->r_squared);
            } else {
                std::cout << fmt::format("{}: volume {} R2 {}\n", label, f.fit->recovered->volume, f.fit->r_squared);
            }
        }
        if (outcome.monogamy) {
            std::cout << fmt::format("monogamy: pure residual {} ({})\n", outcome.monogamy->pure_residual,
                                     monogamy_class_name(outcome.monogamy->classification));
        }
        return 0;
    }

    if (fit_cmd->parsed()) {
        std::ifstream in(fit_input);
        if (!in) {
            throw IoError(fmt::format("cannot open {}", fit_input));
        }
        PointCloud points = read_point_cloud_csv(in);
        SpreadDiagnostics spread = degenerate_guard(points);
        if (spread.verdict != CloudVerdict::kFull) {
            emit(fit_out, dump(unfitted_json(spread)));
            std::cerr << fmt::format("qsteer: {} cloud, not fitted\n", verdict_name(spread.verdict));
            return kExitFit;
        }
        QuadricFit f = fit(points, fit_verbatim ? GeometrySource::kVerbatim : GeometrySource::kSymmetric);
        if (fit_refine && f.recovered) {
            f = refine(points, f);
        }
        emit(fit_out, dump(fit_json(f, spread)));
        if (!f.recovered) {
            std::cerr << "qsteer: fitted quadric is not an ellipsoid\n";
            return kExitFit;
        }
        return 0;
    }

    if (monogamy_cmd->parsed()) {
        if (w_grid || grid > 0) {
            if (monogamy_state.count() > 0 || (w_grid && grid > 0)) {
                throw ConfigError("--w-grid and --grid take no state and exclude each other");
            }
            std::vector<std::pair<double, double>> angles;
            if (w_grid) {
                angles = w_grid_angles();
            } else {
                if (grid < 2) {
                    throw ConfigError("--grid needs N >= 2");
                }
                for (int i = 0; i < grid; i++) {
                    for (int k = 0; k < grid; k++) {
                        angles.emplace_back(std::numbers::pi / 2 * i / (grid - 1), std::numbers::pi / 2 * k / (grid - 1));
                    }
                }
            }
            emit(monogamy_out, sweep_csv(monogamy_sweep(angles)));
            return 0;
        }
        StateSpec spec = monogamy_state.required_spec();
        DensityMatrix rho = build_state(spec);
        if (rho.num_qubits() != 3) {
            throw ConfigError("monogamy needs a three-qubit state (--family or --mixed-w)");
        }
        Json j;
        j["state"] = state_spec_json(spec);
        j["report"] = monogamy_json(monogamy_report(rho));
        if (purity(rho) > 1.0 - kPureTolerance) {
            CkwResult ckw = ckw_check(rho);
            j["ckw"] = {{"concurrence_ab", ckw.concurrence_ab},
                        {"concurrence_ac", ckw.concurrence_ac},
                        {"tangle_a_bc", ckw.tangle_a_bc},
                        {"residual", ckw.residual}};
        } else {
            j["ckw"] = nullptr;
        }
        emit(monogamy_out, dump(j));
        return 0;
    }

    if (table_cmd->parsed()) {
        const uint64_t s = table.theory_only ? 0 : resolve_seed(table_seed);
        if (!table.theory_only && (table.samples < 2 || table.directions < kMinFitPoints || table.events_per_point < 3 ||
                                   table.threads < 1)) {
            throw ConfigError("need --samples >= 2, --directions >= 9, --events >= 3, --threads >= 1");
        }
        emit(table_out, table_csv(table_s1(table, s)));
        return 0;
    }

    if (ico_cmd->parsed()) {
        if (!robust_weights.empty()) {
            std::copy(robust_weights.begin(), robust_weights.end(), robust.weights.begin());
        }
        if (robust.runs < 2 || robust.events_per_point < 3 || robust.threads < 1) {
            throw ConfigError("need --runs >= 2, --events >= 3, --threads >= 1");
        }
        bell_diagonal(robust.weights);
        const uint64_t s = resolve_seed(robust_seed);
        RobustnessResult result = icosahedron_robustness(robust, s);
        emit(robust_out, dump(robustness_json(robust, result, s)));
        return 0;
    }
    return kExitConfig;
}

}  // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError &e) {
        std::cerr << "qsteer: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidState &e) {
        std::cerr << "qsteer: invalid state: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DegenerateFit &e) {
        std::cerr << "qsteer: degenerate fit: " << e.what() << "\n";
        return kExitFit;
    } catch (const IndefiniteQuadric &e) {
        std::cerr << "qsteer: fit is not an ellipsoid: " << e.what() << "\n";
        return kExitFit;
    } catch (const IoError &e) {
        std::cerr << "qsteer: I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument &e) {
        std::cerr << "qsteer: invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "qsteer: error: " << e.what() << "\n";
        return kExitInternal;
    }
}
