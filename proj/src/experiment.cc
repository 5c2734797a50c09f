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

#include "qsteer/experiment.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "qsteer/parallel.h"
#include "qsteer/random.h"

namespace qsteer {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const char *party_name(int party) {
    return party == 1 ? "B|A" : "C|A";
}

double json_number(const Json &j, std::string_view key) {
    if (!j.contains(key)) {
        throw ConfigError(fmt::format("missing key '{}'", key));
    }
    const Json &v = j.at(std::string(key));
    if (!v.is_number()) {
        throw ConfigError(fmt::format("'{}' must be a number", key));
    }
    return v.get<double>();
}

void reject_unknown(const Json &j, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto &[key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
        }
    }
}

StateSpec parse_state(const Json &j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw ConfigError("state must be an object with a string 'kind'");
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "family") {
        reject_unknown(j, {"kind", "alpha", "beta"}, "state");
        return FamilySpec{json_number(j, "alpha"), json_number(j, "beta")};
    }
    if (kind == "mixed-w") {
        reject_unknown(j, {"kind"}, "state");
        return MixedWSpec{};
    }
    if (kind == "bell-diagonal") {
        reject_unknown(j, {"kind", "weights"}, "state");
        if (!j.contains("weights") || !j["weights"].is_array() || j["weights"].size() != 4) {
            throw ConfigError("bell-diagonal state needs 4 weights");
        }
        BellDiagonalSpec spec;
        for (int i = 0; i < 4; i++) {
            if (!j["weights"][i].is_number()) {
                throw ConfigError("bell-diagonal weights must be numbers");
            }
            spec.weights[i] = j["weights"][i].get<double>();
        }
        return spec;
    }
    if (kind == "two-qubit") {
        reject_unknown(j, {"kind", "gamma"}, "state");
        return TwoQubitSpec{json_number(j, "gamma")};
    }
    throw ConfigError(fmt::format("unknown state kind '{}' (family, mixed-w, bell-diagonal, two-qubit)", kind));
}

std::vector<double> cloud_volumes(const ExperimentResult &experiment, bool refine) {
    std::vector<double> out;
    for (const PartyCloud &cloud : experiment.parties) {
        PointCloud points = cloud.estimates();
        if (points.size() < kMinFitPoints) {
            out.push_back(kNaN);
            continue;
        }
        try {
            out.push_back(fit_cloud(points, refine).volume());
        } catch (const DegenerateFit &) {
            out.push_back(kNaN);
        }
    }
    return out;
}

std::pair<double, double> mean_and_std(const std::vector<double> &values) {
    std::vector<double> finite;
    std::copy_if(values.begin(), values.end(), std::back_inserter(finite), [](double v) { return std::isfinite(v); });
    if (finite.size() < 2) {
        return {finite.empty() ? kNaN : finite[0], kNaN};
    }
    double mean = 0.0;
    for (double v : finite) {
        mean += v;
    }
    mean /= static_cast<double>(finite.size());
    double ss = 0.0;
    for (double v : finite) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(finite.size() - 1))};
}

std::string cell(double v) {
    return std::isfinite(v) ? format_number(v) : std::string();
}

Json number_or_null(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

}  // namespace

DensityMatrix build_state(const StateSpec &spec) {
    try {
        return std::visit(Overloaded{
                              [](const FamilySpec &s) { return density_from_ket(family_state(s.alpha, s.beta)); },
                              [](const MixedWSpec &) { return mixed_w_state(); },
                              [](const BellDiagonalSpec &s) { return bell_diagonal(s.weights); },
                              [](const TwoQubitSpec &s) { return density_from_ket(pure_two_qubit(s.gamma)); },
                          },
                          spec);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    } catch (const std::out_of_range &e) {
        throw ConfigError(e.what());
    }
}

bool is_pure_spec(const StateSpec &spec) {
    return std::holds_alternative<FamilySpec>(spec) || std::holds_alternative<TwoQubitSpec>(spec);
}

StateSource build_source(const StateSpec &spec, bool flip_mixing) {
    if (flip_mixing) {
        if (!std::holds_alternative<MixedWSpec>(spec)) {
            throw ConfigError("flip mixing applies only to the mixed-w state");
        }
        return FlipMixedSource{chi1()};
    }
    return build_state(spec);
}

Json state_spec_json(const StateSpec &spec) {
    return std::visit(Overloaded{
                          [](const FamilySpec &s) -> Json {
                              return {{"kind", "family"}, {"alpha", s.alpha}, {"beta", s.beta}};
                          },
                          [](const MixedWSpec &) -> Json { return {{"kind", "mixed-w"}}; },
                          [](const BellDiagonalSpec &s) -> Json {
                              return {{"kind", "bell-diagonal"}, {"weights", s.weights}};
                          },
                          [](const TwoQubitSpec &s) -> Json { return {{"kind", "two-qubit"}, {"gamma", s.gamma}}; },
                      },
                      spec);
}

DirectionScheme parse_scheme(std::string_view name) {
    if (name == "uniform" || name == "uniform-random") {
        return DirectionScheme::kUniformRandom;
    }
    if (name == "icosahedron") {
        return DirectionScheme::kIcosahedron;
    }
    if (name == "icosahedron-9") {
        return DirectionScheme::kIcosahedronNine;
    }
    throw ConfigError(fmt::format("unknown scheme '{}' (uniform, icosahedron, icosahedron-9)", name));
}

ExperimentConfig parse_config(const Json &j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    reject_unknown(j,
                   {"state", "scheme", "directions", "events_per_point", "seed", "noise", "efficiencies",
                    "flip_mixing", "refine", "threads", "out_dir"},
                   "config");
    ExperimentConfig c;
    if (!j.contains("state")) {
        throw ConfigError("config needs a 'state'");
    }
    c.state = parse_state(j["state"]);
    try {
        if (j.contains("scheme")) {
            c.scheme = parse_scheme(j["scheme"].get<std::string>());
        }
        if (j.contains("directions")) {
            if (!j["directions"].is_number_unsigned()) {
                throw ConfigError("'directions' must be a positive integer");
            }
            c.directions = j["directions"].get<std::size_t>();
        }
        if (j.contains("events_per_point")) {
            if (!j["events_per_point"].is_number_integer()) {
                throw ConfigError("'events_per_point' must be an integer");
            }
            c.events_per_point = j["events_per_point"].get<int64_t>();
        }
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned()) {
                throw ConfigError("'seed' must be a non-negative integer");
            }
            c.seed = j["seed"].get<uint64_t>();
        }
        if (j.contains("noise")) {
            c.noise = json_number(j, "noise");
        }
        if (j.contains("efficiencies")) {
            const Json &e = j["efficiencies"];
            if (!e.is_object()) {
                throw ConfigError("'efficiencies' must be an object {plus, minus}");
            }
            reject_unknown(e, {"plus", "minus"}, "efficiencies");
            c.efficiencies.plus = json_number(e, "plus");
            c.efficiencies.minus = json_number(e, "minus");
        }
        if (j.contains("flip_mixing")) {
            c.flip_mixing = j["flip_mixing"].get<bool>();
        }
        if (j.contains("refine")) {
            c.refine = j["refine"].get<bool>();
        }
        if (j.contains("threads")) {
            c.threads = j["threads"].get<int>();
        }
        if (j.contains("out_dir")) {
            c.out_dir = j["out_dir"].get<std::string>();
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(fmt::format("config type error: {}", e.what()));
    }
    validate_config(c);
    return c;
}

void validate_config(const ExperimentConfig &c) {
    build_state(c.state);
    build_source(c.state, c.flip_mixing);
    if (c.scheme == DirectionScheme::kUniformRandom && c.directions < kMinFitPoints) {
        throw ConfigError(fmt::format("need at least {} directions to fit an ellipsoid", kMinFitPoints));
    }
    if (c.scheme == DirectionScheme::kFixed) {
        throw ConfigError("the fixed scheme cannot be configured");
    }
    if (c.events_per_point < 3) {
        throw ConfigError("events_per_point must be at least 3 (one per Pauli axis)");
    }
    if (!(c.noise >= 0.0 && c.noise <= 1.0)) {
        throw ConfigError("noise must lie in [0, 1]");
    }
    if (!(c.efficiencies.plus > 0.0 && c.efficiencies.plus <= 1.0 && c.efficiencies.minus > 0.0 &&
          c.efficiencies.minus <= 1.0)) {
        throw ConfigError("detector efficiencies must lie in (0, 1]");
    }
    if (c.threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
}

DirectionSet make_directions(DirectionScheme scheme, std::size_t count, uint64_t seed) {
    switch (scheme) {
        case DirectionScheme::kUniformRandom: {
            Rng rng = make_stream(seed, kDirectionStream);
            return uniform_directions(count, rng);
        }
        case DirectionScheme::kIcosahedron:
        case DirectionScheme::kIcosahedronNine: {
            Rng rotation_rng = make_stream(seed, kRotationStream);
            DirectionSet ico = icosahedron_directions(random_rotation(rotation_rng));
            if (scheme == DirectionScheme::kIcosahedron) {
                return ico;
            }
            Rng subset_rng = make_stream(seed, kSubsetStream);
            return subset_nine(ico, subset_rng);
        }
        case DirectionScheme::kFixed:
            break;
    }
    throw ConfigError("the fixed scheme has no generator");
}

AnalyticSummary analyze(const StateSpec &spec) {
    const DensityMatrix rho = build_state(spec);
    AnalyticSummary summary;
    if (rho.num_qubits() == 2) {
        summary.parties.push_back({party_name(1), ellipsoid(pauli_decompose(rho))});
        return summary;
    }
    for (int party = 1; party < 3; party++) {
        summary.parties.push_back({party_name(party), ellipsoid(pauli_decompose(partial_trace(rho, {0, party})))});
    }
    summary.monogamy = monogamy_report(rho);
    return summary;
}

Json analytic_json(const StateSpec &spec, const AnalyticSummary &summary) {
    Json j;
    j["state"] = state_spec_json(spec);
    Json parties = Json::array();
    for (const PartyEllipsoid &p : summary.parties) {
        Json e = ellipsoid_json(p.ellipsoid);
        e["party"] = p.label;
        e["rank_name"] = rank_name(p.ellipsoid.rank);
        parties.push_back(std::move(e));
    }
    j["ellipsoids"] = std::move(parties);
    j["monogamy"] = summary.monogamy ? monogamy_json(*summary.monogamy) : Json(nullptr);
    return j;
}

std::string surface_mesh_csv(const SteeringEllipsoid &e, int latitudes, int longitudes) {
    if (latitudes < 2 || longitudes < 3) {
        throw std::invalid_argument("mesh needs at least 2 latitudes and 3 longitudes");
    }
    std::string out = "x,y,z\n";
    for (int i = 0; i <= latitudes; i++) {
        const double theta = kPi * i / latitudes;
        const int ring = (i == 0 || i == latitudes) ? 1 : longitudes;
        for (int k = 0; k < ring; k++) {
            const double phi = 2.0 * kPi * k / longitudes;
            Vec3 u(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
            Vec3 p = e.surface_point(u);
            out += fmt::format("{},{},{}\n", p(0), p(1), p(2));
        }
    }
    return out;
}

double CloudFit::volume() const {
    if (!fit) {
        return 0.0;
    }
    return fit->recovered ? fit->recovered->volume : kNaN;
}

CloudFit fit_cloud(std::span<const Vec3> points, bool refine_fit) {
    CloudFit out;
    out.spread = degenerate_guard(points);
    if (out.spread.verdict != CloudVerdict::kFull) {
        return out;
    }
    QuadricFit f = fit(points);
    if (refine_fit && f.recovered) {
        f = refine(points, f);
    }
    out.fit = std::move(f);
    return out;
}

Json cloud_fit_json(const CloudFit &f) {
    return f.fit ? fit_json(*f.fit, f.spread) : unfitted_json(f.spread);
}

SimulationOutcome simulate(const ExperimentConfig &config, uint64_t seed) {
    validate_config(config);
    SimulationOutcome out;
    out.seed = seed;
    out.directions = make_directions(config.scheme, config.directions, seed);
    ExperimentOptions options;
    options.events_per_point = config.events_per_point;
    options.noise = config.noise;
    options.efficiencies = config.efficiencies;
    options.threads = config.threads;
    out.experiment = run_experiment(build_source(config.state, config.flip_mixing), out.directions, options, seed);
    for (const PartyCloud &cloud : out.experiment.parties) {
        PointCloud points = cloud.estimates();
        if (points.size() < kMinFitPoints) {
            throw DegenerateFit(fmt::format("{} cloud has {} usable points; at least {} are needed", cloud.label,
                                            points.size(), kMinFitPoints));
        }
        out.fits.push_back(fit_cloud(points, config.refine));
    }
    if (out.fits.size() == 2) {
        const double v_ba = out.fits[0].volume();
        const double v_ca = out.fits[1].volume();
        if (std::isfinite(v_ba) && std::isfinite(v_ca)) {
            out.monogamy = monogamy_report_from_volumes(v_ba, v_ca, is_pure_spec(config.state) && config.noise == 0.0);
        }
    }
    return out;
}

Json simulation_json(const ExperimentConfig &config, const SimulationOutcome &outcome) {
    Json j;
    j["seed"] = outcome.seed;
    Json c;
    c["state"] = state_spec_json(config.state);
    c["scheme"] = scheme_name(config.scheme);
    c["directions"] = outcome.directions.directions.size();
    c["events_per_point"] = config.events_per_point;
    c["noise"] = config.noise;
    c["efficiencies"] = {{"plus", config.efficiencies.plus}, {"minus", config.efficiencies.minus}};
    c["flip_mixing"] = config.flip_mixing;
    c["refine"] = config.refine;
    j["config"] = std::move(c);
    Json parties = Json::array();
    for (std::size_t i = 0; i < outcome.experiment.parties.size(); i++) {
        const PartyCloud &cloud = outcome.experiment.parties[i];
        double mean_error = 0.0;
        for (const SteeredPoint &p : cloud.points) {
            mean_error += p.estimate.std_error.sum() / 3.0;
        }
        Json p;
        p["party"] = cloud.label;
        p["points"] = cloud.points.size();
        p["skipped"] = cloud.skipped;
        p["mean_std_error"] = cloud.points.empty() ? 0.0 : mean_error / static_cast<double>(cloud.points.size());
        p["fit"] = cloud_fit_json(outcome.fits[i]);
        parties.push_back(std::move(p));
    }
    j["parties"] = std::move(parties);
    j["monogamy"] = outcome.monogamy ? monogamy_json(*outcome.monogamy) : Json(nullptr);
    return j;
}

std::vector<std::pair<char, StateSpec>> table_states() {
    std::vector<std::pair<char, StateSpec>> rows;
    const std::array<double, 7> betas = {0.0, 0.187 * kPi, 0.215 * kPi, kPi / 4, 0.285 * kPi, 0.313 * kPi, kPi / 2};
    char label = 'a';
    for (double beta : betas) {
        rows.emplace_back(label++, FamilySpec{kPi / 2, beta});
    }
    for (double alpha : {kPi / 4, kPi / 6, kPi / 8, kPi / 12}) {
        rows.emplace_back(label++, FamilySpec{alpha, kPi / 4});
    }
    rows.emplace_back(label, MixedWSpec{});
    return rows;
}

std::vector<TableRow> table_s1(const TableOptions &options, uint64_t seed) {
    std::vector<TableRow> rows;
    const auto states = table_states();
    for (std::size_t r = 0; r < states.size(); r++) {
        TableRow row;
        row.label = states[r].first;
        row.state = states[r].second;
        AnalyticSummary summary = analyze(row.state);
        for (int p = 0; p < 2; p++) {
            row.theory[p] = summary.parties[p].ellipsoid.volume;
            row.simulated[p] = row.mc_std[p] = row.ss_res[p] = row.r_squared[p] = kNaN;
        }
        if (!options.theory_only) {
            ExperimentConfig config;
            config.state = row.state;
            config.directions = options.directions;
            config.events_per_point = options.events_per_point;
            config.threads = options.threads;
            const uint64_t row_seed = derive_seed(seed, r);
            SimulationOutcome outcome = simulate(config, row_seed);
            row.has_simulation = true;
            for (int p = 0; p < 2; p++) {
                const CloudFit &f = outcome.fits[p];
                row.verdict[p] = f.spread.verdict;
                row.simulated[p] = f.volume();
                if (f.fit) {
                    row.ss_res[p] = f.fit->ss_res;
                    row.r_squared[p] = f.fit->r_squared;
                }
            }
            ExperimentOptions resample;
            resample.events_per_point = options.events_per_point;
            std::vector<std::vector<double>> samples(static_cast<std::size_t>(options.samples));
            parallel_for(samples.size(), options.threads, [&](std::size_t s) {
                samples[s] = cloud_volumes(resample_counts(outcome.experiment, resample, derive_seed(row_seed, s + 1)),
                                           false);
            });
            for (int p = 0; p < 2; p++) {
                std::vector<double> v;
                for (const auto &s : samples) {
                    v.push_back(s[p]);
                }
                row.mc_std[p] = mean_and_std(v).second;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string table_csv(const std::vector<TableRow> &rows) {
    std::string out =
        "row,alpha,beta,v_ba_theory,v_ca_theory,v_ba_sim,v_ba_mc_std,v_ca_sim,v_ca_mc_std,"
        "ss_res_ba,r2_ba,ss_res_ca,r2_ca,verdict_ba,verdict_ca\n";
    for (const TableRow &r : rows) {
        std::string alpha, beta;
        if (const auto *f = std::get_if<FamilySpec>(&r.state)) {
            alpha = format_number(f->alpha);
            beta = format_number(f->beta);
        }
        auto verdict = [&](int p) { return r.has_simulation ? std::string(verdict_name(r.verdict[p])) : std::string(); };
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.label, alpha, beta,
                           format_number(r.theory[0]), format_number(r.theory[1]), cell(r.simulated[0]),
                           cell(r.mc_std[0]), cell(r.simulated[1]), cell(r.mc_std[1]), cell(r.ss_res[0]),
                           cell(r.r_squared[0]), cell(r.ss_res[1]), cell(r.r_squared[1]), verdict(0), verdict(1));
    }
    return out;
}

std::vector<SweepRow> monogamy_sweep(const std::vector<std::pair<double, double>> &angles) {
    std::vector<SweepRow> rows;
    rows.reserve(angles.size());
    for (const auto &[alpha, beta] : angles) {
        rows.push_back({alpha, beta, monogamy_report(build_state(FamilySpec{alpha, beta}))});
    }
    return rows;
}

std::vector<std::pair<double, double>> w_grid_angles() {
    std::vector<std::pair<double, double>> out;
    for (const auto &[label, spec] : table_states()) {
        const auto *f = std::get_if<FamilySpec>(&spec);
        if (f && f->alpha == kPi / 2) {
            out.emplace_back(f->alpha, f->beta);
        }
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
    std::string out = "alpha,beta,v_ba,v_ca,pure_residual,mixed_residual,classification\n";
    for (const SweepRow &r : rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", r.alpha, r.beta, r.report.v_ba, r.report.v_ca,
                           r.report.pure_residual, r.report.mixed_residual,
                           monogamy_class_name(r.report.classification));
    }
    return out;
}

RobustnessResult icosahedron_robustness(const RobustnessOptions &options, uint64_t seed) {
    if (options.runs < 2) {
        throw std::invalid_argument("robustness needs at least two runs");
    }
    const DensityMatrix rho = bell_diagonal(options.weights);
    RobustnessResult result;
    result.theory = normalized_volume(pauli_decompose(rho));
    result.volumes_12.assign(static_cast<std::size_t>(options.runs), kNaN);
    result.volumes_9.assign(static_cast<std::size_t>(options.runs), kNaN);

    ExperimentOptions experiment;
    experiment.events_per_point = options.events_per_point;
    parallel_for(static_cast<std::size_t>(options.runs), options.threads, [&](std::size_t run) {
        const uint64_t run_seed = derive_seed(seed, run);
        DirectionSet ico = make_directions(DirectionScheme::kIcosahedron, 12, run_seed);
        ExperimentResult r = run_experiment(rho, ico, experiment, run_seed);
        const PartyCloud &cloud = r.parties.front();
        Rng subset_rng = make_stream(run_seed, kSubsetStream);
        DirectionSet nine = subset_nine(ico, subset_rng);
        PointCloud all = cloud.estimates();
        PointCloud chosen;
        for (const Vec3 &d : nine.directions) {
            for (const SteeredPoint &p : cloud.points) {
                if (p.direction == d) {
                    chosen.push_back(p.estimate.bloch);
                }
            }
        }
        auto volume_of = [](const PointCloud &pts) {
            try {
                QuadricFit f = fit(pts);
                return f.recovered ? f.recovered->volume : kNaN;
            } catch (const DegenerateFit &) {
                return kNaN;
            }
        };
        result.volumes_12[run] = volume_of(all);
        result.volumes_9[run] = volume_of(chosen);
    });
    std::tie(result.mean_12, result.std_12) = mean_and_std(result.volumes_12);
    std::tie(result.mean_9, result.std_9) = mean_and_std(result.volumes_9);
    return result;
}

Json robustness_json(const RobustnessOptions &options, const RobustnessResult &result, uint64_t seed) {
    Json j;
    j["seed"] = seed;
    j["weights"] = options.weights;
    j["runs"] = options.runs;
    j["events_per_point"] = options.events_per_point;
    j["theory_volume"] = result.theory;
    auto series = [](const std::vector<double> &v) {
        Json a = Json::array();
        for (double x : v) {
            a.push_back(number_or_null(x));
        }
        return a;
    };
    j["twelve"] = {{"mean", number_or_null(result.mean_12)},
                   {"std", number_or_null(result.std_12)},
                   {"volumes", series(result.volumes_12)}};
    j["nine"] = {{"mean", number_or_null(result.mean_9)},
                 {"std", number_or_null(result.std_9)},
                 {"volumes", series(result.volumes_9)}};
    return j;
}

}  // namespace qsteer
