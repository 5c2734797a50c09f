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

#ifndef QSTEER_EXPERIMENT_H
#define QSTEER_EXPERIMENT_H

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qsteer/fitquad.h"
#include "qsteer/io.h"
#include "qsteer/monogamy.h"
#include "qsteer/steer.h"
#include "qsteer/tomosim.h"

/// End-to-end runs behind the command-line tool. Angles are radians here;
/// the CLI converts from degrees.
namespace qsteer {

/// A configuration that fails validation.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// (sin a |100> + sin b |010> + cos b |001> + cos a |111>)/sqrt(2).
struct FamilySpec {
    double alpha = 0.0;
    double beta = 0.0;
};
/// The equal mixture of chi1 and its flipped partner.
struct MixedWSpec {};
/// Weights of psi-, psi+, phi-, phi+.
struct BellDiagonalSpec {
    std::array<double, 4> weights{};
};
/// cos g |01> + sin g |10>.
struct TwoQubitSpec {
    double gamma = 0.0;
};

using StateSpec = std::variant<FamilySpec, MixedWSpec, BellDiagonalSpec, TwoQubitSpec>;

/// Throws ConfigError when the parameters fall outside the state constructor's domain.
DensityMatrix build_state(const StateSpec &spec);
bool is_pure_spec(const StateSpec &spec);
/// With `flip_mixing` the mixed-W state is sampled from chi1 alone.
StateSource build_source(const StateSpec &spec, bool flip_mixing);
Json state_spec_json(const StateSpec &spec);

struct ExperimentConfig {
    StateSpec state = FamilySpec{std::numbers::pi / 2, std::numbers::pi / 4};
    DirectionScheme scheme = DirectionScheme::kUniformRandom;
    std::size_t directions = 1000;
    int64_t events_per_point = 50000;
    std::optional<uint64_t> seed;
    double noise = 0.0;
    DetectorEfficiencies efficiencies;
    bool flip_mixing = false;
    bool refine = false;
    int threads = 1;
    std::string out_dir = ".";
};

/// Parses a JSON config (angles in radians). Unknown keys are rejected.
/// Throws ConfigError.
ExperimentConfig parse_config(const Json &j);
/// Checks every field against the preconditions of the modules it feeds.
void validate_config(const ExperimentConfig &config);
DirectionScheme parse_scheme(std::string_view name);

/// Auxiliary generator streams of a run. Point counts use streams
/// 4 i + party (party 1 or 2), so streams 4 k + 3 never collide with them.
inline constexpr uint64_t kDirectionStream = 3;
inline constexpr uint64_t kRotationStream = 7;
inline constexpr uint64_t kSubsetStream = 11;

DirectionSet make_directions(DirectionScheme scheme, std::size_t count, uint64_t seed);

struct PartyEllipsoid {
    std::string label;
    SteeringEllipsoid ellipsoid;
};

struct AnalyticSummary {
    std::vector<PartyEllipsoid> parties;
    /// Three-qubit states only.
    std::optional<MonogamyReport> monogamy;
};

AnalyticSummary analyze(const StateSpec &spec);
Json analytic_json(const StateSpec &spec, const AnalyticSummary &summary);

/// Points sampled on the surface of `e` by a latitude/longitude grid, as
/// x,y,z rows with a header.
std::string surface_mesh_csv(const SteeringEllipsoid &e, int latitudes = 24, int longitudes = 48);

struct CloudFit {
    SpreadDiagnostics spread;
    /// Absent when the guard refused the cloud.
    std::optional<QuadricFit> fit;

    /// Recovered volume; 0 for point or degenerate clouds, NaN when the
    /// fitted quadric is not an ellipsoid.
    double volume() const;
};

/// Runs the degenerate guard, then the symmetric fit and optional
/// refinement. Throws DegenerateFit only for clouds too small to fit.
CloudFit fit_cloud(std::span<const Vec3> points, bool refine);
Json cloud_fit_json(const CloudFit &fit);

struct SimulationOutcome {
    uint64_t seed = 0;
    DirectionSet directions;
    ExperimentResult experiment;
    std::vector<CloudFit> fits;
    /// Three-qubit states only, from the fitted volumes.
    std::optional<MonogamyReport> monogamy;
};

SimulationOutcome simulate(const ExperimentConfig &config, uint64_t seed);
Json simulation_json(const ExperimentConfig &config, const SimulationOutcome &outcome);

struct TableRow {
    char label = 'a';
    StateSpec state;
    std::array<double, 2> theory{};
    std::array<double, 2> simulated{};
    std::array<double, 2> mc_std{};
    std::array<double, 2> ss_res{};
    std::array<double, 2> r_squared{};
    std::array<CloudVerdict, 2> verdict{};
    bool has_simulation = false;
};

/// The twelve benchmark states a-l: the W-class grid at alpha = pi/2
/// (rows a-g), beta = pi/4 with alpha = pi/4, pi/6, pi/8, pi/12 (h-k) and
/// the mixed-W state (l).
std::vector<std::pair<char, StateSpec>> table_states();

struct TableOptions {
    std::size_t directions = 1000;
    int64_t events_per_point = 50000;
    int samples = 100;
    int threads = 1;
    /// Only the analytic columns.
    bool theory_only = false;
};

std::vector<TableRow> table_s1(const TableOptions &options, uint64_t seed);
std::string table_csv(const std::vector<TableRow> &rows);

/// Analytic volumes and residuals over (alpha, beta) pairs.
struct SweepRow {
    double alpha;
    double beta;
    MonogamyReport report;
};

std::vector<SweepRow> monogamy_sweep(const std::vector<std::pair<double, double>> &angles);
/// The seven beta values of rows a-g at alpha = pi/2.
std::vector<std::pair<double, double>> w_grid_angles();
std::string sweep_csv(const std::vector<SweepRow> &rows);

struct RobustnessOptions {
    std::array<double, 4> weights = {0.6, 0.1, 0.1, 0.2};
    int runs = 50;
    int64_t events_per_point = 500000;
    int threads = 1;
};

struct RobustnessResult {
    double theory = 0.0;
    std::vector<double> volumes_12;
    std::vector<double> volumes_9;
    double mean_12 = 0.0;
    double std_12 = 0.0;
    double mean_9 = 0.0;
    double std_9 = 0.0;
};

/// Each run rotates the icosahedron at random, simulates Bob's steered
/// states at its vertices and fits all twelve points and a random
/// admissible nine.
RobustnessResult icosahedron_robustness(const RobustnessOptions &options, uint64_t seed);
Json robustness_json(const RobustnessOptions &options, const RobustnessResult &result, uint64_t seed);

}  // namespace qsteer

#endif
