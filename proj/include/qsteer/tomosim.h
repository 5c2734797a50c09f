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

#ifndef QSTEER_TOMOSIM_H
#define QSTEER_TOMOSIM_H

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qsteer/fitquad.h"
#include "qsteer/qstate.h"
#include "qsteer/random.h"

/// Simulated steering experiments: Alice measures along sampled directions,
/// the steered qubits are reconstructed by single-qubit Pauli tomography
/// from binomial counts.
namespace qsteer {

enum class DirectionScheme { kUniformRandom, kIcosahedron, kIcosahedronNine, kFixed };

std::string_view scheme_name(DirectionScheme scheme);

struct DirectionSet {
    std::vector<Vec3> directions;
    DirectionScheme scheme = DirectionScheme::kFixed;
};

/// Uniform on the unit sphere.
Vec3 sample_direction(Rng &rng);
DirectionSet uniform_directions(std::size_t count, Rng &rng);

/// The 12 vertices of a regular icosahedron (cyclic permutations of
/// (0, +-1, +-phi), normalized), rotated by `rotation`. Throws
/// std::invalid_argument unless the rotation is orthogonal to 1e-10.
DirectionSet icosahedron_directions(const Mat3 &rotation = Mat3::Identity());

/// Nine of the twelve vertices, drawn uniformly among the 160 subsets that
/// determine a unique quadric. The other 60 leave a pencil of quadrics
/// through the nine points and cannot fix an ellipsoid.
DirectionSet subset_nine(const DirectionSet &icosahedron, Rng &rng);

enum class Axis { kX = 0, kY = 1, kZ = 2 };

struct AxisCounts {
    int64_t plus = 0;
    int64_t minus = 0;
};

struct CountRecord {
    Vec3 direction = Vec3::Zero();
    std::array<AxisCounts, 3> axis_counts{};
    int64_t total_events = 0;
};

using Allocation = std::array<int64_t, 3>;

/// Splits events as evenly as possible over x, y, z; the remainder goes to
/// the leading axes.
Allocation even_allocation(int64_t total_events);

/// Detection efficiencies of the "+" and "-" detectors. Observed outcome
/// frequencies are skewed by them and reconstruct() divides them back out.
struct DetectorEfficiencies {
    double plus = 1.0;
    double minus = 1.0;
};

/// Heralded counts for a steered state with Bloch vector r: per axis k,
/// n_plus ~ Binomial(N_k, p_k), p_k = (1 + r_k)/2 before detector skew.
/// Throws std::invalid_argument for a bad allocation or |r| > 1.
CountRecord simulate_counts(const Vec3 &r, int64_t total_events, const Allocation &allocation, Rng &rng,
                            const DetectorEfficiencies &efficiencies = {});

struct TomoEstimate {
    Vec3 bloch = Vec3::Zero();
    Vec3 std_error = Vec3::Zero();
    /// The raw estimate left the unit ball and was scaled back onto it.
    bool projected = false;
};

/// bloch_k = (n_plus - n_minus) / N_k after efficiency correction,
/// std_error_k = sqrt((1 - bloch_k^2) / N_k). Throws std::invalid_argument
/// when an axis has no counts.
TomoEstimate reconstruct(const CountRecord &counts, const DetectorEfficiencies &efficiencies = {});

/// Stand-in for rho_ABC = (|chi><chi| + X|chi><chi|X)/2, X = sx x sx x sx:
/// only chi is prepared and each shot measures either M or
/// M' = X M X with probability 1/2.
struct FlipMixedSource {
    PureState chi;
};

using StateSource = std::variant<DensityMatrix, FlipMixedSource>;

int source_qubits(const StateSource &source);

/// Joint outcome probabilities {A+ P+, A+ P-, A- P+, A- P-} for Alice's
/// projective measurement along e and a Pauli measurement on `party`.
/// `noise` mixes in white noise as (1 - noise) rho + noise I/d.
std::array<double, 4> joint_probabilities(const StateSource &source, const Vec3 &e, int party, Axis axis,
                                          double noise = 0.0);

struct ExperimentOptions {
    /// Detections per steered point, conditioned on Alice's "+" outcome.
    int64_t events_per_point = 50000;
    double noise = 0.0;
    DetectorEfficiencies efficiencies;
    /// When false, estimates equal the exact steered vectors (the
    /// infinite-count limit) with zero error bars.
    bool shot_noise = true;
    int threads = 1;
};

struct SteeredPoint {
    std::size_t index = 0;
    Vec3 direction = Vec3::Zero();
    Vec3 exact_bloch = Vec3::Zero();
    /// Probability of Alice's "+" outcome for this direction.
    double probability = 0.0;
    CountRecord counts;
    TomoEstimate estimate;
};

/// The steered points of one party (1 = Bob, 2 = Charlie).
struct PartyCloud {
    int party = 1;
    std::string label;
    std::vector<SteeredPoint> points;
    /// Directions whose "+" outcome had zero probability.
    std::vector<std::size_t> skipped;

    PointCloud estimates() const;
    PointCloud exact() const;
};

struct ExperimentResult {
    std::vector<PartyCloud> parties;
};

/// Runs the steering experiment: Bob's cloud for two-qubit sources, Bob's
/// and Charlie's for three-qubit sources. Counts for direction i and party
/// p are drawn from make_stream(seed, 4 * i + p), so output does not depend
/// on the thread count.
ExperimentResult run_experiment(const StateSource &source, const DirectionSet &directions,
                                const ExperimentOptions &options, uint64_t seed);

/// Redraws every point's counts around its exact Bloch vector with new
/// streams of `seed`, keeping directions fixed.
ExperimentResult resample_counts(const ExperimentResult &experiment, const ExperimentOptions &options,
                                 uint64_t seed);

struct HeraldedShots {
    int64_t trials = 0;
    int64_t heralds = 0;
    int64_t plus = 0;
    int64_t minus = 0;
};

/// Shot-by-shot sampling of `trials` joint measurements, recording the
/// party's outcomes on trials where Alice obtained "+".
HeraldedShots sample_shots(const StateSource &source, const Vec3 &e, int party, Axis axis, int64_t trials,
                           Rng &rng);

struct MonteCarloSummary {
    std::vector<double> mean;
    std::vector<double> std_dev;
    int samples = 0;
};

/// Sample standard deviation (n - 1) of each scalar returned by
/// `experiment`, called once per sample with derive_seed(seed, sample).
MonteCarloSummary monte_carlo_errors(const std::function<std::vector<double>(uint64_t)> &experiment, int samples,
                                     uint64_t seed, int threads = 1);

}  // namespace qsteer

#endif
