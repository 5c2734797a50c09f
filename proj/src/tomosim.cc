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

#include "qsteer/tomosim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qsteer/parallel.h"
#include "qsteer/steer.h"

namespace qsteer {

namespace {

// M' = X M X leaves sx outcomes alone and flips sy, sz outcomes.
constexpr std::array<double, 3> kFlipSign = {1.0, -1.0, -1.0};

Eigen::MatrixXcd projector(const Vec3 &axis, double sign) {
    Eigen::Matrix2cd p = pauli(0);
    for (int j = 0; j < 3; j++) {
        p += sign * axis(j) * pauli(j + 1);
    }
    return p / 2.0;
}

std::array<double, 4> joint_from_density(const DensityMatrix &rho, const Vec3 &e, int party, Axis axis) {
    const int n = rho.num_qubits();
    Vec3 k = Vec3::Zero();
    k(static_cast<int>(axis)) = 1.0;
    std::array<double, 4> out{};
    for (int a = 0; a < 2; a++) {
        Eigen::MatrixXcd alice = embed_single_qubit(projector(e, a == 0 ? 1.0 : -1.0), 0, n);
        for (int s = 0; s < 2; s++) {
            Eigen::MatrixXcd bob = embed_single_qubit(projector(k, s == 0 ? 1.0 : -1.0), party, n);
            out[2 * a + s] = std::max(0.0, expectation(rho, alice * bob));
        }
    }
    return out;
}

void check_party(int qubits, int party) {
    if (party < 1 || party >= qubits) {
        throw std::invalid_argument("steered party must be 1 (Bob) or 2 (Charlie, three qubits only)");
    }
}

std::string party_label(int party) {
    return party == 1 ? "B|A" : "C|A";
}

void fill_counts(SteeredPoint &point, const ExperimentOptions &options, uint64_t seed, uint64_t stream) {
    const Allocation allocation = even_allocation(options.events_per_point);
    point.counts.direction = point.direction;
    if (!options.shot_noise) {
        point.counts.total_events = options.events_per_point;
        for (int k = 0; k < 3; k++) {
            auto plus = static_cast<int64_t>(
                std::llround(static_cast<double>(allocation[k]) * (1.0 + point.exact_bloch(k)) / 2.0));
            point.counts.axis_counts[k] = {plus, allocation[k] - plus};
        }
        point.estimate = TomoEstimate{point.exact_bloch, Vec3::Zero(), false};
        return;
    }
    Rng rng = make_stream(seed, stream);
    Vec3 r = point.exact_bloch;
    if (r.norm() > 1.0) {
        r.normalize();
    }
    point.counts = simulate_counts(r, options.events_per_point, allocation, rng, options.efficiencies);
    point.counts.direction = point.direction;
    point.estimate = reconstruct(point.counts, options.efficiencies);
}

}  // namespace

std::string_view scheme_name(DirectionScheme scheme) {
    switch (scheme) {
        case DirectionScheme::kUniformRandom:
            return "uniform-random";
        case DirectionScheme::kIcosahedron:
            return "icosahedron";
        case DirectionScheme::kIcosahedronNine:
            return "icosahedron-9";
        case DirectionScheme::kFixed:
            return "fixed";
    }
    return "fixed";
}

Vec3 sample_direction(Rng &rng) {
    return uniform_unit_vector(rng);
}

DirectionSet uniform_directions(std::size_t count, Rng &rng) {
    DirectionSet set{{}, DirectionScheme::kUniformRandom};
    set.directions.reserve(count);
    for (std::size_t i = 0; i < count; i++) {
        set.directions.push_back(sample_direction(rng));
    }
    return set;
}

DirectionSet icosahedron_directions(const Mat3 &rotation) {
    if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("icosahedron rotation is not orthogonal");
    }
    const double phi = std::numbers::phi;
    DirectionSet set{{}, DirectionScheme::kIcosahedron};
    for (double s1 : {1.0, -1.0}) {
        for (double s2 : {1.0, -1.0}) {
            for (const Vec3 &v : {Vec3(0, s1, s2 * phi), Vec3(s1, s2 * phi, 0), Vec3(s2 * phi, 0, s1)}) {
                set.directions.push_back(rotation * v.normalized());
            }
        }
    }
    return set;
}

DirectionSet subset_nine(const DirectionSet &icosahedron, Rng &rng) {
    if (icosahedron.directions.size() != 12) {
        throw std::invalid_argument("subset_nine expects the 12 icosahedron vertices");
    }
    std::array<std::size_t, 12> order;
    std::iota(order.begin(), order.end(), 0);
    while (true) {
        std::shuffle(order.begin(), order.end(), rng);
        std::array<std::size_t, 9> pick;
        std::copy_n(order.begin(), 9, pick.begin());
        std::sort(pick.begin(), pick.end());
        DirectionSet set{{}, DirectionScheme::kIcosahedronNine};
        for (std::size_t i : pick) {
            set.directions.push_back(icosahedron.directions[i]);
        }
        if (quadric_pencil_dimension(set.directions) == 1) {
            return set;
        }
    }
}

Allocation even_allocation(int64_t total_events) {
    if (total_events < 0) {
        throw std::invalid_argument("negative event count");
    }
    Allocation a{total_events / 3, total_events / 3, total_events / 3};
    for (int64_t k = 0; k < total_events % 3; k++) {
        a[k]++;
    }
    return a;
}

CountRecord simulate_counts(const Vec3 &r, int64_t total_events, const Allocation &allocation, Rng &rng,
                            const DetectorEfficiencies &efficiencies) {
    if (r.norm() > 1.0 + 1e-10) {
        throw std::invalid_argument("steered Bloch vector longer than 1");
    }
    int64_t sum = 0;
    for (int64_t n : allocation) {
        if (n < 0) {
            throw std::invalid_argument("negative axis allocation");
        }
        sum += n;
    }
    if (sum != total_events) {
        throw std::invalid_argument("axis allocation does not sum to the event total");
    }
    if (!(efficiencies.plus > 0.0 && efficiencies.minus > 0.0)) {
        throw std::invalid_argument("detector efficiencies must be positive");
    }
    CountRecord record;
    record.total_events = total_events;
    for (int k = 0; k < 3; k++) {
        double p = std::clamp((1.0 + r(k)) / 2.0, 0.0, 1.0);
        double seen_plus = p * efficiencies.plus;
        double seen = seen_plus + (1.0 - p) * efficiencies.minus;
        double q = std::clamp(seen_plus / seen, 0.0, 1.0);
        std::binomial_distribution<int64_t> draw(allocation[k], q);
        int64_t plus = draw(rng);
        record.axis_counts[k] = {plus, allocation[k] - plus};
    }
    return record;
}

TomoEstimate reconstruct(const CountRecord &counts, const DetectorEfficiencies &efficiencies) {
    TomoEstimate est;
    for (int k = 0; k < 3; k++) {
        const AxisCounts &c = counts.axis_counts[k];
        const int64_t n = c.plus + c.minus;
        if (n <= 0) {
            throw std::invalid_argument("axis " + std::to_string(k) + " has no counts");
        }
        double plus = static_cast<double>(c.plus) / efficiencies.plus;
        double minus = static_cast<double>(c.minus) / efficiencies.minus;
        double b = (plus - minus) / (plus + minus);
        est.bloch(k) = b;
        est.std_error(k) = std::sqrt(std::max(0.0, 1.0 - b * b) / static_cast<double>(n));
    }
    double norm = est.bloch.norm();
    if (norm > 1.0) {
        est.bloch /= norm;
        est.projected = true;
    }
    return est;
}

int source_qubits(const StateSource &source) {
    if (const auto *rho = std::get_if<DensityMatrix>(&source)) {
        return rho->num_qubits();
    }
    return std::get<FlipMixedSource>(source).chi.num_qubits();
}

std::array<double, 4> joint_probabilities(const StateSource &source, const Vec3 &e, int party, Axis axis,
                                          double noise) {
    check_party(source_qubits(source), party);
    if (const auto *rho = std::get_if<DensityMatrix>(&source)) {
        return joint_from_density(noise > 0.0 ? with_white_noise(*rho, noise) : *rho, e, party, axis);
    }
    const auto &flip = std::get<FlipMixedSource>(source);
    if (flip.chi.num_qubits() != 3) {
        throw std::invalid_argument("flip mixing needs a three-qubit state");
    }
    const DensityMatrix chi = density_from_ket(flip.chi);
    const int k = static_cast<int>(axis);
    const Vec3 flipped(e.x(), -e.y(), -e.z());
    std::array<double, 4> direct = joint_from_density(chi, e, party, axis);
    std::array<double, 4> mirrored = joint_from_density(chi, flipped, party, axis);
    std::array<double, 4> out{};
    for (int a = 0; a < 2; a++) {
        for (int s = 0; s < 2; s++) {
            int reported = kFlipSign[k] > 0 ? s : 1 - s;
            out[2 * a + reported] += 0.5 * mirrored[2 * a + s];
            out[2 * a + s] += 0.5 * direct[2 * a + s];
        }
    }
    for (double &p : out) {
        p = (1.0 - noise) * p + noise / 4.0;
    }
    return out;
}

PointCloud PartyCloud::estimates() const {
    PointCloud out;
    out.reserve(points.size());
    for (const auto &p : points) {
        out.push_back(p.estimate.bloch);
    }
    return out;
}

PointCloud PartyCloud::exact() const {
    PointCloud out;
    out.reserve(points.size());
    for (const auto &p : points) {
        out.push_back(p.exact_bloch);
    }
    return out;
}

ExperimentResult run_experiment(const StateSource &source, const DirectionSet &directions,
                                const ExperimentOptions &options, uint64_t seed) {
    if (directions.directions.empty()) {
        throw std::invalid_argument("no measurement directions");
    }
    if (options.events_per_point < 3) {
        throw std::invalid_argument("need at least one event per Pauli axis");
    }
    if (!(options.noise >= 0.0 && options.noise <= 1.0)) {
        throw std::invalid_argument("noise weight outside [0, 1]");
    }
    const int qubits = source_qubits(source);
    if (qubits < 2) {
        throw std::invalid_argument("steering needs at least two qubits");
    }
    const std::size_t n = directions.directions.size();

    ExperimentResult result;
    for (int party = 1; party < qubits; party++) {
        PartyCloud cloud;
        cloud.party = party;
        cloud.label = party_label(party);

        std::vector<SteeredPoint> slots(n);
        std::vector<char> usable(n, 1);
        std::optional<PauliDecomposition> marginal;
        if (const auto *rho = std::get_if<DensityMatrix>(&source)) {
            DensityMatrix noisy = options.noise > 0.0 ? with_white_noise(*rho, options.noise) : *rho;
            marginal = pauli_decompose(qubits == 2 ? noisy : partial_trace(noisy, {0, party}));
        }
        parallel_for(n, options.threads, [&](std::size_t i) {
            SteeredPoint &point = slots[i];
            point.index = i;
            point.direction = directions.directions[i];
            if (marginal) {
                try {
                    SteeredState s = steered_bloch(*marginal, point.direction);
                    point.exact_bloch = s.bloch;
                    point.probability = s.probability;
                } catch (const ZeroProbabilityBranch &) {
                    usable[i] = 0;
                    return;
                }
            } else {
                double herald = 0.0;
                for (int k = 0; k < 3; k++) {
                    auto p = joint_probabilities(source, point.direction, party, static_cast<Axis>(k), options.noise);
                    herald = p[0] + p[1];
                    if (herald <= kZeroProbability / 2.0) {
                        usable[i] = 0;
                        return;
                    }
                    point.exact_bloch(k) = (p[0] - p[1]) / herald;
                }
                point.probability = herald;
            }
            fill_counts(point, options, seed, 4 * static_cast<uint64_t>(i) + static_cast<uint64_t>(party));
        });
        for (std::size_t i = 0; i < n; i++) {
            if (usable[i]) {
                cloud.points.push_back(std::move(slots[i]));
            } else {
                cloud.skipped.push_back(i);
            }
        }
        result.parties.push_back(std::move(cloud));
    }
    return result;
}

ExperimentResult resample_counts(const ExperimentResult &experiment, const ExperimentOptions &options,
                                 uint64_t seed) {
    ExperimentResult out = experiment;
    for (PartyCloud &cloud : out.parties) {
        parallel_for(cloud.points.size(), options.threads, [&](std::size_t j) {
            SteeredPoint &point = cloud.points[j];
            fill_counts(point, options, seed,
                        4 * static_cast<uint64_t>(point.index) + static_cast<uint64_t>(cloud.party));
        });
    }
    return out;
}

HeraldedShots sample_shots(const StateSource &source, const Vec3 &e, int party, Axis axis, int64_t trials,
                           Rng &rng) {
    HeraldedShots shots;
    shots.trials = trials;
    auto tally = [&](int outcome) {
        if (outcome < 2) {
            shots.heralds++;
            (outcome == 0 ? shots.plus : shots.minus)++;
        }
    };
    if (std::holds_alternative<DensityMatrix>(source)) {
        auto p = joint_probabilities(source, e, party, axis);
        std::discrete_distribution<int> draw(p.begin(), p.end());
        for (int64_t t = 0; t < trials; t++) {
            tally(draw(rng));
        }
        return shots;
    }
    const auto &flip = std::get<FlipMixedSource>(source);
    const StateSource chi = density_from_ket(flip.chi);
    auto p_m = joint_probabilities(chi, e, party, axis);
    auto p_mprime = joint_probabilities(chi, Vec3(e.x(), -e.y(), -e.z()), party, axis);
    std::discrete_distribution<int> draw_m(p_m.begin(), p_m.end());
    std::discrete_distribution<int> draw_mprime(p_mprime.begin(), p_mprime.end());
    std::bernoulli_distribution branch(0.5);
    const bool flips = kFlipSign[static_cast<int>(axis)] < 0;
    for (int64_t t = 0; t < trials; t++) {
        if (branch(rng)) {
            int outcome = draw_mprime(rng);
            if (flips) {
                outcome ^= 1;
            }
            tally(outcome);
        } else {
            tally(draw_m(rng));
        }
    }
    return shots;
}

MonteCarloSummary monte_carlo_errors(const std::function<std::vector<double>(uint64_t)> &experiment, int samples,
                                     uint64_t seed, int threads) {
    if (samples < 2) {
        throw std::invalid_argument("Monte Carlo needs at least two samples");
    }
    std::vector<std::vector<double>> values(static_cast<std::size_t>(samples));
    parallel_for(values.size(), threads, [&](std::size_t s) {
        values[s] = experiment(derive_seed(seed, s));
    });
    const std::size_t width = values.front().size();
    MonteCarloSummary summary;
    summary.samples = samples;
    summary.mean.assign(width, 0.0);
    summary.std_dev.assign(width, 0.0);
    for (const auto &v : values) {
        if (v.size() != width) {
            throw std::runtime_error("Monte Carlo samples returned different numbers of scalars");
        }
        for (std::size_t j = 0; j < width; j++) {
            summary.mean[j] += v[j];
        }
    }
    for (double &m : summary.mean) {
        m /= samples;
    }
    for (const auto &v : values) {
        for (std::size_t j = 0; j < width; j++) {
            summary.std_dev[j] += (v[j] - summary.mean[j]) * (v[j] - summary.mean[j]);
        }
    }
    for (double &s : summary.std_dev) {
        s = std::sqrt(s / (samples - 1));
    }
    return summary;
}

}  // namespace qsteer
