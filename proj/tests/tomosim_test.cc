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

#include <gtest/gtest.h>

#include <numbers>

#include "oracles.h"
#include "qsteer/fitquad.h"
#include "qsteer/random.h"
#include "qsteer/steer.h"

using namespace qsteer;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix row_d_state() {
    return density_from_ket(family_state(kPi / 2, kPi / 4));
}

// Projector onto the "sign" outcome of sigma.n, built from explicit entries.
Eigen::Matrix2cd oracle_projector(const Vec3 &n, double sign) {
    Eigen::Matrix2cd p;
    p(0, 0) = 1.0 + sign * n.z();
    p(1, 1) = 1.0 - sign * n.z();
    p(0, 1) = sign * Complex(n.x(), -n.y());
    p(1, 0) = sign * Complex(n.x(), n.y());
    return 0.5 * p;
}

// P(Alice sign_a along e, party sign_p along axis) as Tr[(P_a x P_p) rho],
// with the identity on the remaining qubit.
double oracle_joint(const Eigen::MatrixXcd &rho, const Vec3 &e, int party, int axis, double sign_a,
                    double sign_p) {
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    std::array<Eigen::Matrix2cd, 3> factors = {id, id, id};
    factors[0] = oracle_projector(e, sign_a);
    factors[party] = oracle_projector(Vec3::Unit(axis), sign_p);
    Eigen::MatrixXcd m = kron(kron(factors[0], factors[1]), factors[2]);
    return (m * rho).trace().real();
}

Eigen::MatrixXcd random_hermitian(int dim, Rng &rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(dim, dim);
    for (int r = 0; r < dim; r++) {
        for (int c = 0; c < dim; c++) {
            m(r, c) = Complex(g(rng), g(rng));
        }
    }
    return m + m.adjoint();
}

ExperimentOptions quick_options(int64_t events) {
    ExperimentOptions o;
    o.events_per_point = events;
    return o;
}

}  // namespace

TEST(Directions, UniformSphereStatistics) {
    Rng rng = make_stream(61, 0);
    const int n = 100000;
    std::array<int, 8> octants{};
    Vec3 sum = Vec3::Zero();
    for (int i = 0; i < n; i++) {
        Vec3 v = sample_direction(rng);
        ASSERT_NEAR(v.norm(), 1.0, 1e-12);
        sum += v;
        octants[(v.x() > 0) + 2 * (v.y() > 0) + 4 * (v.z() > 0)]++;
    }
    EXPECT_LT((sum / n).norm(), 0.01);
    for (int count : octants) {
        EXPECT_NEAR(static_cast<double>(count) / n, 0.125, 0.005);
    }
    Rng a = make_stream(62, 0), b = make_stream(62, 0);
    EXPECT_EQ(sample_direction(a), sample_direction(b));
    DirectionSet set = uniform_directions(17, a);
    EXPECT_EQ(set.directions.size(), 17u);
    EXPECT_EQ(set.scheme, DirectionScheme::kUniformRandom);
}

TEST(Directions, IcosahedronGeometry) {
    DirectionSet ico = icosahedron_directions();
    ASSERT_EQ(ico.directions.size(), 12u);
    EXPECT_EQ(ico.scheme, DirectionScheme::kIcosahedron);
    const double inv_sqrt5 = 1.0 / std::sqrt(5.0);
    for (std::size_t i = 0; i < 12; i++) {
        EXPECT_NEAR(ico.directions[i].norm(), 1.0, 1e-12);
        int antipodes = 0;
        for (std::size_t j = 0; j < 12; j++) {
            if (i == j) {
                continue;
            }
            double d = std::abs(ico.directions[i].dot(ico.directions[j]));
            EXPECT_TRUE(std::abs(d - inv_sqrt5) < 1e-12 || std::abs(d - 1.0) < 1e-12) << d;
            antipodes += std::abs(d - 1.0) < 1e-12;
        }
        EXPECT_EQ(antipodes, 1);
    }
    Rng rng = make_stream(63, 0);
    for (int trial = 0; trial < 10; trial++) {
        DirectionSet turned = icosahedron_directions(random_rotation(rng));
        for (std::size_t i = 0; i < 12; i++) {
            EXPECT_NEAR(turned.directions[i].norm(), 1.0, 1e-12);
            for (std::size_t j = 0; j < 12; j++) {
                EXPECT_NEAR(turned.directions[i].dot(turned.directions[j]),
                            ico.directions[i].dot(ico.directions[j]), 1e-10);
            }
        }
    }
    Mat3 sheared = Mat3::Identity();
    sheared(0, 1) = 1e-6;
    EXPECT_THROW(icosahedron_directions(sheared), std::invalid_argument);
    // Reflections are orthogonal too and still map vertices to vertices.
    EXPECT_EQ(icosahedron_directions(-Mat3::Identity()).directions.size(), 12u);
}

TEST(Directions, NineSubsetsFixAQuadric) {
    Rng rng = make_stream(64, 0);
    DirectionSet ico = icosahedron_directions(random_rotation(rng));
    std::set<std::vector<int>> seen;
    for (int trial = 0; trial < 300; trial++) {
        DirectionSet nine = subset_nine(ico, rng);
        ASSERT_EQ(nine.directions.size(), 9u);
        EXPECT_EQ(nine.scheme, DirectionScheme::kIcosahedronNine);
        EXPECT_EQ(quadric_pencil_dimension(nine.directions), 1);
        std::vector<int> members;
        for (const Vec3 &v : nine.directions) {
            for (int i = 0; i < 12; i++) {
                if (v == ico.directions[i]) {
                    members.push_back(i);
                }
            }
        }
        EXPECT_EQ(members.size(), 9u);
        seen.insert(members);
    }
    // 300 uniform draws from 160 subsets leave few unseen.
    EXPECT_GT(seen.size(), 120u);
}

TEST(Counts, EvenAllocation) {
    EXPECT_EQ(even_allocation(50000), (Allocation{16667, 16667, 16666}));
    EXPECT_EQ(even_allocation(9), (Allocation{3, 3, 3}));
    EXPECT_EQ(even_allocation(4), (Allocation{2, 1, 1}));
}

TEST(Counts, SimulateCounts) {
    Rng rng = make_stream(65, 0);
    CountRecord up = simulate_counts(Vec3::UnitZ(), 30000, even_allocation(30000), rng);
    EXPECT_EQ(up.axis_counts[2].minus, 0);
    EXPECT_EQ(up.axis_counts[2].plus, 10000);

    const Allocation alloc = even_allocation(50000);
    CountRecord mixed = simulate_counts(Vec3::Zero(), 50000, alloc, rng);
    for (int k = 0; k < 3; k++) {
        const AxisCounts &c = mixed.axis_counts[k];
        EXPECT_EQ(c.plus + c.minus, alloc[k]);
        double sigma = std::sqrt(0.25 / static_cast<double>(alloc[k]));
        EXPECT_NEAR(static_cast<double>(c.plus) / static_cast<double>(alloc[k]), 0.5, 3.0 * sigma);
    }

    Rng a = make_stream(66, 1), b = make_stream(66, 1);
    CountRecord ra = simulate_counts(Vec3(0.3, -0.4, 0.5), 50000, alloc, a);
    CountRecord rb = simulate_counts(Vec3(0.3, -0.4, 0.5), 50000, alloc, b);
    for (int k = 0; k < 3; k++) {
        EXPECT_EQ(ra.axis_counts[k].plus, rb.axis_counts[k].plus);
        EXPECT_EQ(ra.axis_counts[k].minus, rb.axis_counts[k].minus);
    }

    EXPECT_THROW(simulate_counts(Vec3::Zero(), 100, Allocation{50, 50, 1}, rng), std::invalid_argument);
    EXPECT_THROW(simulate_counts(Vec3::Zero(), 100, Allocation{-1, 50, 51}, rng), std::invalid_argument);
    EXPECT_THROW(simulate_counts(Vec3(1, 1, 0), 30, even_allocation(30), rng), std::invalid_argument);
    EXPECT_THROW(simulate_counts(Vec3::Zero(), 30, even_allocation(30), rng, {1.0, 0.0}), std::invalid_argument);
}

TEST(Counts, ReconstructInvertsExactCounts) {
    CountRecord exact;
    exact.total_events = 3000;
    const Vec3 r(0.2, -0.6, 0.4);
    for (int k = 0; k < 3; k++) {
        auto plus = static_cast<int64_t>(std::llround(1000 * (1 + r(k)) / 2));
        exact.axis_counts[k] = {plus, 1000 - plus};
    }
    TomoEstimate est = reconstruct(exact);
    EXPECT_LE((est.bloch - r).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_FALSE(est.projected);
    for (int k = 0; k < 3; k++) {
        EXPECT_NEAR(est.std_error(k), std::sqrt((1 - r(k) * r(k)) / 1000.0), 1e-15);
    }

    CountRecord saturated;
    saturated.total_events = 300;
    saturated.axis_counts = {AxisCounts{100, 0}, AxisCounts{100, 0}, AxisCounts{100, 0}};
    TomoEstimate clipped = reconstruct(saturated);
    EXPECT_TRUE(clipped.projected);
    EXPECT_NEAR(clipped.bloch.norm(), 1.0, 1e-15);
    EXPECT_LE((clipped.bloch - Vec3::Ones() / std::sqrt(3.0)).cwiseAbs().maxCoeff(), 1e-15);

    CountRecord empty_axis = exact;
    empty_axis.axis_counts[1] = {0, 0};
    EXPECT_THROW(reconstruct(empty_axis), std::invalid_argument);
}

TEST(Counts, EfficiencySkewIsInverted) {
    const DetectorEfficiencies eff{0.9, 0.6};
    const Vec3 r(0.5, -0.3, 0.1);
    Rng rng = make_stream(67, 0);
    Vec3 mean = Vec3::Zero();
    const int reps = 200;
    for (int i = 0; i < reps; i++) {
        CountRecord c = simulate_counts(r, 30000, even_allocation(30000), rng, eff);
        mean += reconstruct(c, eff).bloch;
    }
    mean /= reps;
    EXPECT_LE((mean - r).cwiseAbs().maxCoeff(), 2e-3);

    // Without the correction the "+" detector is over-represented.
    CountRecord c = simulate_counts(Vec3::Zero(), 300000, even_allocation(300000), rng, eff);
    EXPECT_GT(reconstruct(c).bloch.minCoeff(), 0.1);
    EXPECT_LT(reconstruct(c, eff).bloch.cwiseAbs().maxCoeff(), 0.01);
}

TEST(Counts, EstimatorConsistency) {
    const Vec3 r(0.3, -0.5, 0.6);
    Rng rng = make_stream(68, 0);
    double previous = 1.0;
    for (int64_t n : {int64_t{1000}, int64_t{100000}, int64_t{10000000}}) {
        double sq = 0.0;
        const int reps = 40;
        for (int i = 0; i < reps; i++) {
            TomoEstimate est = reconstruct(simulate_counts(r, 3 * n, even_allocation(3 * n), rng));
            sq += (est.bloch - r).squaredNorm();
        }
        double rms = std::sqrt(sq / reps);
        double expected = std::sqrt((3.0 - r.squaredNorm()) / static_cast<double>(n));
        EXPECT_NEAR(rms / expected, 1.0, 0.35) << n;
        EXPECT_LT(rms, previous / 5.0);
        previous = rms;
    }
}

TEST(FlipMixing, MixingIdentityForRandomObservables) {
    Rng rng = make_stream(69, 0);
    const Eigen::MatrixXcd rho = mixed_w_state().matrix();
    const Eigen::VectorXcd chi = chi1().amplitudes();
    Eigen::MatrixXcd x(2, 2);
    x << 0, 1, 1, 0;
    const Eigen::MatrixXcd xxx = kron(kron(x, x), x);
    for (int trial = 0; trial < 100; trial++) {
        Eigen::MatrixXcd m = random_hermitian(8, rng);
        Eigen::MatrixXcd mp = flip_conjugate(m);
        EXPECT_LE((mp - xxx * m * xxx).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((flip_conjugate(mp) - m).cwiseAbs().maxCoeff(), 1e-12);
        double lhs = (m * rho).trace().real();
        double rhs = 0.5 * ((chi.adjoint() * m * chi)(0, 0).real() + (chi.adjoint() * mp * chi)(0, 0).real());
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2, 2);
    z(0, 0) = 1;
    z(1, 1) = -1;
    const Eigen::MatrixXcd zii = kron(kron(z, Eigen::MatrixXcd::Identity(2, 2)), Eigen::MatrixXcd::Identity(2, 2));
    EXPECT_LE((flip_conjugate(zii) + zii).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((flip_conjugate(Eigen::MatrixXcd::Identity(8, 8)) - Eigen::MatrixXcd::Identity(8, 8))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
}

TEST(FlipMixing, JointProbabilitiesAgreeAnalytically) {
    Rng rng = make_stream(70, 0);
    const StateSource direct = mixed_w_state();
    const StateSource flip = FlipMixedSource{chi1()};
    const Eigen::MatrixXcd rho = mixed_w_state().matrix();
    for (int trial = 0; trial < 200; trial++) {
        Vec3 e = sample_direction(rng);
        for (int party = 1; party <= 2; party++) {
            for (int k = 0; k < 3; k++) {
                for (double noise : {0.0, 0.15}) {
                    auto pd = joint_probabilities(direct, e, party, static_cast<Axis>(k), noise);
                    auto pf = joint_probabilities(flip, e, party, static_cast<Axis>(k), noise);
                    for (int o = 0; o < 4; o++) {
                        EXPECT_NEAR(pd[o], pf[o], 1e-12);
                    }
                }
                auto p = joint_probabilities(direct, e, party, static_cast<Axis>(k));
                EXPECT_NEAR(p[0], oracle_joint(rho, e, party, k, +1, +1), 1e-12);
                EXPECT_NEAR(p[1], oracle_joint(rho, e, party, k, +1, -1), 1e-12);
                EXPECT_NEAR(p[2], oracle_joint(rho, e, party, k, -1, +1), 1e-12);
                EXPECT_NEAR(p[3], oracle_joint(rho, e, party, k, -1, -1), 1e-12);
            }
        }
    }
    EXPECT_THROW(joint_probabilities(direct, Vec3::UnitZ(), 3, Axis::kX), std::invalid_argument);
}

TEST(FlipMixing, SampledShotsAgreeWithinFourSigma) {
    Rng rng = make_stream(71, 0);
    const StateSource direct = mixed_w_state();
    const StateSource flip = FlipMixedSource{chi1()};
    const int64_t trials = 100000;
    for (int trial = 0; trial < 6; trial++) {
        Vec3 e = sample_direction(rng);
        for (int party = 1; party <= 2; party++) {
            for (int k = 0; k < 3; k++) {
                const Axis axis = static_cast<Axis>(k);
                auto p = joint_probabilities(direct, e, party, axis);
                HeraldedShots sd = sample_shots(direct, e, party, axis, trials, rng);
                HeraldedShots sf = sample_shots(flip, e, party, axis, trials, rng);
                EXPECT_EQ(sd.heralds, sd.plus + sd.minus);
                for (const HeraldedShots &s : {sd, sf}) {
                    double sigma = std::sqrt(p[0] * (1 - p[0]) / trials);
                    EXPECT_NEAR(static_cast<double>(s.plus) / trials, p[0], 4 * sigma);
                    sigma = std::sqrt(p[1] * (1 - p[1]) / trials);
                    EXPECT_NEAR(static_cast<double>(s.minus) / trials, p[1], 4 * sigma);
                }
                // Two independent samples of the same distribution.
                double pooled = std::sqrt(2 * p[0] * (1 - p[0]) / trials);
                EXPECT_NEAR(static_cast<double>(sd.plus - sf.plus) / trials, 0.0, 4 * pooled);
            }
        }
    }
}

TEST(Experiment, ExactPointsMatchProjectionOracle) {
    Rng rng = make_stream(72, 0);
    DensityMatrix rho = random_mixed_state(3, 1, rng);
    DirectionSet dirs = uniform_directions(50, rng);
    ExperimentOptions o = quick_options(3000);
    ExperimentResult res = run_experiment(rho, dirs, o, 5);
    ASSERT_EQ(res.parties.size(), 2u);
    EXPECT_EQ(res.parties[0].label, "B|A");
    EXPECT_EQ(res.parties[1].label, "C|A");
    for (const PartyCloud &cloud : res.parties) {
        const Eigen::MatrixXcd marginal = oracle::partial_trace(rho.matrix(), 3, {0, cloud.party});
        ASSERT_EQ(cloud.points.size(), 50u);
        for (const SteeredPoint &pt : cloud.points) {
            double prob = 0.0;
            Vec3 expected = oracle::steered_by_projection(marginal, pt.direction, &prob);
            EXPECT_LE((pt.exact_bloch - expected).norm(), 1e-12);
            EXPECT_NEAR(pt.probability, prob, 1e-12);
            EXPECT_EQ(pt.counts.total_events, 3000);
        }
    }
}

TEST(Experiment, FlipSourceMatchesDensitySource) {
    Rng rng = make_stream(73, 0);
    DirectionSet dirs = uniform_directions(100, rng);
    for (double noise : {0.0, 0.1}) {
        ExperimentOptions o = quick_options(50000);
        o.noise = noise;
        ExperimentResult a = run_experiment(mixed_w_state(), dirs, o, 9);
        ExperimentResult b = run_experiment(FlipMixedSource{chi1()}, dirs, o, 9);
        for (int p = 0; p < 2; p++) {
            ASSERT_EQ(a.parties[p].points.size(), b.parties[p].points.size());
            for (std::size_t i = 0; i < a.parties[p].points.size(); i++) {
                EXPECT_LE((a.parties[p].points[i].exact_bloch - b.parties[p].points[i].exact_bloch).norm(), 1e-12);
                EXPECT_NEAR(a.parties[p].points[i].probability, b.parties[p].points[i].probability, 1e-12);
            }
        }
    }
    EXPECT_THROW(joint_probabilities(FlipMixedSource{singlet()}, Vec3::UnitZ(), 1, Axis::kZ), std::invalid_argument);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
    Rng rng = make_stream(74, 0);
    DirectionSet dirs = uniform_directions(200, rng);
    ExperimentOptions one = quick_options(50000);
    ExperimentOptions many = one;
    many.threads = 3;
    ExperimentResult a = run_experiment(row_d_state(), dirs, one, 77);
    ExperimentResult b = run_experiment(row_d_state(), dirs, many, 77);
    ExperimentResult c = run_experiment(row_d_state(), dirs, one, 78);
    bool any_difference = false;
    for (int p = 0; p < 2; p++) {
        for (std::size_t i = 0; i < 200; i++) {
            const SteeredPoint &x = a.parties[p].points[i];
            const SteeredPoint &y = b.parties[p].points[i];
            for (int k = 0; k < 3; k++) {
                EXPECT_EQ(x.counts.axis_counts[k].plus, y.counts.axis_counts[k].plus);
                EXPECT_EQ(x.counts.axis_counts[k].minus, y.counts.axis_counts[k].minus);
            }
            EXPECT_EQ(x.estimate.bloch, y.estimate.bloch);
            any_difference |= x.estimate.bloch != c.parties[p].points[i].estimate.bloch;
        }
    }
    EXPECT_TRUE(any_difference);
}

TEST(Experiment, ZeroProbabilityBranchesAreSkipped) {
    DirectionSet dirs;
    dirs.directions = {Vec3::UnitZ(), -Vec3::UnitZ(), Vec3::UnitX()};
    ExperimentResult res = run_experiment(density_from_ket(PureState::basis("00")), dirs, quick_options(300), 1);
    ASSERT_EQ(res.parties.size(), 1u);
    EXPECT_EQ(res.parties[0].skipped, std::vector<std::size_t>{1});
    ASSERT_EQ(res.parties[0].points.size(), 2u);
    EXPECT_EQ(res.parties[0].points[1].index, 2u);

    ExperimentResult flip = run_experiment(FlipMixedSource{PureState::basis("000")}, dirs, quick_options(300), 1);
    // Half the shots measure the flipped direction, so no branch vanishes.
    EXPECT_TRUE(flip.parties[0].skipped.empty());

    EXPECT_THROW(run_experiment(row_d_state(), DirectionSet{}, quick_options(300), 1), std::invalid_argument);
    EXPECT_THROW(run_experiment(row_d_state(), dirs, quick_options(2), 1), std::invalid_argument);
}

TEST(Experiment, ProductStateClustersWithinErrorBars) {
    Rng rng = make_stream(75, 0);
    DensityMatrix product = density_from_ket(PureState(kron(Eigen::VectorXcd(Eigen::Vector2cd(0.8, 0.6)),
                                                            Eigen::VectorXcd(Eigen::Vector2cd(0.6, 0.8)))));
    ExperimentResult res = run_experiment(product, uniform_directions(300, rng), quick_options(50000), 3);
    const Vec3 b = pauli_decompose(product).b;
    for (const SteeredPoint &pt : res.parties[0].points) {
        EXPECT_LE((pt.exact_bloch - b).norm(), 1e-12);
        for (int k = 0; k < 3; k++) {
            EXPECT_LE(std::abs(pt.estimate.bloch(k) - b(k)), 5 * pt.estimate.std_error(k) + 1e-12);
        }
    }
}

TEST(Experiment, SingletCloudFitsTheUnitSphere) {
    Rng rng = make_stream(76, 0);
    ExperimentResult res =
        run_experiment(density_from_ket(singlet()), uniform_directions(1000, rng), quick_options(50000), 4);
    QuadricFit f = fit(res.parties[0].estimates());
    EXPECT_GT(f.r_squared, 0.99);
    ASSERT_TRUE(f.recovered);
    EXPECT_NEAR(f.recovered->volume, 1.0, 0.02);
    double mean_error = 0.0;
    for (const SteeredPoint &pt : res.parties[0].points) {
        mean_error += pt.estimate.std_error.mean();
    }
    mean_error /= static_cast<double>(res.parties[0].points.size());
    EXPECT_NEAR(mean_error, 0.007, 0.3 * 0.007);
}

TEST(Experiment, PointsLieOnTheAnalyticEllipsoid) {
    // The residual (r - c)^T Q^-1 (r - c) is 1 on the surface; its spread is
    // the per-component error propagated through the gradient.
    Rng rng = make_stream(77, 0);
    for (const DensityMatrix &rho : {row_d_state(), bell_diagonal({0.6, 0.1, 0.1, 0.2})}) {
        ExperimentResult res = run_experiment(rho, uniform_directions(500, rng), quick_options(50000), 8);
        for (const PartyCloud &cloud : res.parties) {
            DensityMatrix marginal = rho.num_qubits() == 2 ? rho : partial_trace(rho, {0, cloud.party});
            SteeringEllipsoid e = ellipsoid(pauli_decompose(marginal));
            ASSERT_EQ(e.rank, 3);
            const Mat3 q_inv = e.shape.inverse();
            for (const SteeredPoint &pt : cloud.points) {
                EXPECT_NEAR(e.quadric_residual(pt.exact_bloch), 1.0, 1e-9);
                Vec3 grad = 2.0 * q_inv * (pt.estimate.bloch - e.center);
                double sigma = grad.cwiseProduct(pt.estimate.std_error).norm();
                EXPECT_NEAR(e.quadric_residual(pt.estimate.bloch), 1.0, 5.0 * sigma + 1e-9);
            }
        }
    }
}

TEST(MonteCarlo, NoShotNoiseHasZeroSpread) {
    Rng rng = make_stream(78, 0);
    ExperimentOptions o = quick_options(50000);
    o.shot_noise = false;
    ExperimentResult base = run_experiment(row_d_state(), uniform_directions(30, rng), o, 1);
    MonteCarloSummary mc = monte_carlo_errors(
        [&](uint64_t s) {
            ExperimentResult r = resample_counts(base, o, s);
            return std::vector<double>{r.parties[0].points[0].estimate.bloch.x(),
                                       r.parties[1].points[5].estimate.bloch.z()};
        },
        10, 3);
    EXPECT_EQ(mc.samples, 10);
    EXPECT_NEAR(mc.std_dev[0], 0.0, 1e-15);
    EXPECT_NEAR(mc.std_dev[1], 0.0, 1e-15);
    EXPECT_THROW(monte_carlo_errors([](uint64_t) { return std::vector<double>{1.0}; }, 1, 0), std::invalid_argument);
}

TEST(MonteCarlo, SpreadScalesAsInverseRootEvents) {
    Rng rng = make_stream(79, 0);
    ExperimentResult base = run_experiment(row_d_state(), uniform_directions(100, rng), quick_options(20000), 1);
    auto spread = [&](int64_t events) {
        ExperimentOptions o = quick_options(events);
        MonteCarloSummary mc = monte_carlo_errors(
            [&](uint64_t s) {
                ExperimentResult r = resample_counts(base, o, s);
                std::vector<double> out;
                for (const SteeredPoint &pt : r.parties[0].points) {
                    out.push_back(pt.estimate.bloch.x());
                    out.push_back(pt.estimate.bloch.y());
                }
                return out;
            },
            200, 11, 2);
        double mean = 0.0;
        for (double s : mc.std_dev) {
            mean += s;
        }
        return mean / static_cast<double>(mc.std_dev.size());
    };
    EXPECT_NEAR(spread(20000) / spread(40000), std::sqrt(2.0), 0.05);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
    auto experiment = [](uint64_t s) {
        Rng rng = make_stream(s, 0);
        return std::vector<double>{sample_direction(rng).x(), sample_direction(rng).y()};
    };
    MonteCarloSummary a = monte_carlo_errors(experiment, 50, 5, 1);
    MonteCarloSummary b = monte_carlo_errors(experiment, 50, 5, 4);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_dev, b.std_dev);
}
