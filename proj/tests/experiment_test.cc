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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace qsteer;

namespace {

constexpr double kPi = std::numbers::pi;

// Benchmark theory volumes (B|A, C|A) for rows a-l, four decimals.
const std::array<std::array<double, 2>, 12> kBenchmarkVolumes = {{
    {0.0, 1.0},
    {0.0944, 0.4800},
    {0.1528, 0.3710},
    {0.25, 0.25},
    {0.3710, 0.1528},
    {0.4800, 0.0944},
    {1.0, 0.0},
    {0.0, 0.0},
    {0.0625, 0.0625},
    {0.125, 0.125},
    {0.1875, 0.1875},
    {0.2963, 0.2963},
}};

Json row_d_config() {
    return Json::parse(R"({
        "state": {"kind": "family", "alpha": 1.5707963267948966, "beta": 0.7853981633974483},
        "scheme": "uniform",
        "directions": 300,
        "events_per_point": 50000,
        "seed": 1
    })");
}

int count_lines(const std::string &text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(Config, ParsesValidConfig) {
    Json j = row_d_config();
    j["noise"] = 0.02;
    j["efficiencies"] = {{"plus", 0.9}, {"minus", 0.8}};
    j["refine"] = true;
    j["threads"] = 2;
    j["out_dir"] = "results";
    ExperimentConfig c = parse_config(j);
    ASSERT_TRUE(std::holds_alternative<FamilySpec>(c.state));
    EXPECT_DOUBLE_EQ(std::get<FamilySpec>(c.state).beta, kPi / 4);
    EXPECT_EQ(c.scheme, DirectionScheme::kUniformRandom);
    EXPECT_EQ(c.directions, 300u);
    EXPECT_EQ(c.seed, 1u);
    EXPECT_EQ(c.noise, 0.02);
    EXPECT_EQ(c.efficiencies.minus, 0.8);
    EXPECT_TRUE(c.refine);
    EXPECT_EQ(c.threads, 2);
    EXPECT_EQ(c.out_dir, "results");

    ExperimentConfig minimal = parse_config(Json::parse(R"({"state": {"kind": "mixed-w"}})"));
    EXPECT_FALSE(minimal.seed);
    EXPECT_EQ(minimal.directions, 1000u);
    EXPECT_EQ(minimal.events_per_point, 50000);
    ExperimentConfig flip = parse_config(Json::parse(R"({"state": {"kind": "mixed-w"}, "flip_mixing": true})"));
    EXPECT_TRUE(flip.flip_mixing);
}

TEST(Config, RejectsInvalidConfigs) {
    const char *bad[] = {
        R"([])",
        R"({})",
        R"({"state": {"kind": "family", "alpha": 1.0, "beta": 0.5}, "colour": "red"})",
        R"({"state": {"kind": "family", "alpha": 1.0, "beta": 0.5, "gamma": 1}})",
        R"({"state": {"kind": "family", "alpha": 1.0}})",
        R"({"state": {"kind": "family", "alpha": 4.0, "beta": 0.5}})",
        R"({"state": {"kind": "ghz"}})",
        R"({"state": "mixed-w"})",
        R"({"state": {"kind": "bell-diagonal", "weights": [0.5, 0.5, 0.5]}})",
        R"({"state": {"kind": "bell-diagonal", "weights": [1.5, -0.5, 0, 0]}})",
        R"({"state": {"kind": "two-qubit", "gamma": -1}})",
        R"({"state": {"kind": "family", "alpha": 1.0, "beta": 0.5}, "flip_mixing": true})",
        R"({"state": {"kind": "mixed-w"}, "noise": 1.5})",
        R"({"state": {"kind": "mixed-w"}, "directions": 5})",
        R"({"state": {"kind": "mixed-w"}, "directions": "many"})",
        R"({"state": {"kind": "mixed-w"}, "events_per_point": 2})",
        R"({"state": {"kind": "mixed-w"}, "seed": -4})",
        R"({"state": {"kind": "mixed-w"}, "scheme": "spiral"})",
        R"({"state": {"kind": "mixed-w"}, "scheme": "fixed"})",
        R"({"state": {"kind": "mixed-w"}, "efficiencies": {"plus": 0.0, "minus": 1.0}})",
        R"({"state": {"kind": "mixed-w"}, "efficiencies": {"plus": 1.0, "minus": 1.0, "dark": 0}})",
        R"({"state": {"kind": "mixed-w"}, "threads": 0})",
        R"({"state": {"kind": "mixed-w"}, "refine": "yes"})",
    };
    for (const char *text : bad) {
        EXPECT_THROW(parse_config(Json::parse(text)), ConfigError) << text;
    }
}

TEST(Config, SchemeNames) {
    EXPECT_EQ(parse_scheme("uniform"), DirectionScheme::kUniformRandom);
    EXPECT_EQ(parse_scheme("uniform-random"), DirectionScheme::kUniformRandom);
    EXPECT_EQ(parse_scheme("icosahedron"), DirectionScheme::kIcosahedron);
    EXPECT_EQ(parse_scheme("icosahedron-9"), DirectionScheme::kIcosahedronNine);
    EXPECT_THROW(parse_scheme("cube"), ConfigError);
}

TEST(Directions, SchemesAndDeterminism) {
    DirectionSet u = make_directions(DirectionScheme::kUniformRandom, 40, 3);
    EXPECT_EQ(u.directions.size(), 40u);
    EXPECT_EQ(u.directions, make_directions(DirectionScheme::kUniformRandom, 40, 3).directions);
    EXPECT_NE(u.directions, make_directions(DirectionScheme::kUniformRandom, 40, 4).directions);
    DirectionSet ico = make_directions(DirectionScheme::kIcosahedron, 0, 3);
    EXPECT_EQ(ico.directions.size(), 12u);
    EXPECT_EQ(ico.scheme, DirectionScheme::kIcosahedron);
    DirectionSet nine = make_directions(DirectionScheme::kIcosahedronNine, 0, 3);
    EXPECT_EQ(nine.directions.size(), 9u);
    EXPECT_EQ(quadric_pencil_dimension(nine.directions), 1);
}

TEST(Analytic, StatesAndJson) {
    AnalyticSummary d = analyze(FamilySpec{kPi / 2, kPi / 4});
    ASSERT_EQ(d.parties.size(), 2u);
    EXPECT_EQ(d.parties[0].label, "B|A");
    EXPECT_NEAR(d.parties[0].ellipsoid.volume, 0.25, 1e-12);
    EXPECT_NEAR(d.parties[1].ellipsoid.volume, 0.25, 1e-12);
    ASSERT_TRUE(d.monogamy);
    EXPECT_EQ(d.monogamy->classification, MonogamyClass::kWClassSaturating);

    AnalyticSummary sphere = analyze(TwoQubitSpec{kPi / 4});
    ASSERT_EQ(sphere.parties.size(), 1u);
    EXPECT_FALSE(sphere.monogamy);
    EXPECT_NEAR(sphere.parties[0].ellipsoid.volume, 1.0, 1e-12);
    EXPECT_LE((sphere.parties[0].ellipsoid.semiaxes - Vec3::Ones()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(sphere.parties[0].ellipsoid.center.norm(), 1e-12);

    AnalyticSummary product = analyze(TwoQubitSpec{0.0});
    EXPECT_EQ(product.parties[0].ellipsoid.rank, 0);

    AnalyticSummary bell = analyze(BellDiagonalSpec{{0.6, 0.1, 0.1, 0.2}});
    EXPECT_NEAR(bell.parties[0].ellipsoid.volume, 0.096, 1e-12);

    Json j = analytic_json(MixedWSpec{}, analyze(MixedWSpec{}));
    EXPECT_EQ(j["state"]["kind"], "mixed-w");
    ASSERT_EQ(j["ellipsoids"].size(), 2u);
    EXPECT_EQ(j["ellipsoids"][1]["party"], "C|A");
    EXPECT_EQ(j["ellipsoids"][1]["rank_name"], "solid");
    EXPECT_NEAR(j["ellipsoids"][0]["volume"].get<double>(), 8.0 / 27.0, 1e-12);
    EXPECT_EQ(j["monogamy"]["classification"], "pure-violating-mixed-state");
    EXPECT_TRUE(analytic_json(TwoQubitSpec{0.3}, analyze(TwoQubitSpec{0.3}))["monogamy"].is_null());
}

TEST(Analytic, SurfaceMeshLiesOnTheEllipsoid) {
    SteeringEllipsoid e = analyze(FamilySpec{kPi / 6, kPi / 4}).parties[0].ellipsoid;
    std::istringstream in(surface_mesh_csv(e, 6, 12));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "x,y,z");
    std::istringstream rest(surface_mesh_csv(e, 6, 12));
    PointCloud pts = read_point_cloud_csv(rest);
    EXPECT_GT(pts.size(), 50u);
    for (const Vec3 &p : pts) {
        EXPECT_NEAR(e.quadric_residual(p), 1.0, 1e-9);
    }
}

TEST(Table, TheoryColumnsMatchBenchmarks) {
    TableOptions o;
    o.theory_only = true;
    std::vector<TableRow> rows = table_s1(o, 1);
    ASSERT_EQ(rows.size(), 12u);
    for (std::size_t r = 0; r < 12; r++) {
        EXPECT_EQ(rows[r].label, static_cast<char>('a' + r));
        EXPECT_FALSE(rows[r].has_simulation);
        for (int p = 0; p < 2; p++) {
            EXPECT_NEAR(rows[r].theory[p], kBenchmarkVolumes[r][p], 5e-5) << rows[r].label << p;
        }
    }
    std::string csv = table_csv(rows);
    EXPECT_EQ(count_lines(csv), 13);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "row,alpha,beta,v_ba_theory,v_ca_theory,v_ba_sim,v_ba_mc_std,v_ca_sim,v_ca_mc_std,"
              "ss_res_ba,r2_ba,ss_res_ca,r2_ca,verdict_ba,verdict_ca");
}

TEST(Table, SimulatedColumns) {
    TableOptions o;
    o.directions = 200;
    o.samples = 3;
    std::vector<TableRow> rows = table_s1(o, 7);
    for (const TableRow &row : rows) {
        EXPECT_TRUE(row.has_simulation);
    }
    // Row a: Bob's steered set collapses to a point.
    EXPECT_NE(rows[0].verdict[0], CloudVerdict::kFull);
    EXPECT_EQ(rows[0].simulated[0], 0.0);
    EXPECT_NEAR(rows[0].simulated[1], 1.0, 0.02);
    for (std::size_t r : {1, 2, 3, 4, 5, 8, 9, 10, 11}) {
        for (int p = 0; p < 2; p++) {
            EXPECT_EQ(rows[r].verdict[p], CloudVerdict::kFull);
            EXPECT_NEAR(rows[r].simulated[p], rows[r].theory[p], 0.02) << rows[r].label;
            EXPECT_GT(rows[r].r_squared[p], 0.99) << rows[r].label;
            EXPECT_GT(rows[r].mc_std[p], 0.0);
            EXPECT_LT(rows[r].mc_std[p], 0.01);
        }
    }
    EXPECT_EQ(table_csv(rows), table_csv(table_s1(o, 7)));
}

TEST(Sweep, WGridCsv) {
    auto angles = w_grid_angles();
    ASSERT_EQ(angles.size(), 7u);
    std::vector<SweepRow> rows = monogamy_sweep(angles);
    for (std::size_t i = 0; i < rows.size(); i++) {
        EXPECT_EQ(rows[i].alpha, kPi / 2);
        EXPECT_NEAR(rows[i].report.v_ba, kBenchmarkVolumes[i][0], 5e-5);
        EXPECT_NEAR(rows[i].report.v_ca, kBenchmarkVolumes[i][1], 5e-5);
        EXPECT_NEAR(rows[i].report.pure_residual, 0.0, 1e-9);
    }
    std::string csv = sweep_csv(rows);
    EXPECT_EQ(count_lines(csv), 8);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,beta,v_ba,v_ca,pure_residual,mixed_residual,classification");
}

TEST(Fits, CloudVerdictsAndVolumes) {
    PointCloud same(30, Vec3(0, 0, 1));
    CloudFit point = fit_cloud(same, false);
    EXPECT_FALSE(point.fit);
    EXPECT_EQ(point.volume(), 0.0);
    EXPECT_TRUE(cloud_fit_json(point)["coefficients"].is_null());

    PointCloud hyperboloid;
    for (int i = 0; i < 100; i++) {
        double z = -1.0 + 0.02 * i, t = 0.7 * i;
        double r = std::sqrt(1 + z * z);
        hyperboloid.push_back(Vec3(r * std::cos(t), r * std::sin(t), z));
    }
    CloudFit open = fit_cloud(hyperboloid, true);
    ASSERT_TRUE(open.fit);
    EXPECT_TRUE(std::isnan(open.volume()));
    EXPECT_TRUE(cloud_fit_json(open)["recovered"].is_null());
}

TEST(Simulation, DeterministicAndAccurate) {
    ExperimentConfig c = parse_config(row_d_config());
    SimulationOutcome a = simulate(c, 1);
    SimulationOutcome b = simulate(c, 1);
    EXPECT_EQ(simulation_json(c, a).dump(), simulation_json(c, b).dump());
    EXPECT_NE(simulation_json(c, a).dump(), simulation_json(c, simulate(c, 2)).dump());
    ASSERT_EQ(a.fits.size(), 2u);
    for (const CloudFit &f : a.fits) {
        ASSERT_TRUE(f.fit);
        EXPECT_GT(f.fit->r_squared, 0.995);
        EXPECT_NEAR(f.volume(), 0.25, 0.02);
    }
    ASSERT_TRUE(a.monogamy);
    EXPECT_NEAR(a.monogamy->pure_residual, 0.0, 0.02);

    Json j = simulation_json(c, a);
    EXPECT_EQ(j["seed"], 1u);
    EXPECT_FALSE(j["config"].contains("threads"));
    EXPECT_EQ(j["parties"].size(), 2u);
    EXPECT_EQ(j["parties"][0]["points"], 300u);
    EXPECT_NEAR(j["parties"][0]["mean_std_error"].get<double>(), 0.007, 0.0021);
}

TEST(Simulation, MixedWViolatesPureRelation) {
    Json j = row_d_config();
    j["state"] = {{"kind", "mixed-w"}};
    ExperimentConfig c = parse_config(j);
    SimulationOutcome direct = simulate(c, 3);
    ASSERT_TRUE(direct.monogamy);
    EXPECT_LT(direct.monogamy->pure_residual, 0.0);
    EXPECT_GT(direct.monogamy->mixed_residual, 0.0);
    EXPECT_EQ(direct.monogamy->classification, MonogamyClass::kPureViolatingMixedState);

    c.flip_mixing = true;
    SimulationOutcome flip = simulate(c, 3);
    for (int p = 0; p < 2; p++) {
        EXPECT_NEAR(flip.fits[p].volume(), direct.fits[p].volume(), 1e-9);
    }
}

TEST(Simulation, TwoQubitStatesHaveOneCloud) {
    Json j = row_d_config();
    j["state"] = {{"kind", "two-qubit"}, {"gamma", kPi / 4}};
    j["scheme"] = "icosahedron";
    ExperimentConfig c = parse_config(j);
    SimulationOutcome out = simulate(c, 5);
    EXPECT_EQ(out.directions.directions.size(), 12u);
    ASSERT_EQ(out.fits.size(), 1u);
    EXPECT_FALSE(out.monogamy);
    EXPECT_NEAR(out.fits[0].volume(), 1.0, 0.05);
    EXPECT_TRUE(simulation_json(c, out)["monogamy"].is_null());
}

TEST(Robustness, ShortRun) {
    RobustnessOptions o;
    o.runs = 6;
    RobustnessResult r = icosahedron_robustness(o, 5);
    EXPECT_NEAR(r.theory, 0.096, 1e-12);
    ASSERT_EQ(r.volumes_12.size(), 6u);
    ASSERT_EQ(r.volumes_9.size(), 6u);
    EXPECT_NEAR(r.mean_12, 0.096, 0.003);
    EXPECT_NEAR(r.mean_9, 0.096, 0.004);
    EXPECT_LT(r.std_12, 0.003);
    RobustnessResult again = icosahedron_robustness(o, 5);
    EXPECT_EQ(r.volumes_12, again.volumes_12);
    EXPECT_EQ(r.volumes_9, again.volumes_9);
    Json j = robustness_json(o, r, 5);
    EXPECT_EQ(j["runs"], 6);
    EXPECT_EQ(j["twelve"]["volumes"].size(), 6u);
    EXPECT_TRUE(j["nine"].contains("std"));
}
