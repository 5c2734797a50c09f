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

#include "qsteer/io.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace qsteer {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    while (true) {
        std::size_t comma = line.find(',');
        std::string_view field = line.substr(0, comma);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
            field.remove_prefix(1);
        }
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
            field.remove_suffix(1);
        }
        fields.push_back(field);
        if (comma == std::string_view::npos) {
            return fields;
        }
        line.remove_prefix(comma + 1);
    }
}

bool parse_double(std::string_view text, double &out) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && end == text.data() + text.size() && std::isfinite(out);
}

}  // namespace

std::string format_number(double value) {
    return fmt::format("{}", value);
}

Json matrix_json(const Eigen::MatrixXcd &m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_json(const Vec3 &v) {
    return Json::array({v(0), v(1), v(2)});
}

Json matrix_json(const Mat3 &m) {
    Json rows = Json::array();
    for (int r = 0; r < 3; r++) {
        rows.push_back(vector_json(m.row(r).transpose()));
    }
    return rows;
}

Json ellipsoid_json(const SteeringEllipsoid &e) {
    Json j;
    j["center"] = vector_json(e.center);
    j["semiaxes"] = vector_json(e.semiaxes);
    j["axes"] = matrix_json(e.axes);
    j["volume"] = e.volume;
    j["rank"] = e.rank;
    return j;
}

Json geometry_json(const EllipsoidGeometry &g) {
    Json j;
    j["center"] = vector_json(g.center);
    j["semiaxes"] = vector_json(g.semiaxes);
    j["axes"] = matrix_json(g.axes);
    j["volume"] = g.volume;
    return j;
}

namespace {

Json spread_json(const SpreadDiagnostics &spread) {
    Json j;
    j["extents"] = vector_json(spread.extents);
    j["covariance_eigenvalues"] = vector_json(spread.covariance_eigenvalues);
    return j;
}

}  // namespace

Json fit_json(const QuadricFit &fit, const SpreadDiagnostics &spread) {
    Json j;
    j["verdict"] = verdict_name(spread.verdict);
    j["spread"] = spread_json(spread);
    j["coefficients"] = fit.coefficients;
    j["ss_res"] = fit.ss_res;
    j["ss_tot"] = fit.ss_tot;
    j["r_squared"] = fit.r_squared;
    j["geometry_source"] = fit.geometry_source == GeometrySource::kSymmetric ? "symmetric" : "verbatim";
    j["recovered"] = fit.recovered ? geometry_json(*fit.recovered) : Json(nullptr);
    if (fit.geometric) {
        j["geometric"] = {{"ss_res", fit.geometric->ss_res},
                          {"ss_tot", fit.geometric->ss_tot},
                          {"r_squared", fit.geometric->r_squared}};
    } else {
        j["geometric"] = nullptr;
    }
    j["refined"] = fit.refined;
    j["refinement_failed"] = fit.refinement_failed;
    j["refine_iterations"] = fit.refine_iterations;
    return j;
}

Json unfitted_json(const SpreadDiagnostics &spread) {
    Json j;
    j["verdict"] = verdict_name(spread.verdict);
    j["spread"] = spread_json(spread);
    j["coefficients"] = nullptr;
    j["ss_res"] = nullptr;
    j["ss_tot"] = nullptr;
    j["r_squared"] = nullptr;
    j["recovered"] = nullptr;
    return j;
}

Json monogamy_json(const MonogamyReport &report) {
    Json j;
    j["v_ba"] = report.v_ba;
    j["v_ca"] = report.v_ca;
    j["pure_residual"] = report.pure_residual;
    j["mixed_residual"] = report.mixed_residual;
    j["concurrence_ab"] = report.concurrence_ab ? Json(*report.concurrence_ab) : Json(nullptr);
    j["concurrence_ac"] = report.concurrence_ac ? Json(*report.concurrence_ac) : Json(nullptr);
    j["classification"] = monogamy_class_name(report.classification);
    return j;
}

void write_point_cloud_csv(std::ostream &out, const PartyCloud &cloud) {
    out << kPointCloudHeader << '\n';
    for (const SteeredPoint &p : cloud.points) {
        const Vec3 &d = p.direction;
        const Vec3 &b = p.estimate.bloch;
        const Vec3 &s = p.estimate.std_error;
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", d(0), d(1), d(2), b(0), b(1), b(2), s(0), s(1), s(2));
    }
}

PointCloud read_point_cloud_csv(std::istream &in) {
    PointCloud points;
    std::string line;
    std::size_t line_number = 0;
    std::array<std::size_t, 3> columns = {0, 1, 2};
    std::size_t width = 0;
    bool first = true;
    while (std::getline(in, line)) {
        line_number++;
        if (line.empty() || line == "\r" || line.front() == '#') {
            continue;
        }
        auto fields = split_fields(line);
        if (first) {
            first = false;
            double probe;
            if (!parse_double(fields[0], probe)) {
                auto find = [&](std::string_view name) -> std::optional<std::size_t> {
                    auto it = std::find(fields.begin(), fields.end(), name);
                    if (it == fields.end()) {
                        return std::nullopt;
                    }
                    return static_cast<std::size_t>(it - fields.begin());
                };
                auto bx = find("bx"), by = find("by"), bz = find("bz");
                auto x = find("x"), y = find("y"), z = find("z");
                if (bx && by && bz) {
                    columns = {*bx, *by, *bz};
                } else if (x && y && z) {
                    columns = {*x, *y, *z};
                } else {
                    throw IoError("CSV header needs columns bx,by,bz or x,y,z");
                }
                width = fields.size();
                continue;
            }
            if (fields.size() != 3 && fields.size() != 9) {
                throw IoError("headerless CSV must have 3 columns (x,y,z) or the 9-column point-cloud layout");
            }
            if (fields.size() == 9) {
                columns = {3, 4, 5};
            }
            width = fields.size();
        }
        if (fields.size() != width) {
            throw IoError(fmt::format("line {}: expected {} fields, found {}", line_number, width, fields.size()));
        }
        Vec3 p;
        for (int k = 0; k < 3; k++) {
            if (!parse_double(fields[columns[k]], p(k))) {
                throw IoError(fmt::format("line {}: '{}' is not a finite number", line_number, fields[columns[k]]));
            }
        }
        points.push_back(p);
    }
    if (in.bad()) {
        throw IoError("read error");
    }
    return points;
}

void write_text_file(const std::string &path, std::string_view text) {
    std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) {
            throw IoError(fmt::format("cannot create directory {}: {}", p.parent_path().string(), ec.message()));
        }
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw IoError(fmt::format("cannot open {} for writing", path));
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError(fmt::format("write to {} failed", path));
    }
}

}  // namespace qsteer
