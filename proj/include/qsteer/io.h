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

#ifndef QSTEER_IO_H
#define QSTEER_IO_H

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qsteer/fitquad.h"
#include "qsteer/monogamy.h"
#include "qsteer/steer.h"
#include "qsteer/tomosim.h"

namespace qsteer {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/// Nested rows of [re, im] pairs.
Json matrix_json(const Eigen::MatrixXcd &m);
Json vector_json(const Vec3 &v);
/// Row-major nested rows.
Json matrix_json(const Mat3 &m);

/// {center, semiaxes, axes, volume, rank}; axes holds one unit axis per row.
Json ellipsoid_json(const SteeringEllipsoid &e);
Json geometry_json(const EllipsoidGeometry &g);
Json fit_json(const QuadricFit &fit, const SpreadDiagnostics &spread);
/// Report for a cloud the guard refused to fit.
Json unfitted_json(const SpreadDiagnostics &spread);
Json monogamy_json(const MonogamyReport &report);

inline constexpr std::string_view kPointCloudHeader = "dir_x,dir_y,dir_z,bx,by,bz,err_x,err_y,err_z";

void write_point_cloud_csv(std::ostream &out, const PartyCloud &cloud);

/// Reads points from CSV. With the point-cloud header the bx, by, bz
/// columns are used; a header naming x, y, z (or no header and three
/// columns) is read directly. Throws IoError on malformed input.
PointCloud read_point_cloud_csv(std::istream &in);

/// Writes `text` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::string &path, std::string_view text);

}  // namespace qsteer

#endif
