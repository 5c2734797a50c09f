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

#ifndef QSTEER_FITQUAD_H
#define QSTEER_FITQUAD_H

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qsteer/qstate.h"

namespace qsteer {

using PointCloud = std::vector<Vec3>;

/// A general ellipsoid needs at least nine points.
inline constexpr std::size_t kMinFitPoints = 9;

/// x^T A x + b.x + d = 0.
struct GeneralQuadric {
    Mat3 quadratic = Mat3::Zero();
    Vec3 linear = Vec3::Zero();
    double constant = 0.0;

    double evaluate(const Vec3 &x) const {
        return x.dot(quadratic * x) + linear.dot(x) + constant;
    }
};

/// Center, semiaxes (descending, one axis per row of `axes`) and volume
/// relative to the unit ball.
struct EllipsoidGeometry {
    Vec3 center = Vec3::Zero();
    Vec3 semiaxes = Vec3::Zero();
    Mat3 axes = Mat3::Identity();
    double volume = 0.0;
};

struct GoodnessOfFit {
    double ss_res = 0.0;
    double ss_tot = 0.0;
    double r_squared = 0.0;
};

enum class GeometrySource {
    /// Rotation- and translation-equivariant algebraic fit of all ten
    /// quadric coefficients (smallest singular vector).
    kSymmetric,
    /// The regression z^2 = f(x, y, z) itself.
    kVerbatim,
};

/// Result of fitting a point cloud with the regression
///   z^2 = c1 x^2 + c2 y^2 + c3 xy + c4 xz + c5 yz + c6 x + c7 y + c8 z + c9.
///
/// `ss_res`, `ss_tot` and `r_squared` always describe that regression on
/// Y = z^2. The ellipsoid geometry comes from `quadric`, which is either the
/// symmetric fit or the regression (see GeometrySource); `geometric` scores
/// the recovered ellipsoid by radial distances, and is what refine() lowers.
struct QuadricFit {
    std::array<double, 9> coefficients{};
    double ss_res = 0.0;
    double ss_tot = 0.0;
    double r_squared = 0.0;

    GeometrySource geometry_source = GeometrySource::kSymmetric;
    GeneralQuadric quadric;
    /// Absent when `quadric` is not a real ellipsoid.
    std::optional<EllipsoidGeometry> recovered;
    std::optional<GoodnessOfFit> geometric;

    bool refined = false;
    /// Set when refine() could not improve on the input and returned it.
    bool refinement_failed = false;
    int refine_iterations = 0;
};

/// The cloud does not determine a unique quadric.
class DegenerateFit : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// The quadric is not a real bounded ellipsoid.
class IndefiniteQuadric : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Throws DegenerateFit for fewer than nine points or a rank-deficient
/// design (e.g. coplanar points).
QuadricFit fit(std::span<const Vec3> points, GeometrySource source = GeometrySource::kSymmetric);

/// The regression coefficients as an implicit quadric f(x) - z^2 = 0.
GeneralQuadric regression_quadric(const std::array<double, 9> &coefficients);

/// Completes the square. Throws IndefiniteQuadric unless the quadric is a
/// real ellipsoid.
EllipsoidGeometry recovered_ellipsoid(const GeneralQuadric &quadric);
EllipsoidGeometry recovered_ellipsoid(const std::array<double, 9> &coefficients);

/// Radial residual: signed distance from each point to the surface along
/// the ray from the center. ss_tot is the scatter about the centroid.
GoodnessOfFit geometric_goodness(std::span<const Vec3> points, const EllipsoidGeometry &geometry);

struct RefineOptions {
    int max_iterations = 100;
    double relative_tolerance = 1e-10;
};

/// Damped (Levenberg-Marquardt) least squares on the radial residuals,
/// started from `initial`'s ellipsoid. The geometric ss_res never
/// increases; on failure the input is returned with refinement_failed set.
QuadricFit refine(std::span<const Vec3> points, const QuadricFit &initial, const RefineOptions &options = {});

enum class CloudVerdict { kFull, kDegenerate, kPoint };

std::string_view verdict_name(CloudVerdict verdict);

struct SpreadDiagnostics {
    Vec3 extents = Vec3::Zero();
    /// Ascending.
    Vec3 covariance_eigenvalues = Vec3::Zero();
    CloudVerdict verdict = CloudVerdict::kPoint;
};

inline constexpr double kDegenerateSpread = 1e-5;

/// kPoint when every covariance eigenvalue is below `threshold`,
/// kDegenerate when only the smallest is, kFull otherwise.
SpreadDiagnostics degenerate_guard(std::span<const Vec3> points, double threshold = kDegenerateSpread);

/// Number of linearly independent quadrics through all the points (the
/// nullity of the ten-column design), with relative singular-value cutoff.
int quadric_pencil_dimension(std::span<const Vec3> points, double relative_tolerance = 1e-8);

}  // namespace qsteer

#endif
