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

#ifndef QSTEER_STEER_H
#define QSTEER_STEER_H

#include <stdexcept>
#include <string_view>

#include "qsteer/qstate.h"

namespace qsteer {

/// Outcomes with 1 + a.e at or below this are treated as impossible.
inline constexpr double kZeroProbability = 1e-12;
/// Below this, 1 - |a|^2 is treated as zero and the state as a product.
inline constexpr double kProductLimit = 1e-12;
/// Semiaxes shorter than this count as collapsed.
inline constexpr double kCollapsedSemiaxis = 1e-9;
/// Normalized steering volume never exceeds this for separable states.
inline constexpr double kSeparableVolumeBound = 1.0 / 27.0;

/// POVM element E = e0 (1 + e.s) on Alice's qubit.
struct MeasurementElement {
    double weight = 0.5;
    Vec3 direction = Vec3::UnitZ();
};

/// Bob's normalized steered Bloch vector and the probability of the
/// outcome that steered it.
struct SteeredState {
    Vec3 bloch;
    double probability;
};

/// Raised when Alice's outcome has vanishing probability, so no state is
/// steered to.
class ZeroProbabilityBranch : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// The set { (b + T^T e) / (1 + a.e) : |e| <= 1 } in closed form.
///
/// `axes` holds one unit axis per row, paired with `semiaxes` (descending).
/// `shape` is Q in (r - c)^T Q^-1 (r - c) <= 1; semiaxes are sqrt(eig Q).
struct SteeringEllipsoid {
    Vec3 center = Vec3::Zero();
    Mat3 shape = Mat3::Zero();
    Vec3 semiaxes = Vec3::Zero();
    Mat3 axes = Mat3::Identity();
    double volume = 0.0;
    int rank = 0;

    /// (r - c)^T Q^-1 (r - c). Only meaningful for rank 3.
    double quadric_residual(const Vec3 &r) const;
    /// Point on the surface along unit vector u of the principal frame.
    Vec3 surface_point(const Vec3 &unit) const;
};

/// Steered Bloch vector for a projective (e0 = 1/2) element along e.
/// Throws std::invalid_argument for |e| > 1 and ZeroProbabilityBranch when
/// 1 + a.e <= kZeroProbability.
SteeredState steered_bloch(const PauliDecomposition &d, const Vec3 &e);
/// General POVM element; the Bloch vector does not depend on e0, the
/// probability is e0 (1 + a.e).
SteeredState steered_bloch(const PauliDecomposition &d, const MeasurementElement &element);

/// Closed-form geometry:
///   c = (b - T^T a) / (1 - |a|^2)
///   Q = (T^T - b a^T)(1 + a a^T / (1 - |a|^2))(T - a b^T) / (1 - |a|^2)
/// When 1 - |a|^2 < kProductLimit the point ellipsoid at b is returned.
SteeringEllipsoid ellipsoid(const PauliDecomposition &d);

/// |det(T - a b^T)| / (1 - |a|^2)^2, the volume relative to the Bloch ball.
/// Zero in the product limit.
double normalized_volume(const PauliDecomposition &d);

struct SteeringClass {
    int rank;
    /// Volume above 1/27, which no separable state reaches.
    bool entanglement_witnessed;
};

SteeringClass classify(const PauliDecomposition &d);

/// "point", "line", "plane" or "solid" for ranks 0..3.
std::string_view rank_name(int rank);

}  // namespace qsteer

#endif
