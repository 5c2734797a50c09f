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

#include "qsteer/steer.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qsteer {

namespace {

Eigen::Index largest_component(const Vec3 &v) {
    Eigen::Index index;
    v.cwiseAbs().maxCoeff(&index);
    return index;
}

}  // namespace

double SteeringEllipsoid::quadric_residual(const Vec3 &r) const {
    Vec3 local = axes * (r - center);
    double acc = 0.0;
    for (int i = 0; i < 3; i++) {
        if (semiaxes(i) >= kCollapsedSemiaxis) {
            acc += (local(i) / semiaxes(i)) * (local(i) / semiaxes(i));
        } else if (std::abs(local(i)) > kCollapsedSemiaxis) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return acc;
}

Vec3 SteeringEllipsoid::surface_point(const Vec3 &unit) const {
    return center + axes.transpose() * unit.cwiseProduct(semiaxes);
}

SteeredState steered_bloch(const PauliDecomposition &d, const Vec3 &e) {
    return steered_bloch(d, MeasurementElement{0.5, e});
}

SteeredState steered_bloch(const PauliDecomposition &d, const MeasurementElement &element) {
    if (!(element.weight >= 0.0 && element.weight <= 1.0)) {
        throw std::invalid_argument("measurement weight outside [0, 1]");
    }
    if (element.direction.norm() > 1.0 + 1e-12) {
        throw std::invalid_argument("measurement direction longer than 1");
    }
    double denom = 1.0 + d.a.dot(element.direction);
    if (denom <= kZeroProbability) {
        throw ZeroProbabilityBranch("outcome has zero probability (1 + a.e = " + std::to_string(denom) + ")");
    }
    return {(d.b + d.T.transpose() * element.direction) / denom, element.weight * denom};
}

SteeringEllipsoid ellipsoid(const PauliDecomposition &d) {
    SteeringEllipsoid out;
    const double gap = 1.0 - d.a.squaredNorm();
    if (gap < kProductLimit) {
        out.center = d.b;
        return out;
    }
    const Mat3 id = Mat3::Identity();
    out.center = (d.b - d.T.transpose() * d.a) / gap;
    const Mat3 k = d.T - d.a * d.b.transpose();
    Mat3 q = k.transpose() * (id + d.a * d.a.transpose() / gap) * k / gap;
    q = 0.5 * (q + q.transpose()).eval();
    out.shape = q;

    Eigen::SelfAdjointEigenSolver<Mat3> solver(q);
    const Vec3 &evals = solver.eigenvalues();
    Mat3 evecs = solver.eigenvectors();
    for (int c = 0; c < 3; c++) {
        if (evecs(largest_component(evecs.col(c)), c) < 0) {
            evecs.col(c) *= -1.0;
        }
    }
    std::array<int, 3> order{0, 1, 2};
    const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (std::abs(evals(i) - evals(j)) > 1e-12 * scale) {
            return evals(i) > evals(j);
        }
        return largest_component(evecs.col(i)) < largest_component(evecs.col(j));
    });
    for (int r = 0; r < 3; r++) {
        const int src = order[r];
        out.semiaxes(r) = std::sqrt(std::max(0.0, evals(src)));
        out.axes.row(r) = evecs.col(src).transpose();
    }
    out.volume = out.semiaxes.prod();
    out.rank = static_cast<int>((out.semiaxes.array() >= kCollapsedSemiaxis).count());
    return out;
}

double normalized_volume(const PauliDecomposition &d) {
    const double gap = 1.0 - d.a.squaredNorm();
    if (gap < kProductLimit) {
        return 0.0;
    }
    return std::abs((d.T - d.a * d.b.transpose()).determinant()) / (gap * gap);
}

SteeringClass classify(const PauliDecomposition &d) {
    SteeringEllipsoid e = ellipsoid(d);
    return {e.rank, normalized_volume(d) > kSeparableVolumeBound + 1e-12};
}

std::string_view rank_name(int rank) {
    switch (rank) {
        case 0:
            return "point";
        case 1:
            return "line";
        case 2:
            return "plane";
        case 3:
            return "solid";
        default:
            throw std::out_of_range("ellipsoid rank must be in 0..3");
    }
}

}  // namespace qsteer
