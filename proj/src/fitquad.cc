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

#include "qsteer/fitquad.h"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qsteer {

namespace {

constexpr double kRankTolerance = 1e-10;

/// Points shifted to their centroid and scaled to unit RMS radius.
struct Normalized {
    Vec3 centroid = Vec3::Zero();
    double scale = 1.0;
    PointCloud points;
};

Normalized normalize(std::span<const Vec3> points) {
    Normalized n;
    for (const Vec3 &p : points) {
        n.centroid += p;
    }
    n.centroid /= static_cast<double>(points.size());
    double acc = 0.0;
    for (const Vec3 &p : points) {
        acc += (p - n.centroid).squaredNorm();
    }
    n.scale = std::sqrt(acc / static_cast<double>(points.size()));
    if (!(n.scale > 0.0)) {
        throw DegenerateFit("all points coincide");
    }
    n.points.reserve(points.size());
    for (const Vec3 &p : points) {
        n.points.push_back((p - n.centroid) / n.scale);
    }
    return n;
}

/// Monomials weighted so the coefficient norm is rotation invariant.
Eigen::MatrixXd symmetric_design(std::span<const Vec3> points) {
    const double r2 = std::numbers::sqrt2;
    Eigen::MatrixXd d(static_cast<Eigen::Index>(points.size()), 10);
    for (Eigen::Index i = 0; i < d.rows(); i++) {
        const Vec3 &p = points[i];
        d.row(i) << p.x() * p.x(), p.y() * p.y(), p.z() * p.z(), r2 * p.x() * p.y(), r2 * p.x() * p.z(),
            r2 * p.y() * p.z(), p.x(), p.y(), p.z(), 1.0;
    }
    return d;
}

GeneralQuadric quadric_from_symmetric(const Eigen::Matrix<double, 10, 1> &v) {
    const double h = 1.0 / std::numbers::sqrt2;
    GeneralQuadric q;
    q.quadratic << v(0), h * v(3), h * v(4), h * v(3), v(1), h * v(5), h * v(4), h * v(5), v(2);
    q.linear << v(6), v(7), v(8);
    q.constant = v(9);
    return q;
}

/// Undoes x -> (x - m) / s on a quadric expressed in normalized coordinates.
GeneralQuadric denormalize(const GeneralQuadric &q, const Vec3 &m, double s) {
    GeneralQuadric out;
    out.quadratic = q.quadratic / (s * s);
    out.linear = -2.0 * q.quadratic * m / (s * s) + q.linear / s;
    out.constant = m.dot(q.quadratic * m) / (s * s) - q.linear.dot(m) / s + q.constant;
    return out;
}

Eigen::JacobiSVD<Eigen::MatrixXd> design_svd(const Normalized &n) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(symmetric_design(n.points), Eigen::ComputeFullV);
}

EllipsoidGeometry geometry_from_shape(const Vec3 &center, const Mat3 &shape) {
    Eigen::SelfAdjointEigenSolver<Mat3> solver(shape);
    if (solver.eigenvalues().minCoeff() <= 0.0) {
        throw IndefiniteQuadric("quadric is not a real ellipsoid");
    }
    EllipsoidGeometry g;
    g.center = center;
    // Ascending eigenvalues of the shape give descending semiaxes.
    for (int i = 0; i < 3; i++) {
        Vec3 axis = solver.eigenvectors().col(i);
        Eigen::Index big;
        axis.cwiseAbs().maxCoeff(&big);
        if (axis(big) < 0) {
            axis = -axis;
        }
        g.semiaxes(i) = 1.0 / std::sqrt(solver.eigenvalues()(i));
        g.axes.row(i) = axis.transpose();
    }
    g.volume = g.semiaxes.prod();
    return g;
}

double radial_residual(const Vec3 &p, const Vec3 &center, const Mat3 &shape, double fallback) {
    Vec3 d = p - center;
    double q = std::sqrt(std::max(0.0, d.dot(shape * d)));
    if (q <= 0.0) {
        return -fallback;
    }
    return (1.0 - 1.0 / q) * d.norm();
}

Mat3 shape_matrix(const EllipsoidGeometry &g) {
    return g.axes.transpose() * g.semiaxes.cwiseInverse().cwiseAbs2().asDiagonal() * g.axes;
}

/// Parameters: center (3) then the lower triangle of the Cholesky factor L
/// of the shape matrix L L^T, row by row.
struct RadialFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    std::span<const Vec3> points;

    int inputs() const {
        return 9;
    }
    int values() const {
        return static_cast<int>(points.size());
    }

    static Mat3 lower(const Eigen::VectorXd &x) {
        Mat3 l = Mat3::Zero();
        l(0, 0) = x(3);
        l(1, 0) = x(4);
        l(1, 1) = x(5);
        l(2, 0) = x(6);
        l(2, 1) = x(7);
        l(2, 2) = x(8);
        return l;
    }

    int operator()(const Eigen::VectorXd &x, Eigen::VectorXd &fvec) const {
        const Vec3 center = x.head<3>();
        const Mat3 l = lower(x);
        const Mat3 shape = l * l.transpose();
        for (std::size_t i = 0; i < points.size(); i++) {
            fvec(static_cast<Eigen::Index>(i)) = radial_residual(points[i], center, shape, 0.0);
        }
        return 0;
    }
};

}  // namespace

GeneralQuadric regression_quadric(const std::array<double, 9> &c) {
    GeneralQuadric q;
    q.quadratic << c[0], c[2] / 2, c[3] / 2, c[2] / 2, c[1], c[4] / 2, c[3] / 2, c[4] / 2, -1.0;
    q.linear << c[5], c[6], c[7];
    q.constant = c[8];
    return q;
}

EllipsoidGeometry recovered_ellipsoid(const GeneralQuadric &quadric) {
    const Mat3 a = 0.5 * (quadric.quadratic + quadric.quadratic.transpose());
    Eigen::FullPivLU<Mat3> lu(a);
    if (!lu.isInvertible()) {
        throw IndefiniteQuadric("quadric has no center");
    }
    const Vec3 center = -0.5 * lu.solve(quadric.linear);
    // (x - c)^T A (x - c) = c^T A c - d.
    const double level = center.dot(a * center) - quadric.constant;
    if (level == 0.0 || !std::isfinite(level)) {
        throw IndefiniteQuadric("quadric is a cone");
    }
    return geometry_from_shape(center, a / level);
}

EllipsoidGeometry recovered_ellipsoid(const std::array<double, 9> &coefficients) {
    return recovered_ellipsoid(regression_quadric(coefficients));
}

GoodnessOfFit geometric_goodness(std::span<const Vec3> points, const EllipsoidGeometry &geometry) {
    GoodnessOfFit g;
    if (points.empty()) {
        return g;
    }
    const Mat3 shape = shape_matrix(geometry);
    Vec3 centroid = Vec3::Zero();
    for (const Vec3 &p : points) {
        centroid += p;
    }
    centroid /= static_cast<double>(points.size());
    for (const Vec3 &p : points) {
        double r = radial_residual(p, geometry.center, shape, geometry.semiaxes.minCoeff());
        g.ss_res += r * r;
        g.ss_tot += (p - centroid).squaredNorm();
    }
    g.r_squared = g.ss_tot > 0.0 ? 1.0 - g.ss_res / g.ss_tot : (g.ss_res == 0.0 ? 1.0 : 0.0);
    return g;
}

QuadricFit fit(std::span<const Vec3> points, GeometrySource source) {
    if (points.size() < kMinFitPoints) {
        throw DegenerateFit("need at least 9 points, got " + std::to_string(points.size()));
    }
    const Normalized norm = normalize(points);
    QuadricFit out;
    out.geometry_source = source;

    // Regression on Y = z^2 with unit-norm design columns for conditioning.
    {
        const Eigen::Index n = static_cast<Eigen::Index>(points.size());
        Eigen::MatrixXd design(n, 9);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; i++) {
            const Vec3 &p = points[i];
            design.row(i) << p.x() * p.x(), p.y() * p.y(), p.x() * p.y(), p.x() * p.z(), p.y() * p.z(), p.x(),
                p.y(), p.z(), 1.0;
            y(i) = p.z() * p.z();
        }
        Eigen::VectorXd col_scale = design.colwise().norm().transpose();
        for (Eigen::Index c = 0; c < 9; c++) {
            if (col_scale(c) == 0.0) {
                throw DegenerateFit("regression design has an all-zero column");
            }
        }
        Eigen::MatrixXd scaled = design * col_scale.cwiseInverse().asDiagonal();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
        qr.setThreshold(kRankTolerance);
        if (qr.rank() < 9) {
            throw DegenerateFit("regression design is rank deficient (rank " + std::to_string(qr.rank()) + ")");
        }
        Eigen::VectorXd c = qr.solve(y).cwiseQuotient(col_scale);
        for (int k = 0; k < 9; k++) {
            out.coefficients[k] = c(k);
        }
        Eigen::VectorXd fitted = design * c;
        out.ss_res = (y - fitted).squaredNorm();
        out.ss_tot = (y.array() - y.mean()).square().sum();
        out.r_squared = out.ss_tot > 0.0 ? 1.0 - out.ss_res / out.ss_tot : (out.ss_res == 0.0 ? 1.0 : 0.0);
    }

    if (source == GeometrySource::kSymmetric) {
        auto svd = design_svd(norm);
        const auto &sv = svd.singularValues();
        // Second-smallest singular value (index 8) near zero means a pencil
        // of quadrics passes through the cloud.
        if (sv(8) <= kRankTolerance * sv(0)) {
            throw DegenerateFit("points lie on more than one quadric");
        }
        Eigen::Matrix<double, 10, 1> v = svd.matrixV().col(9);
        out.quadric = denormalize(quadric_from_symmetric(v), norm.centroid, norm.scale);
        try {
            EllipsoidGeometry local = recovered_ellipsoid(quadric_from_symmetric(v));
            local.center = norm.centroid + norm.scale * local.center;
            local.semiaxes *= norm.scale;
            local.volume = local.semiaxes.prod();
            out.recovered = local;
        } catch (const IndefiniteQuadric &) {
        }
    } else {
        out.quadric = regression_quadric(out.coefficients);
        try {
            out.recovered = recovered_ellipsoid(out.quadric);
        } catch (const IndefiniteQuadric &) {
        }
    }
    if (out.recovered) {
        out.geometric = geometric_goodness(points, *out.recovered);
    }
    return out;
}

QuadricFit refine(std::span<const Vec3> points, const QuadricFit &initial, const RefineOptions &options) {
    QuadricFit out = initial;
    out.refined = true;
    out.refine_iterations = 0;
    if (!initial.recovered || points.size() < kMinFitPoints) {
        out.refinement_failed = true;
        return out;
    }
    const GoodnessOfFit start = geometric_goodness(points, *initial.recovered);
    if (start.ss_res <= 1e-24 * static_cast<double>(points.size())) {
        out.geometric = start;
        return out;
    }

    Eigen::VectorXd x(9);
    x.head<3>() = initial.recovered->center;
    Eigen::LLT<Mat3> llt(shape_matrix(*initial.recovered));
    const Mat3 l = llt.matrixL();
    x(3) = l(0, 0);
    x(4) = l(1, 0);
    x(5) = l(1, 1);
    x(6) = l(2, 0);
    x(7) = l(2, 1);
    x(8) = l(2, 2);

    RadialFunctor functor{points};
    Eigen::NumericalDiff<RadialFunctor, Eigen::Central> diff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<RadialFunctor, Eigen::Central>, double> lm(diff);
    lm.parameters.xtol = options.relative_tolerance;
    lm.parameters.ftol = options.relative_tolerance;
    lm.parameters.maxfev = 1 << 20;

    auto status = lm.minimizeInit(x);
    int iterations = 0;
    if (status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters) {
        do {
            status = lm.minimizeOneStep(x);
            iterations++;
        } while (status == Eigen::LevenbergMarquardtSpace::Running && iterations < options.max_iterations);
    }
    out.refine_iterations = iterations;

    try {
        if (!x.allFinite()) {
            throw IndefiniteQuadric("refinement diverged");
        }
        const Mat3 lf = RadialFunctor::lower(x);
        const Mat3 shape = lf * lf.transpose();
        EllipsoidGeometry g = geometry_from_shape(x.head<3>(), shape);
        GoodnessOfFit score = geometric_goodness(points, g);
        if (!(score.ss_res <= start.ss_res)) {
            throw IndefiniteQuadric("refinement did not reduce the residual");
        }
        out.recovered = g;
        out.geometric = score;
        out.quadric.quadratic = shape;
        out.quadric.linear = -2.0 * shape * g.center;
        out.quadric.constant = g.center.dot(shape * g.center) - 1.0;
    } catch (const IndefiniteQuadric &) {
        out = initial;
        out.refined = true;
        out.refinement_failed = true;
        out.refine_iterations = iterations;
        out.geometric = start;
    }
    return out;
}

std::string_view verdict_name(CloudVerdict verdict) {
    switch (verdict) {
        case CloudVerdict::kFull:
            return "full";
        case CloudVerdict::kDegenerate:
            return "degenerate";
        case CloudVerdict::kPoint:
            return "point";
    }
    return "point";
}

SpreadDiagnostics degenerate_guard(std::span<const Vec3> points, double threshold) {
    SpreadDiagnostics d;
    if (points.empty()) {
        return d;
    }
    Vec3 lo = points.front();
    Vec3 hi = points.front();
    Vec3 mean = Vec3::Zero();
    for (const Vec3 &p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
        mean += p;
    }
    mean /= static_cast<double>(points.size());
    Mat3 cov = Mat3::Zero();
    for (const Vec3 &p : points) {
        cov += (p - mean) * (p - mean).transpose();
    }
    cov /= static_cast<double>(points.size());
    d.extents = hi - lo;
    d.covariance_eigenvalues = Eigen::SelfAdjointEigenSolver<Mat3>(cov, Eigen::EigenvaluesOnly).eigenvalues();
    if (d.covariance_eigenvalues(2) < threshold) {
        d.verdict = CloudVerdict::kPoint;
    } else if (d.covariance_eigenvalues(0) < threshold) {
        d.verdict = CloudVerdict::kDegenerate;
    } else {
        d.verdict = CloudVerdict::kFull;
    }
    return d;
}

int quadric_pencil_dimension(std::span<const Vec3> points, double relative_tolerance) {
    if (points.empty()) {
        return 10;
    }
    Normalized norm;
    try {
        norm = normalize(points);
    } catch (const DegenerateFit &) {
        return 9;
    }
    auto svd = design_svd(norm);
    const auto &sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); i++) {
        if (sv(i) > relative_tolerance * sv(0)) {
            rank++;
        }
    }
    return 10 - rank;
}

}  // namespace qsteer
