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

#include "qsteer/monogamy.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qsteer/steer.h"

namespace qsteer {

namespace {

constexpr double kSaturationBand = 1e-3;

double checked_volume(double v) {
    if (!(v >= -1e-10 && v <= 1.0 + 1e-10)) {
        throw std::invalid_argument("steering volume outside [0, 1]");
    }
    return std::clamp(v, 0.0, 1.0);
}

void require_three_qubits(const DensityMatrix &rho) {
    if (rho.num_qubits() != 3) {
        throw std::invalid_argument("expected a three-qubit state");
    }
}

}  // namespace

std::string_view monogamy_class_name(MonogamyClass c) {
    switch (c) {
        case MonogamyClass::kWClassSaturating:
            return "W-class-saturating";
        case MonogamyClass::kGhzClassInterior:
            return "GHZ-class-interior";
        case MonogamyClass::kPureViolatingMixedState:
            return "pure-violating-mixed-state";
        case MonogamyClass::kOther:
            return "other";
    }
    return "other";
}

VolumePair volumes(const DensityMatrix &rho_abc) {
    require_three_qubits(rho_abc);
    return {normalized_volume(pauli_decompose(partial_trace(rho_abc, {0, 1}))),
            normalized_volume(pauli_decompose(partial_trace(rho_abc, {0, 2})))};
}

double pure_monogamy_residual(double v_ba, double v_ca) {
    return 1.0 - std::sqrt(checked_volume(v_ba)) - std::sqrt(checked_volume(v_ca));
}

double mixed_monogamy_residual(double v_ba, double v_ca) {
    return 1.0 - std::cbrt(checked_volume(v_ba) * checked_volume(v_ba)) -
           std::cbrt(checked_volume(v_ca) * checked_volume(v_ca));
}

double concurrence(const DensityMatrix &rho_ab) {
    if (rho_ab.num_qubits() != 2) {
        throw std::invalid_argument("concurrence: expected a two-qubit state");
    }
    // With rho = W W^dagger, the l_i are the singular values of W^T (sy x sy) W.
    // Eigenvalues at rounding level are dropped so their square roots do not
    // leak into the singular values.
    const Eigen::MatrixXcd yy = kron(pauli(2), pauli(2));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rho_eig(rho_ab.matrix());
    Eigen::VectorXd weights = rho_eig.eigenvalues();
    for (Eigen::Index i = 0; i < weights.size(); i++) {
        weights(i) = weights(i) > 1e-14 ? std::sqrt(weights(i)) : 0.0;
    }
    Eigen::MatrixXcd w = rho_eig.eigenvectors() * weights.asDiagonal();
    Eigen::MatrixXcd tau = w.transpose() * yy * w;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(tau);
    Eigen::VectorXd l = svd.singularValues();
    std::sort(l.data(), l.data() + l.size(), std::greater<>());
    return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

CkwResult ckw_check(const DensityMatrix &rho_abc) {
    require_three_qubits(rho_abc);
    if (purity(rho_abc) <= 1.0 - kPureTolerance) {
        throw std::invalid_argument("ckw_check: state is not pure");
    }
    CkwResult r;
    r.concurrence_ab = concurrence(partial_trace(rho_abc, {0, 1}));
    r.concurrence_ac = concurrence(partial_trace(rho_abc, {0, 2}));
    const Eigen::MatrixXcd rho_a = partial_trace(rho_abc, {0}).matrix();
    r.tangle_a_bc = 4.0 * rho_a.determinant().real();
    r.residual = r.tangle_a_bc - r.concurrence_ab * r.concurrence_ab - r.concurrence_ac * r.concurrence_ac;
    return r;
}

MonogamyClass classify_monogamy(double pure_residual, bool pure_input) {
    if (std::abs(pure_residual) < kSaturationBand) {
        return MonogamyClass::kWClassSaturating;
    }
    if (pure_residual < -kSaturationBand) {
        return MonogamyClass::kPureViolatingMixedState;
    }
    return pure_input ? MonogamyClass::kGhzClassInterior : MonogamyClass::kOther;
}

MonogamyReport monogamy_report_from_volumes(double v_ba, double v_ca, bool pure_input) {
    MonogamyReport r;
    r.v_ba = std::clamp(v_ba, 0.0, 1.0);
    r.v_ca = std::clamp(v_ca, 0.0, 1.0);
    r.pure_residual = pure_monogamy_residual(r.v_ba, r.v_ca);
    r.mixed_residual = mixed_monogamy_residual(r.v_ba, r.v_ca);
    r.classification = classify_monogamy(r.pure_residual, pure_input);
    return r;
}

MonogamyReport monogamy_report(const DensityMatrix &rho_abc) {
    VolumePair v = volumes(rho_abc);
    MonogamyReport r = monogamy_report_from_volumes(v.b_given_a, v.c_given_a, purity(rho_abc) > 1.0 - kPureTolerance);
    r.concurrence_ab = concurrence(partial_trace(rho_abc, {0, 1}));
    r.concurrence_ac = concurrence(partial_trace(rho_abc, {0, 2}));
    return r;
}

}  // namespace qsteer
