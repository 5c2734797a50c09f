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

#include "qsteer/random.h"

#include <cmath>
#include <vector>

namespace qsteer {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

uint64_t derive_seed(uint64_t master, uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 1));
}

Rng make_stream(uint64_t master, uint64_t stream) {
    return Rng(derive_seed(master, stream));
}

Vec3 uniform_unit_vector(Rng &rng) {
    std::normal_distribution<double> gauss;
    while (true) {
        Vec3 v(gauss(rng), gauss(rng), gauss(rng));
        double n = v.norm();
        if (n > 1e-9) {
            return v / n;
        }
    }
}

Mat3 random_rotation(Rng &rng) {
    std::normal_distribution<double> gauss;
    Mat3 g;
    for (int r = 0; r < 3; r++) {
        for (int c = 0; c < 3; c++) {
            g(r, c) = gauss(rng);
        }
    }
    Eigen::HouseholderQR<Mat3> qr(g);
    Mat3 q = qr.householderQ();
    Mat3 upper = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < 3; c++) {
        if (upper(c, c) < 0) {
            q.col(c) *= -1.0;
        }
    }
    if (q.determinant() < 0) {
        q.col(0) *= -1.0;
    }
    return q;
}

Eigen::Matrix2cd haar_unitary_2(Rng &rng) {
    std::normal_distribution<double> gauss;
    Eigen::Matrix2cd g;
    for (int r = 0; r < 2; r++) {
        for (int c = 0; c < 2; c++) {
            g(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(g);
    Eigen::Matrix2cd q = qr.householderQ();
    for (int c = 0; c < 2; c++) {
        Complex d = qr.matrixQR()(c, c);
        if (std::abs(d) > 0) {
            q.col(c) *= d / std::abs(d);
        }
    }
    return q;
}

PureState haar_pure_state(int num_qubits, Rng &rng) {
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd v(Eigen::Index{1} << num_qubits);
    for (Eigen::Index i = 0; i < v.size(); i++) {
        v(i) = Complex(gauss(rng), gauss(rng));
    }
    v.normalize();
    return PureState(std::move(v));
}

DensityMatrix random_mixed_state(int num_qubits, int ancilla_qubits, Rng &rng) {
    if (ancilla_qubits == 0) {
        return density_from_ket(haar_pure_state(num_qubits, rng));
    }
    // The enlarged register may exceed kMaxQubits, so trace the ancilla out
    // directly from the amplitude matrix instead of building a DensityMatrix.
    std::normal_distribution<double> gauss;
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    const Eigen::Index da = Eigen::Index{1} << ancilla_qubits;
    Eigen::MatrixXcd amps(d, da);
    for (Eigen::Index r = 0; r < d; r++) {
        for (Eigen::Index c = 0; c < da; c++) {
            amps(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    amps /= amps.norm();
    Eigen::MatrixXcd rho = amps * amps.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho));
}

DensityMatrix random_separable_two_qubit(int terms, Rng &rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> weights(terms);
    double total = 0.0;
    for (double &w : weights) {
        w = expo(rng);
        total += w;
    }
    // Half of the factors are pure so mixtures also reach the ball's surface.
    auto ball_point = [&]() {
        double radius = unit(rng) < 0.5 ? 1.0 : std::cbrt(unit(rng));
        return Vec3(uniform_unit_vector(rng) * radius);
    };
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    for (int t = 0; t < terms; t++) {
        m += (weights[t] / total) *
             kron(single_qubit_state(ball_point()).matrix(), single_qubit_state(ball_point()).matrix());
    }
    m = 0.5 * (m + m.adjoint()).eval();
    m /= m.trace().real();
    return DensityMatrix(std::move(m));
}

}  // namespace qsteer
