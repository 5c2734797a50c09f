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

#include "qsteer/qstate.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace qsteer {

namespace {

int qubits_for_dim(Eigen::Index dim, const char *what) {
    for (int n = 1; n <= kMaxQubits; n++) {
        if (dim == (Eigen::Index{1} << n)) {
            return n;
        }
    }
    throw InvalidState(std::string(what) + ": dimension " + std::to_string(dim) + " is not 2, 4 or 8");
}

Eigen::Index basis_index(std::string_view bits) {
    Eigen::Index index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("basis label must consist of '0' and '1': " + std::string(bits));
        }
        index = (index << 1) | (c == '1' ? 1 : 0);
    }
    return index;
}

void check_angle(double value, double hi, const char *name) {
    if (!(value >= -1e-12 && value <= hi + 1e-12)) {
        throw std::invalid_argument(std::string(name) + " = " + std::to_string(value) + " outside [0, " +
                                    std::to_string(hi) + "]");
    }
}

}  // namespace

bool is_hermitian(const Eigen::MatrixXcd &m, double tolerance) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

PureState::PureState(Eigen::VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
    num_qubits_ = qubits_for_dim(amplitudes_.size(), "PureState");
    double norm2 = amplitudes_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTolerance) {
        throw InvalidState("PureState: squared norm " + std::to_string(norm2) + " differs from 1");
    }
}

PureState PureState::basis(std::string_view bits) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << bits.size());
    v(basis_index(bits)) = 1.0;
    return PureState(std::move(v));
}

Complex PureState::amplitude(std::string_view bits) const {
    if (static_cast<int>(bits.size()) != num_qubits_) {
        throw std::invalid_argument("basis label length does not match qubit count");
    }
    return amplitudes_(basis_index(bits));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw InvalidState("DensityMatrix: matrix is not square");
    }
    num_qubits_ = qubits_for_dim(entries_.rows(), "DensityMatrix");
    if (!is_hermitian(entries_)) {
        throw InvalidState("DensityMatrix: matrix is not Hermitian");
    }
    Complex tr = entries_.trace();
    if (std::abs(tr.real() - 1.0) > kTraceTolerance || std::abs(tr.imag()) > kTraceTolerance) {
        throw InvalidState("DensityMatrix: trace " + std::to_string(tr.real()) + " differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
    double smallest = solver.eigenvalues().minCoeff();
    if (smallest < -kPsdTolerance) {
        throw InvalidState("DensityMatrix: negative eigenvalue " + std::to_string(smallest));
    }
}

Eigen::Matrix2cd pauli(int index) {
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd m;
    switch (index) {
        case 0:
            m << 1, 0, 0, 1;
            break;
        case 1:
            m << 0, 1, 1, 0;
            break;
        case 2:
            m << 0, -i, i, 0;
            break;
        case 3:
            m << 1, 0, 0, -1;
            break;
        default:
            throw std::out_of_range("pauli index must be in 0..3");
    }
    return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &lhs, const Eigen::MatrixXcd &rhs) {
    Eigen::MatrixXcd out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
    for (Eigen::Index r = 0; r < lhs.rows(); r++) {
        for (Eigen::Index c = 0; c < lhs.cols(); c++) {
            out.block(r * rhs.rows(), c * rhs.cols(), rhs.rows(), rhs.cols()) = lhs(r, c) * rhs;
        }
    }
    return out;
}

Eigen::MatrixXcd embed_single_qubit(const Eigen::Matrix2cd &op, int qubit, int num_qubits) {
    if (qubit < 0 || qubit >= num_qubits) {
        throw std::out_of_range("qubit index out of range");
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = 0; q < num_qubits; q++) {
        out = kron(out, q == qubit ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd::Identity(2, 2));
    }
    return out;
}

DensityMatrix density_from_ket(const PureState &psi) {
    const auto &v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const int> keep) {
    const int n = rho.num_qubits();
    if (keep.empty()) {
        throw std::invalid_argument("partial_trace: nothing to keep");
    }
    std::vector<int> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
        throw std::invalid_argument("partial_trace: repeated qubit index");
    }
    if (kept.front() < 0 || kept.back() >= n) {
        throw std::out_of_range("partial_trace: qubit index out of range");
    }
    std::vector<int> traced;
    for (int q = 0; q < n; q++) {
        if (!std::binary_search(kept.begin(), kept.end(), q)) {
            traced.push_back(q);
        }
    }

    const int nk = static_cast<int>(kept.size());
    const int nt = static_cast<int>(traced.size());
    // Assembles a full basis index from kept-register and traced-register indices.
    auto full_index = [&](int kept_bits, int traced_bits) {
        int index = 0;
        for (int j = 0; j < nk; j++) {
            if ((kept_bits >> (nk - 1 - j)) & 1) {
                index |= 1 << (n - 1 - kept[j]);
            }
        }
        for (int j = 0; j < nt; j++) {
            if ((traced_bits >> (nt - 1 - j)) & 1) {
                index |= 1 << (n - 1 - traced[j]);
            }
        }
        return index;
    };

    const int dk = 1 << nk;
    const int dt = 1 << nt;
    const auto &m = rho.matrix();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    for (int r = 0; r < dk; r++) {
        for (int c = 0; c < dk; c++) {
            Complex acc = 0.0;
            for (int t = 0; t < dt; t++) {
                acc += m(full_index(r, t), full_index(c, t));
            }
            out(r, c) = acc;
        }
    }
    return DensityMatrix(std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix &rho, std::initializer_list<int> keep) {
    return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

PauliDecomposition pauli_decompose(const DensityMatrix &rho_ab) {
    if (rho_ab.num_qubits() != 2) {
        throw std::invalid_argument("pauli_decompose: expected a two-qubit state");
    }
    const Eigen::Matrix2cd id = pauli(0);
    PauliDecomposition d;
    for (int j = 0; j < 3; j++) {
        d.a(j) = expectation(rho_ab, kron(pauli(j + 1), id));
        d.b(j) = expectation(rho_ab, kron(id, pauli(j + 1)));
        for (int k = 0; k < 3; k++) {
            d.T(j, k) = expectation(rho_ab, kron(pauli(j + 1), pauli(k + 1)));
        }
    }
    return d;
}

DensityMatrix pauli_recompose(const PauliDecomposition &d) {
    const Eigen::Matrix2cd id = pauli(0);
    Eigen::MatrixXcd m = kron(id, id);
    for (int j = 0; j < 3; j++) {
        m += d.a(j) * kron(pauli(j + 1), id);
        m += d.b(j) * kron(id, pauli(j + 1));
        for (int k = 0; k < 3; k++) {
            m += d.T(j, k) * kron(pauli(j + 1), pauli(k + 1));
        }
    }
    m /= 4.0;
    return DensityMatrix(std::move(m));
}

double expectation(const DensityMatrix &rho, const Eigen::MatrixXcd &observable) {
    if (observable.rows() != rho.dim() || observable.cols() != rho.dim()) {
        throw std::invalid_argument("expectation: dimension mismatch");
    }
    // Tr[rho M] = sum_ij rho_ij M_ji
    return (rho.matrix().cwiseProduct(observable.transpose())).sum().real();
}

double fidelity_pure(const DensityMatrix &rho, const PureState &psi) {
    if (rho.dim() != psi.dim()) {
        throw std::invalid_argument("fidelity_pure: dimension mismatch");
    }
    const auto &v = psi.amplitudes();
    return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

double purity(const DensityMatrix &rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

DensityMatrix single_qubit_state(const Vec3 &bloch) {
    Eigen::Matrix2cd m = pauli(0);
    for (int j = 0; j < 3; j++) {
        m += bloch(j) * pauli(j + 1);
    }
    return DensityMatrix(m / 2.0);
}

PureState family_state(double alpha, double beta) {
    check_angle(alpha, std::numbers::pi / 2, "alpha");
    check_angle(beta, std::numbers::pi / 2, "beta");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v(0b100) = std::sin(alpha);
    v(0b010) = std::sin(beta);
    v(0b001) = std::cos(beta);
    v(0b111) = std::cos(alpha);
    return PureState(v / std::sqrt(2.0));
}

PureState chi1() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v(0b010) = 1.0;
    v(0b100) = -2.0;
    v(0b001) = 1.0;
    return PureState(v / std::sqrt(6.0));
}

PureState chi2() {
    const Eigen::Matrix2cd x = pauli(1);
    Eigen::MatrixXcd flip = kron(kron(x, x), x);
    return PureState(flip * chi1().amplitudes());
}

DensityMatrix mixed_w_state() {
    const Eigen::VectorXcd v1 = chi1().amplitudes();
    const Eigen::VectorXcd v2 = chi2().amplitudes();
    return DensityMatrix(0.5 * (v1 * v1.adjoint() + v2 * v2.adjoint()));
}

PureState bell_state(BellState which) {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    switch (which) {
        case BellState::kPsiMinus:
            v(0b01) = s;
            v(0b10) = -s;
            break;
        case BellState::kPsiPlus:
            v(0b01) = s;
            v(0b10) = s;
            break;
        case BellState::kPhiMinus:
            v(0b00) = s;
            v(0b11) = -s;
            break;
        case BellState::kPhiPlus:
            v(0b00) = s;
            v(0b11) = s;
            break;
    }
    return PureState(std::move(v));
}

PureState singlet() {
    return bell_state(BellState::kPsiMinus);
}

PureState ghz_state() {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(8);
    v(0) = 1.0 / std::sqrt(2.0);
    v(7) = 1.0 / std::sqrt(2.0);
    return PureState(std::move(v));
}

DensityMatrix bell_diagonal(const std::array<double, 4> &weights) {
    double total = 0.0;
    for (double p : weights) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("bell_diagonal: negative weight");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("bell_diagonal: weights do not sum to 1");
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    for (int i = 0; i < 4; i++) {
        const Eigen::VectorXcd v = bell_state(static_cast<BellState>(i)).amplitudes();
        m += weights[i] * v * v.adjoint();
    }
    return DensityMatrix(std::move(m));
}

PureState pure_two_qubit(double gamma) {
    check_angle(gamma, std::numbers::pi, "gamma");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
    v(0b01) = std::cos(gamma);
    v(0b10) = std::sin(gamma);
    return PureState(std::move(v));
}

DensityMatrix werner_state(double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw std::invalid_argument("werner_state: visibility outside [0, 1]");
    }
    return with_white_noise(density_from_ket(singlet()), 1.0 - visibility);
}

DensityMatrix with_white_noise(const DensityMatrix &rho, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("white-noise weight outside [0, 1]");
    }
    const Eigen::Index d = rho.dim();
    return DensityMatrix((1.0 - lambda) * rho.matrix() +
                         lambda * Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix apply_local_unitary(const DensityMatrix &rho, int qubit, const Eigen::Matrix2cd &unitary) {
    Eigen::MatrixXcd u = embed_single_qubit(unitary, qubit, rho.num_qubits());
    Eigen::MatrixXcd out = u * rho.matrix() * u.adjoint();
    // Restore exact Hermiticity lost to rounding in the product.
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

Eigen::MatrixXcd flip_conjugate(const Eigen::MatrixXcd &observable) {
    if (observable.rows() != 8 || observable.cols() != 8) {
        throw std::invalid_argument("flip_conjugate: expected an 8x8 operator");
    }
    if (!is_hermitian(observable)) {
        throw std::invalid_argument("flip_conjugate: operator is not Hermitian");
    }
    // sx^{x3} permutes basis index i to 7 - i.
    Eigen::MatrixXcd out(8, 8);
    for (int r = 0; r < 8; r++) {
        for (int c = 0; c < 8; c++) {
            out(r, c) = observable(7 - r, 7 - c);
        }
    }
    return out;
}

}  // namespace qsteer
