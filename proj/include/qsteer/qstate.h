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

#ifndef QSTEER_QSTATE_H
#define QSTEER_QSTATE_H

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <string_view>

/// Exact state algebra on one to three qubits.
///
/// Bit ordering: qubit 0 is the leftmost symbol of a ket and the most
/// significant bit of the basis index, so |100> is amplitude index 4.
/// In three-qubit states qubit 0 is Alice, 1 is Bob and 2 is Charlie.
namespace qsteer {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr int kMaxQubits = 3;

/// Thrown when a vector or matrix violates the invariants of a quantum state.
class InvalidState : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A normalized ket on 1-3 qubits.
class PureState {
   public:
    explicit PureState(Eigen::VectorXcd amplitudes);

    /// Computational basis ket from a bit string such as "100".
    static PureState basis(std::string_view bits);

    int num_qubits() const {
        return num_qubits_;
    }
    Eigen::Index dim() const {
        return amplitudes_.size();
    }
    const Eigen::VectorXcd &amplitudes() const {
        return amplitudes_;
    }
    Complex amplitude(std::string_view bits) const;

   private:
    Eigen::VectorXcd amplitudes_;
    int num_qubits_;
};

/// A Hermitian, unit-trace, positive-semidefinite matrix on 1-3 qubits.
/// Eigenvalues down to -kPsdTolerance are accepted; entries are stored
/// exactly as given.
class DensityMatrix {
   public:
    explicit DensityMatrix(Eigen::MatrixXcd entries);

    int num_qubits() const {
        return num_qubits_;
    }
    Eigen::Index dim() const {
        return entries_.rows();
    }
    const Eigen::MatrixXcd &matrix() const {
        return entries_;
    }

   private:
    Eigen::MatrixXcd entries_;
    int num_qubits_;
};

/// Local Bloch vectors and spin correlations of a two-qubit state:
/// a_j = Tr[rho s_j x 1], b_k = Tr[rho 1 x s_k], T_jk = Tr[rho s_j x s_k].
struct PauliDecomposition {
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    Mat3 T = Mat3::Zero();
};

/// Bell basis in the fixed order used by bell_diagonal().
enum class BellState { kPsiMinus = 0, kPsiPlus = 1, kPhiMinus = 2, kPhiPlus = 3 };

/// Pauli matrix by index: 0 is the identity, 1..3 are x, y, z.
Eigen::Matrix2cd pauli(int index);

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &lhs, const Eigen::MatrixXcd &rhs);

/// Embeds a single-qubit operator acting on `qubit` into an n-qubit space.
Eigen::MatrixXcd embed_single_qubit(const Eigen::Matrix2cd &op, int qubit, int num_qubits);

DensityMatrix density_from_ket(const PureState &psi);

/// Reduced state on the qubits listed in `keep`, in ascending qubit order.
/// Throws std::out_of_range for an index outside the register and
/// std::invalid_argument for an empty or repeated selection.
DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix &rho, std::initializer_list<int> keep);

PauliDecomposition pauli_decompose(const DensityMatrix &rho_ab);

/// Rebuilds rho = (1x1 + a.s x 1 + 1 x b.s + sum T_jk s_j x s_k) / 4.
/// Throws InvalidState when the result is not positive semidefinite.
DensityMatrix pauli_recompose(const PauliDecomposition &d);

/// <psi|rho|psi>.
double fidelity_pure(const DensityMatrix &rho, const PureState &psi);

/// Tr[rho^2].
double purity(const DensityMatrix &rho);

/// Tr[rho M] for a Hermitian observable M.
double expectation(const DensityMatrix &rho, const Eigen::MatrixXcd &observable);

DensityMatrix single_qubit_state(const Vec3 &bloch);

/// (sin a |100> + sin b |010> + cos b |001> + cos a |111>) / sqrt 2 with
/// a, b in [0, pi/2].
PureState family_state(double alpha, double beta);

/// (|010> - 2|100> + |001>) / sqrt 6.
PureState chi1();
/// sx x sx x sx applied to chi1().
PureState chi2();
/// Equal mixture of chi1 and chi2; purity 1/2.
DensityMatrix mixed_w_state();

PureState bell_state(BellState which);
PureState singlet();
PureState ghz_state();

/// sum_i p_i |Bell_i><Bell_i| over (psi-, psi+, phi-, phi+).
DensityMatrix bell_diagonal(const std::array<double, 4> &weights);

/// cos g |01> + sin g |10> for g in [0, pi].
PureState pure_two_qubit(double gamma);

/// visibility * singlet + (1 - visibility) * I/4.
DensityMatrix werner_state(double visibility);

/// (1 - lambda) rho + lambda I/d.
DensityMatrix with_white_noise(const DensityMatrix &rho, double lambda);

/// U_q rho U_q^dagger for a single-qubit unitary on `qubit`.
DensityMatrix apply_local_unitary(const DensityMatrix &rho, int qubit, const Eigen::Matrix2cd &unitary);

/// sx x sx x sx M sx x sx x sx for an 8x8 Hermitian M. Involutive.
Eigen::MatrixXcd flip_conjugate(const Eigen::MatrixXcd &observable);

bool is_hermitian(const Eigen::MatrixXcd &m, double tolerance = kHermitianTolerance);

}  // namespace qsteer

#endif
