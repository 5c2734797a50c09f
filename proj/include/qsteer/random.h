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

#ifndef QSTEER_RANDOM_H
#define QSTEER_RANDOM_H

#include <cstdint>
#include <random>

#include "qsteer/qstate.h"

namespace qsteer {

using Rng = std::mt19937_64;

/// Seed-splitting rule: the generator for stream `s` under master seed `m`
/// is seeded with splitmix64(m ^ splitmix64(s + 1)). Streams are the unit
/// of parallel work, so results never depend on how streams are scheduled.
uint64_t derive_seed(uint64_t master, uint64_t stream);
Rng make_stream(uint64_t master, uint64_t stream);

/// Uniformly distributed point on the unit sphere (normalized Gaussian).
Vec3 uniform_unit_vector(Rng &rng);

/// Haar-random rotation in SO(3): Gaussian matrix orthonormalized by QR,
/// column signs fixed by R's diagonal, determinant forced to +1.
Mat3 random_rotation(Rng &rng);

/// Haar-random 2x2 unitary.
Eigen::Matrix2cd haar_unitary_2(Rng &rng);

/// Haar-random pure state: normalized complex Gaussian vector.
PureState haar_pure_state(int num_qubits, Rng &rng);

/// Reduced state of a Haar-random pure state on num_qubits + ancilla_qubits
/// qubits. Purity decreases on average as the ancilla grows.
DensityMatrix random_mixed_state(int num_qubits, int ancilla_qubits, Rng &rng);

/// Convex mixture of `terms` random product states with uniform
/// (Dirichlet(1)) weights. Each single-qubit factor is pure with probability
/// 1/2 and otherwise uniform in the Bloch ball.
DensityMatrix random_separable_two_qubit(int terms, Rng &rng);

}  // namespace qsteer

#endif
