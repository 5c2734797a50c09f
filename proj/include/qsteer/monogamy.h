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

#ifndef QSTEER_MONOGAMY_H
#define QSTEER_MONOGAMY_H

#include <optional>
#include <string_view>

#include "qsteer/qstate.h"

namespace qsteer {

/// Purity above 1 - kPureTolerance counts as a pure state.
inline constexpr double kPureTolerance = 1e-10;

/// Volumes of Bob's and Charlie's ellipsoids steered by Alice (qubit 0).
struct VolumePair {
    double b_given_a;
    double c_given_a;
};

enum class MonogamyClass {
    kWClassSaturating,
    kGhzClassInterior,
    kPureViolatingMixedState,
    kOther,
};

std::string_view monogamy_class_name(MonogamyClass c);

struct MonogamyReport {
    double v_ba = 0.0;
    double v_ca = 0.0;
    /// 1 - sqrt(V_BA) - sqrt(V_CA); negative means the pure-state bound fails.
    double pure_residual = 0.0;
    /// 1 - V_BA^(2/3) - V_CA^(2/3).
    double mixed_residual = 0.0;
    /// Absent when the report was built from volumes alone.
    std::optional<double> concurrence_ab;
    std::optional<double> concurrence_ac;
    MonogamyClass classification = MonogamyClass::kOther;
};

VolumePair volumes(const DensityMatrix &rho_abc);

double pure_monogamy_residual(double v_ba, double v_ca);
double mixed_monogamy_residual(double v_ba, double v_ca);

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), with l_i the descending
/// square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy).
double concurrence(const DensityMatrix &rho_ab);

struct CkwResult {
    double concurrence_ab;
    double concurrence_ac;
    /// C^2_{A|BC} = 4 det(rho_A).
    double tangle_a_bc;
    /// C^2_{A|BC} - C^2_AB - C^2_AC.
    double residual;
};

/// Throws std::invalid_argument for a mixed input.
CkwResult ckw_check(const DensityMatrix &rho_abc);

/// Labels follow the residual: |r| < 1e-3 saturating, r < -1e-3 violating,
/// otherwise GHZ-class interior for pure input and other for mixed input.
MonogamyClass classify_monogamy(double pure_residual, bool pure_input);

MonogamyReport monogamy_report(const DensityMatrix &rho_abc);

/// Report built from estimated volumes (e.g. fitted ellipsoids), which are
/// clamped to [0, 1] first. Carries no concurrences.
MonogamyReport monogamy_report_from_volumes(double v_ba, double v_ca, bool pure_input);

}  // namespace qsteer

#endif
