#pragma once

namespace ks1d {

// Whether the chemoattractant equation keeps its time derivative or is
// replaced by the quasi-static balance 0 = v_xx - v + u.
enum class Variant { ParabolicParabolic, ParabolicElliptic };

enum class StepperKind { ExplicitRK, IMEX1, FullyImplicit };

}  // namespace ks1d
