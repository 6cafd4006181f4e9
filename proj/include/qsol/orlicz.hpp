#pragma once

#include "qsol/grid.hpp"
#include "qsol/problem.hpp"

namespace qsol {

struct OrliczNorm {
  double value = 0.0;
  /// Minimizing scale; 0 when the weighted integral vanishes identically.
  double zeta = 0.0;
};

/// |v|_{E_L} = inf_{zeta > 0} zeta (1 + int V L(v / zeta)).
///
/// The objective is convex in zeta (it is the perspective of the convex L),
/// so the minimizer is the root of its derivative
///   1 + int V [L(s) - s L'(s)],  s = v / zeta,
/// located on the log bracket [1e-8, 1e8] to relative 1e-12. The bracket is
/// widened once to [1e-16, 1e16]; a minimizer still outside raises
/// NumericalError.
OrliczNorm orlicz_norm(const DiscreteField& v, const Potential& V);

/// The objective zeta (1 + int V L(v / zeta)) itself.
double orlicz_objective(const DiscreteField& v, const Potential& V, double zeta);

}  // namespace qsol
