#pragma once

#include "hpmpc/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hpmpc::mip {

using numerics::Vector;

/// Convex QP with a subset of variables restricted to {0, 1}. The binary
/// variables must carry bounds [0, 1] in `qp`.
struct MixedIntegerProblem {
  numerics::QpProblem qp;
  std::vector<int> binaries;
  /// Optional label per inequality row, used to name the infeasible family.
  std::vector<std::string> row_family;
};

enum class MipStatus { Optimal, NodeLimit, Infeasible };

const char* to_string(MipStatus s);

struct MipOptions {
  double relative_gap = 1e-9;
  double absolute_gap = 1e-9;
  long node_limit = 200000;
  double integrality_tol = 1e-6;
  numerics::QpOptions qp;
  /// Upper bound on the regularization term eps/2 |x|^2 over the feasible
  /// set. When positive, incumbents are ranked by their unregularized
  /// objective and node bounds are loosened by this amount, which keeps the
  /// search exact under a larger qp.regularization.
  double bound_allowance = 0.0;
  /// Returns candidate binary assignments to try as incumbents, given the
  /// root relaxation. Each candidate lists one value per entry of `binaries`.
  std::function<std::vector<std::vector<int>>(const Vector& root_x)> heuristic;
};

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  Vector x;
  std::vector<int> assignment;  ///< binary values in `binaries` order
  /// Objective of the regularized relaxation model (the quantity compared
  /// between nodes) and of the unregularized QP at x.
  double regularized_objective = 0.0;
  double objective = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  long nodes = 0;
  std::string diagnostic;
};

/// Depth-first branch and bound on the most fractional binary. Both children
/// are solved from a copy of the parent's warm-started active set; the child
/// with the lower bound is explored first, ties going to the down branch.
MipResult branch_and_bound(const MixedIntegerProblem& p,
                           const MipOptions& options = {});

/// Solves the QP with every binary fixed to `assignment`.
/// Returns std::nullopt if that QP is infeasible.
std::optional<MipResult> solve_fixed(const MixedIntegerProblem& p,
                                     const std::vector<int>& assignment,
                                     const numerics::QpOptions& options = {});

}  // namespace hpmpc::mip
