#include "hpmpc/mixed_integer.hpp"

#include "hpmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hpmpc::mip {

using numerics::ActiveSetQp;
using numerics::QpStatus;

const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::Optimal:
      return "Optimal";
    case MipStatus::NodeLimit:
      return "NodeLimit";
    case MipStatus::Infeasible:
      return "Infeasible";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Node {
  ActiveSetQp qp;
  double bound;
};

void check_binaries(const MixedIntegerProblem& p) {
  const int n = p.qp.num_variables();
  for (int b : p.binaries) {
    if (b < 0 || b >= n) throw DomainError("binary index outside the problem");
    if (p.qp.lower[b] != 0.0 || p.qp.upper[b] != 1.0) {
      throw DomainError("binary variable " + std::to_string(b) +
                        " must have bounds [0, 1]");
    }
  }
}

// Names the constraint family holding the most violated row at x.
std::string blame(const MixedIntegerProblem& p, const Vector& x) {
  double worst = 0.0;
  int which = -1;
  for (std::size_t i = 0; i < p.qp.in_rows.size(); ++i) {
    const double v = p.qp.in_rows[i].dot(x) - p.qp.in_rhs[i];
    const double viol = p.qp.in_sense[i] == numerics::Sense::GreaterEqual ? -v : v;
    const double scaled = viol / std::max(1e-12, p.qp.in_rows[i].norm());
    if (scaled > worst) {
      worst = scaled;
      which = static_cast<int>(i);
    }
  }
  if (which < 0) return "equality or bound constraints";
  if (static_cast<std::size_t>(which) < p.row_family.size()) {
    return p.row_family[which];
  }
  return "inequality row " + std::to_string(which);
}

bool fix_all(ActiveSetQp& qp, const std::vector<int>& binaries,
             const std::vector<int>& values) {
  for (std::size_t i = 0; i < binaries.size(); ++i) {
    if (values[i] == 0) {
      qp.add_upper_bound(binaries[i], 0.0);
    } else {
      qp.add_lower_bound(binaries[i], 1.0);
    }
  }
  return qp.solve() == QpStatus::Optimal;
}

}  // namespace

std::optional<MipResult> solve_fixed(const MixedIntegerProblem& p,
                                     const std::vector<int>& assignment,
                                     const numerics::QpOptions& options) {
  check_binaries(p);
  if (assignment.size() != p.binaries.size()) {
    throw DomainError("assignment length differs from the binary count");
  }
  ActiveSetQp qp(p.qp, options);
  if (!fix_all(qp, p.binaries, assignment)) return std::nullopt;
  MipResult r;
  r.status = MipStatus::Optimal;
  r.x = qp.x();
  r.assignment = assignment;
  r.regularized_objective = qp.regularized_objective();
  r.objective = qp.objective();
  r.bound = r.regularized_objective;
  r.nodes = 1;
  return r;
}

MipResult branch_and_bound(const MixedIntegerProblem& p,
                           const MipOptions& opt) {
  check_binaries(p);
  MipResult best;
  best.regularized_objective = kInf;

  ActiveSetQp root(p.qp, opt.qp);
  const QpStatus rs = root.solve();
  best.nodes = 1;
  if (rs != QpStatus::Optimal) {
    best.status = MipStatus::Infeasible;
    best.diagnostic = rs == QpStatus::Infeasible
                          ? "root relaxation infeasible; binding family: " +
                                blame(p, root.x())
                          : "root relaxation hit the iteration limit";
    return best;
  }

  const bool exact_rank = opt.bound_allowance > 0.0;
  double best_key = kInf;
  auto offer = [&](const ActiveSetQp& qp, const std::vector<int>& values) {
    const double key = exact_rank ? qp.objective() : qp.regularized_objective();
    if (key < best_key) {
      best_key = key;
      best.regularized_objective = qp.regularized_objective();
      best.objective = qp.objective();
      best.x = qp.x();
      best.assignment = values;
    }
  };

  auto try_assignment = [&](const ActiveSetQp& from,
                            const std::vector<int>& values) {
    ActiveSetQp qp = from;
    if (fix_all(qp, p.binaries, values)) offer(qp, values);
  };

  if (opt.heuristic) {
    for (const auto& cand : opt.heuristic(root.x())) {
      if (cand.size() == p.binaries.size()) try_assignment(root, cand);
    }
  }

  auto prune_level = [&]() {
    if (!std::isfinite(best_key)) return kInf;
    return best_key + opt.bound_allowance -
           std::max(opt.absolute_gap, opt.relative_gap * std::abs(best_key));
  };

  std::vector<Node> stack;
  stack.push_back({root, root.regularized_objective()});
  bool limit_hit = false;
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (node.bound >= prune_level()) continue;

    const Vector& x = node.qp.x();
    int pick = -1;
    double frac_best = opt.integrality_tol;
    for (std::size_t i = 0; i < p.binaries.size(); ++i) {
      const double v = x[p.binaries[i]];
      const double frac = std::min(v, 1.0 - v);
      if (frac > frac_best + 1e-15) {
        frac_best = frac;
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) {
      std::vector<int> values(p.binaries.size());
      for (std::size_t i = 0; i < p.binaries.size(); ++i) {
        values[i] = x[p.binaries[i]] >= 0.5 ? 1 : 0;
      }
      try_assignment(node.qp, values);
      continue;
    }
    if (best.nodes + 2 > opt.node_limit) {
      limit_hit = true;
      stack.push_back(std::move(node));
      break;
    }
    const int var = p.binaries[pick];
    ActiveSetQp down = node.qp;
    down.add_upper_bound(var, 0.0);
    const bool down_ok = down.solve() == QpStatus::Optimal;
    ActiveSetQp up = std::move(node.qp);
    up.add_lower_bound(var, 1.0);
    const bool up_ok = up.solve() == QpStatus::Optimal;
    best.nodes += 2;

    const double bd = down_ok ? down.regularized_objective() : kInf;
    const double bu = up_ok ? up.regularized_objective() : kInf;
    // Push the worse child first so the better one is popped next.
    if (bd <= bu) {
      if (up_ok) stack.push_back({std::move(up), bu});
      if (down_ok) stack.push_back({std::move(down), bd});
    } else {
      if (down_ok) stack.push_back({std::move(down), bd});
      if (up_ok) stack.push_back({std::move(up), bu});
    }
  }

  if (!std::isfinite(best.regularized_objective)) {
    best.status = limit_hit ? MipStatus::NodeLimit : MipStatus::Infeasible;
    best.diagnostic = limit_hit ? "node limit reached before any incumbent"
                                : "no integer-feasible assignment exists";
    best.bound = root.regularized_objective();
    best.gap = kInf;
    return best;
  }
  double bound = best.regularized_objective;
  for (const auto& n : stack) bound = std::min(bound, n.bound);
  best.bound = bound;
  best.gap = (best.regularized_objective - bound) /
             std::max(1.0, std::abs(best.regularized_objective));
  best.status = limit_hit ? MipStatus::NodeLimit : MipStatus::Optimal;
  return best;
}

}  // namespace hpmpc::mip
