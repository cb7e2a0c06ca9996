#include "hpmpc/valve_dispatch.hpp"

#include "hpmpc/error.hpp"
#include "hpmpc/mixed_integer.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace hpmpc::valves {

void FlowModel::validate() const {
  if (q_nominal.empty()) throw DomainError("flow model has no circuits");
  for (double q : q_nominal) {
    if (!(q > 0.0)) throw DomainError("nominal circuit flow must be positive");
  }
  const double total = std::accumulate(q_nominal.begin(), q_nominal.end(), 0.0);
  // The polynomial must stay nonnegative on [0, total].
  for (int i = 0; i <= 100; ++i) {
    const double x = total * i / 100.0;
    if (c0 + c1 * x + c2 * x * x < -1e-12) {
      throw DomainError("flow polynomial turns negative inside the reachable range");
    }
  }
  if (q_min < 0.0) throw DomainError("minimum flow must be nonnegative");
}

std::vector<double> default_room_areas() {
  return {40.0, 32.0, 26.0, 22.0, 20.0, 18.0, 16.0, 16.0, 14.0, 14.0, 12.0};
}

FlowModel default_flow_model() {
  FlowModel fm;
  const auto areas = default_room_areas();
  const double total = std::accumulate(areas.begin(), areas.end(), 0.0);
  for (double a : areas) fm.q_nominal.push_back(0.44 * a / total);
  return fm;
}

double flow_from_config(const std::vector<int>& v, const FlowModel& fm) {
  if (v.size() != fm.q_nominal.size()) {
    throw DomainError("valve vector length differs from circuit count");
  }
  double qbar = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) qbar += v[i] * fm.q_nominal[i];
  return fm.c0 + fm.c1 * qbar + fm.c2 * qbar * qbar;
}

std::vector<double> comfort_prices(const std::vector<double>& t_room,
                                   const std::vector<double>& t_ref, double a) {
  if (t_room.size() != t_ref.size()) {
    throw DomainError("room temperature and reference counts differ");
  }
  if (!(a > 0.0)) throw DomainError("comfort price slope must be positive");
  std::vector<double> out(t_room.size());
  for (std::size_t i = 0; i < t_room.size(); ++i) out[i] = a * (t_room[i] - t_ref[i]);
  return out;
}

ProductPlan linearize_products(int m) {
  if (m < 1) throw DomainError("need at least one circuit");
  ProductPlan p;
  p.circuits = m;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) p.pairs.emplace_back(i, j);
  }
  p.auxiliaries = static_cast<int>(p.pairs.size());
  p.total_binaries = m + p.auxiliaries;
  return p;
}

void ValveProblem::validate() const {
  flow.validate();
  const int m = flow.circuits();
  if (static_cast<int>(prices.size()) != m) {
    throw DomainError("price vector length differs from circuit count");
  }
  if (!v_prev.empty() && static_cast<int>(v_prev.size()) != m) {
    throw DomainError("previous configuration has the wrong length");
  }
  for (int j : forced_open) {
    if (j < 0 || j >= m) throw DomainError("forced-open circuit index out of range");
  }
  if (max_close < 0) throw DomainError("close limit must be nonnegative");
  if (!(c_q > 0.0)) throw DomainError("flow tracking weight must be positive");
}

double valve_objective(const ValveProblem& p, const std::vector<int>& v) {
  const double e = p.q_ref - flow_from_config(v, p.flow);
  double obj = p.c_q * e * e;
  for (std::size_t i = 0; i < v.size(); ++i) obj += p.prices[i] * v[i];
  return obj;
}

namespace {

int prev_open(const ValveProblem& p, int i) {
  return p.v_prev.empty() ? 1 : p.v_prev[i];
}

}  // namespace

ValveDecision enumerate_valves(const ValveProblem& p) {
  p.validate();
  const int m = p.flow.circuits();
  if (m > 20) throw DomainError("enumeration limited to 20 circuits");
  ValveDecision best;
  best.objective = std::numeric_limits<double>::infinity();
  long flow_ok = 0;
  long limits_ok = 0;
  std::vector<int> v(m);
  for (unsigned long code = 0; code < (1UL << m); ++code) {
    for (int i = 0; i < m; ++i) v[i] = static_cast<int>((code >> i) & 1UL);
    ++best.evaluated;
    bool lim = true;
    for (int j : p.forced_open) lim = lim && v[j] == 1;
    int closing = 0;
    for (int i = 0; i < m; ++i) closing += prev_open(p, i) * (1 - v[i]);
    lim = lim && closing <= p.max_close;
    const double q = flow_from_config(v, p.flow);
    const bool fl = q >= p.flow.q_min - 1e-12;
    flow_ok += fl;
    limits_ok += lim;
    if (!lim || !fl) continue;
    const double obj = valve_objective(p, v);
    if (obj < best.objective) {
      best.objective = obj;
      best.v = v;
      best.flow = q;
    }
  }
  if (best.v.empty()) {
    std::string why;
    if (flow_ok == 0) {
      why = "minimum flow q_min is unreachable";
    } else if (limits_ok == 0) {
      why = "forced-open set conflicts with the close limit";
    } else {
      why = "minimum flow cannot be met within the close limit and forced-open set";
    }
    throw DomainError("valve selection infeasible: " + why);
  }
  return best;
}

ValveDecision solve_valves_mld(const ValveProblem& p) {
  p.validate();
  const int m = p.flow.circuits();
  const ProductPlan plan = linearize_products(m);
  const int n = plan.total_binaries;
  const auto& qn = p.flow.q_nominal;

  // q = c0 + w . z with z = (v, y).
  numerics::Vector w = numerics::Vector::Zero(n);
  for (int i = 0; i < m; ++i) w[i] = p.flow.c1 * qn[i] + p.flow.c2 * qn[i] * qn[i];
  for (int a = 0; a < plan.auxiliaries; ++a) {
    const auto [i, j] = plan.pairs[a];
    w[m + a] = 2.0 * p.flow.c2 * qn[i] * qn[j];
  }
  const double r = p.q_ref - p.flow.c0;

  mip::MixedIntegerProblem mp;
  mp.qp = numerics::QpProblem(n);
  mp.qp.hessian = 2.0 * p.c_q * w * w.transpose();
  mp.qp.gradient = -2.0 * p.c_q * r * w;
  for (int i = 0; i < m; ++i) mp.qp.gradient[i] += p.prices[i];
  mp.qp.lower.setZero();
  mp.qp.upper.setOnes();

  using numerics::Sense;
  using numerics::SparseRow;
  for (int a = 0; a < plan.auxiliaries; ++a) {
    const auto [i, j] = plan.pairs[a];
    const int y = m + a;
    mp.qp.add_inequality(SparseRow{{y, 1.0}, {i, -1.0}}, Sense::LessEqual, 0.0);
    mp.qp.add_inequality(SparseRow{{y, 1.0}, {j, -1.0}}, Sense::LessEqual, 0.0);
    mp.qp.add_inequality(SparseRow{{y, 1.0}, {i, -1.0}, {j, -1.0}},
                         Sense::GreaterEqual, -1.0);
    for (int k = 0; k < 3; ++k) mp.row_family.emplace_back("product");
  }
  mp.qp.add_inequality(numerics::SparseRow::from_dense(w), Sense::GreaterEqual,
                       p.flow.q_min - p.flow.c0 - 1e-12);
  mp.row_family.emplace_back("minimum flow");
  SparseRow closing;
  int open_before = 0;
  for (int i = 0; i < m; ++i) {
    if (prev_open(p, i)) {
      closing.add(i, -1.0);
      ++open_before;
    }
  }
  if (!closing.index.empty()) {
    mp.qp.add_inequality(std::move(closing), Sense::LessEqual,
                         p.max_close - open_before);
    mp.row_family.emplace_back("close limit");
  }
  for (int j : p.forced_open) {
    mp.qp.add_inequality(SparseRow{{j, 1.0}}, Sense::GreaterEqual, 1.0);
    mp.row_family.emplace_back("forced open");
  }
  for (int i = 0; i < m; ++i) mp.binaries.push_back(i);

  // The Hessian has rank one, so nearly every direction carries only the
  // proximal term; a tiny eps makes the dual iterates huge. A moderate eps
  // with the matching bound allowance stays exact on the box [0, 1]^n.
  mip::MipOptions opt;
  opt.relative_gap = 1e-10;
  opt.absolute_gap = 1e-10;
  opt.qp.regularization = 1e-6;
  opt.bound_allowance = 0.5 * opt.qp.regularization * n;
  const mip::MipResult res = mip::branch_and_bound(mp, opt);
  if (res.status != mip::MipStatus::Optimal) {
    throw DomainError("valve selection infeasible: " + res.diagnostic);
  }
  ValveDecision d;
  d.v = res.assignment;
  d.flow = flow_from_config(d.v, p.flow);
  d.objective = valve_objective(p, d.v);
  d.evaluated = res.nodes;
  return d;
}

ValveDecision select_valves(const ValveProblem& p) {
  if (p.flow.circuits() <= 15) return enumerate_valves(p);
  return solve_valves_mld(p);
}

}  // namespace hpmpc::valves
