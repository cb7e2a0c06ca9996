#include "hpmpc/supervisory_mpc.hpp"

#include "hpmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hpmpc::mpc {

using numerics::Matrix;
using numerics::Sense;
using numerics::SparseRow;
using numerics::Vector;

namespace {

void require_length(const std::vector<double>& v, int n, const char* name) {
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError(std::string("MIOCP field ") + name + " has length " +
                      std::to_string(v.size()) + ", expected " +
                      std::to_string(n));
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ConfigError(std::string("MIOCP field ") + name + " is not finite");
    }
  }
}

}  // namespace

void MiocpSpec::validate() const {
  if (horizon < 2) throw ConfigError("MIOCP horizon must be at least 2 steps");
  const int n = horizon;
  require_length(buy, n, "buy");
  require_length(sell, n, "sell");
  require_length(p_app_kw, n, "p_app_kw");
  require_length(p_pv_kw, n, "p_pv_kw");
  require_length(t_ref, n, "t_ref");
  require_length(c_cmf, n, "c_cmf");
  require_length(t_min, n, "t_min");
  require_length(t_max, n, "t_max");
  if (static_cast<int>(disturbance.size()) != n) {
    throw ConfigError("MIOCP disturbance forecast length differs from horizon");
  }
  for (int k = 0; k < n; ++k) {
    if (!(buy[k] > sell[k])) {
      throw ConfigError("buy price must exceed sell price at every hour (step " +
                        std::to_string(k) + ")");
    }
    if (c_cmf[k] < 0.0) throw ConfigError("comfort price must be nonnegative");
    if (t_min[k] > t_max[k]) throw ConfigError("comfort box is empty");
    if (p_app_kw[k] < 0.0 || p_pv_kw[k] < 0.0) {
      throw ConfigError("appliance and PV forecasts must be nonnegative");
    }
  }
  if (!(p_min_kw > 0.0) || !(p_max_kw >= p_min_kw)) {
    throw ConfigError("power range needs 0 < p_min <= p_max");
  }
  if (!(dp_max_kw >= p_min_kw)) {
    throw ConfigError("upward rate limit must allow a start at p_min");
  }
  if (!(dp_min_kw < 0.0)) throw ConfigError("downward rate limit must be negative");
  if (!(heat_max_kw > 0.0)) throw ConfigError("heat limit must be positive");
  if (min_down < 1) throw ConfigError("minimum down-time must be at least 1");
  if (cuts < 1) throw ConfigError("at least one efficiency cut is required");
  if (c_slack <= 0.0) throw ConfigError("slack price must be positive");
  if (delta_op != 0 && delta_op != 1) throw ConfigError("delta_op must be 0 or 1");
  const auto want = delta_op == 1 ? efficiency::Direction::HeatFromPower
                                  : efficiency::Direction::PowerFromHeat;
  if (fit.direction != want) {
    throw ConfigError("efficiency fit direction does not match delta_op");
  }
  if (!(model.dt_s > 0.0)) throw ConfigError("MIOCP model is not discretized");
  if (delta_prev != 0 && delta_prev != 1) throw ConfigError("delta_prev must be binary");
  if (p_prev_kw < 0.0 || off_steps < 0) {
    throw ConfigError("initial power and off-step count must be nonnegative");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::NodeLimit:
      return "NodeLimit";
    case SolveStatus::Infeasible:
      return "Infeasible";
  }
  return "?";
}

// ---------------------------------------------------------------------------

void encode_downtime(numerics::QpProblem& qp, std::vector<std::string>& family,
                     const Layout& l, int min_down, int delta_prev,
                     int off_steps) {
  const int n = l.n;
  if (delta_prev == 0) {
    const int forced = std::max(0, min_down - off_steps);
    for (int k = 0; k < std::min(forced, n); ++k) {
      qp.add_inequality(SparseRow{{l.delta(k), 1.0}}, Sense::LessEqual, 0.0);
      family.emplace_back("down-time");
    }
  }
  // A stop at k (on at k-1, off at k) keeps the unit off through k+M-1.
  for (int k = 0; k < n; ++k) {
    for (int j = k + 1; j <= std::min(k + min_down - 1, n - 1); ++j) {
      SparseRow row{{l.delta(j), 1.0}, {l.delta(k), -1.0}};
      double rhs = 1.0;
      if (k == 0) {
        if (delta_prev == 0) continue;
        rhs -= 1.0;
      } else {
        row.add(l.delta(k - 1), 1.0);
      }
      qp.add_inequality(std::move(row), Sense::LessEqual, rhs);
      family.emplace_back("down-time");
    }
  }
}

void encode_gated_range(numerics::QpProblem& qp,
                        std::vector<std::string>& family, const Layout& l,
                        double p_min, double p_max) {
  for (int k = 0; k < l.n; ++k) {
    qp.add_inequality(SparseRow{{l.p(k), 1.0}, {l.delta(k), -p_max}},
                      Sense::LessEqual, 0.0);
    family.emplace_back("gated-range");
    qp.add_inequality(SparseRow{{l.p(k), 1.0}, {l.delta(k), -p_min}},
                      Sense::GreaterEqual, 0.0);
    family.emplace_back("gated-range");
  }
}

bool downtime_feasible(const std::vector<int>& delta, int min_down,
                       int delta_prev, int off_steps) {
  const int n = static_cast<int>(delta.size());
  if (delta_prev == 0) {
    const int forced = std::max(0, min_down - off_steps);
    for (int k = 0; k < std::min(forced, n); ++k) {
      if (delta[k] != 0) return false;
    }
  }
  for (int k = 0; k < n; ++k) {
    const int before = k == 0 ? delta_prev : delta[k - 1];
    if (before == 1 && delta[k] == 0) {
      for (int j = k + 1; j <= std::min(k + min_down - 1, n - 1); ++j) {
        if (delta[j] != 0) return false;
      }
    }
  }
  return true;
}

namespace {

double curve_kw(const MiocpSpec& s, double arg_kw, double t_amb) {
  if (s.delta_op == 1) {
    return efficiency::heat_from_power(arg_kw * 1000.0, t_amb, s.fit) / 1000.0;
  }
  return efficiency::power_from_heat(arg_kw * 1000.0, t_amb, s.fit) / 1000.0;
}

// Domain of the curve argument (P for heat-from-power, Q otherwise) at T_a.
std::pair<double, double> cut_domain(const MiocpSpec& s, double t_amb) {
  if (s.delta_op == 1) return {s.p_min_kw, s.p_max_kw};
  // Heat range reachable inside the power range; bisection on the convex map.
  auto heat_for_power = [&](double p_target) {
    double lo = 0.0;
    double hi = s.heat_max_kw * 4.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (curve_kw(s, mid, t_amb) < p_target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  const double lo = heat_for_power(s.p_min_kw);
  const double hi = std::min(s.heat_max_kw, heat_for_power(s.p_max_kw));
  return {lo, std::max(lo, hi)};
}

}  // namespace

CutFamily efficiency_cuts(const MiocpSpec& spec) {
  CutFamily fam;
  fam.per_step.resize(spec.horizon);
  for (int k = 0; k < spec.horizon; ++k) {
    const double ta = spec.disturbance[k].t_amb;
    const auto [lo, hi] = cut_domain(spec, ta);
    const double h = (hi - lo) / spec.cuts;
    for (int j = 0; j < spec.cuts; ++j) {
      // Base points at interval midpoints keep the envelope error uniform,
      // including at the ends of the range.
      const double at = lo + (j + 0.5) * h;
      efficiency::TangentCut c = efficiency::tangent_cut(spec.fit, at * 1000.0, ta);
      c.intercept /= 1000.0;
      fam.per_step[k].push_back(c);
    }
    for (int g = 0; g <= 200; ++g) {
      const double u = lo + (hi - lo) * g / 200.0;
      const double curve = curve_kw(spec, u, ta);
      double env = spec.delta_op == 1 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
      for (const auto& c : fam.per_step[k]) {
        env = spec.delta_op == 1 ? std::min(env, c.eval(u)) : std::max(env, c.eval(u));
      }
      const double gap = std::abs(env - curve) / std::max(1e-9, std::abs(curve));
      fam.max_gap_fraction = std::max(fam.max_gap_fraction, gap);
    }
  }
  return fam;
}

MiocpProblem build_miocp(const MiocpSpec& spec, const building::Vec2& x0,
                         int t0_hour) {
  spec.validate();
  if (!x0.allFinite()) throw ConfigError("initial state is not finite");
  const int n = spec.horizon;
  MiocpProblem out;
  out.layout.n = n;
  out.t0_hour = t0_hour;
  const Layout& l = out.layout;

  // Condensed dynamics.
  out.free_room.resize(n);
  out.free_floor.resize(n);
  out.phi_room = Matrix::Zero(n, n);
  out.phi_floor = Matrix::Zero(n, n);
  {
    building::Vec2 x = x0;
    for (int k = 0; k < n; ++k) {
      x = spec.model.a * x + spec.model.e * spec.disturbance[k].vec();
      out.free_room[k] = x[0];
      out.free_floor[k] = x[1];
    }
    // Response to a unit kW held in step j, observed after step k >= j.
    building::Vec2 resp = spec.model.b * 1000.0;
    for (int lag = 0; lag < n; ++lag) {
      for (int j = 0; j + lag < n; ++j) {
        out.phi_room(j + lag, j) = resp[0];
        out.phi_floor(j + lag, j) = resp[1];
      }
      resp = spec.model.a * resp;
    }
  }

  numerics::QpProblem qp(l.size());
  std::vector<std::string> family;
  const double inf = std::numeric_limits<double>::infinity();

  for (int k = 0; k < n; ++k) {
    qp.lower[l.p(k)] = 0.0;
    qp.upper[l.p(k)] = spec.p_max_kw;
    qp.lower[l.delta(k)] = 0.0;
    qp.upper[l.delta(k)] = 1.0;
    qp.lower[l.q(k)] = 0.0;
    qp.upper[l.q(k)] = inf;
    qp.lower[l.g_plus(k)] = 0.0;
    qp.lower[l.slack(k)] = 0.0;
  }

  // Objective: sell * G + (buy - sell) * G+ + comfort + slack.
  double constant = 0.0;
  for (int k = 0; k < n; ++k) {
    qp.gradient[l.p(k)] += spec.sell[k];
    constant += spec.sell[k] * (spec.p_app_kw[k] - spec.p_pv_kw[k]);
    qp.gradient[l.g_plus(k)] += spec.buy[k] - spec.sell[k];
    qp.gradient[l.slack(k)] += spec.c_slack;
    const double w = spec.c_cmf[k];
    if (w > 0.0) {
      const double off = out.free_room[k] - spec.t_ref[k];
      constant += w * off * off;
      for (int i = 0; i <= k; ++i) {
        const double pi = out.phi_room(k, i);
        qp.gradient[l.q(i)] += 2.0 * w * off * pi;
        for (int j = 0; j <= k; ++j) {
          qp.hessian(l.q(i), l.q(j)) += 2.0 * w * pi * out.phi_room(k, j);
        }
      }
    }
  }
  // Exact symmetry for the solver's check.
  qp.hessian = 0.5 * (qp.hessian + qp.hessian.transpose()).eval();
  out.constant = constant;
  for (int k = 0; k < n; ++k) {
    out.base_load_kw.push_back(spec.p_app_kw[k] - spec.p_pv_kw[k]);
  }

  // Efficiency envelope, heat gating and emitter limit.
  out.cuts = efficiency_cuts(spec);
  out.q_max_kw = spec.heat_max_kw;
  if (spec.delta_op == 1) {
    double q_curve_max = 0.0;
    for (int k = 0; k < n; ++k) {
      q_curve_max = std::max(
          q_curve_max, curve_kw(spec, spec.p_max_kw, spec.disturbance[k].t_amb));
    }
    out.q_max_kw = std::min(spec.heat_max_kw, 1.05 * q_curve_max);
  }
  for (int k = 0; k < n; ++k) {
    for (const auto& c : out.cuts.per_step[k]) {
      if (spec.delta_op == 1) {
        // Q <= a P + b delta
        qp.add_inequality(SparseRow{{l.q(k), 1.0}, {l.p(k), -c.slope},
                                    {l.delta(k), -c.intercept}},
                          Sense::LessEqual, 0.0);
      } else {
        // P >= a Q + b delta
        qp.add_inequality(SparseRow{{l.p(k), 1.0}, {l.q(k), -c.slope},
                                    {l.delta(k), -c.intercept}},
                          Sense::GreaterEqual, 0.0);
      }
      family.emplace_back("efficiency");
    }
    qp.add_inequality(SparseRow{{l.q(k), 1.0}, {l.delta(k), -out.q_max_kw}},
                      Sense::LessEqual, 0.0);
    family.emplace_back("heat-gating");
  }

  encode_gated_range(qp, family, l, spec.p_min_kw, spec.p_max_kw);

  // Rate limits; the downward limit is relaxed when the unit switches off.
  const double m_rate = std::max(0.0, spec.p_max_kw + spec.dp_min_kw);
  for (int k = 0; k < n; ++k) {
    SparseRow up{{l.p(k), 1.0}};
    double up_rhs = spec.dp_max_kw;
    SparseRow down{{l.p(k), 1.0}, {l.delta(k), -m_rate}};
    double down_rhs = spec.dp_min_kw - m_rate;
    if (k == 0) {
      up_rhs += spec.p_prev_kw;
      down_rhs += spec.p_prev_kw;
    } else {
      up.add(l.p(k - 1), -1.0);
      down.add(l.p(k - 1), -1.0);
    }
    qp.add_inequality(std::move(up), Sense::LessEqual, up_rhs);
    family.emplace_back("rate");
    qp.add_inequality(std::move(down), Sense::GreaterEqual, down_rhs);
    family.emplace_back("rate");
  }

  encode_downtime(qp, family, l, spec.min_down, spec.delta_prev, spec.off_steps);

  // Grid import above zero: G+ >= P - PV + APP.
  for (int k = 0; k < n; ++k) {
    qp.add_inequality(SparseRow{{l.g_plus(k), 1.0}, {l.p(k), -1.0}},
                      Sense::GreaterEqual, spec.p_app_kw[k] - spec.p_pv_kw[k]);
    family.emplace_back("grid-balance");
  }

  // Soft comfort box on the room state after each step.
  for (int k = 0; k < n; ++k) {
    SparseRow hi;
    SparseRow lo;
    for (int j = 0; j <= k; ++j) {
      hi.add(l.q(j), out.phi_room(k, j));
      lo.add(l.q(j), out.phi_room(k, j));
    }
    hi.add(l.slack(k), -1.0);
    lo.add(l.slack(k), 1.0);
    qp.add_inequality(std::move(hi), Sense::LessEqual,
                      spec.t_max[k] - out.free_room[k]);
    family.emplace_back("comfort-box");
    qp.add_inequality(std::move(lo), Sense::GreaterEqual,
                      spec.t_min[k] - out.free_room[k]);
    family.emplace_back("comfort-box");
  }

  out.mip.qp = std::move(qp);
  out.mip.row_family = std::move(family);
  for (int k = 0; k < n; ++k) out.mip.binaries.push_back(l.delta(k));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

MiocpSolution extract(const MiocpProblem& p, const mip::MipResult& r) {
  MiocpSolution s;
  const Layout& l = p.layout;
  const int n = l.n;
  const Vector& x = r.x;
  s.gap = r.gap;
  s.nodes = r.nodes;
  s.diagnostic = r.diagnostic;
  s.regularized_objective = r.regularized_objective + p.constant;
  s.objective = r.objective + p.constant;
  s.p_kw.resize(n);
  s.q_kw.resize(n);
  s.g_kw.resize(n);
  s.g_plus_kw.resize(n);
  s.slack.resize(n);
  s.delta.resize(n);
  Vector q(n);
  for (int k = 0; k < n; ++k) {
    s.delta[k] = r.assignment.empty() ? (x[l.delta(k)] >= 0.5 ? 1 : 0)
                                      : r.assignment[k];
    s.p_kw[k] = x[l.p(k)];
    s.q_kw[k] = x[l.q(k)];
    s.g_plus_kw[k] = x[l.g_plus(k)];
    s.g_kw[k] = s.p_kw[k] + p.base_load_kw[k];
    s.slack[k] = x[l.slack(k)];
    q[k] = s.q_kw[k];
  }
  const Vector tr = p.free_room + p.phi_room * q;
  const Vector tf = p.free_floor + p.phi_floor * q;
  s.t_room.assign(tr.data(), tr.data() + n);
  s.t_floor.assign(tf.data(), tf.data() + n);
  return s;
}

}  // namespace

MiocpSolution solve_branch_and_bound(const MiocpProblem& p,
                                     const SolveOptions& options) {
  mip::MipOptions mo;
  mo.relative_gap = options.relative_gap;
  mo.node_limit = options.node_limit;
  const Layout l = p.layout;
  // Candidates that violate down-time simply fail their fixed solve.
  mo.heuristic = [l, &options](const Vector& root) {
    std::vector<std::vector<int>> cands;
    std::vector<int> r(l.n);
    for (int k = 0; k < l.n; ++k) r[k] = root[l.delta(k)] >= 0.5 ? 1 : 0;
    cands.push_back(r);
    std::vector<int> up(l.n);
    for (int k = 0; k < l.n; ++k) up[k] = root[l.delta(k)] > 1e-6 ? 1 : 0;
    cands.push_back(up);
    if (static_cast<int>(options.hint.size()) == l.n) cands.push_back(options.hint);
    cands.emplace_back(l.n, 0);
    return cands;
  };
  const mip::MipResult r = mip::branch_and_bound(p.mip, mo);
  if (r.status == mip::MipStatus::Infeasible || r.x.size() == 0) {
    MiocpSolution s;
    s.status = r.status == mip::MipStatus::NodeLimit ? SolveStatus::NodeLimit
                                                     : SolveStatus::Infeasible;
    s.nodes = r.nodes;
    s.diagnostic = r.diagnostic;
    return s;
  }
  MiocpSolution s = extract(p, r);
  s.status = r.status == mip::MipStatus::Optimal ? SolveStatus::Optimal
                                                 : SolveStatus::NodeLimit;
  return s;
}

MiocpSolution enumerate_exact(const MiocpProblem& p, int max_n) {
  const int n = p.layout.n;
  if (n > max_n) {
    throw DomainError("enumerate_exact: horizon " + std::to_string(n) +
                      " exceeds the limit " + std::to_string(max_n));
  }
  std::optional<mip::MipResult> best;
  long solved = 0;
  std::vector<int> pattern(n);
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    for (int k = 0; k < n; ++k) pattern[k] = static_cast<int>((mask >> k) & 1UL);
    auto r = mip::solve_fixed(p.mip, pattern);
    ++solved;
    if (!r) continue;
    if (!best || r->regularized_objective < best->regularized_objective) {
      best = std::move(r);
    }
  }
  if (!best) {
    MiocpSolution s;
    s.status = SolveStatus::Infeasible;
    s.nodes = solved;
    s.diagnostic = "no binary pattern admits a feasible schedule";
    return s;
  }
  best->nodes = solved;
  MiocpSolution s = extract(p, *best);
  s.status = SolveStatus::Optimal;
  return s;
}

// ---------------------------------------------------------------------------

ValidationReport validate_solution(const MiocpSpec& spec,
                                   const building::Vec2& x0,
                                   const MiocpSolution& s, double tol) {
  ValidationReport rep;
  const int n = spec.horizon;
  auto flag = [&](const char* fam, int k, double amount) {
    rep.ok = false;
    rep.violations.push_back({fam, k, amount});
  };
  if (static_cast<int>(s.p_kw.size()) != n ||
      static_cast<int>(s.delta.size()) != n) {
    flag("shape", 0, 0.0);
    return rep;
  }
  const CutFamily cuts = efficiency_cuts(spec);
  const double approx = cuts.max_gap_fraction;

  building::Vec2 x = x0;
  double obj = 0.0;
  for (int k = 0; k < n; ++k) {
    const int d = s.delta[k];
    const double p = s.p_kw[k];
    const double q = s.q_kw[k];
    const double ta = spec.disturbance[k].t_amb;
    if (d != 0 && d != 1) flag("binary", k, d);
    if (d == 0) {
      if (std::abs(p) > tol) flag("gated-range", k, p);
      if (std::abs(q) > tol) flag("heat-gating", k, q);
    } else {
      if (p < spec.p_min_kw - tol) flag("gated-range", k, spec.p_min_kw - p);
      if (p > spec.p_max_kw + tol) flag("gated-range", k, p - spec.p_max_kw);
      if (spec.delta_op == 1) {
        const double curve = curve_kw(spec, p, ta);
        if (q > curve + approx * std::abs(curve) + tol) {
          flag("efficiency", k, q - curve);
        }
        rep.max_curve_slack_kw = std::max(rep.max_curve_slack_kw, curve - q);
      } else {
        const double need = curve_kw(spec, q, ta);
        if (p < need - approx * std::abs(need) - tol) {
          flag("efficiency", k, need - p);
        }
        rep.max_curve_slack_kw = std::max(rep.max_curve_slack_kw, p - need);
      }
    }
    if (q < -tol) flag("heat-gating", k, -q);
    if (q > spec.heat_max_kw + tol) flag("heat-gating", k, q - spec.heat_max_kw);

    const double prev = k == 0 ? spec.p_prev_kw : s.p_kw[k - 1];
    if (p - prev > spec.dp_max_kw + tol) flag("rate", k, p - prev - spec.dp_max_kw);
    if (d == 1 && p - prev < spec.dp_min_kw - tol) {
      flag("rate", k, spec.dp_min_kw - (p - prev));
    }

    const double g = p - spec.p_pv_kw[k] + spec.p_app_kw[k];
    const double gp = s.g_plus_kw.size() == static_cast<std::size_t>(n)
                          ? s.g_plus_kw[k]
                          : std::max(0.0, g);
    if (std::abs(gp - std::max(0.0, g)) > tol) {
      flag("grid-balance", k, gp - std::max(0.0, g));
    }

    x = spec.model.step(x, q * 1000.0, spec.disturbance[k]);
    if (static_cast<int>(s.t_room.size()) == n &&
        (std::abs(s.t_room[k] - x[0]) > tol || std::abs(s.t_floor[k] - x[1]) > tol)) {
      flag("dynamics", k, s.t_room[k] - x[0]);
    }
    const double sl = static_cast<int>(s.slack.size()) == n ? s.slack[k] : 0.0;
    if (sl < -tol) flag("comfort-box", k, sl);
    if (x[0] > spec.t_max[k] + sl + tol) flag("comfort-box", k, x[0] - spec.t_max[k] - sl);
    if (x[0] < spec.t_min[k] - sl - tol) flag("comfort-box", k, spec.t_min[k] - sl - x[0]);
    const double need_slack =
        std::max({0.0, x[0] - spec.t_max[k], spec.t_min[k] - x[0]});
    if (need_slack > 1e-6) rep.slack_binding = true;

    obj += spec.sell[k] * g + (spec.buy[k] - spec.sell[k]) * std::max(0.0, g) +
           spec.c_cmf[k] * (x[0] - spec.t_ref[k]) * (x[0] - spec.t_ref[k]) +
           spec.c_slack * need_slack;
  }
  if (!downtime_feasible(s.delta, spec.min_down, spec.delta_prev, spec.off_steps)) {
    flag("down-time", 0, 1.0);
  }
  rep.objective = obj;
  if (std::abs(obj - s.objective) > 1e-4 * (1.0 + std::abs(obj))) {
    flag("objective", 0, s.objective - obj);
  }
  return rep;
}

std::vector<double> heat_budget(const MiocpSolution& s) {
  std::vector<double> out(s.q_kw.size());
  for (std::size_t k = 0; k < s.q_kw.size(); ++k) {
    out[k] = std::max(0.0, s.q_kw[k]) * 1000.0;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void put(std::ostringstream& os, const char* key, const std::vector<double>& v) {
  os << key;
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, " %.10g", x);
    os << buf;
  }
  os << '\n';
}

void put(std::ostringstream& os, const char* key, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  os << key << ' ' << buf << '\n';
}

}  // namespace

std::string to_text(const MiocpSpec& s) {
  std::ostringstream os;
  os << "miocp-spec 1\n";
  put(os, "horizon", s.horizon);
  put(os, "delta_op", s.delta_op);
  os << "fit " << efficiency::to_record(s.fit) << '\n';
  put(os, "buy", s.buy);
  put(os, "sell", s.sell);
  put(os, "p_app_kw", s.p_app_kw);
  put(os, "p_pv_kw", s.p_pv_kw);
  std::vector<double> ta, is, isd;
  for (const auto& d : s.disturbance) {
    ta.push_back(d.t_amb);
    is.push_back(d.i_sun);
    isd.push_back(d.i_sun_dir);
  }
  put(os, "t_amb", ta);
  put(os, "i_sun", is);
  put(os, "i_sun_dir", isd);
  put(os, "t_ref", s.t_ref);
  put(os, "c_cmf", s.c_cmf);
  put(os, "t_min", s.t_min);
  put(os, "t_max", s.t_max);
  put(os, "c_slack", s.c_slack);
  put(os, "p_range_kw", std::vector<double>{s.p_min_kw, s.p_max_kw});
  put(os, "rate_kw", std::vector<double>{s.dp_min_kw, s.dp_max_kw});
  put(os, "heat_max_kw", s.heat_max_kw);
  put(os, "min_down", s.min_down);
  put(os, "cuts", s.cuts);
  put(os, "initial", std::vector<double>{s.p_prev_kw, static_cast<double>(s.delta_prev),
                                         static_cast<double>(s.off_steps)});
  return os.str();
}

std::string to_text(const MiocpSolution& s) {
  std::ostringstream os;
  os << "miocp-solution 1\n";
  os << "status " << to_string(s.status) << '\n';
  put(os, "objective", s.objective);
  put(os, "gap", s.gap);
  put(os, "nodes", static_cast<double>(s.nodes));
  put(os, "p_kw", s.p_kw);
  std::vector<double> d(s.delta.begin(), s.delta.end());
  put(os, "delta", d);
  put(os, "q_kw", s.q_kw);
  put(os, "g_plus_kw", s.g_plus_kw);
  put(os, "slack", s.slack);
  put(os, "t_room", s.t_room);
  put(os, "t_floor", s.t_floor);
  return os.str();
}

}  // namespace hpmpc::mpc
