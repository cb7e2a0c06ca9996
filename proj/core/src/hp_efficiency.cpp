#include "hpmpc/hp_efficiency.hpp"

#include "hpmpc/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace hpmpc::efficiency {

const char* to_string(Direction d) {
  return d == Direction::HeatFromPower ? "HeatFromPower" : "PowerFromHeat";
}

Direction direction_from_string(const std::string& s) {
  if (s == "HeatFromPower") return Direction::HeatFromPower;
  if (s == "PowerFromHeat") return Direction::PowerFromHeat;
  throw DomainError("unknown efficiency direction '" + s + "'");
}

void HpEfficiencyFit::validate() const {
  for (double v : {k, k0, k1, k2, t_forward}) {
    if (!std::isfinite(v)) throw DomainError("efficiency fit has non-finite coefficient");
  }
  if (direction == Direction::HeatFromPower && !(k2 < 0.0)) {
    throw DomainError("heat-from-power fit needs k2 < 0 (concave curve)");
  }
  if (direction == Direction::PowerFromHeat && !(k2 > 0.0)) {
    throw DomainError("power-from-heat fit needs k2 > 0 (convex curve)");
  }
}

HpEfficiencyFit reference_fit() {
  HpEfficiencyFit f;
  f.k = -793.31;
  f.k0 = 105.79;
  f.k1 = 509.07;
  f.k2 = -46.854;
  f.t_forward = 41.0;
  f.direction = Direction::HeatFromPower;
  f.date = "2023-01-27";
  return f;
}

double carnot_cop(double t_forward_c, double t_amb_c) {
  if (!std::isfinite(t_forward_c) || !std::isfinite(t_amb_c)) {
    throw DomainError("carnot_cop: temperatures must be finite");
  }
  if (!(t_forward_c > t_amb_c)) {
    throw DomainError("carnot_cop: forward temperature must exceed ambient");
  }
  return (t_forward_c + 273.15) / (t_forward_c - t_amb_c);
}

double heat_from_power(double p_w, double t_amb_c, const HpEfficiencyFit& f) {
  if (f.direction != Direction::HeatFromPower) {
    throw DomainError("heat_from_power called with a power-from-heat fit");
  }
  const double x = p_w / 1000.0;
  return f.k + (f.k0 + f.k1 * x + f.k2 * x * x) * carnot_cop(f.t_forward, t_amb_c);
}

double power_from_heat(double q_w, double t_amb_c, const HpEfficiencyFit& f) {
  if (f.direction != Direction::PowerFromHeat) {
    throw DomainError("power_from_heat called with a heat-from-power fit");
  }
  const double y = q_w / 1000.0;
  return f.k + (f.k0 + f.k1 * y + f.k2 * y * y) / carnot_cop(f.t_forward, t_amb_c);
}

double cop(double p_w, double t_amb_c, const HpEfficiencyFit& f) {
  if (!(p_w > 0.0)) throw DomainError("cop: power must be positive");
  return heat_from_power(p_w, t_amb_c, f) / p_w;
}

// ---------------------------------------------------------------------------

namespace {

struct Design {
  Eigen::MatrixXd basis;
  Eigen::VectorXd target;
};

// Rows restricted to `idx`. Returns false if T_F does not exceed every T_a.
bool build_design(std::span<const OperatingSample> s,
                  const std::vector<std::size_t>& idx, Direction dir,
                  double t_forward, Design& d) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  d.basis.resize(n, 4);
  d.target.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const OperatingSample& o = s[idx[r]];
    if (!(t_forward > o.t_amb_c + 0.5)) return false;
    const double c = (t_forward + 273.15) / (t_forward - o.t_amb_c);
    if (dir == Direction::HeatFromPower) {
      const double x = o.p_w / 1000.0;
      d.basis.row(r) << 1.0, c, c * x, c * x * x;
      d.target[r] = o.q_w;
    } else {
      const double y = o.q_w / 1000.0;
      d.basis.row(r) << 1.0, 1.0 / c, y / c, y * y / c;
      d.target[r] = o.p_w;
    }
  }
  return true;
}

struct Candidate {
  bool ok = false;
  bool collinear = false;
  Eigen::Vector4d coef = Eigen::Vector4d::Zero();
  double sse = std::numeric_limits<double>::infinity();
};

Candidate solve_at(std::span<const OperatingSample> s,
                   const std::vector<std::size_t>& idx, Direction dir,
                   double t_forward) {
  Candidate c;
  Design d;
  if (!build_design(s, idx, dir, t_forward, d)) return c;
  // Column scaling keeps the rank test meaningful across very different units.
  Eigen::Vector4d scale;
  for (int j = 0; j < 4; ++j) scale[j] = std::max(d.basis.col(j).norm(), 1e-300);
  const Eigen::MatrixXd scaled = d.basis * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) {
    c.collinear = true;
    return c;
  }
  c.coef = qr.solve(d.target).cwiseQuotient(scale);
  const bool sign_ok =
      dir == Direction::HeatFromPower ? c.coef[3] < 0.0 : c.coef[3] > 0.0;
  if (!sign_ok) return c;
  c.ok = true;
  c.sse = (d.basis * c.coef - d.target).squaredNorm();
  return c;
}

struct Best {
  Candidate cand;
  double t_forward = 0.0;
  bool any_collinear = false;
  bool all_collinear = true;
};

Best search_forward(std::span<const OperatingSample> s,
                    const std::vector<std::size_t>& idx, Direction dir,
                    double lo, double hi) {
  Best best;
  const double step = 0.5;
  for (double tf = lo; tf <= hi + 1e-9; tf += step) {
    Candidate c = solve_at(s, idx, dir, tf);
    best.any_collinear = best.any_collinear || c.collinear;
    best.all_collinear = best.all_collinear && c.collinear;
    if (c.ok && c.sse < best.cand.sse) {
      best.cand = c;
      best.t_forward = tf;
    }
  }
  if (!best.cand.ok) return best;
  // Golden-section refinement around the best grid point.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(lo, best.t_forward - step);
  double b = std::min(hi, best.t_forward + step);
  auto f = [&](double tf) { return solve_at(s, idx, dir, tf); };
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  Candidate f1 = f(x1);
  Candidate f2 = f(x2);
  for (int it = 0; it < 60 && b - a > 1e-9; ++it) {
    if (f1.sse < f2.sse) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  for (const auto& [x, c] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (c.ok && c.sse < best.cand.sse) {
      best.cand = c;
      best.t_forward = x;
    }
  }
  return best;
}

double evaluate(const OperatingSample& o, Direction dir,
                const Eigen::Vector4d& coef, double tf) {
  const double c = (tf + 273.15) / (tf - o.t_amb_c);
  if (dir == Direction::HeatFromPower) {
    const double x = o.p_w / 1000.0;
    return coef[0] + (coef[1] + coef[2] * x + coef[3] * x * x) * c;
  }
  const double y = o.q_w / 1000.0;
  return coef[0] + (coef[1] + coef[2] * y + coef[3] * y * y) / c;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

EfficiencyFitReport fit_efficiency(std::span<const OperatingSample> samples,
                                   Direction dir,
                                   const EfficiencyFitOptions& opt) {
  std::vector<std::size_t> on;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& o = samples[i];
    if (!std::isfinite(o.p_w) || !std::isfinite(o.q_w) ||
        !std::isfinite(o.t_amb_c)) {
      continue;
    }
    if (o.p_w > 0.0 && o.q_w > 0.0) on.push_back(i);
  }
  if (on.size() < opt.min_samples) {
    throw DataError("efficiency fit needs at least " +
                    std::to_string(opt.min_samples) + " on-state samples, got " +
                    std::to_string(on.size()));
  }
  double ta_min = samples[on.front()].t_amb_c;
  double ta_max = ta_min;
  for (std::size_t i : on) {
    ta_min = std::min(ta_min, samples[i].t_amb_c);
    ta_max = std::max(ta_max, samples[i].t_amb_c);
  }
  if (ta_max - ta_min < 1e-9) {
    throw FitError(
        "efficiency basis is collinear: every sample has the same ambient "
        "temperature, so the Carnot factor does not vary");
  }
  if (ta_max - ta_min < opt.min_ambient_span) {
    throw DataError("efficiency fit needs an ambient span of at least " +
                    std::to_string(opt.min_ambient_span) + " K");
  }
  const double lo = std::max(opt.t_forward_min, std::ceil(ta_max + 1.0));
  const double hi = opt.t_forward_max;
  if (lo > hi) {
    throw DataError("ambient temperatures exceed the admissible forward range");
  }

  std::vector<std::size_t> use = on;
  std::size_t inliers = on.size();
  if (opt.robust) {
    std::mt19937_64 rng(opt.seed);
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<double> best_abs;
    const std::size_t m = std::min<std::size_t>(
        on.size(), std::max(opt.ransac_subset, 5));
    std::vector<std::size_t> pool = on;
    std::vector<double> abs_res(on.size());
    for (int it = 0; it < opt.ransac_iterations; ++it) {
      // Partial Fisher-Yates draw of m distinct samples.
      for (std::size_t j = 0; j < m; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
        std::swap(pool[j], pool[pick(rng)]);
      }
      std::vector<std::size_t> subset(pool.begin(),
                                      pool.begin() + static_cast<std::ptrdiff_t>(m));
      std::sort(subset.begin(), subset.end());
      const Best b = search_forward(samples, subset, dir, lo, hi);
      if (!b.cand.ok) continue;
      for (std::size_t r = 0; r < on.size(); ++r) {
        const auto& o = samples[on[r]];
        const double target = dir == Direction::HeatFromPower ? o.q_w : o.p_w;
        abs_res[r] = std::abs(evaluate(o, dir, b.cand.coef, b.t_forward) - target);
      }
      const double score = median(abs_res);
      if (score < best_score) {
        best_score = score;
        best_abs = abs_res;
      }
    }
    if (!best_abs.empty()) {
      const double thr = 2.0 * best_score;
      std::vector<std::size_t> keep;
      for (std::size_t r = 0; r < on.size(); ++r) {
        if (best_abs[r] <= thr) keep.push_back(on[r]);
      }
      if (keep.size() >= 5) use = std::move(keep);
      inliers = use.size();
    }
  }

  const Best best = search_forward(samples, use, dir, lo, hi);
  if (!best.cand.ok) {
    if (best.all_collinear) {
      throw FitError("efficiency basis is collinear for every forward temperature");
    }
    throw FitError(std::string("no forward temperature in range yields k2 ") +
                   (dir == Direction::HeatFromPower ? "< 0" : "> 0") +
                   "; the data does not support the required curvature");
  }

  EfficiencyFitReport rep;
  rep.fit.k = best.cand.coef[0];
  rep.fit.k0 = best.cand.coef[1];
  rep.fit.k1 = best.cand.coef[2];
  rep.fit.k2 = best.cand.coef[3];
  rep.fit.t_forward = best.t_forward;
  rep.fit.direction = dir;
  rep.samples_used = use.size();
  rep.inliers = inliers;

  double mean = 0.0;
  for (std::size_t i : use) {
    mean += dir == Direction::HeatFromPower ? samples[i].q_w : samples[i].p_w;
  }
  mean /= static_cast<double>(use.size());
  double sst = 0.0;
  for (std::size_t i : use) {
    const double t = dir == Direction::HeatFromPower ? samples[i].q_w : samples[i].p_w;
    sst += (t - mean) * (t - mean);
  }
  rep.r2 = sst > 0.0 ? 1.0 - best.cand.sse / sst : 1.0;
  rep.fit.r2 = rep.r2;

  for (std::size_t i : use) {
    const auto& o = samples[i];
    const double cc = carnot_cop(rep.fit.t_forward, o.t_amb_c);
    double model_cop;
    if (dir == Direction::HeatFromPower) {
      model_cop = heat_from_power(o.p_w, o.t_amb_c, rep.fit) / o.p_w;
    } else {
      model_cop = o.q_w / power_from_heat(o.q_w, o.t_amb_c, rep.fit);
    }
    if (model_cop > cc) ++rep.carnot_violations;
  }
  std::ostringstream notes;
  notes << "T_F=" << rep.fit.t_forward << " R2=" << rep.r2 << " used "
        << rep.samples_used << " of " << on.size() << " on-state samples";
  if (rep.carnot_violations > 0) {
    notes << "; " << rep.carnot_violations
          << " samples above the Carnot ratio (poor extrapolation region)";
  }
  rep.notes = notes.str();
  return rep;
}

TangentCut tangent_cut(const HpEfficiencyFit& f, double at_w, double t_amb_c) {
  if (!std::isfinite(at_w) || at_w < 0.0) {
    throw DomainError("tangent point must be a nonnegative finite power/heat");
  }
  const double c = carnot_cop(f.t_forward, t_amb_c);
  const double u = at_w / 1000.0;
  TangentCut cut;
  cut.direction = f.direction;
  if (f.direction == Direction::HeatFromPower) {
    cut.slope = (f.k1 + 2.0 * f.k2 * u) * c / 1000.0;
    cut.intercept = heat_from_power(at_w, t_amb_c, f) - cut.slope * at_w;
  } else {
    cut.slope = (f.k1 + 2.0 * f.k2 * u) / c / 1000.0;
    cut.intercept = power_from_heat(at_w, t_amb_c, f) - cut.slope * at_w;
  }
  return cut;
}

std::string to_record(const HpEfficiencyFit& f) {
  std::ostringstream os;
  os.precision(17);
  os << (f.date.empty() ? "-" : f.date) << ',' << f.k << ',' << f.k0 << ','
     << f.k1 << ',' << f.k2 << ',' << f.t_forward << ',' << to_string(f.direction)
     << ',';
  if (std::isfinite(f.r2)) {
    os << f.r2;
  } else {
    os << "nan";
  }
  return os.str();
}

HpEfficiencyFit from_record(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (cells.size() != 8) {
    throw DataError("efficiency record needs 8 fields, got " +
                    std::to_string(cells.size()));
  }
  auto num = [&](std::size_t i) {
    try {
      std::size_t used = 0;
      const double v = std::stod(cells[i], &used);
      if (used != cells[i].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw DataError("efficiency record field " + std::to_string(i + 1) +
                      " is not a number: '" + cells[i] + "'");
    }
  };
  HpEfficiencyFit f;
  f.date = cells[0] == "-" ? "" : cells[0];
  f.k = num(1);
  f.k0 = num(2);
  f.k1 = num(3);
  f.k2 = num(4);
  f.t_forward = num(5);
  f.direction = direction_from_string(cells[6]);
  f.r2 = cells[7] == "nan" ? std::numeric_limits<double>::quiet_NaN() : num(7);
  f.validate();
  return f;
}

}  // namespace hpmpc::efficiency
