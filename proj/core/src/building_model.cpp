#include "hpmpc/building_model.hpp"

#include "hpmpc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hpmpc::building {

void ThermalParams::validate() const {
  const std::array<std::pair<const char*, double>, 6> fields{{
      {"c_room", c_room},
      {"c_floor", c_floor},
      {"u_room", u_room},
      {"u_amb", u_amb},
      {"g_sun", g_sun},
      {"g_sun_dir", g_sun_dir},
  }};
  for (const auto& [name, v] : fields) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string("thermal parameter ") + name +
                        " must be strictly positive");
    }
  }
}

Disturbance make_disturbance(double t_amb, double i_dir, double cloud) {
  if (!(cloud >= 0.0 && cloud <= 1.0)) {
    throw DomainError("cloud fraction must lie in [0, 1]");
  }
  if (!(i_dir >= 0.0)) {
    throw DomainError("direct irradiance must be nonnegative");
  }
  return Disturbance{t_amb, i_dir * (1.0 - cloud), i_dir};
}

ContinuousStateSpace assemble_state_space(const ThermalParams& p) {
  p.validate();
  ContinuousStateSpace ss;
  ss.a << -(p.u_room + p.u_amb) / p.c_room, p.u_room / p.c_room,
      p.u_room / p.c_floor, -p.u_room / p.c_floor;
  ss.b << 0.0, 1.0 / p.c_floor;
  ss.e << p.u_amb / p.c_room, p.g_sun / p.c_room, p.g_sun_dir / p.c_room,  //
      0.0, 0.0, 0.0;
  ss.c << 1.0, 0.0;
  return ss;
}

DiscreteStateSpace discretize(const ContinuousStateSpace& ss, double dt_s) {
  const numerics::DiscreteModel dm =
      numerics::zoh_discretize(ss.a, ss.b, ss.e, dt_s);
  DiscreteStateSpace out;
  out.a = dm.ad;
  out.b = dm.bd;
  out.e = dm.ed;
  out.c = ss.c;
  out.dt_s = dt_s;
  return out;
}

Vec2 steady_state(const ThermalParams& p, double q_hp_w, const Disturbance& d) {
  const ContinuousStateSpace ss = assemble_state_space(p);
  return -ss.a.partialPivLu().solve(ss.b * q_hp_w + ss.e * d.vec());
}

double weighted_room_temperature(const ZoneSnapshot& z) {
  if (z.area_m2.empty()) {
    throw DomainError("zone snapshot has no rooms");
  }
  if (z.area_m2.size() != z.temperature_c.size()) {
    throw DomainError("zone snapshot area and temperature counts differ");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < z.area_m2.size(); ++j) {
    if (!(z.area_m2[j] > 0.0)) {
      throw DomainError("room area must be strictly positive");
    }
    num += z.area_m2[j] * z.temperature_c[j];
    den += z.area_m2[j];
  }
  return num / den;
}

double solar_gain(double i_dir, double cloud, double g_sun, double g_sun_dir) {
  if (!(cloud >= 0.0 && cloud <= 1.0)) {
    throw DomainError("cloud fraction must lie in [0, 1]");
  }
  if (!(i_dir >= 0.0)) {
    throw DomainError("direct irradiance must be nonnegative");
  }
  return g_sun * i_dir * (1.0 - cloud) + g_sun_dir * i_dir;
}

// ---------------------------------------------------------------------------

namespace {

using Segment = std::vector<ThermalSample>;

bool missing(const ThermalSample& s) {
  return !std::isfinite(s.t_room) || !std::isfinite(s.q_hp_w) ||
         !std::isfinite(s.t_amb) || !std::isfinite(s.i_dir) ||
         !std::isfinite(s.cloud);
}

ThermalSample lerp(const ThermalSample& a, const ThermalSample& b, double w) {
  auto mix = [w](double x, double y) { return x + w * (y - x); };
  return {mix(a.t_room, b.t_room), mix(a.q_hp_w, b.q_hp_w),
          mix(a.t_amb, b.t_amb), mix(a.i_dir, b.i_dir), mix(a.cloud, b.cloud)};
}

struct Prepared {
  std::vector<Segment> segments;
  int interpolated = 0;
};

Prepared split_and_fill(std::span<const ThermalSample> series,
                        int max_gap) {
  Prepared out;
  Segment current;
  std::size_t i = 0;
  while (i < series.size()) {
    if (!missing(series[i])) {
      current.push_back(series[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < series.size() && missing(series[j])) ++j;
    const std::size_t gap = j - i;
    if (!current.empty() && j < series.size() &&
        gap <= static_cast<std::size_t>(max_gap)) {
      const ThermalSample a = current.back();
      const ThermalSample b = series[j];
      for (std::size_t k = 1; k <= gap; ++k) {
        current.push_back(lerp(a, b, static_cast<double>(k) / (gap + 1)));
      }
      out.interpolated += static_cast<int>(gap);
    } else if (!current.empty()) {
      out.segments.push_back(std::move(current));
      current.clear();
    }
    i = j;
  }
  if (!current.empty()) out.segments.push_back(std::move(current));
  return out;
}

double stddev(const std::vector<Segment>& segs, double ThermalSample::*field) {
  double sum = 0.0;
  double sum2 = 0.0;
  std::size_t n = 0;
  for (const auto& s : segs) {
    for (const auto& x : s) {
      sum += x.*field;
      sum2 += (x.*field) * (x.*field);
      ++n;
    }
  }
  if (n == 0) return 0.0;
  const double mean = sum / n;
  return std::sqrt(std::max(0.0, sum2 / n - mean * mean));
}

ThermalParams from_log(const Eigen::Matrix<double, 6, 1>& th) {
  return {std::exp(th[0]), std::exp(th[1]), std::exp(th[2]),
          std::exp(th[3]), std::exp(th[4]), std::exp(th[5])};
}

Eigen::Matrix<double, 6, 1> to_log(const ThermalParams& p) {
  Eigen::Matrix<double, 6, 1> th;
  th << std::log(p.c_room), std::log(p.c_floor), std::log(p.u_room),
      std::log(p.u_amb), std::log(p.g_sun), std::log(p.g_sun_dir);
  return th;
}

// Kalman predictor tuning used inside the identification loop.
constexpr double kProcRoom = 1e-4;
constexpr double kProcFloor = 1e-5;
constexpr double kMeas = 1e-2;

/// Residuals (prediction - measurement) for every start time past burn-in
/// and every horizon. Also accumulates per-horizon squared errors when
/// `per_horizon` is not null.
Eigen::VectorXd residuals(const ThermalParams& p,
                          const std::vector<Segment>& segs,
                          const FitOptions& opt,
                          std::vector<std::pair<double, int>>* per_horizon) {
  const DiscreteStateSpace m = discretize(assemble_state_space(p), opt.dt_s);
  const int max_h = *std::max_element(opt.horizons.begin(), opt.horizons.end());
  std::size_t count = 0;
  for (const auto& s : segs) {
    const int len = static_cast<int>(s.size());
    for (int t = opt.burn_in; t < len; ++t) {
      for (int h : opt.horizons) {
        if (t + h < len) ++count;
      }
    }
  }
  Eigen::VectorXd r(count);
  if (per_horizon) per_horizon->assign(opt.horizons.size(), {0.0, 0});
  std::size_t idx = 0;
  Mat2 q = Mat2::Zero();
  q(0, 0) = kProcRoom;
  q(1, 1) = kProcFloor;

  for (const auto& s : segs) {
    const int len = static_cast<int>(s.size());
    std::vector<Disturbance> dist(len);
    for (int t = 0; t < len; ++t) {
      dist[t] = Disturbance{s[t].t_amb, s[t].i_dir * (1.0 - s[t].cloud),
                            s[t].i_dir};
    }
    // Initialize with the floor at room temperature and a loose covariance.
    Vec2 x(s[0].t_room, s[0].t_room);
    Mat2 cov = Mat2::Identity();
    cov(1, 1) = 25.0;
    for (int t = 0; t < len; ++t) {
      // Measurement update at t.
      const double innov = s[t].t_room - x[0];
      const double sgain = cov(0, 0) + kMeas;
      const Vec2 k = cov.col(0) / sgain;
      x += k * innov;
      const Mat2 ikc = Mat2::Identity() - k * Eigen::RowVector2d(1.0, 0.0);
      cov = ikc * cov * ikc.transpose() + kMeas * k * k.transpose();

      if (t >= opt.burn_in) {
        Vec2 xp = x;
        for (int step = 1; step <= max_h && t + step < len; ++step) {
          xp = m.step(xp, s[t + step - 1].q_hp_w, dist[t + step - 1]);
          for (std::size_t hi = 0; hi < opt.horizons.size(); ++hi) {
            if (opt.horizons[hi] == step) {
              const double e = xp[0] - s[t + step].t_room;
              r[idx++] = e;
              if (per_horizon) {
                (*per_horizon)[hi].first += e * e;
                (*per_horizon)[hi].second += 1;
              }
            }
          }
        }
      }
      // Time update to t + 1.
      x = m.step(x, s[t].q_hp_w, dist[t]);
      cov = m.a * cov * m.a.transpose() + q;
    }
  }
  return r;
}

}  // namespace

ThermalParams initial_guess(const FitOptions& o) {
  const double area = o.floor_area_m2;
  const double air_capacity =
      area * o.ceiling_height_m * 1.2 * 1005.0;  // rho * cp of air
  // 20 kWh/(m^2 yr) spread over roughly 72 000 heating degree hours.
  const double u_amb = 20.0 * area * 1000.0 / 72000.0;
  return ThermalParams{
      5.0 * air_capacity,  // furniture factor
      0.4e6 * area,        // concrete slab
      7.0 * area,          // floor surface conductance
      u_amb,
      0.01 * area,
      0.01 * area,
  };
}

FitReport fit_thermal_params(std::span<const ThermalSample> series,
                             const FitOptions& opt) {
  if (opt.horizons.empty()) {
    throw DomainError("fit needs at least one prediction horizon");
  }
  const double needed = 48.0 * 3600.0 / opt.dt_s;
  if (static_cast<double>(series.size()) < needed) {
    throw DataError("thermal fit needs at least 48 h of samples (got " +
                    std::to_string(series.size()) + " samples)");
  }
  Prepared prep = split_and_fill(series, opt.max_interpolated_gap);
  const int max_h = *std::max_element(opt.horizons.begin(), opt.horizons.end());
  const int min_len = opt.burn_in + max_h + 1;
  std::size_t usable = 0;
  std::vector<Segment> segs;
  for (auto& s : prep.segments) {
    if (static_cast<int>(s.size()) >= min_len) {
      usable += s.size();
      segs.push_back(std::move(s));
    }
  }
  if (segs.empty() || static_cast<double>(usable) < needed) {
    throw DataError("thermal fit: fewer than 48 h of usable samples after "
                    "splitting at gaps");
  }

  auto constant = [&](double ThermalSample::*f) {
    return stddev(segs, f) <= 1e-9;
  };
  if (constant(&ThermalSample::q_hp_w) && constant(&ThermalSample::t_amb) &&
      constant(&ThermalSample::i_dir)) {
    throw FitError(
        "degenerate excitation: heat input, ambient temperature and "
        "irradiance are all constant, parameters are unidentifiable");
  }

  FitReport report;
  report.segments = static_cast<int>(segs.size());
  report.interpolated_samples = prep.interpolated;
  report.initial_guess = initial_guess(opt);

  using Theta = Eigen::Matrix<double, 6, 1>;
  Theta th = to_log(report.initial_guess);
  auto eval = [&](const Theta& t, Eigen::VectorXd& r) {
    r = residuals(from_log(t), segs, opt, nullptr);
    const double c = 0.5 * r.squaredNorm();
    return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd r;
  double cost = eval(th, r);
  double mu = 1e-3;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    Eigen::MatrixXd jac(r.size(), 6);
    for (int k = 0; k < 6; ++k) {
      Theta tp = th;
      const double h = 1e-6;
      tp[k] += h;
      Eigen::VectorXd rp;
      eval(tp, rp);
      jac.col(k) = (rp - r) / h;
    }
    const Eigen::Matrix<double, 6, 6> jtj = jac.transpose() * jac;
    const Theta g = jac.transpose() * r;
    if (g.cwiseAbs().maxCoeff() < 1e-16 || cost < 1e-22) break;

    bool accepted = false;
    double gain = 0.0;
    Theta delta = Theta::Zero();
    while (mu < 1e12) {
      Eigen::Matrix<double, 6, 6> lhs = jtj;
      for (int k = 0; k < 6; ++k) {
        lhs(k, k) += mu * std::max(jtj(k, k), 1e-12);
      }
      delta = lhs.ldlt().solve(-g);
      const double big = delta.cwiseAbs().maxCoeff();
      if (big > 2.0) delta *= 2.0 / big;
      Eigen::VectorXd rn;
      const double cn = eval(th + delta, rn);
      if (cn < cost) {
        gain = cost - cn;
        th += delta;
        r = std::move(rn);
        cost = cn;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) break;
    if (gain <= 1e-15 * cost || delta.cwiseAbs().maxCoeff() < 1e-10) break;
  }

  report.params = from_log(th);
  report.iterations = it;
  report.final_cost = cost;
  report.params.validate();

  std::vector<std::pair<double, int>> per;
  residuals(report.params, segs, opt, &per);
  for (std::size_t i = 0; i < opt.horizons.size(); ++i) {
    report.rmse.push_back(
        {opt.horizons[i],
         per[i].second > 0 ? std::sqrt(per[i].first / per[i].second) : 0.0});
  }
  std::ostringstream notes;
  notes << "initial guess from floor area " << opt.floor_area_m2
        << " m2; segments " << report.segments << "; interpolated samples "
        << report.interpolated_samples;
  report.notes = notes.str();
  return report;
}

std::vector<HorizonRmse> prediction_rmse(const ThermalParams& params,
                                         std::span<const ThermalSample> series,
                                         const FitOptions& opt) {
  params.validate();
  Prepared prep = split_and_fill(series, opt.max_interpolated_gap);
  const int max_h = *std::max_element(opt.horizons.begin(), opt.horizons.end());
  std::vector<Segment> segs;
  for (auto& s : prep.segments) {
    if (static_cast<int>(s.size()) >= opt.burn_in + max_h + 1) {
      segs.push_back(std::move(s));
    }
  }
  if (segs.empty()) throw DataError("no segment long enough for validation");
  std::vector<std::pair<double, int>> per;
  residuals(params, segs, opt, &per);
  std::vector<HorizonRmse> out;
  for (std::size_t i = 0; i < opt.horizons.size(); ++i) {
    out.push_back({opt.horizons[i], per[i].second > 0
                                        ? std::sqrt(per[i].first / per[i].second)
                                        : 0.0});
  }
  return out;
}

}  // namespace hpmpc::building
