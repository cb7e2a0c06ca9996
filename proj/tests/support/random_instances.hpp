#pragma once

// Random supervisory problems shared by the unit and acceptance suites.

#include "hpmpc/building_model.hpp"
#include "hpmpc/supervisory_mpc.hpp"

#include <random>

namespace hpmpc::testkit {

inline efficiency::HpEfficiencyFit convex_power_fit() {
  efficiency::HpEfficiencyFit f;
  f.k = 150.0;
  f.k0 = 300.0;
  f.k1 = 2200.0;
  f.k2 = 60.0;
  f.t_forward = 38.0;
  f.direction = efficiency::Direction::PowerFromHeat;
  return f;
}

struct RandomMiocp {
  mpc::MiocpSpec spec;
  building::Vec2 x0;
  int t0_hour = 0;
};

inline RandomMiocp random_miocp(std::mt19937_64& rng, int n, int min_down) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomMiocp r;
  mpc::MiocpSpec& s = r.spec;
  s.horizon = n;
  s.min_down = min_down;
  s.model = building::discretize(
      building::assemble_state_space({3.5e6, 92e6, 2300.0, 80.0, 2.5, 1.0}), 3600.0);
  if (u(rng) < 0.25) {
    s.delta_op = 0;
    s.fit = convex_power_fit();
  }
  for (int k = 0; k < n; ++k) {
    const double spot = 0.02 + 0.3 * u(rng);
    s.sell.push_back(spot);
    s.buy.push_back(1.25 * (spot + 0.03 + 0.25 * u(rng)));
    s.p_app_kw.push_back(0.2 + 0.4 * u(rng));
    s.p_pv_kw.push_back(u(rng) < 0.5 ? 0.0 : 3.0 * u(rng));
    s.disturbance.push_back(
        building::make_disturbance(-5.0 + 15.0 * u(rng), 400.0 * u(rng), u(rng)));
    const double ref = 21.0 + u(rng);
    s.t_ref.push_back(ref);
    s.c_cmf.push_back(0.05 + 0.5 * u(rng));
    s.t_min.push_back(ref - 1.5);
    s.t_max.push_back(ref + 2.5);
  }
  s.delta_prev = u(rng) < 0.4 ? 1 : 0;
  s.p_prev_kw = s.delta_prev ? s.p_min_kw + (s.p_max_kw - s.p_min_kw) * u(rng) : 0.0;
  s.off_steps = s.delta_prev ? 0 : static_cast<int>(5 * u(rng));
  r.x0 = building::Vec2(19.5 + 3.5 * u(rng), 22.0 + 6.0 * u(rng));
  r.t0_hour = static_cast<int>(24 * u(rng)) % 24;
  return r;
}

}  // namespace hpmpc::testkit
