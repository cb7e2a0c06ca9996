#pragma once

#include <utility>
#include <vector>

namespace hpmpc::valves {

/// Central flow as a saturating polynomial of the summed nominal circuit
/// contributions: q = c0 + c1 qbar + c2 qbar^2, qbar = sum v_i qbar_i.
struct FlowModel {
  std::vector<double> q_nominal;  ///< kg/s per circuit
  double c0 = 0.0;
  double c1 = 1.0;
  double c2 = -0.723;
  double q_min = 0.05;  ///< kg/s

  void validate() const;
  [[nodiscard]] int circuits() const { return static_cast<int>(q_nominal.size()); }
};

/// Floor areas [m^2] of the default 11-circuit house.
std::vector<double> default_room_areas();

/// Nominal contributions proportional to room area, scaled so all circuits
/// open give about 0.3 kg/s.
FlowModel default_flow_model();

double flow_from_config(const std::vector<int>& v, const FlowModel& fm);

/// a * (T_room - T_ref): cold rooms get negative prices so opening pays.
std::vector<double> comfort_prices(const std::vector<double>& t_room,
                                   const std::vector<double>& t_ref, double a);

/// Auxiliary binaries y_ij = v_i AND v_j for i < j.
struct ProductPlan {
  int circuits = 0;
  int auxiliaries = 0;
  int total_binaries = 0;
  std::vector<std::pair<int, int>> pairs;
};

ProductPlan linearize_products(int m);

struct ValveProblem {
  double q_ref = 0.0;  ///< kg/s
  std::vector<double> prices;
  FlowModel flow;
  double c_q = 1e4;  ///< (kg/s)^-2
  int max_close = 3;
  std::vector<int> forced_open{0};
  std::vector<int> v_prev;  ///< empty means all open

  void validate() const;
};

struct ValveDecision {
  std::vector<int> v;
  double flow = 0.0;
  double objective = 0.0;
  long evaluated = 0;
};

/// Objective c_q (q_ref - q)^2 + prices . v for a configuration.
double valve_objective(const ValveProblem& p, const std::vector<int>& v);

/// Exact scan of all 2^M configurations. Ties go to the smallest code
/// sum v_i 2^i. Throws DomainError when nothing is feasible, naming the
/// constraint that empties the set.
ValveDecision enumerate_valves(const ValveProblem& p);

/// The same problem with the flow square linearized by auxiliary products,
/// solved as a mixed-integer QP.
ValveDecision solve_valves_mld(const ValveProblem& p);

/// Production path: enumeration for M <= 15, the MLD formulation above.
ValveDecision select_valves(const ValveProblem& p);

}  // namespace hpmpc::valves
