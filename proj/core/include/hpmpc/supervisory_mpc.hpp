#pragma once

#include "hpmpc/building_model.hpp"
#include "hpmpc/hp_efficiency.hpp"
#include "hpmpc/mixed_integer.hpp"

#include <string>
#include <vector>

namespace hpmpc::mpc {

/// Supervisory problem over N hourly steps. Internally the electric and
/// thermal powers are in kW, energies in kWh, money in EUR, so one step of
/// power equals one step of energy.
struct MiocpSpec {
  int horizon = 48;
  building::DiscreteStateSpace model;  ///< discretized at 3600 s
  efficiency::HpEfficiencyFit fit = efficiency::reference_fit();
  /// 1: heat bounded by the concave heat-from-power curve.
  /// 0: power bounded below by the convex power-from-heat curve.
  int delta_op = 1;

  std::vector<double> buy;        ///< EUR/kWh
  std::vector<double> sell;       ///< EUR/kWh, strictly below buy
  std::vector<double> p_app_kw;   ///< household load forecast
  std::vector<double> p_pv_kw;    ///< PV forecast
  std::vector<building::Disturbance> disturbance;
  /// Comfort reference and price for the state reached at the end of each
  /// step, and the soft box around it.
  std::vector<double> t_ref;
  std::vector<double> c_cmf;  ///< EUR/(K^2 h)
  std::vector<double> t_min;
  std::vector<double> t_max;
  double c_slack = 10.0;  ///< EUR/(K h)

  double p_min_kw = 0.2;
  double p_max_kw = 2.5;
  double dp_min_kw = -1.0;  ///< per step, while running
  double dp_max_kw = 1.0;
  double heat_max_kw = 4.0;  ///< emitter limit
  int min_down = 2;          ///< steps
  int cuts = 8;

  /// Conditions before step 0.
  double p_prev_kw = 0.0;
  int delta_prev = 0;
  int off_steps = 1000;  ///< steps since the compressor stopped

  /// Throws ConfigError with the offending field.
  void validate() const;
};

/// Layout of the decision vector: blocks of N for P, delta, Q, G+, S.
struct Layout {
  int n = 0;
  [[nodiscard]] int p(int k) const { return k; }
  [[nodiscard]] int delta(int k) const { return n + k; }
  [[nodiscard]] int q(int k) const { return 2 * n + k; }
  [[nodiscard]] int g_plus(int k) const { return 3 * n + k; }
  [[nodiscard]] int slack(int k) const { return 4 * n + k; }
  [[nodiscard]] int size() const { return 5 * n; }
};

/// One linear cut per step and base point, in kW.
struct CutFamily {
  std::vector<std::vector<efficiency::TangentCut>> per_step;
  double max_gap_fraction = 0.0;  ///< worst curve-to-envelope gap / curve value
};

struct MiocpProblem {
  mip::MixedIntegerProblem mip;
  Layout layout;
  int t0_hour = 0;
  double constant = 0.0;  ///< objective offset from PV and appliance terms
  std::vector<double> base_load_kw;  ///< APP - PV per step
  /// T_room after step k: free[k] + sum_j phi(k, j) * Q_j.
  numerics::Vector free_room;
  numerics::Matrix phi_room;
  numerics::Vector free_floor;
  numerics::Matrix phi_floor;
  CutFamily cuts;
  double q_max_kw = 0.0;
};

/// Rows enforcing the minimum down-time on delta, including the initial
/// condition. Appended to `qp` with family label "down-time".
void encode_downtime(numerics::QpProblem& qp, std::vector<std::string>& family,
                     const Layout& l, int min_down, int delta_prev,
                     int off_steps);

/// P_min * delta <= P <= P_max * delta.
void encode_gated_range(numerics::QpProblem& qp,
                        std::vector<std::string>& family, const Layout& l,
                        double p_min, double p_max);

/// Equally spaced tangent cuts on the efficiency curve for every step.
CutFamily efficiency_cuts(const MiocpSpec& spec);

/// Throws ConfigError when buy <= sell at any hour or bounds are inconsistent.
MiocpProblem build_miocp(const MiocpSpec& spec, const building::Vec2& x0,
                         int t0_hour);

enum class SolveStatus { Optimal, NodeLimit, Infeasible };
const char* to_string(SolveStatus s);

struct MiocpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> p_kw, q_kw, g_kw, g_plus_kw, slack;
  std::vector<int> delta;
  std::vector<double> t_room, t_floor;  ///< after each step
  double objective = 0.0;  ///< EUR, including the constant offset
  double regularized_objective = 0.0;
  double gap = 0.0;
  long nodes = 0;
  std::string diagnostic;
};

struct SolveOptions {
  double relative_gap = 1e-6;
  long node_limit = 20000;
  /// Optional previous schedule tried as an incumbent (already shifted).
  std::vector<int> hint;
};

MiocpSolution solve_branch_and_bound(const MiocpProblem& p,
                                     const SolveOptions& options = {});

/// Brute force over every down-time-feasible delta pattern (N <= max_n).
MiocpSolution enumerate_exact(const MiocpProblem& p, int max_n = 10);

/// True iff `delta` respects the down-time rule and initial condition.
bool downtime_feasible(const std::vector<int>& delta, int min_down,
                       int delta_prev, int off_steps);

struct Violation {
  std::string family;
  int step = 0;
  double amount = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  bool slack_binding = false;
  double max_curve_slack_kw = 0.0;  ///< how far Q sits below the true curve
  double objective = 0.0;           ///< recomputed from scratch
};

/// Re-simulates the dynamics and re-checks every constraint family using
/// only the spec, never the solver's rows.
ValidationReport validate_solution(const MiocpSpec& spec,
                                   const building::Vec2& x0,
                                   const MiocpSolution& s, double tol = 1e-5);

/// Heat budget in Wh per hour (nonnegative).
std::vector<double> heat_budget(const MiocpSolution& s);

std::string to_text(const MiocpSpec& spec);
std::string to_text(const MiocpSolution& s);

}  // namespace hpmpc::mpc
