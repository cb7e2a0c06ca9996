#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace hpmpc::efficiency {

enum class Direction { HeatFromPower, PowerFromHeat };

const char* to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Carnot-factor efficiency model.
///
/// HeatFromPower:  Q = k + (k0 + k1 x + k2 x^2) * COPc(T_F, T_a),  x = P [kW]
/// PowerFromHeat:  P = k + (k0 + k1 y + k2 y^2) / COPc(T_F, T_a),  y = Q [kW]
///
/// The polynomial argument is in kW, the result in W. With this convention a
/// 1 kW compressor lands near COP 4.2 for the reference coefficients, which
/// is the only plausibility anchor available for the unit choice.
struct HpEfficiencyFit {
  double k = 0.0;   ///< W
  double k0 = 0.0;  ///< W
  double k1 = 0.0;  ///< W/kW
  double k2 = 0.0;  ///< W/kW^2, < 0 heat-from-power, > 0 power-from-heat
  double t_forward = 41.0;  ///< fixed forward temperature [degC]
  Direction direction = Direction::HeatFromPower;
  std::string date;
  double r2 = std::numeric_limits<double>::quiet_NaN();

  /// Checks the curvature sign for the direction. Throws DomainError.
  void validate() const;
};

/// Coefficients fitted on a 7 kW air-to-water unit in late January
/// (T_F = 41 degC). Used as the controller default and, scaled, as the plant.
HpEfficiencyFit reference_fit();

/// (T_F + 273.15) / (T_F - T_a). Throws DomainError unless T_F > T_a.
double carnot_cop(double t_forward_c, double t_amb_c);

double heat_from_power(double p_w, double t_amb_c, const HpEfficiencyFit& fit);
double power_from_heat(double q_w, double t_amb_c, const HpEfficiencyFit& fit);

/// heat_from_power(P) / P. Throws DomainError for P <= 0.
double cop(double p_w, double t_amb_c, const HpEfficiencyFit& fit);

struct OperatingSample {
  double p_w = 0.0;
  double q_w = 0.0;
  double t_amb_c = 0.0;
  double time_s = 0.0;
};

struct EfficiencyFitOptions {
  bool robust = false;
  std::uint64_t seed = 20230127;
  int ransac_iterations = 200;
  int ransac_subset = 10;
  double t_forward_min = 25.0;
  double t_forward_max = 55.0;
  std::size_t min_samples = 50;
  double min_ambient_span = 5.0;
};

struct EfficiencyFitReport {
  HpEfficiencyFit fit;
  double r2 = 0.0;
  std::size_t samples_used = 0;
  std::size_t inliers = 0;
  /// Samples where the fitted COP exceeds the Carnot ratio (flagged only).
  std::size_t carnot_violations = 0;
  std::string notes;
};

/// Least squares in the linear basis {1, c, c x, c x^2} (or the reciprocal
/// basis for PowerFromHeat) with a line search over T_F. Candidates whose
/// k2 has the wrong sign are discarded, never flipped.
///
/// Throws DataError for too few on-state samples or too narrow an ambient
/// span, FitError for collinear data or when no T_F yields a valid sign.
EfficiencyFitReport fit_efficiency(std::span<const OperatingSample> samples,
                                   Direction direction,
                                   const EfficiencyFitOptions& options = {});

/// Linear outer bound touching the curve at `at_w`.
/// HeatFromPower: Q <= slope * P + intercept for every P.
/// PowerFromHeat: P >= slope * Q + intercept for every Q.
struct TangentCut {
  double slope = 0.0;
  double intercept = 0.0;
  Direction direction = Direction::HeatFromPower;

  [[nodiscard]] double eval(double w) const { return slope * w + intercept; }
};

TangentCut tangent_cut(const HpEfficiencyFit& fit, double at_w,
                       double t_amb_c);

/// One-line text record: date,k,k0,k1,k2,t_forward,direction,r2
std::string to_record(const HpEfficiencyFit& fit);
HpEfficiencyFit from_record(const std::string& line);

}  // namespace hpmpc::efficiency
