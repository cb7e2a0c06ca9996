#include "hpmpc/state_estimation.hpp"

#include "hpmpc/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace hpmpc::estimation {

namespace {

void require_psd(const Mat2& p, const char* what) {
  if (!p.allFinite()) {
    throw DomainError(std::string(what) + " has non-finite entries");
  }
  if (std::abs(p(0, 1) - p(1, 0)) > 1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff())) {
    throw DomainError(std::string(what) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat2> eig(p);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw DomainError(std::string(what) + " is not positive semidefinite");
  }
}

Mat2 symmetrize(const Mat2& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

Observability observability_matrix(const building::ContinuousStateSpace& ss) {
  Observability o;
  o.matrix.row(0) = ss.c;
  o.matrix.row(1) = ss.c * ss.a;
  Eigen::JacobiSVD<Mat2> svd(o.matrix);
  const auto sv = svd.singularValues();
  o.rank = 0;
  for (int i = 0; i < 2; ++i) {
    if (sv[i] > 1e-10 * std::max(1.0, sv[0])) ++o.rank;
  }
  return o;
}

KalmanState kf_predict(const KalmanState& s, double q_hp_w,
                       const building::Disturbance& d,
                       const building::DiscreteStateSpace& model,
                       const NoiseConfig& noise) {
  require_psd(s.p, "state covariance");
  require_psd(noise.q_proc, "process covariance");
  KalmanState out;
  out.x = model.step(s.x, q_hp_w, d);
  out.p = symmetrize(model.a * s.p * model.a.transpose() + noise.q_proc);
  out.time_s = s.time_s + model.dt_s;
  return out;
}

double innovation(const KalmanState& prior, double y_room) {
  return y_room - prior.x[0];
}

KalmanState kf_update(const KalmanState& s, double y_room,
                      const NoiseConfig& noise) {
  if (!std::isfinite(y_room)) {
    throw DomainError("measurement is not finite");
  }
  if (!(noise.r_meas > 0.0)) {
    throw DomainError("measurement variance must be positive");
  }
  const double sgain = s.p(0, 0) + noise.r_meas;
  const Vec2 k = s.p.col(0) / sgain;
  Mat2 ikc = Mat2::Identity();
  ikc.col(0) -= k;
  KalmanState out = s;
  out.x = s.x + k * innovation(s, y_room);
  out.p = symmetrize(ikc * s.p * ikc.transpose() +
                     noise.r_meas * k * k.transpose());
  return out;
}

}  // namespace hpmpc::estimation
