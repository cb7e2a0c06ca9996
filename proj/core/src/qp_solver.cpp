// Dual active-set QP solver (Goldfarb & Idnani, Math. Programming 27, 1983).
//
// The working factorization keeps J = L^{-T} Q (L L^T = H + eps I) and the
// upper-triangular R with N_active = L Q [R; 0], so that the first iq columns
// of J span the active constraint normals in the metric of the Hessian.

#include "hpmpc/numerics.hpp"

#include "hpmpc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hpmpc::numerics {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWaiveTol = 1e-7;
}

struct ActiveSetQp::Shared {
  int n = 0;
  Matrix hessian;
  double eps = 0.0;
  Matrix j0;
  Vector gradient;
  Vector x0;
  std::vector<Row> rows;
  int num_eq = 0;
  int num_in = 0;
  std::vector<int> lower_row;  // per variable, row id or -1
  std::vector<int> upper_row;
};

ActiveSetQp::ActiveSetQp(const QpProblem& p, const QpOptions& options) {
  p.validate();
  auto shared = std::make_shared<Shared>();
  const int n = p.num_variables();
  shared->n = n;
  shared->hessian = p.hessian;
  shared->eps = options.regularization;
  shared->gradient = p.gradient;

  Matrix g = p.hessian;
  g.diagonal().array() += options.regularization;
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) {
    throw DomainError(
        "QP Hessian is not positive semidefinite (Cholesky of H + eps I "
        "failed)");
  }
  const Matrix lt = llt.matrixU();
  shared->j0 = lt.triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  shared->x0 = -(shared->j0 * (shared->j0.transpose() * p.gradient));

  auto push = [&](SparseRow a, double b, bool eq) {
    Row r;
    r.norm = a.norm();
    if (r.norm == 0.0) r.norm = 1.0;
    r.a = std::move(a);
    r.b = b;
    r.equality = eq;
    shared->rows.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < p.eq_rows.size(); ++i) {
    push(p.eq_rows[i], p.eq_rhs[i], true);
  }
  shared->num_eq = static_cast<int>(p.eq_rows.size());
  for (std::size_t i = 0; i < p.in_rows.size(); ++i) {
    if (p.in_sense[i] == Sense::GreaterEqual) {
      push(p.in_rows[i], p.in_rhs[i], false);
    } else {
      SparseRow neg = p.in_rows[i];
      for (double& v : neg.value) v = -v;
      push(std::move(neg), -p.in_rhs[i], false);
    }
  }
  shared->num_in = static_cast<int>(p.in_rows.size());
  shared->lower_row.assign(n, -1);
  shared->upper_row.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(p.lower[i])) {
      shared->lower_row[i] = static_cast<int>(shared->rows.size());
      push(SparseRow{{i, 1.0}}, p.lower[i], false);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(p.upper[i])) {
      shared->upper_row[i] = static_cast<int>(shared->rows.size());
      push(SparseRow{{i, -1.0}}, -p.upper[i], false);
    }
  }

  n_ = n;
  j_ = shared->j0;
  r_ = Matrix::Zero(n, n);
  x_ = shared->x0;
  u_.assign(n + 1, 0.0);
  active_.assign(n + 1, -1);
  is_active_.assign(shared->rows.size(), 0);
  const int m = static_cast<int>(shared->rows.size());
  max_iterations_ = options.max_iterations > 0 ? options.max_iterations
                                               : 50 * (n + m) + 100;
  feasibility_tol_ = options.feasibility_tol;
  shared_ = std::move(shared);
}

int ActiveSetQp::total_rows() const {
  return static_cast<int>(shared_->rows.size() + extra_rows_.size());
}

const ActiveSetQp::Row& ActiveSetQp::row(int id) const {
  const int base = static_cast<int>(shared_->rows.size());
  return id < base ? shared_->rows[id] : extra_rows_[id - base];
}

void ActiveSetQp::add_inequality(const SparseRow& a, Sense sense, double rhs) {
  Row r;
  r.a = a;
  r.b = rhs;
  if (sense == Sense::LessEqual) {
    for (double& v : r.a.value) v = -v;
    r.b = -rhs;
  }
  r.norm = r.a.norm();
  if (r.norm == 0.0) r.norm = 1.0;
  extra_rows_.push_back(std::move(r));
  is_active_.push_back(0);
  status_ = QpStatus::MaxIter;
}

void ActiveSetQp::add_lower_bound(int var, double value) {
  add_inequality(SparseRow{{var, 1.0}}, Sense::GreaterEqual, value);
}

void ActiveSetQp::add_upper_bound(int var, double value) {
  add_inequality(SparseRow{{var, 1.0}}, Sense::LessEqual, value);
}

void ActiveSetQp::compute_direction(const Row& rw, Vector& d, Vector& z,
                                    Vector& r) const {
  d.setZero(n_);
  for (std::size_t k = 0; k < rw.a.index.size(); ++k) {
    d.noalias() += rw.a.value[k] * j_.row(rw.a.index[k]).transpose();
  }
  const int free = n_ - iq_;
  if (free > 0) {
    z.noalias() = j_.rightCols(free) * d.tail(free);
  } else {
    z.setZero(n_);
  }
  if (iq_ > 0) {
    r = r_.topLeftCorner(iq_, iq_).triangularView<Eigen::Upper>().solve(
        d.head(iq_));
  } else {
    r.resize(0);
  }
}

bool ActiveSetQp::add_to_working_set(const Vector& d_in) {
  Vector d = d_in;
  for (int j = n_ - 1; j > iq_; --j) {
    const double a = d[j - 1];
    const double b = d[j];
    if (b == 0.0) continue;
    const double h = std::hypot(a, b);
    const double c = a / h;
    const double s = b / h;
    d[j - 1] = h;
    d[j] = 0.0;
    for (int k = 0; k < n_; ++k) {
      const double t1 = j_(k, j - 1);
      const double t2 = j_(k, j);
      j_(k, j - 1) = c * t1 + s * t2;
      j_(k, j) = -s * t1 + c * t2;
    }
  }
  if (std::abs(d[iq_]) <= 1e-14 * r_norm_) {
    return false;
  }
  r_.col(iq_).head(iq_ + 1) = d.head(iq_ + 1);
  r_norm_ = std::max(r_norm_, std::abs(d[iq_]));
  ++iq_;
  return true;
}

void ActiveSetQp::drop_from_working_set(int qq) {
  is_active_[active_[qq]] = 0;
  for (int i = qq; i < iq_ - 1; ++i) {
    active_[i] = active_[i + 1];
    u_[i] = u_[i + 1];
    r_.col(i).head(iq_) = r_.col(i + 1).head(iq_);
  }
  active_[iq_ - 1] = -1;
  u_[iq_ - 1] = 0.0;
  r_.col(iq_ - 1).setZero();
  --iq_;
  for (int j = qq; j < iq_; ++j) {
    const double a = r_(j, j);
    const double b = r_(j + 1, j);
    if (b == 0.0) continue;
    const double h = std::hypot(a, b);
    const double c = a / h;
    const double s = b / h;
    r_(j, j) = h;
    r_(j + 1, j) = 0.0;
    for (int k = j + 1; k < iq_; ++k) {
      const double t1 = r_(j, k);
      const double t2 = r_(j + 1, k);
      r_(j, k) = c * t1 + s * t2;
      r_(j + 1, k) = -s * t1 + c * t2;
    }
    for (int k = 0; k < n_; ++k) {
      const double t1 = j_(k, j);
      const double t2 = j_(k, j + 1);
      j_(k, j) = c * t1 + s * t2;
      j_(k, j + 1) = -s * t1 + c * t2;
    }
  }
}

QpStatus ActiveSetQp::solve() {
  Vector d(n_), z(n_), r;
  iterations_ = 0;

  if (!equalities_done_) {
    for (int e = 0; e < shared_->num_eq; ++e) {
      const Row& rw = shared_->rows[e];
      compute_direction(rw, d, z, r);
      const double zz = z.dot(rw.a.dense(n_));
      const double resid = rw.b - rw.a.dot(x_);
      if (std::abs(zz) <= 1e-14 * std::max(1.0, d.squaredNorm())) {
        if (std::abs(resid) <= feasibility_tol_ * rw.norm) continue;
        status_ = QpStatus::Infeasible;
        return status_;
      }
      const double t = resid / zz;
      x_.noalias() += t * z;
      for (int k = 0; k < iq_; ++k) u_[k] -= t * r[k];
      if (!add_to_working_set(d)) {
        status_ = QpStatus::Infeasible;
        return status_;
      }
      active_[iq_ - 1] = e;
      u_[iq_ - 1] = t;
      is_active_[e] = 1;
    }
    equalities_done_ = true;
  }

  const int m = total_rows();
  while (true) {
    if (++iterations_ > max_iterations_) {
      status_ = QpStatus::MaxIter;
      return status_;
    }
    // Most violated inactive inequality (scaled), lowest index on ties.
    int p = -1;
    double worst = -feasibility_tol_;
    for (int k = shared_->num_eq; k < m; ++k) {
      if (is_active_[k] == 1) continue;
      const Row& rw = row(k);
      const double s = (rw.a.dot(x_) - rw.b) / rw.norm;
      if (is_active_[k] == 2 && s >= -kWaiveTol) continue;
      if (s < worst) {
        worst = s;
        p = k;
      }
    }
    if (p < 0) {
      status_ = QpStatus::Optimal;
      return status_;
    }
    const Row& rp = row(p);
    double u_p = 0.0;

    while (true) {
      compute_direction(rp, d, z, r);
      double t1 = kInf;
      int drop = -1;
      for (int k = 0; k < iq_; ++k) {
        if (row(active_[k]).equality) continue;
        if (r[k] > 0.0) {
          const double ratio = u_[k] / r[k];
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      double zz = 0.0;
      for (std::size_t k = 0; k < rp.a.index.size(); ++k) {
        zz += rp.a.value[k] * z[rp.a.index[k]];
      }
      double t2 = kInf;
      if (zz > 1e-14 * std::max(1e-300, d.squaredNorm())) {
        t2 = (rp.b - rp.a.dot(x_)) / zz;
        if (t2 < 0.0) t2 = 0.0;
      }
      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) {
        // A row dependent on the working set, e.g. x <= 1 active while
        // x >= 1 arrives, that is violated only by rounding: accept it.
        if ((rp.a.dot(x_) - rp.b) / rp.norm >= -kWaiveTol) {
          is_active_[p] = 2;
          break;
        }
        status_ = QpStatus::Infeasible;
        return status_;
      }
      if (!std::isfinite(t2)) {
        for (int k = 0; k < iq_; ++k) u_[k] -= t * r[k];
        u_p += t;
        drop_from_working_set(drop);
        if (++iterations_ > max_iterations_) {
          status_ = QpStatus::MaxIter;
          return status_;
        }
        continue;
      }
      x_.noalias() += t * z;
      for (int k = 0; k < iq_; ++k) u_[k] -= t * r[k];
      u_p += t;
      if (t2 <= t1) {
        if (!add_to_working_set(d)) {
          // Numerically dependent on the working set; the step already
          // satisfies the row, so leave it inactive.
          break;
        }
        active_[iq_ - 1] = p;
        u_[iq_ - 1] = u_p;
        is_active_[p] = 1;
        break;
      }
      drop_from_working_set(drop);
      if (++iterations_ > max_iterations_) {
        status_ = QpStatus::MaxIter;
        return status_;
      }
    }
  }
}

double ActiveSetQp::regularized_objective() const {
  return 0.5 * x_.dot(shared_->hessian * x_) +
         0.5 * shared_->eps * x_.squaredNorm() + shared_->gradient.dot(x_);
}

double ActiveSetQp::objective() const {
  return 0.5 * x_.dot(shared_->hessian * x_) + shared_->gradient.dot(x_);
}

Vector ActiveSetQp::multipliers() const {
  Vector out = Vector::Zero(total_rows());
  for (int k = 0; k < iq_; ++k) out[active_[k]] = u_[k];
  return out;
}

// ---------------------------------------------------------------------------

QpResult solve_qp(const QpProblem& p, double tol, const QpOptions& options) {
  p.validate();
  const int n = p.num_variables();
  {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p.hessian,
                                              Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, p.hessian.cwiseAbs().maxCoeff());
    const double min_eig = eig.eigenvalues().minCoeff();
    if (min_eig < -1e-10 * scale) {
      throw DomainError("QP Hessian is not positive semidefinite (min eigenvalue " +
                        std::to_string(min_eig) + ")");
    }
  }

  QpResult result;
  const double eps = options.regularization;
  Vector x_prev = Vector::Zero(n);
  QpProblem shifted = p;
  Vector lambda;
  int total_iterations = 0;
  bool converged = false;
  double prox_gap = 0.0;

  for (int round = 0; round <= options.max_refinements; ++round) {
    shifted.gradient = p.gradient - eps * x_prev;
    ActiveSetQp qp(shifted, options);
    const QpStatus st = qp.solve();
    total_iterations += qp.iterations();
    if (st != QpStatus::Optimal) {
      result.status = st;
      result.x = qp.x();
      result.objective = p.objective(qp.x());
      result.iterations = total_iterations;
      result.diagnostic = st == QpStatus::Infeasible
                              ? "no point satisfies all constraints"
                              : "active-set iteration limit reached";
      return result;
    }
    result.x = qp.x();
    lambda = qp.multipliers();
    const double step = (result.x - x_prev).cwiseAbs().maxCoeff();
    prox_gap = 0.5 * eps * (result.x - x_prev).squaredNorm();
    x_prev = result.x;
    if (step <= 1e-12 * (1.0 + result.x.cwiseAbs().maxCoeff()) || eps == 0.0) {
      converged = true;
      break;
    }
  }

  // With a tiny eps the iterate is assembled from terms of size 1/eps, which
  // leaves rounding of that order on the active rows. Project back onto the
  // rows that are binding or nearly so (minimum-norm correction).
  if (eps > 0.0) {
    const int neq0 = static_cast<int>(p.eq_rows.size());
    const int nin0 = static_cast<int>(p.in_rows.size());
    std::vector<Vector> rows;
    std::vector<double> resid;
    auto consider = [&](const Vector& a, double b, bool always) {
      const double r = b - a.dot(result.x);
      if (always || std::abs(r) <= 1e-7 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
        rows.push_back(a);
        resid.push_back(r);
      }
    };
    for (int e = 0; e < neq0; ++e) consider(p.eq_rows[e].dense(n), p.eq_rhs[e], true);
    for (int i = 0; i < nin0; ++i) consider(p.in_rows[i].dense(n), p.in_rhs[i], false);
    for (int i = 0; i < n; ++i) {
      const Vector unit = Vector::Unit(n, i);
      if (std::isfinite(p.lower[i])) consider(unit, p.lower[i], false);
      if (std::isfinite(p.upper[i])) consider(unit, p.upper[i], false);
    }
    if (!rows.empty()) {
      Matrix a(static_cast<Eigen::Index>(rows.size()), n);
      Vector r(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        a.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
        r[static_cast<Eigen::Index>(k)] = resid[k];
      }
      const Vector dx = a.completeOrthogonalDecomposition().solve(r);
      if (dx.allFinite() &&
          dx.cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + result.x.cwiseAbs().maxCoeff())) {
        result.x += dx;
      }
    }
  }

  const Vector& x = result.x;
  result.iterations = total_iterations;
  result.objective = p.objective(x);

  // Map internal multipliers back to the user's rows.
  const int neq = static_cast<int>(p.eq_rows.size());
  const int nin = static_cast<int>(p.in_rows.size());
  result.eq_multipliers = lambda.head(neq);
  result.in_multipliers = lambda.segment(neq, nin);
  result.lower_multipliers = Vector::Zero(n);
  result.upper_multipliers = Vector::Zero(n);
  int id = neq + nin;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(p.lower[i])) result.lower_multipliers[i] = lambda[id++];
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(p.upper[i])) result.upper_multipliers[i] = lambda[id++];
  }

  // KKT residuals of the unregularized problem.
  Vector grad = p.hessian * x + p.gradient;
  KktResiduals kkt;
  double lagr_shift = 0.0;  // sum lambda_i (a_i x - b_i) in internal form
  for (int e = 0; e < neq; ++e) {
    const double l = result.eq_multipliers[e];
    const double s = p.eq_rows[e].dot(x) - p.eq_rhs[e];
    for (std::size_t k = 0; k < p.eq_rows[e].index.size(); ++k) {
      grad[p.eq_rows[e].index[k]] -= l * p.eq_rows[e].value[k];
    }
    kkt.primal = std::max(kkt.primal, std::abs(s));
    lagr_shift += l * s;
  }
  for (int i = 0; i < nin; ++i) {
    const double l = result.in_multipliers[i];
    const double sign = p.in_sense[i] == Sense::GreaterEqual ? 1.0 : -1.0;
    const double s = sign * (p.in_rows[i].dot(x) - p.in_rhs[i]);
    for (std::size_t k = 0; k < p.in_rows[i].index.size(); ++k) {
      grad[p.in_rows[i].index[k]] -= sign * l * p.in_rows[i].value[k];
    }
    kkt.primal = std::max(kkt.primal, -s);
    kkt.dual = std::max(kkt.dual, -l);
    kkt.complementarity = std::max(kkt.complementarity, std::abs(l * s));
    lagr_shift += l * s;
  }
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(p.lower[i])) {
      const double l = result.lower_multipliers[i];
      const double s = x[i] - p.lower[i];
      grad[i] -= l;
      kkt.primal = std::max(kkt.primal, -s);
      kkt.dual = std::max(kkt.dual, -l);
      kkt.complementarity = std::max(kkt.complementarity, std::abs(l * s));
      lagr_shift += l * s;
    }
    if (std::isfinite(p.upper[i])) {
      const double l = result.upper_multipliers[i];
      const double s = p.upper[i] - x[i];
      grad[i] += l;
      kkt.primal = std::max(kkt.primal, -s);
      kkt.dual = std::max(kkt.dual, -l);
      kkt.complementarity = std::max(kkt.complementarity, std::abs(l * s));
      lagr_shift += l * s;
    }
  }
  kkt.stationarity = grad.cwiseAbs().maxCoeff();
  result.kkt = kkt;
  // Weak duality for the last proximal subproblem gives
  // f(x) >= L(x, lambda) - prox term; with exact stationarity this is tight.
  result.dual_bound = result.objective - lagr_shift - prox_gap;

  if (!converged || kkt.max() > tol) {
    result.status = QpStatus::MaxIter;
    result.diagnostic = "KKT residual " + std::to_string(kkt.max()) +
                        " above tolerance after proximal refinement";
  } else {
    result.status = QpStatus::Optimal;
  }
  return result;
}

}  // namespace hpmpc::numerics
