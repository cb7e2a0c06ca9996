#include "hpmpc/numerics.hpp"

#include "hpmpc/error.hpp"

#include <cmath>
#include <string>

namespace hpmpc::numerics {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + " has non-finite entries");
  }
}

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DomainError("expm: matrix must be square");
  }
  require_finite(a, "expm argument");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;

  // Diagonal Pade(6,6) coefficients.
  static constexpr double kPade[7] = {1.0,
                                      1.0 / 2.0,
                                      5.0 / 44.0,
                                      1.0 / 66.0,
                                      1.0 / 792.0,
                                      1.0 / 15840.0,
                                      1.0 / 665280.0};

  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Matrix x = a / std::ldexp(1.0, squarings);

  const Matrix ident = Matrix::Identity(n, n);
  Matrix power = ident;
  Matrix num = ident;
  Matrix den = ident;
  for (int k = 1; k <= 6; ++k) {
    power = power * x;
    num += kPade[k] * power;
    den += ((k % 2 == 0) ? 1.0 : -1.0) * kPade[k] * power;
  }
  Matrix result = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  return result;
}

DiscreteModel zoh_discretize(const Matrix& ac, const Matrix& bc,
                             const Matrix& ec, double dt_s) {
  if (ac.rows() != ac.cols()) {
    throw DomainError("zoh_discretize: A must be square");
  }
  if (!(dt_s > 0.0) || !std::isfinite(dt_s)) {
    throw DomainError("zoh_discretize: dt must be positive and finite");
  }
  const Eigen::Index n = ac.rows();
  if (bc.rows() != n || (ec.size() > 0 && ec.rows() != n)) {
    throw DomainError("zoh_discretize: B and E must have as many rows as A");
  }
  require_finite(ac, "A");
  require_finite(bc, "B");
  require_finite(ec, "E");

  const Eigen::Index m = bc.cols();
  const Eigen::Index p = ec.size() > 0 ? ec.cols() : 0;
  Matrix aug = Matrix::Zero(n + m + p, n + m + p);
  aug.topLeftCorner(n, n) = ac * dt_s;
  aug.block(0, n, n, m) = bc * dt_s;
  if (p > 0) aug.block(0, n + m, n, p) = ec * dt_s;

  const Matrix phi = expm(aug);
  DiscreteModel out;
  out.ad = phi.topLeftCorner(n, n);
  out.bd = phi.block(0, n, n, m);
  out.ed = p > 0 ? Matrix(phi.block(0, n + m, n, p)) : Matrix(n, 0);
  out.dt_s = dt_s;
  return out;
}

// ---------------------------------------------------------------------------

SparseRow::SparseRow(std::initializer_list<std::pair<int, double>> terms) {
  for (const auto& [i, v] : terms) add(i, v);
}

void SparseRow::add(int i, double v) {
  if (v == 0.0) return;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] == i) {
      value[k] += v;
      return;
    }
  }
  index.push_back(i);
  value.push_back(v);
}

double SparseRow::dot(const Vector& x) const {
  double s = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * x[index[k]];
  return s;
}

double SparseRow::norm() const {
  double s = 0.0;
  for (double v : value) s += v * v;
  return std::sqrt(s);
}

Vector SparseRow::dense(int n) const {
  Vector out = Vector::Zero(n);
  for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] += value[k];
  return out;
}

SparseRow SparseRow::from_dense(const Vector& row) {
  SparseRow out;
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (row[i] != 0.0) {
      out.index.push_back(static_cast<int>(i));
      out.value.push_back(row[i]);
    }
  }
  return out;
}

QpProblem::QpProblem(int n)
    : hessian(Matrix::Zero(n, n)),
      gradient(Vector::Zero(n)),
      lower(Vector::Constant(n, -std::numeric_limits<double>::infinity())),
      upper(Vector::Constant(n, std::numeric_limits<double>::infinity())) {}

void QpProblem::add_equality(SparseRow row, double rhs) {
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(rhs);
}

void QpProblem::add_inequality(SparseRow row, Sense sense, double rhs) {
  in_rows.push_back(std::move(row));
  in_rhs.push_back(rhs);
  in_sense.push_back(sense);
}

double QpProblem::objective(const Vector& x) const {
  return 0.5 * x.dot(hessian * x) + gradient.dot(x);
}

void QpProblem::validate() const {
  const int n = num_variables();
  if (n <= 0) throw DomainError("QP has no variables");
  if (hessian.rows() != n || hessian.cols() != n) {
    throw DomainError("QP Hessian dimension does not match gradient");
  }
  if (lower.size() != n || upper.size() != n) {
    throw DomainError("QP bound vectors do not match the variable count");
  }
  if (eq_rows.size() != eq_rhs.size() || in_rows.size() != in_rhs.size() ||
      in_rows.size() != in_sense.size()) {
    throw DomainError("QP constraint rows and right-hand sides differ in count");
  }
  require_finite(hessian, "QP Hessian");
  require_finite(gradient, "QP gradient");
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("QP Hessian is not symmetric");
  }
  auto check_rows = [n](const std::vector<SparseRow>& rows,
                        const std::vector<double>& rhs, const char* what) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].index.size() != rows[r].value.size()) {
        throw DomainError(std::string(what) + " row is malformed");
      }
      for (std::size_t k = 0; k < rows[r].index.size(); ++k) {
        if (rows[r].index[k] < 0 || rows[r].index[k] >= n) {
          throw DomainError(std::string(what) + " row references variable " +
                            std::to_string(rows[r].index[k]) +
                            " outside the problem");
        }
        if (!std::isfinite(rows[r].value[k])) {
          throw DomainError(std::string(what) + " row has non-finite entry");
        }
      }
      if (!std::isfinite(rhs[r])) {
        throw DomainError(std::string(what) + " right-hand side not finite");
      }
    }
  };
  check_rows(eq_rows, eq_rhs, "equality");
  check_rows(in_rows, in_rhs, "inequality");
  for (int i = 0; i < n; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i])) {
      throw DomainError("QP bound is NaN");
    }
  }
}

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::Optimal:
      return "Optimal";
    case QpStatus::Infeasible:
      return "Infeasible";
    case QpStatus::MaxIter:
      return "MaxIter";
  }
  return "?";
}

double KktResiduals::max() const {
  return std::max({stationarity, primal, dual, complementarity});
}

}  // namespace hpmpc::numerics
