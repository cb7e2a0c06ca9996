#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hpmpc::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws DomainError if any entry of `m` is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// Matrix exponential by scaling and squaring with a diagonal (6,6) Padé
/// approximant. Intended for the small (2..8 dimensional) systems used here.
Matrix expm(const Matrix& a);

struct DiscreteModel {
  Matrix ad;  ///< exp(Ac dt)
  Matrix bd;  ///< control input map
  Matrix ed;  ///< disturbance input map
  double dt_s = 0.0;
};

/// Exact zero-order-hold discretization.
///
/// The input maps come from one exponential of the augmented block matrix
/// [[Ac, Bc, Ec], [0, 0, 0]] * dt, so piecewise-constant inputs reproduce the
/// continuous trajectory exactly at the sample instants. `ec` may have zero
/// columns.
DiscreteModel zoh_discretize(const Matrix& ac, const Matrix& bc,
                             const Matrix& ec, double dt_s);

// ---------------------------------------------------------------------------
// Convex quadratic programming
// ---------------------------------------------------------------------------

/// Sparse linear form a^T x.
struct SparseRow {
  std::vector<int> index;
  std::vector<double> value;

  SparseRow() = default;
  SparseRow(std::initializer_list<std::pair<int, double>> terms);

  void add(int i, double v);
  [[nodiscard]] double dot(const Vector& x) const;
  [[nodiscard]] double norm() const;
  [[nodiscard]] Vector dense(int n) const;
  static SparseRow from_dense(const Vector& row);
};

enum class Sense { LessEqual, GreaterEqual };

/// minimize 0.5 x^T H x + g^T x
/// subject to  Aeq x = beq,  Ain x (<= | >=) bin,  lower <= x <= upper.
///
/// Infinite bounds are allowed. H must be symmetric positive semidefinite.
struct QpProblem {
  Matrix hessian;
  Vector gradient;

  std::vector<SparseRow> eq_rows;
  std::vector<double> eq_rhs;

  std::vector<SparseRow> in_rows;
  std::vector<double> in_rhs;
  std::vector<Sense> in_sense;

  Vector lower;
  Vector upper;

  QpProblem() = default;
  /// Unconstrained problem of size n with zero cost and infinite bounds.
  explicit QpProblem(int n);

  [[nodiscard]] int num_variables() const {
    return static_cast<int>(gradient.size());
  }

  void add_equality(SparseRow row, double rhs);
  void add_inequality(SparseRow row, Sense sense, double rhs);

  [[nodiscard]] double objective(const Vector& x) const;

  /// Dimension, finiteness and symmetry checks. Throws DomainError.
  void validate() const;
};

enum class QpStatus { Optimal, Infeasible, MaxIter };

[[nodiscard]] const char* to_string(QpStatus s);

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  [[nodiscard]] double max() const;
};

struct QpResult {
  QpStatus status = QpStatus::MaxIter;
  Vector x;
  double objective = 0.0;
  /// Lower bound at the returned iterate from the Lagrange multipliers.
  double dual_bound = 0.0;
  /// Multipliers for equality rows, inequality rows (>= 0) and bounds
  /// (lower/upper, both >= 0).
  Vector eq_multipliers;
  Vector in_multipliers;
  Vector lower_multipliers;
  Vector upper_multipliers;
  KktResiduals kkt;
  int iterations = 0;
  std::string diagnostic;
};

struct QpOptions {
  /// Proximal regularization added to H so the dual active-set method sees a
  /// strictly convex problem. The proximal-point refinement drives the answer
  /// back to the unregularized optimum.
  double regularization = 1e-8;
  int max_refinements = 60;
  int max_iterations = 0;  ///< 0 selects 50 * (n + m)
  double feasibility_tol = 1e-9;
};

/// Solves a convex QP with a dual active-set method (Goldfarb-Idnani) and
/// proximal refinement. Throws DomainError on dimension mismatch or when H is
/// not positive semidefinite.
[[nodiscard]] QpResult solve_qp(const QpProblem& p, double tol = 1e-6,
                                const QpOptions& options = {});

/// Warm-startable dual active-set solver on the regularized problem
/// min 0.5 x^T (H + eps I) x + g^T x.
///
/// The object is a value: copying it snapshots the factorization and working
/// set, which is how branch and bound explores both children of a node from
/// the parent's solution. Constraints added after a solve keep the current
/// iterate dual feasible, so the next solve() only repairs the new rows.
class ActiveSetQp {
 public:
  explicit ActiveSetQp(const QpProblem& p, const QpOptions& options = {});

  /// Adds `row . x >= rhs` (or <=) to the working problem.
  void add_inequality(const SparseRow& row, Sense sense, double rhs);
  /// Shortcut for a bound change on one variable.
  void add_lower_bound(int var, double value);
  void add_upper_bound(int var, double value);

  QpStatus solve();

  [[nodiscard]] const Vector& x() const { return x_; }
  [[nodiscard]] QpStatus status() const { return status_; }
  /// Regularized objective 0.5 x^T (H + eps I) x + g^T x at the iterate.
  [[nodiscard]] double regularized_objective() const;
  /// Unregularized objective at the iterate.
  [[nodiscard]] double objective() const;
  [[nodiscard]] int iterations() const { return iterations_; }
  [[nodiscard]] int num_variables() const { return n_; }

  /// Multiplier of every constraint row in internal order: equalities, then
  /// original inequalities, then lower bounds, upper bounds, added rows.
  [[nodiscard]] Vector multipliers() const;

 private:
  struct Row {
    SparseRow a;    // constraint a.x >= b (or == b for equalities)
    double b = 0.0;
    double norm = 1.0;
    bool equality = false;
  };
  struct Shared;

  bool add_to_working_set(const Vector& d);
  void drop_from_working_set(int position);
  void compute_direction(const Row& row, Vector& d, Vector& z, Vector& r) const;

  std::shared_ptr<const Shared> shared_;
  std::vector<Row> extra_rows_;
  int n_ = 0;
  Matrix j_;
  Matrix r_;
  double r_norm_ = 1.0;
  int iq_ = 0;
  std::vector<int> active_;  // row ids, size iq_ (+1 scratch)
  std::vector<double> u_;
  std::vector<char> is_active_;
  Vector x_;
  QpStatus status_ = QpStatus::MaxIter;
  bool equalities_done_ = false;
  int iterations_ = 0;
  int max_iterations_ = 0;
  double feasibility_tol_ = 1e-9;

  [[nodiscard]] int total_rows() const;
  [[nodiscard]] const Row& row(int id) const;
};

}  // namespace hpmpc::numerics
