#include "hpmpc/error.hpp"
#include "hpmpc/numerics.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace hpmpc::numerics;

namespace {

// Brute force: the strictly convex optimum is the minimizer over the affine
// set of its active rows, so the best feasible subset minimizer is optimal.
struct GeRow {
  Vector a;
  double b;
};

double brute_force(const Matrix& h, const Vector& g, const std::vector<GeRow>& rows,
                   Vector& best_x) {
  const int n = static_cast<int>(g.size());
  const int m = static_cast<int>(rows.size());
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> act;
    for (int i = 0; i < m; ++i) {
      if (mask & (1 << i)) act.push_back(i);
    }
    if (static_cast<int>(act.size()) > n) continue;
    const int k = static_cast<int>(act.size());
    Matrix kkt = Matrix::Zero(n + k, n + k);
    Vector rhs(n + k);
    kkt.topLeftCorner(n, n) = h;
    rhs.head(n) = -g;
    for (int j = 0; j < k; ++j) {
      kkt.block(0, n + j, n, 1) = rows[act[j]].a;
      kkt.block(n + j, 0, 1, n) = rows[act[j]].a.transpose();
      rhs[n + j] = rows[act[j]].b;
    }
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (lu.rank() < n + k) continue;
    const Vector sol = lu.solve(rhs);
    const Vector x = sol.head(n);
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.a.dot(x) >= r.b - 1e-9;
    if (!ok) continue;
    const double f = 0.5 * x.dot(h * x) + g.dot(x);
    if (f < best) {
      best = f;
      best_x = x;
    }
  }
  return best;
}

}  // namespace

TEST(SolveQp, UnconstrainedStationaryPoint) {
  QpProblem p(2);
  p.hessian = Matrix::Identity(2, 2);
  p.gradient << -1.0, -2.0;
  const QpResult r = solve_qp(p);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 1.0, 1e-7);
  EXPECT_NEAR(r.x[1], 2.0, 1e-7);
}

TEST(SolveQp, ActiveLowerBound) {
  QpProblem p(1);
  p.hessian(0, 0) = 2.0;  // x^2
  p.lower[0] = 1.0;
  const QpResult r = solve_qp(p);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 1.0, 1e-8);
  EXPECT_NEAR(r.objective, 1.0, 1e-8);
  EXPECT_NEAR(r.lower_multipliers[0], 2.0, 1e-6);
}

TEST(SolveQp, EmptyFeasibleSetIsInfeasible) {
  QpProblem p(1);
  p.hessian(0, 0) = 1.0;
  p.add_inequality(SparseRow{{0, 1.0}}, Sense::GreaterEqual, 1.0);
  p.add_inequality(SparseRow{{0, 1.0}}, Sense::LessEqual, 0.0);
  EXPECT_EQ(solve_qp(p).status, QpStatus::Infeasible);
}

TEST(SolveQp, LinearProgramWithZeroHessian) {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  -> (1.6, 1.2)
  QpProblem p(2);
  p.gradient << -1.0, -1.0;
  p.lower.setZero();
  p.add_inequality(SparseRow{{0, 1.0}, {1, 2.0}}, Sense::LessEqual, 4.0);
  p.add_inequality(SparseRow{{0, 3.0}, {1, 1.0}}, Sense::LessEqual, 6.0);
  const QpResult r = solve_qp(p, 1e-9);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 1.6, 1e-6);
  EXPECT_NEAR(r.x[1], 1.2, 1e-6);
  EXPECT_LT(r.kkt.max(), 1e-6);
}

TEST(SolveQp, EqualityConstrained) {
  // min x^2 + y^2 s.t. x + y = 2
  QpProblem p(2);
  p.hessian = 2.0 * Matrix::Identity(2, 2);
  p.add_equality(SparseRow{{0, 1.0}, {1, 1.0}}, 2.0);
  const QpResult r = solve_qp(p);
  ASSERT_EQ(r.status, QpStatus::Optimal);
  EXPECT_NEAR(r.x[0], 1.0, 1e-7);
  EXPECT_NEAR(r.eq_multipliers[0] * r.eq_multipliers[0], 4.0, 1e-5);
}

TEST(SolveQp, RandomInstancesMatchBruteForce) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 3;
    Matrix l(dim, dim);
    for (int i = 0; i < dim * dim; ++i) l(i / dim, i % dim) = n(rng);
    const Matrix h = l * l.transpose() + 0.1 * Matrix::Identity(dim, dim);
    Vector g(dim);
    for (int i = 0; i < dim; ++i) g[i] = 3.0 * n(rng);

    QpProblem p(dim);
    p.hessian = h;
    p.gradient = g;
    std::vector<GeRow> rows;
    for (int i = 0; i < dim; ++i) {
      p.lower[i] = -1.0;
      p.upper[i] = 1.0;
      Vector e = Vector::Zero(dim);
      e[i] = 1.0;
      rows.push_back({e, -1.0});
      rows.push_back({-e, -1.0});
    }
    for (int c = 0; c < 3; ++c) {
      Vector a(dim);
      for (int i = 0; i < dim; ++i) a[i] = n(rng);
      const double b = -0.5 + 0.3 * n(rng);
      p.add_inequality(SparseRow::from_dense(a), Sense::GreaterEqual, b);
      rows.push_back({a, b});
    }
    Vector bx;
    const double best = brute_force(h, g, rows, bx);
    const QpResult r = solve_qp(p, 1e-9);
    if (!std::isfinite(best)) {
      EXPECT_EQ(r.status, QpStatus::Infeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(r.status, QpStatus::Optimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, best, 1e-6 * (1.0 + std::abs(best))) << "trial " << trial;
    EXPECT_LT((r.x - bx).norm(), 1e-5) << "trial " << trial;
  }
}

TEST(ActiveSetQp, WarmStartAgreesWithColdSolve) {
  QpProblem p(2);
  p.hessian = Matrix::Identity(2, 2);
  p.gradient << -3.0, -3.0;
  ActiveSetQp qp(p);
  ASSERT_EQ(qp.solve(), QpStatus::Optimal);
  EXPECT_NEAR(qp.x()[0], 3.0, 1e-7);

  ActiveSetQp copy = qp;
  copy.add_inequality(SparseRow{{0, 1.0}, {1, 1.0}}, Sense::LessEqual, 2.0);
  ASSERT_EQ(copy.solve(), QpStatus::Optimal);
  EXPECT_NEAR(copy.x()[0], 1.0, 1e-7);
  EXPECT_NEAR(copy.x()[1], 1.0, 1e-7);
  // The parent is untouched.
  EXPECT_NEAR(qp.x()[0], 3.0, 1e-7);

  copy.add_upper_bound(0, 0.0);
  ASSERT_EQ(copy.solve(), QpStatus::Optimal);
  EXPECT_NEAR(copy.x()[1], 2.0, 1e-7);
}

TEST(ActiveSetQp, RedundantFixingIsNotInfeasible) {
  // x <= 1 active, then x >= 1 arrives: the point is still feasible.
  QpProblem p(1);
  p.gradient << -1.0;
  p.lower[0] = 0.0;
  p.upper[0] = 1.0;
  ActiveSetQp qp(p);
  ASSERT_EQ(qp.solve(), QpStatus::Optimal);
  qp.add_lower_bound(0, 1.0);
  ASSERT_EQ(qp.solve(), QpStatus::Optimal);
  EXPECT_NEAR(qp.x()[0], 1.0, 1e-9);
}

TEST(QpProblem, ValidateRejectsAsymmetricHessian) {
  QpProblem p(2);
  p.hessian(0, 1) = 1.0;
  EXPECT_THROW(p.validate(), hpmpc::DomainError);
  QpProblem q(2);
  q.hessian(0, 0) = -1.0;
  EXPECT_THROW(solve_qp(q), hpmpc::DomainError);
}
