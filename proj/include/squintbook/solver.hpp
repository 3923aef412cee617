// SPDX-License-Identifier: Apache-2.0
//
// First-order solver for the relaxed per-codebook subproblems: minimize a
// PSD quadratic ||L X||_F^2 over the elementwise unit-modulus box, subject to
// one coverage constraint per subcarrier. The K-term objective is collapsed
// into a single factor L via eigendecomposition of the accumulated Gram
// matrix, so per-iteration cost does not grow with K.

#ifndef SQUINTBOOK_SOLVER_HPP
#define SQUINTBOOK_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "squintbook/channel.hpp"
#include "squintbook/quantize.hpp"

namespace squintbook {

/// Factor L with ||L X||_F^2 = sum_k ||fixed^* H[k] X||_F^2 (or the
/// transposed-side analogue), built once per subproblem.
struct QuadraticForm {
  CMatrix L;  // same column dimension as the optimization variable's rows

  double objective(const CMatrix& X) const { return (L * X).squaredNorm(); }
  CMatrix gradient(const CMatrix& X) const {
    return 2.0 * (L.adjoint() * (L * X));
  }
};

enum class FormSide { ForF, ForW };

/// Accumulates the Gram matrix sum_k H^*[k] fixed fixed^* H[k] (F side) or
/// sum_k H[k] fixed fixed^* H^*[k] (W side), symmetrizes, clamps negative
/// eigenvalues at zero, and returns L = Lambda^{1/2} Q^*.
inline QuadraticForm build_quadratic_form(const ChannelTensor& channel,
                                          const CMatrix& fixed, FormSide side) {
  const int n = side == FormSide::ForF ? channel.tx_size() : channel.rx_size();
  const int other = side == FormSide::ForF ? channel.rx_size() : channel.tx_size();
  if (fixed.rows() != other)
    throw std::invalid_argument("build_quadratic_form: fixed matrix row mismatch");

  CMatrix gram = CMatrix::Zero(n, n);
  for (const auto& H : channel.entries) {
    const CMatrix v = side == FormSide::ForF
                          ? CMatrix(H.adjoint() * fixed)
                          : CMatrix(H * fixed);
    gram.noalias() += v * v.adjoint();
  }
  gram = 0.5 * (gram + gram.adjoint().eval());
  if (!gram.allFinite())
    throw std::invalid_argument("build_quadratic_form: non-finite Gram matrix");

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("build_quadratic_form: eigendecomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  QuadraticForm form;
  form.L = lam.cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint();
  return form;
}

/// Per-subcarrier coverage constraints
/// ||N 1 - diag(A[k]^* X)||^2 <= sigma2 N^2 M.
struct CoverageConstraintSet {
  std::vector<CMatrix> steering;  // per-subcarrier N x M matrices
  double target_gain = 0.0;       // N
  double variance_budget = 0.0;   // sigma^2, linear
  int num_beams = 0;              // M

  double rhs() const {
    return variance_budget * target_gain * target_gain * num_beams;
  }
  /// Natural constraint scale, the value of the lhs at X = 0.
  double scale() const { return target_gain * target_gain * num_beams; }

  /// Residual vector e_k = N 1 - diag(A[k]^* X).
  CVector residual(int k, const CMatrix& X) const {
    const CMatrix& A = steering[k];
    CVector e(num_beams);
    for (int j = 0; j < num_beams; ++j)
      e(j) = target_gain - A.col(j).dot(X.col(j));
    return e;
  }
  double value(int k, const CMatrix& X) const {
    return residual(k, X).squaredNorm();
  }
  /// Gradient of value(k, .) in the 2 Re<G, dX> convention.
  CMatrix gradient(int k, const CMatrix& X, const CVector& e) const {
    const CMatrix& A = steering[k];
    CMatrix g(X.rows(), X.cols());
    for (int j = 0; j < num_beams; ++j) g.col(j) = -2.0 * e(j) * A.col(j);
    return g;
  }
};

struct SolverConfig {
  int max_outer_iters = 60;
  int max_inner_iters = 4000;
  double penalty_init = 1.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e12;
  double feasibility_tol = 1e-6;   // relative to the constraint scale N^2 M
  double objective_rel_tol = 1e-8;
  double kkt_tol = 1e-5;
  double inner_grad_tol = 1e-9;    // relative projected-gradient tolerance
  double step_init = 1.0;
  std::uint64_t seed = 0;
};

struct SolveReport {
  CMatrix solution;
  double objective = 0.0;
  double max_violation = 0.0;  // max_k max(0, g_k - rhs) / scale
  double kkt_residual = 0.0;
  std::vector<double> multipliers;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  bool infeasible_budget = false;
  std::vector<double> al_trace;  // AL value after each accepted inner step
};

namespace detail {

inline double real_inner(const CMatrix& a, const CMatrix& b) {
  return a.cwiseProduct(b.conjugate()).sum().real();
}

/// Augmented Lagrangian value for multipliers lambda and penalty rho.
inline double al_value(const QuadraticForm& form, const CoverageConstraintSet& cons,
                       const CMatrix& X, const std::vector<double>& lambda,
                       double rho) {
  double val = form.objective(X);
  const double rhs = cons.rhs();
  for (std::size_t k = 0; k < cons.steering.size(); ++k) {
    const double g = cons.value(static_cast<int>(k), X) - rhs;
    const double s = std::max(0.0, lambda[k] / rho + g);
    val += 0.5 * rho * s * s - lambda[k] * lambda[k] / (2.0 * rho);
  }
  return val;
}

inline CMatrix al_gradient(const QuadraticForm& form, const CoverageConstraintSet& cons,
                           const CMatrix& X, const std::vector<double>& lambda,
                           double rho) {
  CMatrix grad = form.gradient(X);
  const double rhs = cons.rhs();
  for (std::size_t k = 0; k < cons.steering.size(); ++k) {
    const CVector e = cons.residual(static_cast<int>(k), X);
    const double g = e.squaredNorm() - rhs;
    const double s = std::max(0.0, lambda[k] / rho + g);
    if (s > 0.0) grad += rho * s * cons.gradient(static_cast<int>(k), X, e);
  }
  return grad;
}

/// Least-squares multiplier estimate for the near-active constraints: the
/// nonnegative lambda minimizing the stationarity residual over the
/// box-interior coordinates. The augmented-Lagrangian multipliers can stall
/// at zero when a constraint is active with g exactly at the boundary, so
/// this recovers the certificate in that degenerate case.
inline std::vector<double> estimate_multipliers(const QuadraticForm& form,
                                                const CoverageConstraintSet& cons,
                                                const CMatrix& X,
                                                double active_tol) {
  const int K = static_cast<int>(cons.steering.size());
  std::vector<double> lambda(K, 0.0);
  const double rhs = cons.rhs();

  std::vector<int> active;
  std::vector<CMatrix> grads;
  for (int k = 0; k < K; ++k) {
    const CVector e = cons.residual(k, X);
    if (e.squaredNorm() - rhs >= -active_tol * cons.scale()) {
      active.push_back(k);
      grads.push_back(cons.gradient(k, X, e));
    }
  }
  if (active.empty()) return lambda;

  auto mask_box = [&](CMatrix M) {
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      for (Eigen::Index i = 0; i < M.rows(); ++i)
        if (std::abs(X(i, j)) > 1.0 - 1e-9) M(i, j) = Complex(0.0, 0.0);
    return M;
  };
  const CMatrix g0 = mask_box(form.gradient(X));
  for (auto& G : grads) G = mask_box(std::move(G));

  const int na = static_cast<int>(active.size());
  Eigen::MatrixXd A(na, na);
  Eigen::VectorXd b(na);
  for (int a = 0; a < na; ++a) {
    b(a) = -real_inner(grads[a], g0);
    for (int c = 0; c <= a; ++c)
      A(a, c) = A(c, a) = real_inner(grads[a], grads[c]);
  }
  A.diagonal().array() += 1e-12 * (A.trace() + 1.0);
  const Eigen::VectorXd sol = A.ldlt().solve(b);
  for (int a = 0; a < na; ++a)
    lambda[active[a]] = std::max(0.0, sol(a));
  return lambda;
}

struct PolishCandidate {
  CMatrix X;
  std::vector<double> lambda;
  bool ok = false;
};

/// Minimizer of q(x) = x^* H x - 2 Re(b^* x) over the unit-modulus box
/// |x_i| <= 1 for Hermitian positive-semidefinite H, via a log-barrier
/// interior-point method in real coordinates. Damped Newton steps make the
/// method robust to the severe ill-conditioning of H that defeats first-order
/// and coordinate methods here; the final barrier weight bounds the duality
/// gap by n / t_end. Fully deterministic for a given (H, b, warm).
inline CVector solve_box_column(const CMatrix& H, const CVector& b,
                                const CVector& warm, double tol) {
  const int n = static_cast<int>(b.size());
  const int N = 2 * n;

  Eigen::MatrixXd A(N, N);
  A << H.real(), -H.imag(), H.imag(), H.real();
  A = 0.5 * (A + A.transpose().eval());
  Eigen::VectorXd c(N);
  c << b.real(), b.imag();

  // Strictly interior start: pull the warm point off the boundary.
  Eigen::VectorXd z(N);
  for (int i = 0; i < n; ++i) {
    const double r = std::abs(warm(i));
    const double shrink = r > 0.9 ? 0.9 / r : 1.0;
    z(i) = warm(i).real() * shrink;
    z(i + n) = warm(i).imag() * shrink;
  }

  auto qval = [&](const Eigen::VectorXd& v) {
    return v.dot(A * v) - 2.0 * c.dot(v);
  };
  auto slacks = [&](const Eigen::VectorXd& v, Eigen::VectorXd& s) {
    for (int i = 0; i < n; ++i)
      s(i) = 1.0 - v(i) * v(i) - v(i + n) * v(i + n);
  };
  auto barrier = [&](const Eigen::VectorXd& v) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = 1.0 - v(i) * v(i) - v(i + n) * v(i + n);
      if (s <= 0.0) return std::numeric_limits<double>::infinity();
      sum -= std::log(s);
    }
    return sum;
  };

  const double t_end = n / std::max(1e-12, 1e-4 * tol);
  double t = 1.0;
  Eigen::VectorXd s(n);
  for (;;) {
    for (int it = 0; it < 50; ++it) {
      slacks(z, s);
      Eigen::VectorXd grad = 2.0 * t * (A * z - c);
      Eigen::MatrixXd hess = 2.0 * t * A;
      for (int i = 0; i < n; ++i) {
        const double inv = 1.0 / s(i);
        const double u = z(i), v = z(i + n);
        grad(i) += 2.0 * u * inv;
        grad(i + n) += 2.0 * v * inv;
        hess(i, i) += 2.0 * inv + 4.0 * u * u * inv * inv;
        hess(i + n, i + n) += 2.0 * inv + 4.0 * v * v * inv * inv;
        const double cross = 4.0 * u * v * inv * inv;
        hess(i, i + n) += cross;
        hess(i + n, i) += cross;
      }
      const Eigen::VectorXd dz = hess.ldlt().solve(-grad);
      const double dec = -grad.dot(dz);  // Newton decrement squared
      if (!(dec > 2e-9)) break;

      // Largest feasible step toward the boundary, then backtrack on f_t.
      double alpha = 1.0;
      for (int i = 0; i < n; ++i) {
        const double du = dz(i), dv = dz(i + n);
        const double qa = du * du + dv * dv;
        if (qa <= 0.0) continue;
        const double qb = 2.0 * (z(i) * du + z(i + n) * dv);
        const double qc = -s(i);
        const double disc = qb * qb - 4.0 * qa * qc;
        const double cross = (-qb + std::sqrt(std::max(disc, 0.0))) / (2.0 * qa);
        alpha = std::min(alpha, 0.99 * cross);
      }
      const double f0 = t * qval(z) + barrier(z);
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        const Eigen::VectorXd zt = z + alpha * dz;
        if (t * qval(zt) + barrier(zt) <= f0 - 1e-4 * alpha * dec) {
          z = zt;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    if (t >= t_end) break;
    t = std::min(t * 20.0, t_end);
  }

  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = Complex(z(i), z(i + n));
  return x;
}

/// Second-order KKT polish. For fixed multipliers the Lagrangian is quadratic
/// in X and column-separable, so each column solves exactly as a small
/// box-constrained QP; bisection (one active constraint) or a damped Newton
/// iteration with a finite-difference Jacobian (several) on the active
/// multipliers then zeroes the active constraint values, and a working-set
/// loop reconciles the active constraint set. The caller accepts the
/// candidate only if it improves the KKT certificate, so this routine may
/// fail benignly.
inline PolishCandidate polish_kkt(const QuadraticForm& form,
                                  const CoverageConstraintSet& cons,
                                  const CMatrix& X0,
                                  const std::vector<double>& lambda0,
                                  double feas_tol) {
  PolishCandidate out;
  const int K = static_cast<int>(cons.steering.size());
  const int n = static_cast<int>(X0.rows());
  const int m = static_cast<int>(X0.cols());
  const double scale = cons.scale();
  const double rhs = cons.rhs();

  // Cost grows as n^3 per column per dual evaluation; the polish is a
  // precision tool for small and medium instances.
  if (static_cast<long>(n) * n * m > 10000) return out;

  CMatrix gram = form.L.adjoint() * form.L;
  gram.diagonal().array() += 1e-12 * (1.0 + gram.trace().real() / n);
  const double col_tol = 1e-7;

  // Initial working set: positive multipliers or near-active constraints.
  std::vector<int> active;
  for (int k = 0; k < K; ++k) {
    const double g = cons.value(k, X0) - rhs;
    if (lambda0[k] > 0.0 || g >= -feas_tol * scale) active.push_back(k);
  }

  std::vector<double> lam(K, 0.0);
  for (int k : active) lam[k] = std::max(lambda0[k], 0.0);

  CMatrix X = X0;

  // Exact column-separable box-QP solve of the Lagrangian for fixed lambda,
  // warm-started at the current X.
  auto solve_x = [&](const std::vector<double>& l) {
    for (int j = 0; j < m; ++j) {
      CMatrix H = gram;
      CVector b = CVector::Zero(n);
      for (int k : active) {
        const CVector a = cons.steering[k].col(j);
        H.noalias() += l[k] * (a * a.adjoint());
        b += l[k] * cons.target_gain * a;
      }
      X.col(j) = solve_box_column(H, b, X.col(j), col_tol);
    }
  };

  // Zero the active constraint values by adjusting the active multipliers.
  auto solve_lambda = [&]() {
    const int na = static_cast<int>(active.size());
    if (na > 6) return false;  // Newton cost balloons; not a near-optimal point
    solve_x(lam);
    if (na == 1) {
      // Single active constraint: phi(lambda) = g(X(lambda)) is monotone
      // non-increasing (dual concavity), so bracket and bisect.
      const int k = active[0];
      auto phi = [&](double l) {
        std::vector<double> trial = lam;
        trial[k] = l;
        solve_x(trial);
        return cons.value(k, X) - rhs;
      };
      double lo = 0.0;
      if (phi(lo) > 0.0) {
        double hi = std::max(lam[k], 1e-9);
        int doublings = 0;
        while (phi(hi) > 0.0 && doublings++ < 80) hi *= 2.0;
        if (doublings >= 80) return false;
        bool hit = false;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double v = phi(mid);
          if (std::abs(v) <= 1e-7 * scale) {
            lam[k] = mid;
            hit = true;
            break;
          }
          (v > 0.0 ? lo : hi) = mid;
        }
        // Take the feasible endpoint when the tolerance was not met.
        if (!hit) lam[k] = hi;
      } else {
        lam[k] = 0.0;
      }
      solve_x(lam);
    } else if (na > 1) {
      for (int newton = 0; newton < 20; ++newton) {
        Eigen::VectorXd phi(na);
        for (int a = 0; a < na; ++a) phi(a) = cons.value(active[a], X) - rhs;
        if (phi.cwiseAbs().maxCoeff() <= 1e-7 * scale) break;

        // Finite-difference Jacobian of phi with respect to the active
        // multipliers; the box-QP solve has no closed-form sensitivity.
        Eigen::MatrixXd J(na, na);
        const CMatrix X_base = X;
        for (int b = 0; b < na; ++b) {
          const double delta = std::max(1e-8, 1e-2 * lam[active[b]]);
          std::vector<double> pert = lam;
          pert[active[b]] += delta;
          X = X_base;
          solve_x(pert);
          for (int a = 0; a < na; ++a)
            J(a, b) = (cons.value(active[a], X) - rhs - phi(a)) / delta;
        }
        X = X_base;
        J.diagonal().array() -= 1e-12 * scale;

        const Eigen::VectorXd dl = J.fullPivLu().solve(-phi);
        double t = 1.0;
        const double phi0 = phi.norm();
        bool stepped = false;
        for (int bt = 0; bt < 25; ++bt) {
          std::vector<double> trial = lam;
          for (int a = 0; a < na; ++a)
            trial[active[a]] = std::max(0.0, lam[active[a]] + t * dl(a));
          X = X_base;
          solve_x(trial);
          Eigen::VectorXd phi_t(na);
          for (int a = 0; a < na; ++a) phi_t(a) = cons.value(active[a], X) - rhs;
          if (phi_t.norm() < phi0 * (1.0 - 1e-4 * t) ||
              phi_t.norm() <= 1e-7 * scale) {
            lam = std::move(trial);
            stepped = true;
            break;
          }
          t *= 0.5;
        }
        if (!stepped) {
          X = X_base;
          solve_x(lam);  // restore the last accepted iterate
          break;
        }
      }
    }
    return true;
  };

  for (int pass = 0; pass < 10; ++pass) {
    if (!solve_lambda()) return out;
    if (!X.allFinite()) return out;

    // Working-set update: drop slack constraints, add violated ones.
    bool changed = false;
    std::vector<int> next;
    for (int k : active) {
      const double g = cons.value(k, X) - rhs;
      if (lam[k] <= 1e-14 && g < -1e-12 * scale) {
        lam[k] = 0.0;
        changed = true;
      } else {
        next.push_back(k);
      }
    }
    for (int k = 0; k < K; ++k) {
      if (std::find(next.begin(), next.end(), k) != next.end()) continue;
      if (cons.value(k, X) - rhs > 1e-7 * scale) {
        next.push_back(k);
        changed = true;
      }
    }
    std::sort(next.begin(), next.end());
    active = std::move(next);
    if (!changed) break;
  }

  out.X = box_project(X);
  out.lambda = std::move(lam);
  out.ok = true;
  return out;
}

}  // namespace detail

/// Projected-stationarity residual plus complementarity-slackness magnitude
/// of the KKT system at (X, multipliers); zero at exact KKT points.
inline double kkt_residual(const QuadraticForm& form,
                           const CoverageConstraintSet& cons, const CMatrix& X,
                           const std::vector<double>& multipliers) {
  if (multipliers.size() != cons.steering.size())
    throw std::invalid_argument("kkt_residual: multiplier count mismatch");
  for (double m : multipliers)
    if (m < 0.0)
      throw std::invalid_argument("kkt_residual: negative multiplier");

  CMatrix grad = form.gradient(X);
  const double rhs = cons.rhs();
  double compl_slack = 0.0;
  for (std::size_t k = 0; k < cons.steering.size(); ++k) {
    const CVector e = cons.residual(static_cast<int>(k), X);
    const double g = e.squaredNorm() - rhs;
    if (multipliers[k] > 0.0)
      grad += multipliers[k] * cons.gradient(static_cast<int>(k), X, e);
    compl_slack += std::abs(multipliers[k] * g);
  }
  const double stationarity = (X - box_project(X - grad)).norm();
  return stationarity + compl_slack / cons.scale();
}

/// Augmented-Lagrangian solve with a projected-gradient inner loop onto the
/// elementwise unit-modulus box. Barzilai-Borwein steps with a monotone
/// backtracking rule drive the inner loop. Multipliers follow the
/// max(0, .) update; rho grows geometrically when the violation stalls.
inline SolveReport solve_subproblem(const QuadraticForm& form,
                                    const CoverageConstraintSet& cons,
                                    const SolverConfig& config,
                                    const CMatrix& warm_start) {
  if (cons.rhs() < 0.0)
    throw std::invalid_argument("solve_subproblem: negative constraint budget");

  const double scale = cons.scale();
  const double rhs = cons.rhs();
  const int K = static_cast<int>(cons.steering.size());

  CMatrix X = box_project(warm_start);
  std::vector<double> lambda(K, 0.0);
  double rho = config.penalty_init;

  SolveReport report;
  double prev_outer_obj = std::numeric_limits<double>::infinity();
  double prev_viol = std::numeric_limits<double>::infinity();
  int stalled_growths = 0;
  int total_inner = 0;

  auto max_violation = [&](const CMatrix& Z) {
    double v = 0.0;
    for (int k = 0; k < K; ++k)
      v = std::max(v, cons.value(k, Z) - rhs);
    return std::max(v, 0.0) / scale;
  };

  for (int outer = 0; outer < config.max_outer_iters; ++outer) {
    // Inner loop: projected gradient on the AL for fixed (lambda, rho),
    // monotone non-increasing in the AL value by construction.
    double al = detail::al_value(form, cons, X, lambda, rho);
    CMatrix grad = detail::al_gradient(form, cons, X, lambda, rho);
    double step = config.step_init / std::max(1.0, grad.norm());
    const double grad_tol = config.inner_grad_tol * scale;

    for (int inner = 0; inner < config.max_inner_iters; ++inner) {
      ++total_inner;
      // Residual of the fixed-point map with unit step.
      const double residual = (X - box_project(X - grad)).norm();
      if (residual <= grad_tol) break;

      CMatrix X_new;
      double al_new = 0.0;
      bool accepted = false;
      for (int bt = 0; bt < 60; ++bt) {
        X_new = box_project(X - step * grad);
        al_new = detail::al_value(form, cons, X_new, lambda, rho);
        if (al_new <= al + 1e-14 * std::abs(al)) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // step underflow, treat as inner convergence

      const CMatrix grad_new = detail::al_gradient(form, cons, X_new, lambda, rho);
      const CMatrix dx = X_new - X;
      const CMatrix dg = grad_new - grad;
      const double sy = detail::real_inner(dx, dg);
      // BB1 step for the next iterate, guarded against nonconvex curvature.
      if (sy > 1e-30)
        step = std::clamp(dx.squaredNorm() / sy, 1e-12, 1e12);
      else
        step *= 2.0;

      X = std::move(X_new);
      grad = grad_new;
      al = al_new;
      report.al_trace.push_back(al);
    }

    // Multiplier and penalty updates.
    for (int k = 0; k < K; ++k) {
      const double g = cons.value(k, X) - rhs;
      lambda[k] = std::max(0.0, lambda[k] + rho * g);
    }

    // Second-order polish on the frozen active sets; attempted only from
    // near-feasible iterates, accepted only when it improves the KKT
    // certificate without losing feasibility.
    if (max_violation(X) <= config.feasibility_tol &&
        kkt_residual(form, cons, X, lambda) > config.kkt_tol) {
      auto cand =
          detail::polish_kkt(form, cons, X, lambda, config.feasibility_tol);
      if (cand.ok) {
        double cand_viol = 0.0;
        for (int k = 0; k < K; ++k)
          cand_viol = std::max(cand_viol, cons.value(k, cand.X) - rhs);
        cand_viol = std::max(cand_viol, 0.0) / scale;
        if (cand_viol <= config.feasibility_tol &&
            kkt_residual(form, cons, cand.X, cand.lambda) <
                kkt_residual(form, cons, X, lambda)) {
          X = std::move(cand.X);
          lambda = std::move(cand.lambda);
        }
      }
    }
    const double viol = max_violation(X);
    const double obj = form.objective(X);
    ++report.outer_iterations;

    // The AL multipliers can stall at zero when a constraint sits exactly on
    // its boundary; fall back to the least-squares certificate in that case.
    double kkt = kkt_residual(form, cons, X, lambda);
    std::vector<double> kkt_mult = lambda;
    if (kkt > config.kkt_tol) {
      auto est = detail::estimate_multipliers(form, cons, X,
                                              config.feasibility_tol);
      const double kkt_est = kkt_residual(form, cons, X, est);
      if (kkt_est < kkt) {
        kkt = kkt_est;
        kkt_mult = std::move(est);
      }
    }
    const double obj_change =
        std::abs(obj - prev_outer_obj) / std::max(1.0, std::abs(obj));
    if (viol <= config.feasibility_tol && obj_change <= config.objective_rel_tol &&
        kkt <= config.kkt_tol) {
      report.converged = true;
      report.solution = X;
      report.objective = obj;
      report.max_violation = viol;
      report.kkt_residual = kkt;
      report.multipliers = std::move(kkt_mult);
      report.inner_iterations = total_inner;
      return report;
    }
    // Lift multipliers stuck at zero on boundary-active constraints (the AL
    // update cannot raise them when g stays epsilon-negative); progressing
    // multipliers are left to the standard update.
    for (int k = 0; k < K; ++k)
      if (lambda[k] == 0.0 && kkt_mult[k] > 0.0) lambda[k] = kkt_mult[k];
    prev_outer_obj = obj;

    if (viol > 0.5 * prev_viol && viol > config.feasibility_tol) {
      rho = std::min(rho * config.penalty_growth, config.penalty_max);
      if (viol > config.feasibility_tol && obj <= 1e-12 * scale)
        ++stalled_growths;
      else
        stalled_growths = 0;
      if (stalled_growths >= 3) {
        report.infeasible_budget = true;
        break;
      }
    } else {
      stalled_growths = 0;
    }
    prev_viol = viol;
  }

  report.solution = X;
  report.objective = form.objective(X);
  report.max_violation = max_violation(X);
  report.kkt_residual = kkt_residual(form, cons, X, lambda);
  report.multipliers = lambda;
  {
    auto est = detail::estimate_multipliers(form, cons, X, config.feasibility_tol);
    const double kkt_est = kkt_residual(form, cons, X, est);
    if (kkt_est < report.kkt_residual) {
      report.kkt_residual = kkt_est;
      report.multipliers = std::move(est);
    }
  }
  report.inner_iterations = total_inner;
  return report;
}

}  // namespace squintbook

#endif  // SQUINTBOOK_SOLVER_HPP
