#pragma once

#include <functional>
#include <vector>

#include "twr/types.hpp"

namespace twr {

struct QcqpConstraint {
  Mat c;         // Hermitian PSD quadratic form
  double bound;  // >= 0
};

// min_x  x^H A x - 2 Re(b^H x)   s.t.   x^H C_i x <= tau_i
// Convex by the PSD invariants; x = 0 is always feasible.
struct QcqpProblem {
  Mat a;  // Hermitian PSD
  Vec b;
  std::vector<QcqpConstraint> constraints;
};

struct QcqpSolution {
  Vec x;
  std::vector<double> multipliers;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

// Log-barrier Newton path-following in the complex domain; single-active
// constraint instances short-circuit to an exact multiplier bisection.
QcqpSolution solve_qcqp(const QcqpProblem& p, double tol = 1e-9);

// Root-find g(lambda) = target for decreasing g. The upper end of the
// bracket is expanded (doubling, up to max_expand times) if g(hi) is still
// above target. Returns lambda with |g - target| <= tol * max(1, |target|).
double bisect_monotone(const std::function<double(double)>& g, double target,
                       double lo, double hi, double tol, int max_expand = 60);

// One summand w * Tr[(base + alpha * F Q F^H)^{-1}]; empty congruence
// means F = I.
struct TraceInverseTerm {
  double weight = 1.0;
  Mat base;  // Hermitian PD
  double alpha = 1.0;
  Mat congruence;
};

struct TraceInverseConstraint {
  Mat selector;  // PSD; Tr(selector * Q) <= bound
  double bound = 0.0;
};

struct PsdTraceInverseProblem {
  Index dim = 0;
  std::vector<TraceInverseTerm> terms;
  std::vector<TraceInverseConstraint> constraints;
};

struct PsdSolution {
  Mat q;
  std::vector<double> multipliers;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double objective = 0.0;
};

double trace_inverse_objective(const PsdTraceInverseProblem& p, const Mat& q);
Mat trace_inverse_gradient(const PsdTraceInverseProblem& p, const Mat& q);

// Projected gradient descent with Armijo line search; the projection is a
// PSD eigenvalue clip composed with congruence scaling onto the trace
// constraints.
PsdSolution solve_psd_trace_inverse(const PsdTraceInverseProblem& p, double tol = 1e-8,
                                    int max_iter = 20000);

}  // namespace twr
