#include "twr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twr/linalg.hpp"

namespace twr {

namespace {

double qcqp_objective(const QcqpProblem& p, const Vec& x) {
  return (x.dot(p.a * x)).real() - 2.0 * p.b.dot(x).real();
}

double quad_form(const Mat& c, const Vec& x) { return x.dot(c * x).real(); }

// Stationarity + complementary slackness residual, scaled.
double qcqp_kkt_residual(const QcqpProblem& p, const Vec& x,
                         const std::vector<double>& lambda) {
  Vec stat = p.a * x - p.b;
  double slack = 0.0;
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    stat += lambda[i] * (p.constraints[i].c * x);
    const double u = p.constraints[i].bound - quad_form(p.constraints[i].c, x);
    slack = std::max(slack, std::abs(lambda[i] * u));
  }
  const double scale = std::max(1.0, p.b.norm());
  const double obj_scale = std::max(1.0, std::abs(qcqp_objective(p, x)));
  return std::max(stat.norm() / scale, slack / obj_scale);
}

Vec regularized_solve(const Mat& a, const Vec& b) {
  const double reg = 1e-14 * (1.0 + a.cwiseAbs().maxCoeff());
  Mat m = a;
  m.diagonal().array() += reg;
  return solve_hermitian(m, b);
}

// Newton path-following on t*f(x) - sum log(tau_i - x^H C_i x). The
// widely-linear Newton system H d + G conj(d) = -grad has G of rank at
// most #constraints, so the conjugate coupling is eliminated through a
// small real system instead of embedding in R^{2n}.
QcqpSolution barrier_solve(const QcqpProblem& p, double tol) {
  const Index n = p.a.rows();
  const size_t k = p.constraints.size();
  QcqpSolution sol;
  sol.x = Vec::Zero(n);

  double t = 1.0;
  const double mu = 10.0;
  const int max_outer = 60;
  int total_newton = 0;

  Vec x = Vec::Zero(n);
  const double stat_scale = std::max(1.0, p.b.norm());
  double best_res = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < max_outer && t < 1e18; ++outer) {
    const double stat_target = 0.05 * tol * stat_scale;
    for (int inner = 0; inner < 100; ++inner) {
      ++total_newton;
      std::vector<double> u(k);
      std::vector<Vec> g(k);
      Vec grad = t * (p.a * x - p.b);
      Mat hess = t * p.a;
      for (size_t i = 0; i < k; ++i) {
        u[i] = p.constraints[i].bound - quad_form(p.constraints[i].c, x);
        const Vec cx = p.constraints[i].c * x;
        g[i] = cx / u[i];
        grad += g[i];
        hess += p.constraints[i].c / u[i];
        hess += g[i] * g[i].adjoint();
      }
      if (grad.norm() / t <= stat_target) break;  // centered for this t
      hess.diagonal().array() += 1e-14 * (1.0 + hess.cwiseAbs().maxCoeff());

      Eigen::LDLT<Mat> ldlt((hess + hess.adjoint()) / 2.0);
      const Vec y0 = ldlt.solve(grad);
      Vec d;
      if (k == 0) {
        d = -y0;
      } else {
        // alpha_i = g_i^H d satisfies alpha + Q conj(alpha) = -p, a small
        // real system once split into re/im parts
        const Index ki = static_cast<Index>(k);
        Eigen::MatrixXcd qm(ki, ki);
        Eigen::VectorXcd pv(ki);
        std::vector<Vec> y(k);
        for (size_t i = 0; i < k; ++i) y[i] = ldlt.solve(g[i]);
        for (size_t i = 0; i < k; ++i) {
          pv(static_cast<Index>(i)) = g[i].dot(y0);
          for (size_t j = 0; j < k; ++j) {
            qm(static_cast<Index>(i), static_cast<Index>(j)) = g[i].dot(y[j]);
          }
        }
        Eigen::MatrixXd sys(2 * ki, 2 * ki);
        sys.setZero();
        sys.topLeftCorner(ki, ki) = Eigen::MatrixXd::Identity(ki, ki) + qm.real();
        sys.topRightCorner(ki, ki) = qm.imag();
        sys.bottomLeftCorner(ki, ki) = qm.imag();
        sys.bottomRightCorner(ki, ki) = Eigen::MatrixXd::Identity(ki, ki) - qm.real();
        Eigen::VectorXd rhs(2 * ki);
        rhs.head(ki) = -pv.real();
        rhs.tail(ki) = -pv.imag();
        const Eigen::VectorXd ab = sys.fullPivLu().solve(rhs);
        d = -y0;
        for (size_t i = 0; i < k; ++i) {
          const cxd alpha(ab(static_cast<Index>(i)), ab(static_cast<Index>(k + i)));
          d -= std::conj(alpha) * y[i];
        }
      }

      const double decrement = -2.0 * grad.dot(d).real();
      if (!(decrement > 0) || !d.allFinite()) break;

      auto psi = [&](const Vec& xv) {
        double val = t * qcqp_objective(p, xv);
        for (size_t i = 0; i < k; ++i) {
          const double ui = p.constraints[i].bound - quad_form(p.constraints[i].c, xv);
          if (ui <= 0) return std::numeric_limits<double>::infinity();
          val -= std::log(ui);
        }
        return val;
      };
      const double psi0 = psi(x);
      // When the predicted decrease is below what doubles can resolve in
      // psi ('t f' dominates the log terms), the Armijo comparison is
      // meaningless; take feasibility-clamped full Newton steps instead
      // (quadratic phase) and let the gradient target above stop us.
      const bool measurable = 0.01 * decrement > 1e-12 * (1.0 + std::abs(psi0));
      double step = 1.0;
      Vec xn = x + d;
      if (measurable) {
        while (psi(xn) > psi0 - 0.01 * step * decrement && step > 1e-16) {
          step *= 0.5;
          xn = x + step * d;
        }
        if (step <= 1e-16) break;
      } else {
        auto feasible = [&](const Vec& xv) {
          for (size_t i = 0; i < k; ++i) {
            if (p.constraints[i].bound - quad_form(p.constraints[i].c, xv) <= 0) {
              return false;
            }
          }
          return true;
        };
        while (!feasible(xn) && step > 1e-16) {
          step *= 0.5;
          xn = x + step * d;
        }
        if (step <= 1e-16) break;
        if (d.norm() <= 1e-15 * (1.0 + x.norm())) {
          x = xn;
          break;  // centered to machine precision for this t
        }
      }
      x = xn;
    }

    std::vector<double> lambda(k);
    bool ok = true;
    for (size_t i = 0; i < k; ++i) {
      const double u = p.constraints[i].bound - quad_form(p.constraints[i].c, x);
      if (u <= 0) ok = false;
      lambda[i] = 1.0 / (t * std::max(u, 1e-300));
    }
    if (ok) {
      const double res = qcqp_kkt_residual(p, x, lambda);
      if (res < best_res) {
        best_res = res;
        sol.x = x;
        sol.multipliers = lambda;
        sol.kkt_residual = res;
        sol.iterations = total_newton;
        sol.objective = qcqp_objective(p, x);
      }
      if (res <= tol) {
        sol.converged = true;
        return sol;
      }
    }
    t *= mu;
  }
  sol.iterations = total_newton;
  sol.converged = sol.kkt_residual <= 10 * tol;
  return sol;
}

// Orthonormal basis of the common nullspace of a set of PSD forms.
Mat common_nullspace(const std::vector<const Mat*>& forms, Index n) {
  Mat sum = Mat::Zero(n, n);
  for (const Mat* f : forms) sum += *f;
  HermitianEig eg = hermitian_eig(sum);
  const double cutoff = 1e-12 * std::max(eg.values.maxCoeff(), 1.0);
  Index null_dim = 0;
  for (Index i = 0; i < eg.values.size(); ++i) {
    if (eg.values[i] <= cutoff) ++null_dim;
  }
  return eg.vectors.rightCols(null_dim);
}

}  // namespace

double bisect_monotone(const std::function<double(double)>& g, double target,
                       double lo, double hi, double tol, int max_expand) {
  const double target_tol = tol * std::max(1.0, std::abs(target));
  auto eval = [&](double lam) {
    const double v = g(lam);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  double glo = eval(lo);
  if (glo < target - target_tol) {
    throw BracketFailureError("bisect_monotone: g(lo) is already below target");
  }
  if (glo <= target + target_tol && std::isfinite(glo)) return lo;
  if (hi <= lo) hi = lo + 1.0;
  double ghi = eval(hi);
  int expansions = 0;
  while (ghi > target && expansions < max_expand) {
    lo = hi;
    glo = ghi;
    hi = 2.0 * hi + 1.0;
    ghi = eval(hi);
    ++expansions;
  }
  if (ghi > target) {
    throw BracketFailureError("bisect_monotone: could not bracket target after expansion");
  }
  double best = hi;
  double best_err = std::abs(ghi - target);
  for (int iter = 0; iter < 500; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double gm = eval(mid);
    const double err = std::abs(gm - target);
    if (std::isfinite(gm) && err < best_err) {
      best = mid;
      best_err = err;
    }
    if (err <= target_tol) return mid;
    if (gm > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-18 * std::max(1.0, std::abs(hi))) break;
  }
  if (best_err <= 10 * target_tol) return best;
  throw BracketFailureError("bisect_monotone: interval exhausted before reaching tolerance");
}

QcqpSolution solve_qcqp(const QcqpProblem& p, double tol) {
  const Index n = p.a.rows();
  for (const auto& c : p.constraints) {
    if (c.bound < -1e-12) throw Error("solve_qcqp: negative constraint bound");
  }

  // Zero-bound constraints pin x into the nullspace of their forms.
  std::vector<const Mat*> pinned;
  std::vector<size_t> active_idx;
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    if (p.constraints[i].bound <= 0.0) {
      pinned.push_back(&p.constraints[i].c);
    } else {
      active_idx.push_back(i);
    }
  }
  if (!pinned.empty()) {
    const Mat basis = common_nullspace(pinned, n);
    QcqpSolution sol;
    if (basis.cols() == 0) {
      sol.x = Vec::Zero(n);
      sol.multipliers.assign(p.constraints.size(), 0.0);
      sol.converged = true;
      sol.objective = 0.0;
      sol.kkt_residual = qcqp_kkt_residual(p, sol.x, sol.multipliers);
      return sol;
    }
    QcqpProblem red;
    red.a = basis.adjoint() * p.a * basis;
    red.b = basis.adjoint() * p.b;
    for (size_t i : active_idx) {
      red.constraints.push_back({basis.adjoint() * p.constraints[i].c * basis,
                                 p.constraints[i].bound});
    }
    QcqpSolution inner = solve_qcqp(red, tol);
    sol.x = basis * inner.x;
    sol.multipliers.assign(p.constraints.size(), 0.0);
    for (size_t j = 0; j < active_idx.size(); ++j) {
      sol.multipliers[active_idx[j]] = inner.multipliers[j];
    }
    sol.converged = inner.converged;
    sol.iterations = inner.iterations;
    sol.objective = qcqp_objective(p, sol.x);
    sol.kkt_residual = qcqp_kkt_residual(p, sol.x, sol.multipliers);
    return sol;
  }

  // Unconstrained candidate.
  bool unconstrained_ok = true;
  Vec x0;
  try {
    x0 = regularized_solve(p.a, p.b);
  } catch (const SingularGramError&) {
    unconstrained_ok = false;
  }
  std::vector<size_t> violated;
  if (unconstrained_ok) {
    for (size_t i = 0; i < p.constraints.size(); ++i) {
      if (quad_form(p.constraints[i].c, x0) >
          p.constraints[i].bound * (1.0 + 1e-10)) {
        violated.push_back(i);
      }
    }
    if (violated.empty()) {
      QcqpSolution sol;
      sol.x = x0;
      sol.multipliers.assign(p.constraints.size(), 0.0);
      sol.converged = true;
      sol.objective = qcqp_objective(p, x0);
      sol.kkt_residual = qcqp_kkt_residual(p, x0, sol.multipliers);
      return sol;
    }
  }

  // Single-active-constraint candidates: exact multiplier bisection, then
  // verify the remaining constraints.
  std::vector<size_t> candidates =
      violated.size() == 1 ? violated
                           : [&] {
                               std::vector<size_t> all(p.constraints.size());
                               for (size_t i = 0; i < all.size(); ++i) all[i] = i;
                               return all;
                             }();
  for (size_t i : candidates) {
    const Mat& c = p.constraints[i].c;
    const double tau = p.constraints[i].bound;
    Vec x_cached;
    auto g = [&](double lam) -> double {
      try {
        Mat m = p.a + lam * c;
        m.diagonal().array() += 1e-14 * (1.0 + m.cwiseAbs().maxCoeff());
        x_cached = solve_hermitian(m, p.b);
        return quad_form(c, x_cached);
      } catch (const SingularGramError&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    double lam;
    try {
      lam = bisect_monotone(g, tau, 0.0, 1.0, 1e-12);
    } catch (const BracketFailureError&) {
      continue;
    }
    g(lam);  // refresh cache at the returned multiplier
    bool feasible = true;
    for (size_t j = 0; j < p.constraints.size(); ++j) {
      if (j == i) continue;
      if (quad_form(p.constraints[j].c, x_cached) >
          p.constraints[j].bound * (1.0 + 1e-8)) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    QcqpSolution sol;
    sol.x = x_cached;
    sol.multipliers.assign(p.constraints.size(), 0.0);
    sol.multipliers[i] = lam;
    sol.objective = qcqp_objective(p, sol.x);
    sol.kkt_residual = qcqp_kkt_residual(p, sol.x, sol.multipliers);
    sol.converged = sol.kkt_residual <= std::max(tol, 1e-8);
    if (sol.converged) return sol;
  }

  return barrier_solve(p, tol);
}

double trace_inverse_objective(const PsdTraceInverseProblem& p, const Mat& q) {
  double f = 0.0;
  for (const auto& term : p.terms) {
    Mat x = term.base;
    if (term.congruence.size() == 0) {
      x += term.alpha * q;
    } else {
      x += term.alpha * term.congruence * q * term.congruence.adjoint();
    }
    f += term.weight *
         solve_hermitian(x, Mat::Identity(x.rows(), x.cols())).trace().real();
  }
  return f;
}

Mat trace_inverse_gradient(const PsdTraceInverseProblem& p, const Mat& q) {
  Mat grad = Mat::Zero(p.dim, p.dim);
  for (const auto& term : p.terms) {
    const bool has_f = term.congruence.size() != 0;
    Mat x = term.base;
    if (has_f) {
      x += term.alpha * term.congruence * q * term.congruence.adjoint();
    } else {
      x += term.alpha * q;
    }
    const Mat xinv = solve_hermitian(x, Mat::Identity(x.rows(), x.cols()));
    const Mat xinv2 = xinv * xinv;
    if (has_f) {
      grad -= term.weight * term.alpha * term.congruence.adjoint() * xinv2 * term.congruence;
    } else {
      grad -= term.weight * term.alpha * xinv2;
    }
  }
  return (grad + grad.adjoint()) / 2.0;
}

namespace {

bool is_diagonal01(const Mat& sel) {
  const double scale = std::max(sel.cwiseAbs().maxCoeff(), 1.0);
  for (Index i = 0; i < sel.rows(); ++i) {
    for (Index j = 0; j < sel.cols(); ++j) {
      const double v = std::abs(sel(i, j));
      if (i != j && v > 1e-14 * scale) return false;
      if (i == j && v > 1e-14 && std::abs(v - 1.0) > 1e-12) return false;
    }
  }
  return true;
}

// Euclidean projection onto {Q >= 0, Tr(sel_j Q) <= tau_j} for diagonal 0/1
// selectors: Q = clip(X - sum_j sigma_j Diag(sel_j)) with sigma_j >= 0 fixed
// by complementarity. The per-constraint traces are decreasing in every
// sigma, so alternating bisection converges. Non-diagonal selectors fall
// back to clip-then-scale.
Mat project_feasible(const PsdTraceInverseProblem& p, Mat x) {
  x = ((x + x.adjoint()) / 2.0).eval();
  if (p.constraints.empty()) return psd_project(x);

  for (const auto& con : p.constraints) {
    if (!is_diagonal01(con.selector)) {
      Mat q = psd_project(x);
      for (const auto& c2 : p.constraints) {
        const double v = (c2.selector * q).trace().real();
        if (v > c2.bound && v > 0.0) q *= c2.bound / v;
      }
      return q;
    }
  }

  const size_t k = p.constraints.size();
  std::vector<double> sigma(k, 0.0);
  auto shifted_clip = [&](const std::vector<double>& sig) {
    Mat shifted = x;
    for (size_t j = 0; j < k; ++j) {
      shifted -= sig[j] * p.constraints[j].selector;
    }
    return psd_project(shifted);
  };
  auto sel_trace = [](const Mat& sel, const Mat& q) {
    return (sel * q).trace().real();
  };

  for (int sweep = 0; sweep < 50; ++sweep) {
    bool changed = false;
    for (size_t j = 0; j < k; ++j) {
      const double tau = p.constraints[j].bound;
      std::vector<double> trial = sigma;
      trial[j] = 0.0;
      const double at_zero = sel_trace(p.constraints[j].selector, shifted_clip(trial));
      double next = 0.0;
      if (at_zero > tau * (1.0 + 1e-14)) {
        auto g = [&](double s) {
          trial[j] = s;
          return sel_trace(p.constraints[j].selector, shifted_clip(trial));
        };
        next = bisect_monotone(g, tau, 0.0, std::max(1.0, at_zero), 1e-13);
      }
      if (std::abs(next - sigma[j]) > 1e-14 * (1.0 + next)) changed = true;
      sigma[j] = next;
    }
    if (!changed) break;
  }
  return shifted_clip(sigma);
}

}  // namespace

namespace {

// Multiplier estimate on the active set and the resulting KKT residual:
// the dual matrix grad + sum mu_j sel_j must vanish on range(Q) and be PSD.
std::pair<std::vector<double>, double> psd_kkt_estimate(
    const PsdTraceInverseProblem& p, const Mat& q, const Mat& grad) {
  HermitianEig qe = hermitian_eig(q);
  const double qmax = std::max(qe.values.maxCoeff(), 0.0);
  Index rank = 0;
  for (Index i = 0; i < qe.values.size(); ++i) {
    if (qe.values[i] > 1e-9 * std::max(qmax, 1e-300)) ++rank;
  }
  const Mat u_plus = qe.vectors.leftCols(rank);
  std::vector<size_t> active;
  for (size_t j = 0; j < p.constraints.size(); ++j) {
    const double v = (p.constraints[j].selector * q).trace().real();
    if (v >= p.constraints[j].bound - 1e-6 * std::max(1.0, p.constraints[j].bound)) {
      active.push_back(j);
    }
  }
  std::vector<double> mu(p.constraints.size(), 0.0);
  if (!active.empty() && rank > 0) {
    Eigen::MatrixXd lhs(2 * rank * rank, static_cast<Index>(active.size()));
    Eigen::VectorXd rhs(2 * rank * rank);
    const Mat g_red = u_plus.adjoint() * grad * u_plus;
    for (Index r = 0; r < rank * rank; ++r) {
      rhs(2 * r) = -g_red(r / rank, r % rank).real();
      rhs(2 * r + 1) = -g_red(r / rank, r % rank).imag();
    }
    for (size_t a = 0; a < active.size(); ++a) {
      const Mat s_red = u_plus.adjoint() * p.constraints[active[a]].selector * u_plus;
      for (Index r = 0; r < rank * rank; ++r) {
        lhs(2 * r, static_cast<Index>(a)) = s_red(r / rank, r % rank).real();
        lhs(2 * r + 1, static_cast<Index>(a)) = s_red(r / rank, r % rank).imag();
      }
    }
    const Eigen::VectorXd mu_ls =
        lhs.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    for (size_t a = 0; a < active.size(); ++a) {
      mu[active[a]] = std::max(0.0, mu_ls(static_cast<Index>(a)));
    }
  }
  Mat dual = grad;
  for (size_t j = 0; j < p.constraints.size(); ++j) {
    dual += mu[j] * p.constraints[j].selector;
  }
  const double gscale = 1.0 + grad.norm();
  double res = 0.0;
  if (rank > 0) res = (u_plus.adjoint() * dual * u_plus).norm() / gscale;
  const HermitianEig de = hermitian_eig(dual);
  res += std::max(0.0, -de.values.minCoeff()) / gscale;
  return {mu, res};
}

}  // namespace

PsdSolution solve_psd_trace_inverse(const PsdTraceInverseProblem& p, double tol,
                                    int max_iter) {
  for (const auto& term : p.terms) {
    if (term.weight <= 0 || term.alpha <= 0) {
      throw Error("solve_psd_trace_inverse: weights and coefficients must be positive");
    }
  }
  for (const auto& con : p.constraints) {
    if (con.bound < 0) throw Error("solve_psd_trace_inverse: negative bound");
  }

  // Strictly feasible scaled-identity start.
  double c0 = std::numeric_limits<double>::infinity();
  for (const auto& con : p.constraints) {
    const double tr_sel = con.selector.trace().real();
    if (tr_sel > 0) c0 = std::min(c0, con.bound / tr_sel);
  }
  if (!std::isfinite(c0)) c0 = 1.0;
  Mat q = 0.9 * c0 * Mat::Identity(p.dim, p.dim);
  q = project_feasible(p, q);

  double f = trace_inverse_objective(p, q);
  Mat grad = trace_inverse_gradient(p, q);
  double eta = 1.0 / std::max(grad.norm(), 1e-12);
  const double kkt_target = 10 * tol;

  PsdSolution sol;
  int iter = 0;
  bool converged = false;
  Mat prev_q, prev_grad;
  bool have_prev = false;
  int stall = 0;
  for (; iter < max_iter && !converged; ++iter) {
    // Barzilai-Borwein step when curvature information is available.
    if (have_prev) {
      const Mat dq = q - prev_q;
      const Mat dg = grad - prev_grad;
      const double num = dq.squaredNorm();
      const double den = (dq.adjoint() * dg).trace().real();
      if (den > 1e-300 && num > 0) {
        eta = std::min(std::max(num / den, 1e-12), 1e12);
      }
    }
    bool accepted = false;
    Mat qn;
    double fn = f;
    double step = eta;
    for (int ls = 0; ls < 80; ++ls) {
      qn = project_feasible(p, q - step * grad);
      const double dn = (qn - q).norm();
      if (dn <= 1e-16 * (1.0 + q.norm())) break;
      fn = trace_inverse_objective(p, qn);
      if (fn <= f - 1e-4 * dn * dn / step) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (accepted) {
      prev_q = q;
      prev_grad = grad;
      have_prev = true;
      const double rel_change = std::abs(f - fn) / std::max(1.0, std::abs(f));
      q = qn;
      f = fn;
      grad = trace_inverse_gradient(p, q);
      stall = rel_change < tol ? stall + 1 : 0;
    } else {
      stall += 10;
    }
    // KKT check periodically, on stall, and near the iteration cap.
    if (iter % 25 == 24 || stall >= 5 || !accepted || iter + 1 == max_iter) {
      const auto [mu, res] = psd_kkt_estimate(p, q, grad);
      sol.multipliers = mu;
      sol.kkt_residual = res;
      if (res <= kkt_target) converged = true;
      if (!accepted && stall >= 30) break;
      if (converged) break;
      if (!accepted) {
        have_prev = false;  // restart curvature estimate after a stall
        eta *= 0.25;
      }
    }
  }
  if (sol.multipliers.empty()) {
    const auto [mu, res] = psd_kkt_estimate(p, q, grad);
    sol.multipliers = mu;
    sol.kkt_residual = res;
    converged = res <= kkt_target;
  }

  sol.q = q;
  sol.objective = f;
  sol.iterations = iter;
  sol.converged = converged;
  return sol;
}

}  // namespace twr
