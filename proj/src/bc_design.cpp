#include "twr/bc_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "accel.hpp"
#include "twr/linalg.hpp"

namespace twr {

namespace {

// Per-eigenmode allocation shared by the BC closed forms; mirrors the MAC
// water-filling loop (sum over disturbance-weighted terms per mode).
struct ModeAllocation {
  RealVec powers;
  double lambda = 0.0;
  double kkt_residual = 0.0;
};

ModeAllocation allocate_modes(const std::vector<RealVec>& numer,
                              const std::vector<RealVec>& rate, double tau) {
  const Index n_modes = static_cast<Index>(numer.size());
  ModeAllocation out;
  out.powers = RealVec::Zero(n_modes);
  if (tau <= 0.0 || n_modes == 0) return out;

  auto mode_lhs = [&](Index m, double p) {
    double v = 0.0;
    for (Index n = 0; n < numer[m].size(); ++n) {
      const double d = 1.0 + rate[m][n] * p;
      v += numer[m][n] / (d * d);
    }
    return v;
  };
  RealVec ceiling(n_modes);
  for (Index m = 0; m < n_modes; ++m) ceiling[m] = mode_lhs(m, 0.0);
  auto power_at = [&](Index m, double lambda) {
    if (lambda >= ceiling[m]) return 0.0;
    if (mode_lhs(m, tau) > lambda) return tau;
    auto h = [&](double p) { return mode_lhs(m, p); };
    return bisect_monotone(h, lambda, 0.0, tau, 1e-13);
  };
  if (n_modes == 1) {
    out.powers[0] = tau;
    out.lambda = mode_lhs(0, tau);
    return out;
  }
  auto total = [&](double lambda) {
    double s = 0.0;
    for (Index m = 0; m < n_modes; ++m) s += power_at(m, lambda);
    return s;
  };
  out.lambda = bisect_monotone(total, tau, 0.0, ceiling.maxCoeff(), 1e-10);
  for (Index m = 0; m < n_modes; ++m) out.powers[m] = power_at(m, out.lambda);
  double res = 0.0;
  for (Index m = 0; m < n_modes; ++m) {
    if (out.powers[m] > 0.0) {
      res = std::max(res, std::abs(mode_lhs(m, out.powers[m]) - out.lambda));
    }
  }
  out.kkt_residual = res / std::max(1.0, out.lambda);
  return out;
}

// Structured candidate mirroring the MAC designer's: top shared transmit
// eigenmodes with a white-surrogate per-mode allocation.
Mat tx_eigen_candidate(const std::vector<BroadcastHop>& hops, double tau, Index l) {
  const auto& first = hops.front().model;
  Mat s = Mat::Zero(first.tx(), l);
  if (tau <= 0) return s;
  const Index n_modes = std::min(l, first.tx());
  std::vector<RealVec> numer(static_cast<size_t>(n_modes)),
      rate(static_cast<size_t>(n_modes));
  Index total_terms = 0;
  for (const auto& h : hops) total_terms += h.model.eig_r.values.size();
  for (Index m = 0; m < n_modes; ++m) {
    RealVec num(total_terms), rt(total_terms);
    Index at = 0;
    for (const auto& h : hops) {
      const double q =
          h.dist.k_q.trace().real() / static_cast<double>(h.dist.temporal_len());
      if (q <= 0 || h.dist.delta_r.minCoeff() <= 0) return s;
      const double st = first.eig_t.values[m];
      for (Index n = 0; n < h.model.eig_r.values.size(); ++n) {
        const double beta = h.model.eig_r.values[n] / (q * h.dist.delta_r[n]);
        num[at] = h.model.eig_r.values[n] * beta * st * st;
        rt[at] = beta * st;
        ++at;
      }
    }
    numer[static_cast<size_t>(m)] = num;
    rate[static_cast<size_t>(m)] = rt;
  }
  const ModeAllocation alloc = allocate_modes(numer, rate, tau);
  for (Index m = 0; m < n_modes; ++m) {
    s.col(m) = first.eig_t.vectors.col(m).conjugate() * std::sqrt(alloc.powers[m]);
  }
  return s;
}

void require_full_length(const TwrScenario& sc) {
  if (sc.bc.l_r != sc.m) {
    throw WrongScenarioKindError("this BC closed form needs L_R = M");
  }
}

// beta_{i,n} = sigma_{r,i,n} / delta_{r,i,n} in the shared eigenbasis.
RealVec bc_receive_ratios(const KroneckerChannelModel& hop, const DisturbanceModel& dist) {
  RealVec beta(hop.eig_r.values.size());
  for (Index n = 0; n < beta.size(); ++n) {
    if (dist.delta_r[n] <= 0.0) {
      throw WrongScenarioKindError("BC closed forms need positive disturbance eigenvalues");
    }
    beta[n] = hop.eig_r.values[n] / dist.delta_r[n];
  }
  return beta;
}

DesignReport finish_bc_report(const TwrScenario& sc, DesignMethod method, Mat s_r,
                              double lambda, double kkt, int iterations) {
  DesignReport rep;
  rep.method = method;
  rep.seq.phase = Phase::bc;
  rep.seq.tau1 = sc.bc.tau_r;
  rep.seq.s = std::move(s_r);
  rep.per_side = {bc_mse(sc, rep.seq, 1), bc_mse(sc, rep.seq, 2)};
  rep.mse = rep.per_side[0] + rep.per_side[1];
  rep.trace.push_back(rep.mse);
  rep.multipliers = {lambda, 0.0};
  rep.kkt_residual = kkt;
  rep.iterations = iterations;
  return rep;
}

}  // namespace

TrainingSequence bc_identity_sequence(const TwrScenario& sc) {
  TrainingSequence seq;
  seq.phase = Phase::bc;
  seq.tau1 = sc.bc.tau_r;
  seq.s = Mat::Zero(sc.m, sc.bc.l_r);
  const Index cols = std::min(sc.m, sc.bc.l_r);
  if (cols > 0 && sc.bc.tau_r > 0) {
    const double c = std::sqrt(sc.bc.tau_r / static_cast<double>(cols));
    for (Index i = 0; i < cols; ++i) seq.s(i, i) = c;
  }
  return seq;
}

TrainingSequence bc_random_sequence(const TwrScenario& sc, CounterRng& rng) {
  TrainingSequence seq;
  seq.phase = Phase::bc;
  seq.tau1 = sc.bc.tau_r;
  Mat s(sc.m, sc.bc.l_r);
  for (Index j = 0; j < s.cols(); ++j) {
    for (Index i = 0; i < s.rows(); ++i) s(i, j) = rng.next_cgauss();
  }
  const double p = s.squaredNorm();
  if (p > 0) s *= std::sqrt(sc.bc.tau_r / p);
  seq.s = s;
  return seq;
}

AltTxDesign alternating_tx_design(const std::vector<BroadcastHop>& hops, double tau,
                                  Index l, const Mat& s_init, double tol,
                                  int max_iter) {
  if (hops.empty()) throw Error("alternating_tx_design: no hops");
  const Index tx = hops.front().model.tx();
  for (const auto& h : hops) {
    if (h.model.tx() != tx) {
      throw DimensionError("alternating_tx_design: hops must share the transmit side");
    }
  }
  AltTxDesign out;
  Mat s = s_init;
  auto total_mse = [&](const Mat& sm) {
    double e = 0.0;
    for (const auto& h : hops) e += hop_mse(h.model, h.dist, sm);
    return e;
  };
  double e = total_mse(s);
  out.trace.push_back(e);

  std::vector<Mat> sel;
  sel.reserve(hops.size());
  for (const auto& h : hops) {
    sel.push_back(selection_matrix_e(tx, h.model.rx(), l));
  }

  detail::AndersonAccelerator accel(12);
  bool structured_tried = false;
  auto project_power = [&](Mat& sm) {
    const double p = sm.squaredNorm();
    if (p > tau) sm *= std::sqrt(std::max(tau, 0.0) / p);
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    Mat a_mat = Mat::Zero(tx * l, tx * l);
    Vec a_vec = Vec::Zero(tx * l);
    for (size_t i = 0; i < hops.size(); ++i) {
      const auto& hop = hops[i].model;
      const Mat t = hop_estimator(hop, hops[i].dist, s);
      const Mat c0 = hop_error_weight(hop);
      const Mat ctr = kron(hop.z_t, hop.z_r);
      a_mat += sel[i].adjoint() * kron(t.adjoint() * c0 * t, ctr.transpose()) * sel[i];
      const Mat c_t_mat = kron(hop.c_t, hop.c_r) * c0 * t;
      a_vec += sel[i].transpose() * vec(c_t_mat);
    }
    a_mat = ((a_mat + a_mat.adjoint()) / 2.0).eval();

    const HermitianEig ae = hermitian_eig(a_mat);
    const Vec target = a_vec.conjugate();
    const Vec xt = ae.vectors.adjoint() * target;
    const RealVec d = ae.values.cwiseMax(0.0);
    auto g = [&](double lam) {
      double v = 0.0;
      for (Index j = 0; j < d.size(); ++j) {
        const double den = d[j] + lam;
        if (den <= 0) return std::numeric_limits<double>::infinity();
        v += std::norm(xt[j]) / (den * den);
      }
      return v;
    };
    double lam = 0.0;
    if (tau <= 0.0) {
      s.setZero();
      out.trace.push_back(total_mse(s));
      out.multiplier = 0.0;
      break;
    }
    if (d.minCoeff() <= 0.0 || g(0.0) > tau * (1.0 + 1e-12)) {
      const double bound =
          std::max(std::sqrt(target.squaredNorm() / tau) - d.minCoeff(), 1e-30);
      lam = bisect_monotone(g, tau, 0.0, bound, 1e-12);
    }
    Vec st(d.size());
    for (Index j = 0; j < d.size(); ++j) st[j] = xt[j] / (d[j] + lam);
    const Vec s_vec = ae.vectors * st;
    accel.push(vec(s), s_vec);

    Mat plain = unvec(s_vec, tx, l);
    const double e_plain = total_mse(plain);
    if (e_plain > e * (1.0 + 1e-6)) {
      throw NonMonotoneStepError("alternating transmit design: MSE increased");
    }
    Mat next = plain;
    double e_next = e_plain;

    if (!structured_tried) {
      structured_tried = true;
      const Mat structured = tx_eigen_candidate(hops, tau, l);
      const double e_struct = total_mse(structured);
      if (e_struct < e_next) {
        next = structured;
        e_next = e_struct;
      }
    }

    // safeguarded extrapolation (same scheme as the MAC designer)
    if (accel.ready()) {
      Mat cand = unvec(accel.candidate(), tx, l);
      project_power(cand);
      const double e_aa = total_mse(cand);
      if (e_aa < e_next) {
        next = cand;
        e_next = e_aa;
      }
      const Mat dir = cand - plain;
      double w = 1.0;
      for (int k = 0; k < 16; ++k, w *= 2.0) {
        Mat trial = cand + w * dir;
        project_power(trial);
        const double e_t = total_mse(trial);
        if (e_t < e_next) {
          next = trial;
          e_next = e_t;
        }
      }
    }

    // exact-gradient rays on the true objective (see the MAC designer)
    for (int round = 0; round < 40; ++round) {
      Mat grad = Mat::Zero(tx, l);
      for (const auto& h : hops) grad += hop_mse_gradient(h.model, h.dist, next);
      const double gnorm = grad.norm();
      if (gnorm <= 1e-300) break;
      const double eta0 = next.norm() / gnorm;
      const double before = e_next;
      for (int j = -24; j <= 2; j += 2) {
        Mat trial = next - eta0 * std::ldexp(1.0, j) * grad;
        project_power(trial);
        const double e_t = total_mse(trial);
        if (e_t < e_next) {
          next = trial;
          e_next = e_t;
        }
      }
      if (before - e_next < 1e-8 * std::max(e_next, 1e-300)) break;
    }

    out.multiplier = lam;
    out.kkt_residual = std::abs(lam * (s_vec.squaredNorm() - tau)) / std::max(1.0, tau);
    if (e_next >= e) {
      out.trace.push_back(e);
      break;
    }
    s = next;
    out.trace.push_back(e_next);
    const double rel = std::abs(e - e_next) / std::max(e, 1e-300);
    e = e_next;
    if (rel < tol) break;
  }
  out.s = s;
  out.mse = e;
  out.per_hop.clear();
  for (const auto& h : hops) out.per_hop.push_back(hop_mse(h.model, h.dist, s));
  out.iterations = static_cast<int>(out.trace.size()) - 1;
  return out;
}

DesignReport design_bc_alternating(const TwrScenario& sc, const TrainingSequence& init,
                                   double tol, int max_iter) {
  sc.validate();
  init.validate(sc);
  const std::vector<BroadcastHop> hops = {{sc.bc.g1, sc.bc.d1}, {sc.bc.g2, sc.bc.d2}};
  const AltTxDesign alt =
      alternating_tx_design(hops, sc.bc.tau_r, sc.bc.l_r, init.s, tol, max_iter);
  DesignReport rep;
  rep.method = DesignMethod::alternating;
  rep.seq.phase = Phase::bc;
  rep.seq.tau1 = sc.bc.tau_r;
  rep.seq.s = alt.s;
  rep.mse = alt.mse;
  rep.per_side = {alt.per_hop[0], alt.per_hop[1]};
  rep.trace = alt.trace;
  rep.multipliers = {alt.multiplier, 0.0};
  rep.kkt_residual = alt.kkt_residual;
  rep.iterations = alt.iterations;
  return rep;
}

double bc_white_temporal_level(const TwrScenario& sc, int side) {
  const Mat& k_q = side == 1 ? sc.bc.d1.k_q : sc.bc.d2.k_q;
  const double q = k_q.trace().real() / static_cast<double>(k_q.rows());
  const Mat diff = k_q - q * Mat::Identity(k_q.rows(), k_q.cols());
  if (q <= 0.0 || diff.cwiseAbs().maxCoeff() > 1e-9 * q) {
    throw WrongScenarioKindError("BC design needs a white temporal factor on side " +
                                 std::to_string(side));
  }
  return q;
}

DesignReport design_bc_svd_mixed(const TwrScenario& sc) {
  sc.validate();
  require_full_length(sc);
  const double q1 = bc_white_temporal_level(sc, 1);
  const RealVec beta1 = bc_receive_ratios(sc.bc.g1, sc.bc.d1);
  const RealVec beta2 = bc_receive_ratios(sc.bc.g2, sc.bc.d2);
  const RealVec& sr1 = sc.bc.g1.eig_r.values;
  const RealVec& sr2 = sc.bc.g2.eig_r.values;
  const RealVec& st = sc.bc.g1.eig_t.values;  // shared Z_t

  // opposite-order pairing: descending sigma_t against ascending delta_q2
  const HermitianEig q2_eig = hermitian_eig(sc.bc.d2.k_q);
  const Index m = sc.m;
  RealVec dq2(m);
  Mat uq2(m, m);
  for (Index i = 0; i < m; ++i) {
    dq2[i] = q2_eig.values[m - 1 - i];
    uq2.col(i) = q2_eig.vectors.col(m - 1 - i);
  }

  std::vector<RealVec> numer(static_cast<size_t>(m)), rate(static_cast<size_t>(m));
  for (Index mm = 0; mm < m; ++mm) {
    RealVec num(sr1.size() + sr2.size()), rt(sr1.size() + sr2.size());
    for (Index n = 0; n < sr1.size(); ++n) {
      const double b = beta1[n] / q1;
      num[n] = sr1[n] * b * st[mm] * st[mm];
      rt[n] = b * st[mm];
    }
    for (Index n = 0; n < sr2.size(); ++n) {
      if (dq2[mm] <= 0.0) throw WrongScenarioKindError("side-2 temporal factor must be PD");
      const double b = beta2[n] / dq2[mm];
      num[sr1.size() + n] = sr2[n] * b * st[mm] * st[mm];
      rt[sr1.size() + n] = b * st[mm];
    }
    numer[static_cast<size_t>(mm)] = num;
    rate[static_cast<size_t>(mm)] = rt;
  }
  const ModeAllocation alloc = allocate_modes(numer, rate, sc.bc.tau_r);
  const Mat s_r = sc.bc.g1.eig_t.vectors.conjugate() *
                  alloc.powers.cwiseSqrt().asDiagonal().toDenseMatrix().cast<cxd>() *
                  uq2.transpose();
  return finish_bc_report(sc, DesignMethod::svd_mixed, s_r, alloc.lambda,
                          alloc.kkt_residual, 0);
}

DesignReport design_bc_svd_white(const TwrScenario& sc) {
  sc.validate();
  require_full_length(sc);
  const double q1 = bc_white_temporal_level(sc, 1);
  const double q2 = bc_white_temporal_level(sc, 2);
  const RealVec beta1 = bc_receive_ratios(sc.bc.g1, sc.bc.d1);
  const RealVec beta2 = bc_receive_ratios(sc.bc.g2, sc.bc.d2);
  const RealVec& sr1 = sc.bc.g1.eig_r.values;
  const RealVec& sr2 = sc.bc.g2.eig_r.values;
  const RealVec& st = sc.bc.g1.eig_t.values;
  const Index m = sc.m;

  std::vector<RealVec> numer(static_cast<size_t>(m)), rate(static_cast<size_t>(m));
  for (Index mm = 0; mm < m; ++mm) {
    RealVec num(sr1.size() + sr2.size()), rt(sr1.size() + sr2.size());
    for (Index n = 0; n < sr1.size(); ++n) {
      const double b = beta1[n] / q1;
      num[n] = sr1[n] * b * st[mm] * st[mm];
      rt[n] = b * st[mm];
    }
    for (Index n = 0; n < sr2.size(); ++n) {
      const double b = beta2[n] / q2;
      num[sr1.size() + n] = sr2[n] * b * st[mm] * st[mm];
      rt[sr1.size() + n] = b * st[mm];
    }
    numer[static_cast<size_t>(mm)] = num;
    rate[static_cast<size_t>(mm)] = rt;
  }
  const ModeAllocation alloc = allocate_modes(numer, rate, sc.bc.tau_r);
  Mat s_r = Mat::Zero(m, sc.bc.l_r);
  for (Index mm = 0; mm < m; ++mm) {
    s_r.col(mm) = sc.bc.g1.eig_t.vectors.col(mm).conjugate() * std::sqrt(alloc.powers[mm]);
  }
  return finish_bc_report(sc, DesignMethod::svd_white, s_r, alloc.lambda,
                          alloc.kkt_residual, 0);
}

DesignReport design_bc_convex_qr(const TwrScenario& sc, double tol) {
  sc.validate();
  require_full_length(sc);
  const Mat& z_t = sc.bc.g1.z_t;
  const double a = z_t.trace().real() / static_cast<double>(sc.m);
  if (a <= 0.0 ||
      (z_t - a * Mat::Identity(sc.m, sc.m)).cwiseAbs().maxCoeff() > 1e-9 * a) {
    throw WrongScenarioKindError("Gram-matrix BC design needs Z_t = a I");
  }

  PsdTraceInverseProblem prob;
  prob.dim = sc.bc.l_r;
  for (int side = 1; side <= 2; ++side) {
    const auto& hop = side == 1 ? sc.bc.g1 : sc.bc.g2;
    const auto& dist = side == 1 ? sc.bc.d1 : sc.bc.d2;
    const RealVec beta = bc_receive_ratios(hop, dist);
    const HermitianEig kq_eig = hermitian_eig(dist.k_q);
    if (kq_eig.values.minCoeff() <= 0.0) {
      throw WrongScenarioKindError("Gram-matrix BC design needs PD temporal factors");
    }
    const Mat kq_inv_sqrt = kq_eig.vectors *
                            kq_eig.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                            kq_eig.vectors.adjoint();
    for (Index n = 0; n < beta.size(); ++n) {
      prob.terms.push_back({a * hop.eig_r.values[n],
                            Mat::Identity(sc.bc.l_r, sc.bc.l_r), a * beta[n],
                            kq_inv_sqrt});
    }
  }
  prob.constraints.push_back({Mat::Identity(sc.bc.l_r, sc.bc.l_r), sc.bc.tau_r});

  const PsdSolution sol = solve_psd_trace_inverse(prob, tol);
  const HermitianEig qe = hermitian_eig(sol.q);
  const RealVec lam = qe.values.cwiseMax(0.0);
  // Q = S^T conj(S)  =>  S = Lambda^{1/2} U^T
  const Mat s_r = lam.cwiseSqrt().asDiagonal().toDenseMatrix().cast<cxd>() *
                  qe.vectors.transpose();
  DesignReport rep = finish_bc_report(sc, DesignMethod::convex_qr, s_r,
                                      sol.multipliers.empty() ? 0.0 : sol.multipliers[0],
                                      sol.kkt_residual, sol.iterations);
  return rep;
}

double bc_mse_floor(const TwrScenario& sc, Index l_r) {
  if (l_r >= sc.m) return 0.0;
  const RealVec& st = sc.bc.g1.eig_t.values;
  double tail = 0.0;
  for (Index m = l_r; m < sc.m; ++m) tail += st[m];
  const double recv = sc.bc.g1.z_r.trace().real() + sc.bc.g2.z_r.trace().real();
  return tail * recv;
}

Index min_training_length_bc(const TwrScenario& sc) { return sc.m; }

}  // namespace twr
