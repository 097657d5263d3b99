#include "twr/lmmse.hpp"

#include <cmath>

namespace twr {

namespace {

const KroneckerChannelModel& bc_hop(const TwrScenario& sc, int side) {
  if (side == 1) return sc.bc.g1;
  if (side == 2) return sc.bc.g2;
  throw Error("bc side must be 1 or 2");
}

const DisturbanceModel& bc_dist(const TwrScenario& sc, int side) {
  return side == 1 ? sc.bc.d1 : sc.bc.d2;
}

double real_trace(const Mat& a) { return a.trace().real(); }

// Tr[C0 (I + A^H K^{-1} A)^{-1}] with Hermitian solves throughout.
double mse_from_response(const Mat& c0, const Mat& resp, const Mat& k) {
  const Mat kinv_resp = solve_hermitian(k, resp);
  Mat gram = Mat::Identity(c0.rows(), c0.cols()) + resp.adjoint() * kinv_resp;
  return real_trace(solve_hermitian(gram, c0));
}

// Sum over receive modes of w_n Tr[(Z_t^{-1} + beta_n S_eff)^{-1}] where
// S_eff = conj(S) K_q^{-1} S^T.
double eigen_domain_mse(const HermitianEig& recv_eig, const RealVec& delta_r,
                        const Mat& z_t, const Mat& k_q, const Mat& s) {
  Eigen::FullPivLU<Mat> lu_zt(z_t);
  if (!lu_zt.isInvertible()) {
    throw SingularGramError("eigen-domain MSE requires invertible transmit covariance");
  }
  const Mat z_t_inv = lu_zt.inverse();
  const Mat s_eff = s.conjugate() * solve_hermitian(k_q, s.transpose());
  double total = 0.0;
  for (Index n = 0; n < recv_eig.values.size(); ++n) {
    const double sigma_r = recv_eig.values[n];
    const double delta = delta_r[n];
    if (delta <= 0.0) {
      throw SingularGramError("eigen-domain MSE requires positive disturbance eigenvalues");
    }
    const double beta = sigma_r / delta;
    const Mat inner = z_t_inv + beta * s_eff;
    total += sigma_r * real_trace(solve_hermitian(inner, Mat::Identity(z_t.rows(), z_t.cols())));
  }
  return total;
}

// Gradient of Tr[C0 (I + R^H K^{-1} R)^{-1}] with R = (S^T c_t kron c_r),
// mapped back to the entries of S by a partial trace over the receive
// antenna index.
Mat mse_gradient_core(const Mat& c_t, const Mat& c_r, const Mat& k, const Mat& s) {
  const Index n = c_t.rows();
  const Index m = c_r.rows();
  const Index l = s.cols();
  const Mat resp = kron(s.transpose() * c_t, c_r);
  const Mat c0 = kron(c_t.adjoint() * c_t, c_r.adjoint() * c_r);
  const Mat kinv_resp = solve_hermitian(k, resp);
  Mat b = Mat::Identity(n * m, n * m) + resp.adjoint() * kinv_resp;
  const Mat x = solve_hermitian(b, Mat::Identity(n * m, n * m));
  const Mat w = x * c0 * x;
  const Mat a = kron(c_t, c_r) * (w * kinv_resp.adjoint());
  Mat g(n, l);
  for (Index j = 0; j < n; ++j) {
    for (Index lc = 0; lc < l; ++lc) {
      cxd acc = 0.0;
      for (Index mm = 0; mm < m; ++mm) acc += a(j * m + mm, lc * m + mm);
      g(j, lc) = acc;
    }
  }
  return -g.conjugate();
}

double fixed_estimator_mse(const Mat& c0, const Mat& t, const Mat& resp, const Mat& k) {
  const Mat tr_resp = t * resp;
  double e = real_trace(c0);
  e -= 2.0 * (c0 * tr_resp).trace().real();
  e += ((c0 * tr_resp) * tr_resp.adjoint()).trace().real();
  e += ((c0 * t) * (k * t.adjoint())).trace().real();
  return e;
}

}  // namespace

void TrainingSequence::validate(const TwrScenario& sc) const {
  constexpr double slack = 1.0 + 1e-8;
  if (phase == Phase::mac) {
    if (s.rows() != sc.n1 + sc.n2 || s.cols() != sc.mac.l_s) {
      throw DimensionError("MAC training sequence must be (N1+N2) x L_S");
    }
    const double p1 = s.topRows(sc.n1).squaredNorm();
    const double p2 = s.bottomRows(sc.n2).squaredNorm();
    if (p1 > tau1 * slack || p2 > tau2 * slack) {
      throw Error("MAC training sequence violates a source power budget");
    }
  } else {
    if (s.rows() != sc.m || s.cols() != sc.bc.l_r) {
      throw DimensionError("BC training sequence must be M x L_R");
    }
    if (s.squaredNorm() > tau1 * slack) {
      throw Error("BC training sequence violates the relay power budget");
    }
  }
}

Mat hop_response(const KroneckerChannelModel& hop, const Mat& s) {
  return kron(s.transpose() * hop.c_t, hop.c_r);
}

Mat hop_error_weight(const KroneckerChannelModel& hop) {
  return kron(hop.c_t.adjoint() * hop.c_t, hop.c_r.adjoint() * hop.c_r);
}

double hop_mse(const KroneckerChannelModel& hop, const DisturbanceModel& dist,
               const Mat& s) {
  return mse_from_response(hop_error_weight(hop), hop_response(hop, s),
                           dist.full_cov());
}

Mat hop_estimator(const KroneckerChannelModel& hop, const DisturbanceModel& dist,
                  const Mat& s) {
  const Mat r_yy =
      kron(s.transpose() * hop.z_t * s.conjugate(), hop.z_r) + dist.full_cov();
  const Mat r_wy = kron(hop.c_t.adjoint() * s.conjugate(), hop.c_r.adjoint());
  return solve_hermitian(r_yy, r_wy.adjoint()).adjoint();
}

Mat hop_mse_gradient(const KroneckerChannelModel& hop, const DisturbanceModel& dist,
                     const Mat& s) {
  return mse_gradient_core(hop.c_t, hop.c_r, dist.full_cov(), s);
}

Mat mac_mse_gradient(const TwrScenario& sc, const Mat& s) {
  return mse_gradient_core(mac_stacked_ct(sc), sc.mac.h1.c_r,
                           sc.mac.dist.full_cov(), s);
}

Mat mac_stacked_ct(const TwrScenario& sc) {
  return blkdiag(sc.mac.h1.c_t, sc.mac.h2.c_t);
}

Mat mac_stacked_zt(const TwrScenario& sc) {
  return blkdiag(sc.mac.h1.z_t, sc.mac.h2.z_t);
}

Mat mac_response(const TwrScenario& sc, const Mat& s) {
  return kron(s.transpose() * mac_stacked_ct(sc), sc.mac.h1.c_r);
}

Mat mac_error_weight(const TwrScenario& sc) {
  const Mat ct = mac_stacked_ct(sc);
  const Mat& cr = sc.mac.h1.c_r;
  return kron(ct.adjoint() * ct, cr.adjoint() * cr);
}

Mat bc_response(const TwrScenario& sc, const Mat& s_r, int side) {
  const auto& hop = bc_hop(sc, side);
  return kron(s_r.transpose() * hop.c_t, hop.c_r);
}

Mat bc_error_weight(const TwrScenario& sc, int side) {
  const auto& hop = bc_hop(sc, side);
  return kron(hop.c_t.adjoint() * hop.c_t, hop.c_r.adjoint() * hop.c_r);
}

LmmseEstimator mac_estimator(const TwrScenario& sc, const TrainingSequence& seq) {
  seq.validate(sc);
  const Mat ct = mac_stacked_ct(sc);
  const Mat& cr = sc.mac.h1.c_r;
  const Mat zt = mac_stacked_zt(sc);
  const Mat& zr = sc.mac.h1.z_r;
  const Mat r_yy =
      kron(seq.s.transpose() * zt * seq.s.conjugate(), zr) + sc.mac.dist.full_cov();
  const Mat r_wy = kron(ct.adjoint() * seq.s.conjugate(), cr.adjoint());
  LmmseEstimator est;
  est.t = solve_hermitian(r_yy, r_wy.adjoint()).adjoint();
  est.lift = kron(ct, cr);
  est.rx_rows = sc.m;
  est.tx_cols = sc.n1 + sc.n2;
  return est;
}

LmmseEstimator bc_estimator(const TwrScenario& sc, const TrainingSequence& seq, int side) {
  seq.validate(sc);
  const auto& hop = bc_hop(sc, side);
  const Mat r_yy = kron(seq.s.transpose() * hop.z_t * seq.s.conjugate(), hop.z_r) +
                   bc_dist(sc, side).full_cov();
  const Mat r_wy = kron(hop.c_t.adjoint() * seq.s.conjugate(), hop.c_r.adjoint());
  LmmseEstimator est;
  est.t = solve_hermitian(r_yy, r_wy.adjoint()).adjoint();
  est.lift = kron(hop.c_t, hop.c_r);
  est.rx_rows = hop.rx();
  est.tx_cols = hop.tx();
  return est;
}

double mac_mse(const TwrScenario& sc, const TrainingSequence& seq) {
  seq.validate(sc);
  return mse_from_response(mac_error_weight(sc), mac_response(sc, seq.s),
                           sc.mac.dist.full_cov());
}

double bc_mse(const TwrScenario& sc, const TrainingSequence& seq, int side) {
  seq.validate(sc);
  return mse_from_response(bc_error_weight(sc, side), bc_response(sc, seq.s, side),
                           bc_dist(sc, side).full_cov());
}

double mac_mse_eigen_domain(const TwrScenario& sc, const TrainingSequence& seq) {
  seq.validate(sc);
  return eigen_domain_mse(sc.mac.h1.eig_r, sc.mac.dist.delta_r, mac_stacked_zt(sc),
                          sc.mac.dist.k_q, seq.s);
}

double bc_mse_eigen_domain(const TwrScenario& sc, const TrainingSequence& seq, int side) {
  seq.validate(sc);
  const auto& hop = bc_hop(sc, side);
  const auto& dist = bc_dist(sc, side);
  return eigen_domain_mse(hop.eig_r, dist.delta_r, hop.z_t, dist.k_q, seq.s);
}

double mac_mse_fixed_estimator(const TwrScenario& sc, const Mat& t_r,
                               const TrainingSequence& seq) {
  return fixed_estimator_mse(mac_error_weight(sc), t_r, mac_response(sc, seq.s),
                             sc.mac.dist.full_cov());
}

double bc_mse_fixed_estimator(const TwrScenario& sc, const Mat& t_i,
                              const TrainingSequence& seq, int side) {
  return fixed_estimator_mse(bc_error_weight(sc, side), t_i,
                             bc_response(sc, seq.s, side), bc_dist(sc, side).full_cov());
}

std::pair<Mat, Mat> estimate_mac_channels(const TwrScenario& sc,
                                          const LmmseEstimator& est, const Vec& y) {
  if (y.size() != est.t.cols()) {
    throw DimensionError("estimate_mac_channels: observation length mismatch");
  }
  const Vec w_hat = est.t * y;
  const Vec h_hat = est.lift * w_hat;
  const Mat h = unvec(h_hat, est.rx_rows, est.tx_cols);
  return {h.leftCols(sc.n1), h.rightCols(sc.n2)};
}

Mat estimate_bc_channel(const TwrScenario& sc, const LmmseEstimator& est,
                        const Vec& y, int side) {
  (void)sc;
  (void)side;
  if (y.size() != est.t.cols()) {
    throw DimensionError("estimate_bc_channel: observation length mismatch");
  }
  const Vec w_hat = est.t * y;
  const Vec g_hat = est.lift * w_hat;
  return unvec(g_hat, est.rx_rows, est.tx_cols);
}

}  // namespace twr
