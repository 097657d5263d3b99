#pragma once

#include "twr/channel_model.hpp"
#include "twr/config.hpp"
#include "twr/linalg.hpp"
#include "twr/rng.hpp"

namespace twr::test {

inline Mat random_complex(Index rows, Index cols, CounterRng& rng) {
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.next_cgauss();
  }
  return m;
}

inline Mat random_hermitian(Index n, CounterRng& rng) {
  const Mat m = random_complex(n, n, rng);
  return (m + m.adjoint()) / 2.0;
}

inline Mat random_psd(Index n, CounterRng& rng) {
  const Mat m = random_complex(n, n, rng);
  return m * m.adjoint();
}

inline Mat random_pd(Index n, CounterRng& rng) {
  return random_psd(n, rng) + 0.1 * Mat::Identity(n, n);
}

// Quadruple-loop construction, the independent oracle for kron.
inline Mat kron_bruteforce(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      for (Index k = 0; k < b.rows(); ++k) {
        for (Index l = 0; l < b.cols(); ++l) {
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
        }
      }
    }
  }
  return out;
}

// Power series for J0, summed to convergence; validated against published
// values and then used to check the polynomial fit.
inline double bessel_j0_series(double x) {
  // series diverges numerically for large |x|; callers keep |x| modest
  double term = 1.0;
  double sum = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Hand-assembled scenario from explicit covariance pieces; the BC side
// defaults to white identity models of consistent dimensions.
inline TwrScenario manual_mac_scenario(Mat z_t1, Mat z_t2, Mat z_r,
                                       SpatialDisturbanceKind kind, Mat k_q, double mu,
                                       double nu, double tau1, double tau2, Index l_s) {
  TwrScenario sc;
  sc.n1 = z_t1.rows();
  sc.n2 = z_t2.rows();
  sc.m = z_r.rows();
  sc.mac.h1 = KroneckerChannelModel::make(std::move(z_t1), z_r);
  sc.mac.h2 = KroneckerChannelModel::make(std::move(z_t2), z_r);
  sc.mac.dist = DisturbanceModel::make(kind, sc.mac.h1, std::move(k_q), mu, nu);
  sc.mac.tau1 = tau1;
  sc.mac.tau2 = tau2;
  sc.mac.l_s = l_s;
  sc.bc.g1 = KroneckerChannelModel::make(Mat::Identity(sc.m, sc.m),
                                         Mat::Identity(sc.n1, sc.n1));
  sc.bc.g2 = KroneckerChannelModel::make(Mat::Identity(sc.m, sc.m),
                                         Mat::Identity(sc.n2, sc.n2));
  sc.bc.d1 = DisturbanceModel::make(SpatialDisturbanceKind::spatially_uncorrelated,
                                    sc.bc.g1, Mat::Identity(sc.m, sc.m));
  sc.bc.d2 = DisturbanceModel::make(SpatialDisturbanceKind::spatially_uncorrelated,
                                    sc.bc.g2, Mat::Identity(sc.m, sc.m));
  sc.bc.l_r = sc.m;
  sc.bc.tau_r = tau1 + tau2;
  return sc;
}

// Mirror image for the BC side; the MAC side gets consistent identity fill.
inline TwrScenario manual_bc_scenario(Mat z_t, Mat z_r1, Mat z_r2,
                                      SpatialDisturbanceKind kind1, Mat k_q1, double mu1,
                                      double nu1, SpatialDisturbanceKind kind2, Mat k_q2,
                                      double mu2, double nu2, double tau_r, Index l_r) {
  TwrScenario sc;
  sc.m = z_t.rows();
  sc.n1 = z_r1.rows();
  sc.n2 = z_r2.rows();
  sc.bc.g1 = KroneckerChannelModel::make(z_t, std::move(z_r1));
  sc.bc.g2 = KroneckerChannelModel::make(z_t, std::move(z_r2));
  sc.bc.d1 = DisturbanceModel::make(kind1, sc.bc.g1, std::move(k_q1), mu1, nu1);
  sc.bc.d2 = DisturbanceModel::make(kind2, sc.bc.g2, std::move(k_q2), mu2, nu2);
  sc.bc.tau_r = tau_r;
  sc.bc.l_r = l_r;
  const Index l_s = sc.n1 + sc.n2;
  sc.mac.h1 = KroneckerChannelModel::make(Mat::Identity(sc.n1, sc.n1),
                                          Mat::Identity(sc.m, sc.m));
  sc.mac.h2 = KroneckerChannelModel::make(Mat::Identity(sc.n2, sc.n2),
                                          Mat::Identity(sc.m, sc.m));
  sc.mac.dist = DisturbanceModel::make(SpatialDisturbanceKind::spatially_uncorrelated,
                                       sc.mac.h1, Mat::Identity(l_s, l_s));
  sc.mac.l_s = l_s;
  sc.mac.tau1 = tau_r / 2;
  sc.mac.tau2 = tau_r / 2;
  return sc;
}

// Small random scenario with dims <= 3 and every structural invariant in
// place; disturbance kinds cycle with the seed.
inline TwrScenario random_scenario(CounterRng& rng, bool full_length = false) {
  ScenarioConfig cfg;
  cfg.n1 = 1 + static_cast<Index>(rng.next_u64() % 3);
  cfg.n2 = 1 + static_cast<Index>(rng.next_u64() % 3);
  cfg.m = 1 + static_cast<Index>(rng.next_u64() % 3);
  cfg.power = 0.5 + 4.0 * rng.next_unit();
  cfg.tau_split = 0.25 + 0.5 * rng.next_unit();
  cfg.tau_r = 0.5 + 4.0 * rng.next_unit();
  cfg.mac.length = cfg.n1 + cfg.n2 + (full_length ? 0 : static_cast<Index>(rng.next_u64() % 2));
  cfg.bc.length = cfg.m + (full_length ? 0 : static_cast<Index>(rng.next_u64() % 2));
  cfg.mac.d_t1 = 0.5 + 2.0 * rng.next_unit();
  cfg.mac.d_t2 = 0.5 + 2.0 * rng.next_unit();
  cfg.mac.d_r = 0.5 + 2.0 * rng.next_unit();
  cfg.mac.eta = -0.9 + 1.8 * rng.next_unit();
  cfg.mac.interference = 0.3 + rng.next_unit();
  cfg.bc.d_t = 0.5 + 2.0 * rng.next_unit();
  cfg.bc.d_r1 = 0.5 + 2.0 * rng.next_unit();
  cfg.bc.d_r2 = 0.5 + 2.0 * rng.next_unit();
  cfg.bc.eta1 = -0.9 + 1.8 * rng.next_unit();
  cfg.bc.eta2 = -0.9 + 1.8 * rng.next_unit();
  cfg.bc.interference1 = 0.3 + rng.next_unit();
  cfg.bc.interference2 = 0.3 + rng.next_unit();
  const SpatialDisturbanceKind kinds[4] = {
      SpatialDisturbanceKind::noise_limited,
      SpatialDisturbanceKind::interference_limited,
      SpatialDisturbanceKind::noise_plus_interference,
      SpatialDisturbanceKind::spatially_uncorrelated,
  };
  cfg.mac.spatial = kinds[rng.next_u64() % 4];
  cfg.bc.spatial1 = kinds[rng.next_u64() % 4];
  cfg.bc.spatial2 = kinds[rng.next_u64() % 4];
  cfg.mac.mu = 0.5 + rng.next_unit();
  cfg.bc.mu1 = 0.5 + rng.next_unit();
  cfg.bc.mu2 = 0.5 + rng.next_unit();
  const double snr_db = -5.0 + 20.0 * rng.next_unit();
  return build_scenario(cfg, snr_db);
}

}  // namespace twr::test
