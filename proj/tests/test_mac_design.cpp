#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "twr/mac_design.hpp"

using namespace twr;

namespace {

ScenarioConfig white_temporal_config(CounterRng& rng) {
  ScenarioConfig cfg;
  cfg.n1 = 2;
  cfg.n2 = 2;
  cfg.m = 2;
  cfg.mac.length = 4;
  cfg.mac.temporal = TemporalKind::white;
  cfg.mac.d_t1 = 0.8 + rng.next_unit();
  cfg.mac.d_t2 = 0.8 + rng.next_unit();
  cfg.mac.d_r = 0.8 + rng.next_unit();
  cfg.mac.spatial = SpatialDisturbanceKind::noise_plus_interference;
  cfg.power = 1.0 + 3.0 * rng.next_unit();
  return cfg;
}

// Exhaustive objective for the 1x1x1, L_S = 2 instance: rows at full power
// with all phase freedom; the single receive mode gives a 2x2 closed form.
double tiny_grid_minimum(const TwrScenario& sc) {
  const double tau1 = sc.mac.tau1;
  const double tau2 = sc.mac.tau2;
  const double sigma_r = sc.mac.h1.eig_r.values[0];
  const double delta_r = sc.mac.dist.delta_r[0];
  const double beta = sigma_r / delta_r;
  const double z1 = sc.mac.h1.z_t(0, 0).real();
  const double z2 = sc.mac.h2.z_t(0, 0).real();
  const Mat kq_inv = sc.mac.dist.k_q.inverse();

  double best = 1e300;
  const int np = 51, nph = 16;
  for (int c1i = 0; c1i < np; ++c1i) {
    const double c1 = static_cast<double>(c1i) / (np - 1);
    for (int c2i = 0; c2i < np; ++c2i) {
      const double c2 = static_cast<double>(c2i) / (np - 1);
      for (int f1 = 0; f1 < nph; ++f1) {
        const double ph1 = 2.0 * M_PI * f1 / nph;
        for (int f2 = 0; f2 < nph; ++f2) {
          const double ph2 = 2.0 * M_PI * f2 / nph;
          for (int f3 = 0; f3 < nph; ++f3) {
            const double ps = 2.0 * M_PI * f3 / nph;
            Eigen::Vector2cd s1, s2;
            s1 << std::sqrt(tau1 * c1),
                std::sqrt(tau1 * (1.0 - c1)) * std::polar(1.0, ph1);
            s2 << std::polar(std::sqrt(tau2 * c2), ps),
                std::sqrt(tau2 * (1.0 - c2)) * std::polar(1.0, ph2 + ps);
            // X = conj(S) Kq^{-1} S^T on the stacked 2x2 sequence
            Eigen::Matrix2cd x;
            x(0, 0) = (s1.conjugate().transpose() * kq_inv * s1)(0);
            x(0, 1) = (s1.conjugate().transpose() * kq_inv * s2)(0);
            x(1, 0) = std::conj(x(0, 1));
            x(1, 1) = (s2.conjugate().transpose() * kq_inv * s2)(0);
            Eigen::Matrix2cd inner = beta * x;
            inner(0, 0) += 1.0 / z1;
            inner(1, 1) += 1.0 / z2;
            const double e = sigma_r * inner.inverse().trace().real();
            if (e < best) best = e;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("qcqp build matches the fixed-estimator MSE up to a constant") {
  CounterRng rng(51);
  for (int rep = 0; rep < 5; ++rep) {
    const TwrScenario sc = test::random_scenario(rng);
    TrainingSequence seq = mac_identity_sequence(sc);
    const LmmseEstimator est = mac_estimator(sc, seq);
    const QcqpProblem qp = build_mac_qcqp(sc, est.t);

    TrainingSequence zero = seq;
    zero.s.setZero();
    const double constant = mac_mse_fixed_estimator(sc, est.t, zero);
    for (int k = 0; k < 4; ++k) {
      Mat s = test::random_complex(sc.n1 + sc.n2, sc.mac.l_s, rng);
      const double p1 = s.topRows(sc.n1).squaredNorm();
      const double p2 = s.bottomRows(sc.n2).squaredNorm();
      s.topRows(sc.n1) *= std::sqrt(sc.mac.tau1 / p1);
      s.bottomRows(sc.n2) *= std::sqrt(sc.mac.tau2 / p2);
      TrainingSequence cand = seq;
      cand.s = s;
      const Vec sv = vec(s);
      const double quad = sv.dot(qp.a * sv).real() - 2.0 * qp.b.dot(sv).real();
      const double full = mac_mse_fixed_estimator(sc, est.t, cand);
      CHECK(quad + constant == doctest::Approx(full).epsilon(1e-9));

      // power constraint forms are exact
      CHECK(sv.dot(qp.constraints[0].c * sv).real() ==
            doctest::Approx(s.topRows(sc.n1).squaredNorm()).epsilon(1e-12));
      CHECK(sv.dot(qp.constraints[1].c * sv).real() ==
            doctest::Approx(s.bottomRows(sc.n2).squaredNorm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("qcqp build degenerates cleanly for a zero estimator") {
  CounterRng rng(52);
  const TwrScenario sc = test::random_scenario(rng);
  const Mat t0 = Mat::Zero(sc.m * (sc.n1 + sc.n2), sc.m * sc.mac.l_s);
  const QcqpProblem qp = build_mac_qcqp(sc, t0);
  CHECK(qp.a.norm() == doctest::Approx(0.0));
  CHECK(qp.b.norm() == doctest::Approx(0.0));
}

TEST_CASE("alternating design: zero power stays at the prior") {
  CounterRng rng(53);
  TwrScenario sc = test::random_scenario(rng);
  sc.mac.tau1 = 0.0;
  sc.mac.tau2 = 0.0;
  const DesignReport rep = design_mac_alternating(sc, mac_identity_sequence(sc));
  CHECK(rep.seq.s.norm() == doctest::Approx(0.0));
  const double prior = mac_stacked_zt(sc).trace().real() * sc.mac.h1.z_r.trace().real();
  CHECK(rep.mse == doctest::Approx(prior).epsilon(1e-10));
}

TEST_CASE("alternating design: monotone trace and KKT residual on random scenarios") {
  CounterRng rng(54);
  for (int rep = 0; rep < 6; ++rep) {
    const TwrScenario sc = test::random_scenario(rng);
    const DesignReport r = design_mac_alternating(sc, mac_identity_sequence(sc));
    REQUIRE(r.trace.size() >= 2);
    for (size_t i = 1; i < r.trace.size(); ++i) {
      CHECK(r.trace[i] <= r.trace[i - 1] * (1.0 + 1e-9));
    }
    CHECK(r.kkt_residual <= 1e-6);
    r.seq.validate(sc);
  }
}

TEST_CASE("alternating design matches water-filling in the white-temporal case") {
  CounterRng rng(55);
  const ScenarioConfig cfg = white_temporal_config(rng);
  const TwrScenario sc = build_scenario(cfg, 8.0);
  const DesignReport alt = design_mac_alternating(sc, mac_identity_sequence(sc), 1e-8, 300);
  const DesignReport wf = design_mac_waterfilling(sc);
  CHECK(alt.mse == doctest::Approx(wf.mse).epsilon(0.005));
}

TEST_CASE("alternating design reaches the exhaustive-grid optimum on a tiny instance") {
  Mat one = Mat::Identity(1, 1);
  const Mat k_q = ar1_temporal_cov(2, 0.6, 0.8);
  const TwrScenario sc = test::manual_mac_scenario(
      1.3 * one, 0.9 * one, one, SpatialDisturbanceKind::noise_limited, k_q, 0.7, 0.0,
      1.8, 1.1, 2);
  const DesignReport rep = design_mac_alternating(sc, mac_identity_sequence(sc), 1e-9, 400);
  const double grid = tiny_grid_minimum(sc);
  CHECK(rep.mse <= grid * (1.0 + 0.01));
  CHECK(rep.mse >= grid * (1.0 - 0.01));
}

TEST_CASE("closed-form KKT design: preconditions and agreement with alternating") {
  CounterRng rng(56);
  ScenarioConfig cfg;
  cfg.n1 = 2;
  cfg.n2 = 2;
  cfg.m = 2;
  cfg.mac.length = 4;
  cfg.mac.spatial = SpatialDisturbanceKind::interference_limited;
  cfg.mac.d_r = 2.0;  // keep the receive covariance well conditioned
  const TwrScenario sc = build_scenario(cfg, 6.0);

  const DesignReport kkt = design_mac_kkt_closed_form(sc, 1e-8, 400);
  for (size_t i = 1; i < kkt.trace.size(); ++i) {
    CHECK(kkt.trace[i] <= kkt.trace[i - 1] * (1.0 + 1e-9));
  }
  const DesignReport alt = design_mac_alternating(sc, mac_identity_sequence(sc), 1e-8, 400);
  CHECK(kkt.mse <= alt.mse * (1.0 + 0.005));
  kkt.seq.validate(sc);

  ScenarioConfig wrong = cfg;
  wrong.mac.spatial = SpatialDisturbanceKind::noise_limited;
  CHECK_THROWS_AS(design_mac_kkt_closed_form(build_scenario(wrong, 6.0)),
                  WrongScenarioKindError);
}

TEST_CASE("multiplier bound: g at the stated upper bound is within budget") {
  CounterRng rng(57);
  for (int rep = 0; rep < 100; ++rep) {
    const Index l = 2 + static_cast<Index>(rng.next_u64() % 3);
    const Index n = 1 + static_cast<Index>(rng.next_u64() % 3);
    const Mat x1 = test::random_psd(l, rng);
    const Mat x2 = test::random_psd(n, rng);
    const Vec x3 = test::random_complex(n * l, 1, rng).col(0);
    const double tau = 0.1 + 2.0 * rng.next_unit();
    const Mat big = kron(x1, x2);
    auto g = [&](double lam) {
      Mat m = big + lam * Mat::Identity(n * l, n * l);
      return solve_hermitian(m, x3).squaredNorm();
    };
    const double sigma_min = hermitian_eig(big).values.minCoeff();
    const double bound = std::sqrt(x3.squaredNorm() / tau) - sigma_min;
    if (bound > 0) {
      CHECK(g(bound) <= tau * (1.0 + 1e-9));
    } else {
      CHECK(g(0.0) <= tau * (1.0 + 1e-9));
    }
    // monotone decrease on a sampled grid
    double prev = g(1e-6);
    for (double lam = 0.1; lam < 3.0; lam += 0.35) {
      const double cur = g(lam);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("water-filling design: structure, oracle and guards") {
  CounterRng rng(58);
  ScenarioConfig cfg = white_temporal_config(rng);
  const TwrScenario sc = build_scenario(cfg, 7.0);

  const DesignReport wf = design_mac_waterfilling(sc);
  wf.seq.validate(sc);
  const Mat s1 = wf.seq.s.topRows(sc.n1);
  const Mat s2 = wf.seq.s.bottomRows(sc.n2);
  CHECK((s1.conjugate() * s2.transpose()).norm() == doctest::Approx(0.0));

  // per-source golden-section oracle over the two-stream simplex
  const double q = mac_white_temporal_level(sc);
  const RealVec alpha = mac_mode_coefficients(sc, q);
  const RealVec& sr = sc.mac.h1.eig_r.values;
  for (int i = 1; i <= 2; ++i) {
    const auto& hop = i == 1 ? sc.mac.h1 : sc.mac.h2;
    const double tau = i == 1 ? sc.mac.tau1 : sc.mac.tau2;
    const RealVec& st = hop.eig_t.values;
    auto objective = [&](double p0) {
      double e = 0.0;
      const double p[2] = {p0, tau - p0};
      for (Index n = 0; n < sr.size(); ++n) {
        for (int m = 0; m < 2; ++m) {
          e += sr[n] * st[m] / (1.0 + alpha[n] * st[m] * p[m]);
        }
      }
      return e;
    };
    double lo = 0.0, hi = tau;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 200; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = objective(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = objective(x2);
      }
    }
    const double oracle_p0 = 0.5 * (lo + hi);
    const Mat si = i == 1 ? s1 : s2;
    // recover per-mode powers: S_i = conj(U_t) Sigma V^H means the m-th
    // mode power is the squared norm of row m of U_t^T S_i
    const RealVec mode_amp = (hop.eig_t.vectors.transpose() * si).rowwise().norm();
    CHECK(mode_amp[0] * mode_amp[0] ==
          doctest::Approx(oracle_p0).epsilon(1e-4).scale(std::max(1.0, tau)));
    CHECK(mode_amp[0] * mode_amp[0] + mode_amp[1] * mode_amp[1] ==
          doctest::Approx(tau).epsilon(1e-9));
  }

  // guards
  ScenarioConfig colored = cfg;
  colored.mac.temporal = TemporalKind::ar1;
  CHECK_THROWS_AS(design_mac_waterfilling(build_scenario(colored, 7.0)),
                  WrongScenarioKindError);
  ScenarioConfig short_cfg = cfg;
  short_cfg.mac.length = 3;
  CHECK_THROWS_AS(design_mac_waterfilling(build_scenario(short_cfg, 7.0)),
                  LengthTooShortError);
}

TEST_CASE("single-antenna sources put the full budget on one stream") {
  CounterRng rng(59);
  ScenarioConfig cfg;
  cfg.n1 = 1;
  cfg.n2 = 1;
  cfg.m = 2;
  cfg.mac.length = 2;
  cfg.mac.temporal = TemporalKind::white;
  const TwrScenario sc = build_scenario(cfg, 5.0);
  const DesignReport wf = design_mac_waterfilling(sc);
  CHECK(wf.seq.s.topRows(1).squaredNorm() == doctest::Approx(sc.mac.tau1).epsilon(1e-10));
  CHECK(wf.seq.s.bottomRows(1).squaredNorm() ==
        doctest::Approx(sc.mac.tau2).epsilon(1e-10));
}

TEST_CASE("orthogonality is necessary: column mixing never improves the MSE") {
  CounterRng rng(60);
  const ScenarioConfig cfg = white_temporal_config(rng);
  const TwrScenario sc = build_scenario(cfg, 8.0);
  const DesignReport wf = design_mac_waterfilling(sc);
  const double base = wf.mse;
  for (int rep = 0; rep < 10; ++rep) {
    // rotate a source-1 column into a source-2 column at fixed row powers
    Mat s = wf.seq.s;
    const Index c1 = static_cast<Index>(rng.next_u64() % sc.n1);
    const Index c2 = sc.n1 + static_cast<Index>(rng.next_u64() % sc.n2);
    const double theta = 0.1 + 1.4 * rng.next_unit();
    const Vec a = s.col(c1), b = s.col(c2);
    s.col(c1) = std::cos(theta) * a + std::sin(theta) * b;
    s.col(c2) = -std::sin(theta) * a + std::cos(theta) * b;
    // restore exact per-source powers
    const double p1 = s.topRows(sc.n1).squaredNorm();
    const double p2 = s.bottomRows(sc.n2).squaredNorm();
    if (p1 > 0) s.topRows(sc.n1) *= std::sqrt(sc.mac.tau1 / p1);
    if (p2 > 0) s.bottomRows(sc.n2) *= std::sqrt(sc.mac.tau2 / p2);
    TrainingSequence cand = wf.seq;
    cand.s = s;
    CHECK(mac_mse(sc, cand) >= base * (1.0 - 1e-9));
  }
}

TEST_CASE("Gram-matrix design agrees with water-filling") {
  CounterRng rng(61);
  const ScenarioConfig cfg = white_temporal_config(rng);
  const TwrScenario sc = build_scenario(cfg, 9.0);
  const DesignReport wf = design_mac_waterfilling(sc);
  const DesignReport cp = design_mac_convex_psd(sc);
  CHECK(cp.mse == doctest::Approx(wf.mse).epsilon(0.005));
  cp.seq.validate(sc);

  // zero budget edge
  TwrScenario zero = sc;
  zero.mac.tau1 = 0.0;
  zero.mac.tau2 = 0.0;
  const DesignReport z = design_mac_convex_psd(zero);
  CHECK(z.seq.s.norm() == doctest::Approx(0.0));
}

TEST_CASE("Gram-matrix design equals per-mode water-filling on a diagonal instance") {
  // diagonal transmit covariances make the optimal Gram matrix diagonal
  Mat z1 = Mat::Zero(2, 2), z2 = Mat::Zero(2, 2);
  z1.diagonal() << 1.4, 0.6;
  z2.diagonal() << 1.1, 0.9;
  const Mat z_r = bessel_spatial_cov(2, 1.4, 2.0);
  const Mat k_q = 0.5 * Mat::Identity(4, 4);
  const TwrScenario sc = test::manual_mac_scenario(
      z1, z2, z_r, SpatialDisturbanceKind::noise_plus_interference, k_q, 1.0, 1.0, 2.0,
      3.0, 4);
  const DesignReport wf = design_mac_waterfilling(sc);
  const DesignReport cp = design_mac_convex_psd(sc);
  // Q should be diagonal with the water-filling powers
  const Mat q_wf = wf.seq.s.conjugate() * wf.seq.s.transpose();
  const Mat q_cp = cp.seq.s.conjugate() * cp.seq.s.transpose();
  CHECK((q_wf - q_cp).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, q_wf.norm()));
  CHECK(cp.mse == doctest::Approx(wf.mse).epsilon(1e-6));
}

TEST_CASE("objective convexity witness over the PSD cone") {
  CounterRng rng(62);
  const ScenarioConfig cfg = white_temporal_config(rng);
  const TwrScenario sc = build_scenario(cfg, 8.0);
  const double q = mac_white_temporal_level(sc);
  const RealVec alpha = mac_mode_coefficients(sc, q);
  const Mat zt = mac_stacked_zt(sc);
  PsdTraceInverseProblem prob;
  prob.dim = sc.n1 + sc.n2;
  const Mat zt_inv = zt.inverse();
  for (Index n = 0; n < alpha.size(); ++n) {
    prob.terms.push_back({sc.mac.h1.eig_r.values[n], zt_inv, alpha[n], Mat()});
  }
  for (int rep = 0; rep < 50; ++rep) {
    const Mat q1 = test::random_psd(prob.dim, rng);
    const Mat q2 = test::random_psd(prob.dim, rng);
    const double t = rng.next_unit();
    const double mix = trace_inverse_objective(prob, t * q1 + (1.0 - t) * q2);
    const double sep = t * trace_inverse_objective(prob, q1) +
                       (1.0 - t) * trace_inverse_objective(prob, q2);
    CHECK(mix <= sep + 1e-9 * std::max(1.0, sep));
  }
}

TEST_CASE("MSE floor and minimum training length") {
  CounterRng rng(63);
  const TwrScenario sc = test::random_scenario(rng);
  CHECK(min_training_length_mac(sc) == sc.n1 + sc.n2);
  CHECK(mac_mse_floor(sc, sc.n1 + sc.n2) == doctest::Approx(0.0));
  CHECK(mac_mse_floor(sc, sc.n1 + sc.n2 + 3) == doctest::Approx(0.0));

  // white case with known numbers: all sigma_t = 1, Tr(Z_r) = 3, N = 6, L = 4
  TwrScenario white;
  white.n1 = 3;
  white.n2 = 3;
  white.m = 3;
  white.mac.h1 = KroneckerChannelModel::make(Mat::Identity(3, 3), Mat::Identity(3, 3));
  white.mac.h2 = KroneckerChannelModel::make(Mat::Identity(3, 3), Mat::Identity(3, 3));
  white.mac.dist = DisturbanceModel::make(SpatialDisturbanceKind::spatially_uncorrelated,
                                          white.mac.h1, Mat::Identity(4, 4));
  white.mac.l_s = 4;
  white.mac.tau1 = white.mac.tau2 = 1.0;
  CHECK(mac_mse_floor(white, 4) == doctest::Approx(6.0));
}
