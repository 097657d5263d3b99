#include "twr/channel_model.hpp"

#include <cmath>

namespace twr {

double bessel_j0(double x) {
  const double ax = std::fabs(x);
  if (ax < 8.0) {
    const double y = x * x;
    const double p1 = 57568490574.0 +
                      y * (-13362590354.0 +
                           y * (651619640.7 +
                                y * (-11214424.18 +
                                     y * (77392.33017 + y * (-184.9052456)))));
    const double p2 = 57568490411.0 +
                      y * (1029532985.0 +
                           y * (9494680.718 +
                                y * (59272.64853 + y * (267.8532712 + y))));
    return p1 / p2;
  }
  const double z = 8.0 / ax;
  const double y = z * z;
  const double xx = ax - 0.785398164;
  const double p1 = 1.0 + y * (-0.1098628627e-2 +
                               y * (0.2734510407e-4 +
                                    y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
  const double p2 = -0.1562499995e-1 +
                    y * (0.1430488765e-3 +
                         y * (-0.6911147651e-5 +
                              y * (0.7621095161e-6 - y * 0.934935152e-7)));
  return std::sqrt(0.636619772 / ax) * (std::cos(xx) * p1 - z * std::sin(xx) * p2);
}

Mat bessel_spatial_cov(Index n, double spacing, double target_trace) {
  if (n < 1) throw DimensionError("bessel_spatial_cov: n must be >= 1");
  if (target_trace <= 0.0) throw Error("bessel_spatial_cov: target_trace must be > 0");
  Mat cov(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      cov(i, j) = bessel_j0(spacing * std::abs(static_cast<double>(i - j)));
    }
  }
  // normalize against the evaluated diagonal so the trace is exact
  cov *= target_trace / cov.trace().real();
  HermitianEig eg = hermitian_eig(cov);
  if (eg.values.minCoeff() < 0.0) {
    cov = eg.vectors * eg.values.cwiseMax(0.0).asDiagonal() * eg.vectors.adjoint();
    cov *= target_trace / cov.trace().real();
  }
  return cov;
}

Mat ar1_temporal_cov(Index l, double eta, double strength) {
  if (l < 1) throw DimensionError("ar1_temporal_cov: l must be >= 1");
  if (std::fabs(eta) >= 1.0) throw Error("ar1_temporal_cov: |eta| must be < 1");
  if (strength < 0.0) throw Error("ar1_temporal_cov: strength must be >= 0");
  const double k = 1.0;  // unit diagonal already has trace l
  Mat cov(l, l);
  for (Index i = 0; i < l; ++i) {
    for (Index j = 0; j < l; ++j) {
      cov(i, j) = strength * k * std::pow(eta, std::abs(static_cast<double>(i - j)));
    }
  }
  return cov;
}

KroneckerChannelModel KroneckerChannelModel::make(Mat z_t_in, Mat z_r_in) {
  KroneckerChannelModel m;
  m.z_t = std::move(z_t_in);
  m.z_r = std::move(z_r_in);
  m.c_t = hermitian_factor(m.z_t);
  m.c_r = hermitian_factor(m.z_r);
  m.eig_t = hermitian_eig(m.z_t);
  m.eig_r = hermitian_eig(m.z_r);
  return m;
}

SpatialDisturbanceKind spatial_kind_from_string(const std::string& s) {
  if (s == "noise_limited") return SpatialDisturbanceKind::noise_limited;
  if (s == "interference_limited") return SpatialDisturbanceKind::interference_limited;
  if (s == "noise_plus_interference") return SpatialDisturbanceKind::noise_plus_interference;
  if (s == "spatially_uncorrelated") return SpatialDisturbanceKind::spatially_uncorrelated;
  throw Error("unknown spatial disturbance kind: " + s);
}

std::string to_string(SpatialDisturbanceKind kind) {
  switch (kind) {
    case SpatialDisturbanceKind::noise_limited: return "noise_limited";
    case SpatialDisturbanceKind::interference_limited: return "interference_limited";
    case SpatialDisturbanceKind::noise_plus_interference: return "noise_plus_interference";
    case SpatialDisturbanceKind::spatially_uncorrelated: return "spatially_uncorrelated";
  }
  throw Error("unknown spatial disturbance kind");
}

DisturbanceModel DisturbanceModel::make(SpatialDisturbanceKind kind,
                                        const KroneckerChannelModel& paired,
                                        Mat k_q, double mu, double nu) {
  DisturbanceModel d;
  d.kind = kind;
  d.k_q = std::move(k_q);
  d.v_r = paired.eig_r.vectors;
  const Index n = paired.rx();
  switch (kind) {
    case SpatialDisturbanceKind::noise_limited:
      if (mu <= 0.0) throw Error("noise_limited disturbance needs mu > 0");
      d.k_r = mu * Mat::Identity(n, n);
      d.delta_r = RealVec::Constant(n, mu);
      break;
    case SpatialDisturbanceKind::interference_limited:
      d.k_r = paired.z_r;
      d.delta_r = paired.eig_r.values;
      break;
    case SpatialDisturbanceKind::noise_plus_interference:
      if (mu <= 0.0) throw Error("noise_plus_interference disturbance needs mu > 0");
      d.k_r = mu * Mat::Identity(n, n) + nu * paired.z_r;
      d.delta_r = (RealVec::Constant(n, mu) + nu * paired.eig_r.values).eval();
      break;
    case SpatialDisturbanceKind::spatially_uncorrelated:
      d.k_r = Mat::Identity(n, n);
      d.delta_r = RealVec::Ones(n);
      break;
  }
  d.eig_q = hermitian_eig(d.k_q);
  d.r_q = hermitian_factor(d.k_q);
  d.r_r = d.v_r * d.delta_r.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return d;
}

DisturbanceModel DisturbanceModel::from_parts(Mat k_q, Mat k_r, Mat v_r,
                                              RealVec delta_r,
                                              SpatialDisturbanceKind kind) {
  DisturbanceModel d;
  d.kind = kind;
  d.k_q = std::move(k_q);
  d.k_r = std::move(k_r);
  d.v_r = std::move(v_r);
  d.delta_r = std::move(delta_r);
  d.eig_q = hermitian_eig(d.k_q);
  d.r_q = hermitian_factor(d.k_q);
  d.r_r = d.v_r * d.delta_r.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return d;
}

Mat DisturbanceModel::full_cov() const { return kron(k_q, k_r); }

Mat sample_channel(const KroneckerChannelModel& model, CounterRng& rng) {
  Mat w(model.rx(), model.tx());
  for (Index j = 0; j < w.cols(); ++j) {
    for (Index i = 0; i < w.rows(); ++i) {
      w(i, j) = rng.next_cgauss();
    }
  }
  return model.c_r * w * model.c_t.transpose();
}

Mat sample_disturbance(const DisturbanceModel& model, CounterRng& rng) {
  Mat w(model.spatial_dim(), model.temporal_len());
  for (Index j = 0; j < w.cols(); ++j) {
    for (Index i = 0; i < w.rows(); ++i) {
      w(i, j) = rng.next_cgauss();
    }
  }
  return model.r_r * w * model.r_q.transpose();
}

void TwrScenario::validate() const {
  if (n1 < 1 || n2 < 1 || m < 1) throw Error("scenario: antenna counts must be >= 1");
  if (mac.l_s < 1 || bc.l_r < 1) throw Error("scenario: training lengths must be >= 1");
  if (mac.tau1 < 0 || mac.tau2 < 0 || bc.tau_r < 0) {
    throw Error("scenario: power budgets must be >= 0");
  }
  if (mac.h1.tx() != n1 || mac.h2.tx() != n2 || mac.h1.rx() != m || mac.h2.rx() != m) {
    throw DimensionError("scenario: MAC channel dimensions inconsistent");
  }
  if (bc.g1.tx() != m || bc.g2.tx() != m || bc.g1.rx() != n1 || bc.g2.rx() != n2) {
    throw DimensionError("scenario: BC channel dimensions inconsistent");
  }
  if (mac.h1.z_r != mac.h2.z_r) {
    throw Error("scenario: MAC hops must share the relay receive covariance");
  }
  if (bc.g1.z_t != bc.g2.z_t) {
    throw Error("scenario: BC hops must share the relay transmit covariance");
  }
  if (mac.dist.temporal_len() != mac.l_s || mac.dist.spatial_dim() != m) {
    throw DimensionError("scenario: MAC disturbance dimensions inconsistent");
  }
  if (bc.d1.temporal_len() != bc.l_r || bc.d2.temporal_len() != bc.l_r ||
      bc.d1.spatial_dim() != n1 || bc.d2.spatial_dim() != n2) {
    throw DimensionError("scenario: BC disturbance dimensions inconsistent");
  }
}

}  // namespace twr
