#pragma once

#include "twr/linalg.hpp"
#include "twr/rng.hpp"
#include "twr/types.hpp"

namespace twr {

// Zeroth-order Bessel function of the first kind, Abramowitz-Stegun
// polynomial fit (|error| < 1e-7).
double bessel_j0(double x);

// Toeplitz spatial covariance [Z]_{n,m} = z * J0(d |n-m|), with z chosen so
// Tr(Z) = target_trace, clipped onto the PSD cone.
Mat bessel_spatial_cov(Index n, double spacing, double target_trace);

// AR(1) temporal covariance [K]_{n,m} = strength * k * eta^|n-m| with k
// normalizing the unscaled trace to l (k = 1 for this parametrization).
Mat ar1_temporal_cov(Index l, double eta, double strength);

// One hop's Kronecker statistics: cov(vec H) = z_t kron z_r, with the
// factor and eigendecomposition caches every consumer needs.
struct KroneckerChannelModel {
  Mat z_t, z_r;
  Mat c_t, c_r;  // z = c c^H factors
  HermitianEig eig_t, eig_r;

  static KroneckerChannelModel make(Mat z_t_in, Mat z_r_in);

  Index tx() const { return z_t.rows(); }
  Index rx() const { return z_r.rows(); }
};

enum class SpatialDisturbanceKind {
  noise_limited,             // k_r = mu I
  interference_limited,      // k_r = Z_r of the paired channel
  noise_plus_interference,   // k_r = mu I + nu Z_r
  spatially_uncorrelated,    // k_r = I
};

SpatialDisturbanceKind spatial_kind_from_string(const std::string& s);
std::string to_string(SpatialDisturbanceKind kind);

// Colored disturbance K = k_q kron k_r. The spatial factor is always built
// from the paired channel's receive covariance so the eigenvector-sharing
// assumption holds by construction; delta_r holds its eigenvalues in the
// paired eigenvector order.
struct DisturbanceModel {
  Mat k_q, k_r;
  Mat r_q, r_r;  // factors for sampling
  HermitianEig eig_q;
  Mat v_r;          // spatial eigenvectors (paired channel basis)
  RealVec delta_r;  // spatial eigenvalues in v_r column order
  SpatialDisturbanceKind kind;

  static DisturbanceModel make(SpatialDisturbanceKind kind,
                               const KroneckerChannelModel& paired, Mat k_q,
                               double mu = 1.0, double nu = 1.0);

  // Reassemble from explicit parts (e.g. a temporal sub-window of an
  // existing model); the spatial data is taken as-is.
  static DisturbanceModel from_parts(Mat k_q, Mat k_r, Mat v_r, RealVec delta_r,
                                     SpatialDisturbanceKind kind);

  Index temporal_len() const { return k_q.rows(); }
  Index spatial_dim() const { return k_r.rows(); }
  Mat full_cov() const;  // kron(k_q, k_r)
};

// Draw H = C_r W C_t^T with i.i.d. unit-variance circular Gaussian W;
// vec(H) then has covariance z_t kron z_r.
Mat sample_channel(const KroneckerChannelModel& model, CounterRng& rng);

// Draw N = R_r W R_q^T (spatial x temporal); vec(N) ~ CN(0, k_q kron k_r).
Mat sample_disturbance(const DisturbanceModel& model, CounterRng& rng);

struct MacSide {
  KroneckerChannelModel h1, h2;  // share z_r (relay receive side)
  DisturbanceModel dist;         // at the relay; k_q is L_S x L_S
  double tau1 = 0.0, tau2 = 0.0;
  Index l_s = 0;
};

struct BcSide {
  KroneckerChannelModel g1, g2;  // share z_t (relay transmit side)
  DisturbanceModel d1, d2;       // at the sources; k_q is L_R x L_R
  double tau_r = 0.0;
  Index l_r = 0;
};

struct TwrScenario {
  Index n1 = 0, n2 = 0, m = 0;
  MacSide mac;
  BcSide bc;

  // Enforces shared-covariance identities, dimension consistency and
  // positive budgets/lengths. Throws on violation.
  void validate() const;
};

}  // namespace twr
