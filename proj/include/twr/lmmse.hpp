#pragma once

#include <utility>

#include "twr/channel_model.hpp"

namespace twr {

enum class Phase { mac, bc };

// Training matrix under a trace power budget. MAC stacks both sources,
// s = [S1; S2] of shape (N1+N2) x L_S; BC holds the relay sequence,
// M x L_R.
struct TrainingSequence {
  Phase phase = Phase::mac;
  Mat s;
  double tau1 = 0.0;  // MAC: source-1 budget; BC: relay budget
  double tau2 = 0.0;  // MAC only

  // Throws if dimensions or power budgets are violated (1e-8 slack).
  void validate(const TwrScenario& sc) const;
};

// LMMSE estimator T for the whitened channel plus the factor map that
// lifts whitened estimates back to physical channel entries.
struct LmmseEstimator {
  Mat t;     // estimator matrix
  Mat lift;  // c_t kron c_r
  Index rx_rows = 0;   // rows of the estimated channel matrix
  Index tx_cols = 0;   // cols of the estimated channel matrix
};

// Single-hop primitives shared by the BC path and the point-to-point
// baseline: channel Y = H S + N with vec(H) = (c_t kron c_r) w.
Mat hop_response(const KroneckerChannelModel& hop, const Mat& s);
Mat hop_error_weight(const KroneckerChannelModel& hop);
double hop_mse(const KroneckerChannelModel& hop, const DisturbanceModel& dist,
               const Mat& s);
Mat hop_estimator(const KroneckerChannelModel& hop, const DisturbanceModel& dist,
                  const Mat& s);

// Wirtinger gradient of the analytic MSE with respect to conj(S): the
// first-order change under S -> S + dS is 2 Re Tr(grad^H dS).
Mat hop_mse_gradient(const KroneckerChannelModel& hop, const DisturbanceModel& dist,
                     const Mat& s);
Mat mac_mse_gradient(const TwrScenario& sc, const Mat& s);

// Stacked MAC-side quantities (both sources seen jointly at the relay).
Mat mac_stacked_ct(const TwrScenario& sc);   // Blkdiag(C_t1, C_t2)
Mat mac_stacked_zt(const TwrScenario& sc);   // Blkdiag(Z_t1, Z_t2)
Mat mac_response(const TwrScenario& sc, const Mat& s);  // S^T C_t kron C_r
Mat mac_error_weight(const TwrScenario& sc);            // C_t^H C_t kron C_r^H C_r
Mat bc_response(const TwrScenario& sc, const Mat& s_r, int side);
Mat bc_error_weight(const TwrScenario& sc, int side);

LmmseEstimator mac_estimator(const TwrScenario& sc, const TrainingSequence& seq);
LmmseEstimator bc_estimator(const TwrScenario& sc, const TrainingSequence& seq, int side);

// Analytic MSE of the optimal estimator.
double mac_mse(const TwrScenario& sc, const TrainingSequence& seq);
double bc_mse(const TwrScenario& sc, const TrainingSequence& seq, int side);

// Same MSE through the eigen-domain decomposition (valid when the
// disturbance shares the receive eigenvectors, which the constructors
// enforce). Requires invertible transmit covariance and temporal factor.
double mac_mse_eigen_domain(const TwrScenario& sc, const TrainingSequence& seq);
double bc_mse_eigen_domain(const TwrScenario& sc, const TrainingSequence& seq, int side);

// MSE of an arbitrary (not necessarily optimal) estimator matrix.
double mac_mse_fixed_estimator(const TwrScenario& sc, const Mat& t_r,
                               const TrainingSequence& seq);
double bc_mse_fixed_estimator(const TwrScenario& sc, const Mat& t_i,
                              const TrainingSequence& seq, int side);

// Apply an estimator to a received vector and reshape into channel
// matrices. MAC returns (H1_hat, H2_hat); BC returns G_side_hat.
std::pair<Mat, Mat> estimate_mac_channels(const TwrScenario& sc,
                                          const LmmseEstimator& est, const Vec& y);
Mat estimate_bc_channel(const TwrScenario& sc, const LmmseEstimator& est,
                        const Vec& y, int side);

}  // namespace twr
