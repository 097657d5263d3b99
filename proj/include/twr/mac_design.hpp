#pragma once

#include "twr/design.hpp"
#include "twr/solvers.hpp"

namespace twr {

// Scaled block-identity sequence ("identity" initialization scheme).
TrainingSequence mac_identity_sequence(const TwrScenario& sc);
TrainingSequence mac_random_sequence(const TwrScenario& sc, CounterRng& rng);

// Sequence-update subproblem for a fixed estimator, as a convex QCQP over
// vec(S). The objective equals the fixed-estimator MSE up to a constant.
QcqpProblem build_mac_qcqp(const TwrScenario& sc, const Mat& t_r);

// Alternating optimization of (estimator, sequence); the per-iteration MSE
// trace is non-increasing and the limit is a stationary point.
DesignReport design_mac_alternating(const TwrScenario& sc, const TrainingSequence& init,
                                    double tol = 1e-6, int max_iter = 200);

// Interference-limited special case (K_{r} equals the relay receive
// covariance): per-source closed-form update with a bisected multiplier.
DesignReport design_mac_kkt_closed_form(const TwrScenario& sc, double tol = 1e-6,
                                        int max_iter = 200);

// White-temporal special case: orthogonal sources, per-eigenmode
// water-filling power allocation.
DesignReport design_mac_waterfilling(const TwrScenario& sc);

// Same special case solved over the Gram matrix Q = conj(S) S^T with the
// PSD trace-inverse kernel.
DesignReport design_mac_convex_psd(const TwrScenario& sc, double tol = 1e-8);

// Irreducible MSE when the training length is below N1+N2, and the length
// needed to avoid any floor.
double mac_mse_floor(const TwrScenario& sc, Index l_s);
Index min_training_length_mac(const TwrScenario& sc);

// Eigen-domain coefficients shared by the white-temporal designs:
// alpha_n = sigma_{r,n} / (q * delta_{r,n}).
RealVec mac_mode_coefficients(const TwrScenario& sc, double q);

// Requires K_q = q I; returns q. Throws WrongScenarioKind otherwise.
double mac_white_temporal_level(const TwrScenario& sc);

}  // namespace twr
