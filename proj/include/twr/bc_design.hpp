#pragma once

#include "twr/design.hpp"
#include "twr/solvers.hpp"

namespace twr {

TrainingSequence bc_identity_sequence(const TwrScenario& sc);
TrainingSequence bc_random_sequence(const TwrScenario& sc, CounterRng& rng);

// Generic alternating optimizer for a transmit sequence shared by several
// hops under one trace budget: the sequence update is the single-multiplier
// closed form with a bisected lambda. The BC designer and the
// point-to-point baseline are both instances of it.
struct BroadcastHop {
  KroneckerChannelModel model;
  DisturbanceModel dist;
};

struct AltTxDesign {
  Mat s;
  double mse = 0.0;
  std::vector<double> per_hop;
  std::vector<double> trace;
  double multiplier = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

AltTxDesign alternating_tx_design(const std::vector<BroadcastHop>& hops, double tau,
                                  Index l, const Mat& s_init, double tol = 1e-6,
                                  int max_iter = 200);

DesignReport design_bc_alternating(const TwrScenario& sc, const TrainingSequence& init,
                                   double tol = 1e-6, int max_iter = 200);

// One white temporal factor (side 1): eigenbasis sequence with the
// opposite-order pairing against the side-2 temporal eigenvalues.
DesignReport design_bc_svd_mixed(const TwrScenario& sc);

// Both temporal factors white: eigenbasis sequence, per-mode allocation.
DesignReport design_bc_svd_white(const TwrScenario& sc);

// Uncorrelated relay antennas (Z_t = a I): convex program over the Gram
// matrix Q = S^T conj(S).
DesignReport design_bc_convex_qr(const TwrScenario& sc, double tol = 1e-8);

double bc_mse_floor(const TwrScenario& sc, Index l_r);
Index min_training_length_bc(const TwrScenario& sc);

// Requires K_{q,side} = q I; returns q.
double bc_white_temporal_level(const TwrScenario& sc, int side);

}  // namespace twr
