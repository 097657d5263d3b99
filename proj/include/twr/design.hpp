#pragma once

#include <array>
#include <string>
#include <vector>

#include "twr/lmmse.hpp"

namespace twr {

enum class DesignMethod {
  alternating,      // alternating estimator / sequence optimization
  kkt_closed_form,  // interference-limited MAC special case
  waterfilling,     // white-temporal MAC special case
  convex_psd,       // white-temporal MAC special case via the Gram matrix
  svd_mixed,        // BC with one white temporal factor
  svd_white,        // BC with both temporal factors white
  convex_qr,        // BC with uncorrelated relay antennas
  identity_baseline,
  p2p_orthogonal,   // time-orthogonal point-to-point baseline
};

std::string to_string(DesignMethod m);
DesignMethod design_method_from_string(const std::string& s);
bool method_is_mac(DesignMethod m);
bool method_is_bc(DesignMethod m);

struct DesignReport {
  TrainingSequence seq;
  double mse = 0.0;                      // total analytic MSE
  std::array<double, 2> per_side{};      // BC: (e1, e2)
  std::vector<double> trace;             // per-iteration MSE, first entry = init
  std::array<double, 2> multipliers{};
  double kkt_residual = 0.0;
  DesignMethod method = DesignMethod::alternating;
  int iterations = 0;
};

}  // namespace twr
