#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twr/bc_design.hpp"
#include "twr/config.hpp"
#include "twr/mac_design.hpp"

namespace twr {

struct ResultRow {
  std::string method;
  double snr_db = 0.0;
  double analytic_nmse = 0.0;
  double empirical_nmse = 0.0;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  std::uint64_t seed = 0;
};

// Dispatch one design method on a built scenario. Random initializations
// draw from (seed, stream) counters so results are reproducible.
DesignReport run_design(const TwrScenario& sc, Phase phase, DesignMethod method,
                        const InitSpec& init, std::uint64_t seed);

// Time-orthogonal point-to-point baseline: MAC sources train in disjoint
// windows, each designed on its own hop; the BC sequence is designed for
// the hop to source 1 only. Estimation still uses the joint LMMSE.
TrainingSequence p2p_orthogonal_baseline(const TwrScenario& sc, Phase phase);

// Monte-Carlo estimate of E||H - H_hat||_F^2 (totals over both hops),
// parallelized over trials with per-trial streams; deterministic for a
// given seed regardless of worker count.
double empirical_total_mse(const TwrScenario& sc, Phase phase,
                           const TrainingSequence& seq, int trials,
                           std::uint64_t seed, std::uint64_t stream_base);

// Full sweep: every (method, snr) cell designed, analyzed and simulated.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

void emit_results(const std::vector<ResultRow>& rows, const std::string& format,
                  const std::string& path);
std::vector<ResultRow> parse_results(const std::string& format, const std::string& path);

void emit_convergence(const std::vector<double>& trace, const std::string& path);

double nmse_scale(const TwrScenario& sc);  // M (N1 + N2)

}  // namespace twr
