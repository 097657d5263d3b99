#include "twr/sim.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace twr {

namespace {

DesignReport baseline_report(const TwrScenario& sc, Phase phase, DesignMethod method,
                             const TrainingSequence& seq) {
  DesignReport rep;
  rep.method = method;
  rep.seq = seq;
  if (phase == Phase::mac) {
    rep.mse = mac_mse(sc, seq);
  } else {
    rep.per_side = {bc_mse(sc, seq, 1), bc_mse(sc, seq, 2)};
    rep.mse = rep.per_side[0] + rep.per_side[1];
  }
  rep.trace.push_back(rep.mse);
  rep.iterations = 0;
  return rep;
}

TrainingSequence initial_sequence(const TwrScenario& sc, Phase phase,
                                  std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  return phase == Phase::mac ? mac_random_sequence(sc, rng) : bc_random_sequence(sc, rng);
}

DesignReport alternating_best_of(const TwrScenario& sc, Phase phase,
                                 const InitSpec& init, std::uint64_t seed) {
  if (init.identity) {
    const TrainingSequence s0 =
        phase == Phase::mac ? mac_identity_sequence(sc) : bc_identity_sequence(sc);
    return phase == Phase::mac ? design_mac_alternating(sc, s0)
                               : design_bc_alternating(sc, s0);
  }
  DesignReport best;
  bool have = false;
  for (int k = 0; k < init.random_count; ++k) {
    const TrainingSequence s0 =
        initial_sequence(sc, phase, seed, 0x5eed0000ULL + static_cast<std::uint64_t>(k));
    DesignReport rep = phase == Phase::mac ? design_mac_alternating(sc, s0)
                                           : design_bc_alternating(sc, s0);
    if (!have || rep.mse < best.mse) {
      best = std::move(rep);
      have = true;
    }
  }
  return best;
}

}  // namespace

double nmse_scale(const TwrScenario& sc) {
  return static_cast<double>(sc.m * (sc.n1 + sc.n2));
}

TrainingSequence p2p_orthogonal_baseline(const TwrScenario& sc, Phase phase) {
  if (phase == Phase::mac) {
    if (sc.mac.l_s < sc.n1 + sc.n2) {
      throw LengthTooShortError("orthogonal baseline needs L_S >= N1 + N2");
    }
    TrainingSequence seq;
    seq.phase = Phase::mac;
    seq.tau1 = sc.mac.tau1;
    seq.tau2 = sc.mac.tau2;
    seq.s = Mat::Zero(sc.n1 + sc.n2, sc.mac.l_s);
    for (int i = 1; i <= 2; ++i) {
      const auto& hop = i == 1 ? sc.mac.h1 : sc.mac.h2;
      const Index ni = i == 1 ? sc.n1 : sc.n2;
      const double tau = i == 1 ? sc.mac.tau1 : sc.mac.tau2;
      const Index col0 = i == 1 ? 0 : sc.n1;
      // windowed disturbance for this source's slots
      const Mat kq_win = sc.mac.dist.k_q.block(col0, col0, ni, ni);
      const DisturbanceModel dist_win = DisturbanceModel::from_parts(
          kq_win, sc.mac.dist.k_r, sc.mac.dist.v_r, sc.mac.dist.delta_r,
          sc.mac.dist.kind);
      Mat s0 = Mat::Zero(ni, ni);
      if (tau > 0) {
        const double a = std::sqrt(tau / static_cast<double>(ni));
        for (Index j = 0; j < ni; ++j) s0(j, j) = a;
      }
      const AltTxDesign alt =
          alternating_tx_design({{hop, dist_win}}, tau, ni, s0, 1e-8, 200);
      seq.s.block(i == 1 ? 0 : sc.n1, col0, ni, ni) = alt.s;
    }
    return seq;
  }

  // BC: design for the hop to source 1 only, evaluate on both.
  TrainingSequence seq;
  seq.phase = Phase::bc;
  seq.tau1 = sc.bc.tau_r;
  Mat s0 = Mat::Zero(sc.m, sc.bc.l_r);
  const Index cols = std::min(sc.m, sc.bc.l_r);
  if (sc.bc.tau_r > 0) {
    const double c = std::sqrt(sc.bc.tau_r / static_cast<double>(cols));
    for (Index j = 0; j < cols; ++j) s0(j, j) = c;
  }
  const AltTxDesign alt = alternating_tx_design({{sc.bc.g1, sc.bc.d1}}, sc.bc.tau_r,
                                                sc.bc.l_r, s0, 1e-8, 200);
  seq.s = alt.s;
  return seq;
}

DesignReport run_design(const TwrScenario& sc, Phase phase, DesignMethod method,
                        const InitSpec& init, std::uint64_t seed) {
  const bool ok = phase == Phase::mac ? method_is_mac(method) : method_is_bc(method);
  if (!ok) {
    throw WrongScenarioKindError("method " + to_string(method) +
                                 " is not defined for this phase");
  }
  switch (method) {
    case DesignMethod::alternating:
      return alternating_best_of(sc, phase, init, seed);
    case DesignMethod::kkt_closed_form:
      return design_mac_kkt_closed_form(sc);
    case DesignMethod::waterfilling:
      return design_mac_waterfilling(sc);
    case DesignMethod::convex_psd:
      return design_mac_convex_psd(sc);
    case DesignMethod::svd_mixed:
      return design_bc_svd_mixed(sc);
    case DesignMethod::svd_white:
      return design_bc_svd_white(sc);
    case DesignMethod::convex_qr:
      return design_bc_convex_qr(sc);
    case DesignMethod::identity_baseline: {
      const TrainingSequence seq =
          phase == Phase::mac ? mac_identity_sequence(sc) : bc_identity_sequence(sc);
      return baseline_report(sc, phase, DesignMethod::identity_baseline, seq);
    }
    case DesignMethod::p2p_orthogonal: {
      const TrainingSequence seq = p2p_orthogonal_baseline(sc, phase);
      return baseline_report(sc, phase, DesignMethod::p2p_orthogonal, seq);
    }
  }
  throw Error("unhandled design method");
}

double empirical_total_mse(const TwrScenario& sc, Phase phase,
                           const TrainingSequence& seq, int trials,
                           std::uint64_t seed, std::uint64_t stream_base) {
  std::vector<double> errs(static_cast<size_t>(trials), 0.0);

  if (phase == Phase::mac) {
    const LmmseEstimator est = mac_estimator(sc, seq);
    const Mat s1 = seq.s.topRows(sc.n1);
    const Mat s2 = seq.s.bottomRows(sc.n2);
    auto work = [&](int t0, int t1) {
      for (int t = t0; t < t1; ++t) {
        CounterRng rng(seed, stream_base + static_cast<std::uint64_t>(t));
        const Mat h1 = sample_channel(sc.mac.h1, rng);
        const Mat h2 = sample_channel(sc.mac.h2, rng);
        const Mat n = sample_disturbance(sc.mac.dist, rng);
        const Mat y = h1 * s1 + h2 * s2 + n;
        const auto [h1_hat, h2_hat] = estimate_mac_channels(sc, est, vec(y));
        errs[static_cast<size_t>(t)] =
            (h1 - h1_hat).squaredNorm() + (h2 - h2_hat).squaredNorm();
      }
    };
    const int workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    const int chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int t0 = w * chunk;
      const int t1 = std::min(trials, t0 + chunk);
      if (t0 >= t1) break;
      pool.emplace_back(work, t0, t1);
    }
    for (auto& th : pool) th.join();
  } else {
    const LmmseEstimator est1 = bc_estimator(sc, seq, 1);
    const LmmseEstimator est2 = bc_estimator(sc, seq, 2);
    auto work = [&](int t0, int t1) {
      for (int t = t0; t < t1; ++t) {
        CounterRng rng(seed, stream_base + static_cast<std::uint64_t>(t));
        const Mat g1 = sample_channel(sc.bc.g1, rng);
        const Mat g2 = sample_channel(sc.bc.g2, rng);
        const Mat n1 = sample_disturbance(sc.bc.d1, rng);
        const Mat n2 = sample_disturbance(sc.bc.d2, rng);
        const Mat y1 = g1 * seq.s + n1;
        const Mat y2 = g2 * seq.s + n2;
        const Mat g1_hat = estimate_bc_channel(sc, est1, vec(y1), 1);
        const Mat g2_hat = estimate_bc_channel(sc, est2, vec(y2), 2);
        errs[static_cast<size_t>(t)] =
            (g1 - g1_hat).squaredNorm() + (g2 - g2_hat).squaredNorm();
      }
    };
    const int workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    const int chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int t0 = w * chunk;
      const int t1 = std::min(trials, t0 + chunk);
      if (t0 >= t1) break;
      pool.emplace_back(work, t0, t1);
    }
    for (auto& th : pool) th.join();
  }

  double total = 0.0;
  for (const double e : errs) total += e;  // fixed order, worker-count independent
  return total / static_cast<double>(trials);
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ResultRow> rows;
  const double scale_dims = static_cast<double>(cfg.scenario.m *
                                                (cfg.scenario.n1 + cfg.scenario.n2));
  std::uint64_t cell = 0;
  for (const DesignMethod method : cfg.methods) {
    for (const double snr : cfg.snr_db) {
      const auto t_start = std::chrono::steady_clock::now();
      const TwrScenario sc = build_scenario(cfg.scenario, snr);
      const DesignReport rep = run_design(sc, cfg.phase, method, cfg.init, cfg.seed);
      const double emp = empirical_total_mse(sc, cfg.phase, rep.seq, cfg.trials, cfg.seed,
                                             cell * 0x100000000ULL);
      const auto t_end = std::chrono::steady_clock::now();
      ResultRow row;
      row.method = to_string(method);
      row.snr_db = snr;
      row.analytic_nmse = rep.mse / scale_dims;
      row.empirical_nmse = emp / scale_dims;
      row.iterations = rep.iterations;
      row.wall_time = std::chrono::duration<double>(t_end - t_start).count();
      row.seed = cfg.seed;
      rows.push_back(row);
      ++cell;
    }
  }
  return rows;
}

namespace {

constexpr const char* kCsvHeader =
    "method,snr_db,analytic_nmse,empirical_nmse,iterations,wall_time,seed";

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void emit_results(const std::vector<ResultRow>& rows, const std::string& format,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  if (format == "csv") {
    out << kCsvHeader << "\n";
    for (const auto& r : rows) {
      out << r.method << ',' << format_double(r.snr_db) << ','
          << format_double(r.analytic_nmse) << ',' << format_double(r.empirical_nmse)
          << ',' << r.iterations << ',' << format_double(r.wall_time) << ',' << r.seed
          << "\n";
    }
  } else if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"method", r.method},
                     {"snr_db", r.snr_db},
                     {"analytic_nmse", r.analytic_nmse},
                     {"empirical_nmse", r.empirical_nmse},
                     {"iterations", r.iterations},
                     {"wall_time", r.wall_time},
                     {"seed", r.seed}});
    }
    out << arr.dump(2) << "\n";
  } else {
    throw IoError("unknown result format: " + format + " (expected csv or json)");
  }
  if (!out.good()) throw IoError("write failed: " + path);
}

std::vector<ResultRow> parse_results(const std::string& format, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<ResultRow> rows;
  if (format == "csv") {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty results file: " + path);
    if (line != kCsvHeader) throw IoError("unexpected CSV header in " + path);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string field;
      ResultRow r;
      std::getline(ss, r.method, ',');
      std::getline(ss, field, ',');
      r.snr_db = std::stod(field);
      std::getline(ss, field, ',');
      r.analytic_nmse = std::stod(field);
      std::getline(ss, field, ',');
      r.empirical_nmse = std::stod(field);
      std::getline(ss, field, ',');
      r.iterations = std::stoi(field);
      std::getline(ss, field, ',');
      r.wall_time = std::stod(field);
      std::getline(ss, field, ',');
      r.seed = std::stoull(field);
      rows.push_back(r);
    }
  } else if (format == "json") {
    nlohmann::json arr;
    in >> arr;
    for (const auto& j : arr) {
      ResultRow r;
      r.method = j.at("method").get<std::string>();
      r.snr_db = j.at("snr_db").get<double>();
      r.analytic_nmse = j.at("analytic_nmse").get<double>();
      r.empirical_nmse = j.at("empirical_nmse").get<double>();
      r.iterations = j.at("iterations").get<int>();
      r.wall_time = j.at("wall_time").get<double>();
      r.seed = j.at("seed").get<std::uint64_t>();
      rows.push_back(r);
    }
  } else {
    throw IoError("unknown result format: " + format);
  }
  return rows;
}

void emit_convergence(const std::vector<double>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "iteration,mse\n";
  for (size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << format_double(trace[i]) << "\n";
  }
  if (!out.good()) throw IoError("write failed: " + path);
}

}  // namespace twr
