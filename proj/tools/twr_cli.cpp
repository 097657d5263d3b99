// Command-line front end for the training-design toolkit. Everything goes
// through the C API in twr.h.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twr.h"

namespace {

int exit_code(twr_status st) {
  switch (st) {
    case TWR_OK: return 0;
    case TWR_ERR_CONFIG: return 2;
    case TWR_ERR_NUMERIC: return 3;
    default: return 1;
  }
}

int fail(twr_status st) {
  std::fprintf(stderr, "error: %s\n", twr_last_error());
  return exit_code(st);
}

struct ExperimentHandle {
  twr_experiment* exp = nullptr;
  ~ExperimentHandle() { twr_experiment_free(exp); }
};

int load_experiment(const std::string& config, std::uint64_t seed, bool seed_set,
                    int trials, ExperimentHandle& out) {
  twr_status st = twr_experiment_load(config.c_str(), &out.exp);
  if (st != TWR_OK) return fail(st);
  if (seed_set) {
    st = twr_experiment_set_seed(out.exp, seed);
    if (st != TWR_OK) return fail(st);
  }
  if (trials > 0) {
    st = twr_experiment_set_trials(out.exp, trials);
    if (st != TWR_OK) return fail(st);
  }
  return 0;
}

void print_rows(const twr_results* res) {
  std::printf("%-16s %8s %14s %14s %6s %9s\n", "method", "snr_db", "analytic_nmse",
              "empirical_nmse", "iters", "time_s");
  const int n = twr_results_count(res);
  for (int i = 0; i < n; ++i) {
    twr_result_row row;
    if (twr_results_row(res, i, &row) != TWR_OK) continue;
    std::printf("%-16s %8.2f %14.6e %14.6e %6d %9.3f\n", row.method, row.snr_db,
                row.analytic_nmse, row.empirical_nmse, row.iterations, row.wall_time);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training design and channel estimation for correlated two-way relays"};
  app.require_subcommand(1);

  std::string config;
  std::string out_path;
  std::string format = "csv";
  std::string method = "alternating";
  double snr_db = 10.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", config, "scenario/experiment config file")->required();
    auto* seed_opt = cmd->add_option("--seed", seed, "override the config seed");
    seed_opt->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--trials", trials, "override the Monte-Carlo trial count");
    auto* out_opt = cmd->add_option("--out", out_path, "output file");
    if (needs_out) out_opt->required();
    cmd->add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* design = app.add_subcommand("design", "run one training design and report it");
  add_common(design, false);
  design->add_option("--method", method, "design method name");
  design->add_option("--snr", snr_db, "SNR in dB");

  auto* sweep = app.add_subcommand("sweep", "full (method x SNR) sweep with Monte-Carlo");
  add_common(sweep, true);

  auto* converge = app.add_subcommand("converge", "emit a per-iteration MSE trace");
  add_common(converge, true);
  converge->add_option("--method", method, "design method name");
  converge->add_option("--snr", snr_db, "SNR in dB");

  auto* compare = app.add_subcommand("compare", "compare the configured methods");
  add_common(compare, false);

  CLI11_PARSE(app, argc, argv);

  ExperimentHandle exp;
  const int rc = load_experiment(config, seed, seed_set, trials, exp);
  if (rc != 0) return rc;

  if (design->parsed()) {
    twr_report* rep = nullptr;
    twr_status st = twr_design_run(exp.exp, method.c_str(), snr_db, &rep);
    if (st != TWR_OK) return fail(st);
    std::printf("method          %s\n", method.c_str());
    std::printf("snr_db          %.2f\n", snr_db);
    std::printf("analytic_mse    %.12e\n", twr_report_mse(rep));
    std::printf("analytic_nmse   %.12e\n", twr_report_nmse(rep));
    std::printf("iterations      %d\n", twr_report_iterations(rep));
    std::printf("kkt_residual    %.3e\n", twr_report_kkt_residual(rep));
    if (!out_path.empty()) {
      int rows = 0, cols = 0;
      twr_report_sequence_dims(rep, &rows, &cols);
      std::vector<double> re(static_cast<size_t>(rows) * cols);
      std::vector<double> im(re.size());
      twr_report_sequence(rep, re.data(), im.data());
      FILE* f = std::fopen(out_path.c_str(), "w");
      if (!f) {
        std::fprintf(stderr, "error: cannot open %s\n", out_path.c_str());
        twr_report_free(rep);
        return 1;
      }
      std::fprintf(f, "row,col,re,im\n");
      for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
          std::fprintf(f, "%d,%d,%.17g,%.17g\n", i, j, re[static_cast<size_t>(j) * rows + i],
                       im[static_cast<size_t>(j) * rows + i]);
        }
      }
      std::fclose(f);
    }
    twr_report_free(rep);
    return 0;
  }

  if (converge->parsed()) {
    twr_report* rep = nullptr;
    twr_status st = twr_design_run(exp.exp, method.c_str(), snr_db, &rep);
    if (st != TWR_OK) return fail(st);
    st = twr_report_write_convergence(rep, out_path.c_str());
    if (st != TWR_OK) {
      twr_report_free(rep);
      return fail(st);
    }
    std::printf("wrote %d iterations to %s\n", twr_report_trace_len(rep), out_path.c_str());
    twr_report_free(rep);
    return 0;
  }

  // sweep and compare both run the configured grid
  twr_results* res = nullptr;
  twr_status st = twr_experiment_run(exp.exp, &res);
  if (st != TWR_OK) return fail(st);
  print_rows(res);
  if (!out_path.empty()) {
    st = twr_results_write(res, format.c_str(), out_path.c_str());
    if (st != TWR_OK) {
      twr_results_free(res);
      return fail(st);
    }
    std::printf("wrote %d rows to %s\n", twr_results_count(res), out_path.c_str());
  }
  twr_results_free(res);
  return 0;
}
