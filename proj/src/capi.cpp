#include "twr.h"

#include <cstring>
#include <string>
#include <vector>

#include "twr/sim.hpp"

namespace {

thread_local std::string g_last_error;

twr_status set_error(twr_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
twr_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const twr::ConfigError& e) {
    return set_error(TWR_ERR_CONFIG, e.what());
  } catch (const twr::IoError& e) {
    return set_error(TWR_ERR_IO, e.what());
  } catch (const twr::Error& e) {
    return set_error(TWR_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return set_error(TWR_ERR_NUMERIC, e.what());
  }
}

}  // namespace

struct twr_experiment {
  twr::ExperimentConfig cfg;
};

struct twr_results {
  std::vector<twr::ResultRow> rows;
};

struct twr_report {
  twr::DesignReport rep;
  double nmse_scale = 1.0;
};

extern "C" {

const char* twr_version(void) { return "1.0.0"; }

const char* twr_last_error(void) { return g_last_error.c_str(); }

twr_status twr_experiment_load(const char* path, twr_experiment** out) {
  if (!path || !out) return set_error(TWR_ERR_ARG, "null argument");
  return guarded([&] {
    auto* exp = new twr_experiment{twr::load_experiment_config(path)};
    *out = exp;
    return TWR_OK;
  });
}

twr_status twr_experiment_parse(const char* text, twr_experiment** out) {
  if (!text || !out) return set_error(TWR_ERR_ARG, "null argument");
  return guarded([&] {
    auto* exp = new twr_experiment{twr::parse_experiment_config(text)};
    *out = exp;
    return TWR_OK;
  });
}

void twr_experiment_free(twr_experiment* exp) { delete exp; }

twr_status twr_experiment_set_seed(twr_experiment* exp, uint64_t seed) {
  if (!exp) return set_error(TWR_ERR_ARG, "null experiment");
  exp->cfg.seed = seed;
  return TWR_OK;
}

twr_status twr_experiment_set_trials(twr_experiment* exp, int trials) {
  if (!exp) return set_error(TWR_ERR_ARG, "null experiment");
  if (trials < 1) return set_error(TWR_ERR_ARG, "trials must be >= 1");
  exp->cfg.trials = trials;
  return TWR_OK;
}

twr_status twr_experiment_run(const twr_experiment* exp, twr_results** out) {
  if (!exp || !out) return set_error(TWR_ERR_ARG, "null argument");
  return guarded([&] {
    auto* res = new twr_results{twr::run_experiment(exp->cfg)};
    *out = res;
    return TWR_OK;
  });
}

int twr_results_count(const twr_results* res) {
  return res ? static_cast<int>(res->rows.size()) : 0;
}

twr_status twr_results_row(const twr_results* res, int index, twr_result_row* out) {
  if (!res || !out) return set_error(TWR_ERR_ARG, "null argument");
  if (index < 0 || index >= static_cast<int>(res->rows.size())) {
    return set_error(TWR_ERR_ARG, "row index out of range");
  }
  const twr::ResultRow& r = res->rows[static_cast<size_t>(index)];
  out->method = r.method.c_str();
  out->snr_db = r.snr_db;
  out->analytic_nmse = r.analytic_nmse;
  out->empirical_nmse = r.empirical_nmse;
  out->iterations = r.iterations;
  out->wall_time = r.wall_time;
  out->seed = r.seed;
  return TWR_OK;
}

twr_status twr_results_write(const twr_results* res, const char* format,
                             const char* path) {
  if (!res || !format || !path) return set_error(TWR_ERR_ARG, "null argument");
  return guarded([&] {
    twr::emit_results(res->rows, format, path);
    return TWR_OK;
  });
}

void twr_results_free(twr_results* res) { delete res; }

twr_status twr_design_run(const twr_experiment* exp, const char* method,
                          double snr_db, twr_report** out) {
  if (!exp || !method || !out) return set_error(TWR_ERR_ARG, "null argument");
  return guarded([&] {
    const twr::DesignMethod m = twr::design_method_from_string(method);
    const twr::TwrScenario sc = twr::build_scenario(exp->cfg.scenario, snr_db);
    auto* rep = new twr_report;
    try {
      rep->rep = twr::run_design(sc, exp->cfg.phase, m, exp->cfg.init, exp->cfg.seed);
      rep->nmse_scale = twr::nmse_scale(sc);
    } catch (...) {
      delete rep;
      throw;
    }
    *out = rep;
    return TWR_OK;
  });
}

double twr_report_mse(const twr_report* rep) { return rep ? rep->rep.mse : 0.0; }

double twr_report_nmse(const twr_report* rep) {
  return rep ? rep->rep.mse / rep->nmse_scale : 0.0;
}

int twr_report_iterations(const twr_report* rep) {
  return rep ? rep->rep.iterations : 0;
}

double twr_report_kkt_residual(const twr_report* rep) {
  return rep ? rep->rep.kkt_residual : 0.0;
}

int twr_report_trace_len(const twr_report* rep) {
  return rep ? static_cast<int>(rep->rep.trace.size()) : 0;
}

double twr_report_trace_at(const twr_report* rep, int index) {
  if (!rep || index < 0 || index >= static_cast<int>(rep->rep.trace.size())) return 0.0;
  return rep->rep.trace[static_cast<size_t>(index)];
}

twr_status twr_report_write_convergence(const twr_report* rep, const char* path) {
  if (!rep || !path) return set_error(TWR_ERR_ARG, "null argument");
  return guarded([&] {
    twr::emit_convergence(rep->rep.trace, path);
    return TWR_OK;
  });
}

twr_status twr_report_sequence_dims(const twr_report* rep, int* rows, int* cols) {
  if (!rep || !rows || !cols) return set_error(TWR_ERR_ARG, "null argument");
  *rows = static_cast<int>(rep->rep.seq.s.rows());
  *cols = static_cast<int>(rep->rep.seq.s.cols());
  return TWR_OK;
}

twr_status twr_report_sequence(const twr_report* rep, double* re, double* im) {
  if (!rep || !re || !im) return set_error(TWR_ERR_ARG, "null argument");
  const twr::Mat& s = rep->rep.seq.s;
  for (twr::Index j = 0; j < s.cols(); ++j) {
    for (twr::Index i = 0; i < s.rows(); ++i) {
      const twr::Index k = j * s.rows() + i;
      re[k] = s(i, j).real();
      im[k] = s(i, j).imag();
    }
  }
  return TWR_OK;
}

void twr_report_free(twr_report* rep) { delete rep; }

}  // extern "C"
