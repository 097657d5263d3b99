#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "twr.h"

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

constexpr const char* kConfig = R"(
[scenario]
n1 = 2
n2 = 2
m = 2

[mac]
length = 4

[experiment]
phase = mac
methods = alternating, identity
snr_db = 0, 10
trials = 100
seed = 9
)";

}  // namespace

TEST_CASE("capi: version and error text") {
  CHECK(std::string(twr_version()).find('.') != std::string::npos);
  twr_experiment* exp = nullptr;
  CHECK(twr_experiment_load("/does/not/exist.ini", &exp) == TWR_ERR_CONFIG);
  CHECK(std::string(twr_last_error()).find("exist") != std::string::npos);
  CHECK(twr_experiment_parse("[scenario]\nn1 = oops\n", &exp) == TWR_ERR_CONFIG);
  CHECK(twr_experiment_load(nullptr, &exp) == TWR_ERR_ARG);
}

TEST_CASE("capi: full sweep through opaque handles") {
  twr_experiment* exp = nullptr;
  REQUIRE(twr_experiment_parse(kConfig, &exp) == TWR_OK);
  CHECK(twr_experiment_set_trials(exp, 50) == TWR_OK);
  CHECK(twr_experiment_set_seed(exp, 11) == TWR_OK);
  CHECK(twr_experiment_set_trials(exp, 0) == TWR_ERR_ARG);

  twr_results* res = nullptr;
  REQUIRE(twr_experiment_run(exp, &res) == TWR_OK);
  REQUIRE(twr_results_count(res) == 4);
  twr_result_row row;
  REQUIRE(twr_results_row(res, 0, &row) == TWR_OK);
  CHECK(std::string(row.method) == "alternating");
  CHECK(row.snr_db == doctest::Approx(0.0));
  CHECK(row.analytic_nmse > 0.0);
  CHECK(row.empirical_nmse > 0.0);
  CHECK(row.seed == 11);
  CHECK(twr_results_row(res, 99, &row) == TWR_ERR_ARG);

  // identity never beats the iterative design
  twr_result_row alt10, id10;
  REQUIRE(twr_results_row(res, 1, &alt10) == TWR_OK);
  REQUIRE(twr_results_row(res, 3, &id10) == TWR_OK);
  CHECK(alt10.analytic_nmse <= id10.analytic_nmse * (1.0 + 1e-9));

  const std::string csv = tmp_path("capi_rows.csv");
  CHECK(twr_results_write(res, "csv", csv.c_str()) == TWR_OK);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "method,snr_db,analytic_nmse,empirical_nmse,iterations,wall_time,seed");
  CHECK(twr_results_write(res, "xml", csv.c_str()) == TWR_ERR_IO);
  std::remove(csv.c_str());

  twr_results_free(res);
  twr_experiment_free(exp);
}

TEST_CASE("capi: single design with trace and sequence access") {
  twr_experiment* exp = nullptr;
  REQUIRE(twr_experiment_parse(kConfig, &exp) == TWR_OK);

  twr_report* rep = nullptr;
  REQUIRE(twr_design_run(exp, "alternating", 10.0, &rep) == TWR_OK);
  CHECK(twr_report_mse(rep) > 0.0);
  CHECK(twr_report_nmse(rep) == doctest::Approx(twr_report_mse(rep) / 8.0));
  CHECK(twr_report_iterations(rep) >= 1);
  const int len = twr_report_trace_len(rep);
  REQUIRE(len >= 2);
  for (int i = 1; i < len; ++i) {
    CHECK(twr_report_trace_at(rep, i) <= twr_report_trace_at(rep, i - 1) * (1.0 + 1e-9));
  }

  int rows = 0, cols = 0;
  REQUIRE(twr_report_sequence_dims(rep, &rows, &cols) == TWR_OK);
  CHECK(rows == 4);
  CHECK(cols == 4);
  std::vector<double> re(static_cast<size_t>(rows) * cols), im(re.size());
  REQUIRE(twr_report_sequence(rep, re.data(), im.data()) == TWR_OK);
  double power = 0.0;
  for (size_t i = 0; i < re.size(); ++i) power += re[i] * re[i] + im[i] * im[i];
  CHECK(power <= 2.0 * 3.0 * 2.0 * (1.0 + 1e-8));  // tau1 + tau2 = 2P

  const std::string trace = tmp_path("capi_trace.csv");
  CHECK(twr_report_write_convergence(rep, trace.c_str()) == TWR_OK);
  std::remove(trace.c_str());
  twr_report_free(rep);

  // wrong-phase method surfaces as a numeric error, unknown name as well
  CHECK(twr_design_run(exp, "svd-white", 10.0, &rep) == TWR_ERR_NUMERIC);
  CHECK(twr_design_run(exp, "no-such-method", 10.0, &rep) == TWR_ERR_NUMERIC);
  twr_experiment_free(exp);
}
