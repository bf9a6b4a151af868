#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msde/config.hpp"
#include "msde/sgdct.hpp"

namespace msde {

// Parallel execution of independent runs. Results are stored by index, so
// thread count and execution order never change the output.
struct RunControl {
  unsigned threads = 0;        // 0: hardware concurrency
  bool reverse_order = false;  // schedule jobs last-to-first
};

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job, const RunControl& control = {});

struct TraceResult {
  EstimatorTrace trace;
  std::optional<Eigen::VectorXd> target;  // homogenized parameters K alpha, for slow-gradient bases
  Eigen::VectorXd alpha;
};

struct XiSweepResult {
  std::vector<double> xi;
  std::vector<double> delta;
  std::vector<Eigen::VectorXd> terminal;
  Eigen::VectorXd target;
  Eigen::VectorXd alpha;
};

struct RateStudyResult {
  std::vector<double> times;
  std::vector<double> error;  // (M^-1 sum_i |A_n^i - A|^2)^(1/2)
  double slope = 0.0;
  std::size_t fit_points = 0;
  Eigen::VectorXd target;
};

struct DriftFunctionRun {
  int basis_size = 0;
  Eigen::VectorXd coefficients;
  std::vector<double> learned;
  double relative_error = 0.0;
};

struct DriftFunctionResult {
  std::vector<double> x;
  std::vector<double> truth;
  std::vector<DriftFunctionRun> runs;  // in basis_sizes order
};

struct HomogenizeResult {
  std::vector<double> x;
  std::vector<double> K;
  std::vector<double> b;
  std::vector<double> K_closed_form;  // both empty when no closed form exists
  std::vector<double> b_closed_form;
  double max_K_gap = 0.0;  // max over x of |quadrature - closed form|
  double max_b_gap = 0.0;  // same for b, excluding points on the cutoff radius
  std::optional<Eigen::VectorXd> target;
};

TraceResult run_trace(const ExperimentConfig& config);
XiSweepResult run_xi_sweep(const ExperimentConfig& config, const RunControl& control = {});
RateStudyResult run_rate_study(const ExperimentConfig& config, const RunControl& control = {});
DriftFunctionResult run_drift_function(const ExperimentConfig& config, const RunControl& control = {});
HomogenizeResult run_homogenize(const ExperimentConfig& config);

// Least-squares slope of log(error) against log(t) over t in [lo, hi].
// Throws if fewer than 5 usable points fall in the window.
std::pair<double, std::size_t> loglog_slope(const std::vector<double>& t, const std::vector<double>& error, double lo,
                                            double hi);

// sqrt(sum (a - b)^2 / sum b^2)
double relative_l2_error(const std::vector<double>& approx, const std::vector<double>& truth);

// Log-spaced step indices in [1, n_steps], unique and ascending.
std::vector<std::size_t> log_spaced_steps(std::size_t n_steps, int count);

struct CheckOutcome {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<CheckOutcome> check_trace(const CheckSpec& spec, const TraceResult& r);
std::vector<CheckOutcome> check_xi_sweep(const CheckSpec& spec, const XiSweepResult& r);
std::vector<CheckOutcome> check_rate_study(const CheckSpec& spec, const RateStudyResult& r);
std::vector<CheckOutcome> check_drift_function(const CheckSpec& spec, const DriftFunctionResult& r);
std::vector<CheckOutcome> check_homogenize(const CheckSpec& spec, const HomogenizeResult& r);

// CSV writers. Every file starts with "# config: <json>" followed by the
// mandatory column header row.
void write_trace_csv(std::ostream& os, const ExperimentConfig& config, const EstimatorTrace& trace);
void write_xi_sweep_csv(std::ostream& os, const ExperimentConfig& config, const XiSweepResult& r);
void write_rate_csv(std::ostream& os, const ExperimentConfig& config, const RateStudyResult& r);
void write_drift_function_csv(std::ostream& os, const ExperimentConfig& config, const DriftFunctionResult& r);
void write_homogenize_csv(std::ostream& os, const ExperimentConfig& config, const HomogenizeResult& r);

struct ExperimentOutcome {
  std::filesystem::path csv;
  std::string report;
  std::vector<CheckOutcome> checks;
  bool all_passed() const;
};

// Runs the configured experiment, writes its CSV into `out_dir` and builds a
// human-readable report plus the outcome of every configured check.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                 const RunControl& control = {});

}  // namespace msde
