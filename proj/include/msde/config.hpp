#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msde/filter.hpp"
#include "msde/potential.hpp"
#include "msde/sgdct.hpp"
#include "msde/simulate.hpp"

namespace msde {

enum class ExperimentKind { trace, xi_sweep, rate_study, drift_function, homogenize };

std::string_view to_string(ExperimentKind k);

struct XGrid {
  double min = -3.0;
  double max = 3.0;
  int points = 61;

  std::vector<double> values() const;
};

// Pass/fail thresholds evaluated by `--check`. Absent fields are not checked.
struct CheckSpec {
  // trace
  std::vector<std::pair<double, double>> terminal_range;  // per component
  std::optional<double> min_distance_from_target;         // |A_T - target| >
  std::optional<double> relative_to_target;               // |A_T,i - target_i| <= r |target_i|
  // homogenize
  std::vector<std::pair<double, double>> target_range;
  std::optional<double> closed_form_tolerance;        // K
  std::optional<double> drift_closed_form_tolerance;  // b
  // xi_sweep
  std::optional<double> small_xi_max;    // xi <= small_xi_max ...
  std::optional<double> small_xi_tolerance;  // ... within this of the target
  bool largest_xi_closer_to_alpha = false;
  // rate_study
  std::optional<std::pair<double, double>> slope_range;
  std::optional<double> slope_below;
  // drift_function
  std::optional<double> max_relative_error;
  bool basis_ordering = false;  // error(N-1) > error(N) for the primary N
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::trace;
  MultiscaleModel model{SlowPotential::quadratic(1.0), FastPotential::none(), 1.0, 0.0};
  double dt = 1e-3;
  double final_time = 1.0;
  FilterSpec filter;
  nlohmann::json basis_spec;
  LearningRate learning_rate;
  std::uint64_t seed = 1;
  std::size_t replicas = 1;
  std::size_t stride = 0;
  Eigen::VectorXd initial;
  double x0 = 0.0;

  std::vector<double> xi_grid;
  XGrid x_grid;
  std::pair<double, double> rate_window{10.0, 0.0};  // upper 0: final time
  int rate_checkpoints = 61;
  std::vector<int> basis_sizes;  // drift_function; first entry is the primary N
  int quadrature_nodes = kDefaultQuadratureNodes;
  double fd_step = kDefaultFdStep;

  std::string output;  // CSV file name
  CheckSpec check;
  nlohmann::json resolved;  // full resolved config, echoed into CSV headers

  TimeGrid grid() const { return TimeGrid::from_final_time(final_time, dt); }
  BasisSet basis() const;
  BasisSet basis(int n) const;  // monomials(n) for drift_function sweeps
  std::size_t total_steps() const;
};

// Parses a config document. With `full`, the optional "full" object is
// merge-patched over the document first.
ExperimentConfig parse_config(nlohmann::json doc, bool full = false);
ExperimentConfig load_config(const std::filesystem::path& path, bool full = false);

}  // namespace msde
