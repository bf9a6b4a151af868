#include "msde/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "msde/homogenize.hpp"

namespace msde {

namespace {

std::optional<Eigen::VectorXd> coefficient_target(const ExperimentConfig& config) {
  if (config.basis_spec.value("kind", "slow-gradient") != "slow-gradient") return std::nullopt;
  const MultiscaleModel& m = config.model;
  if (m.fast.depends_on_x()) return std::nullopt;
  if (m.fast.family() != FastFamily::none && !(m.sigma > 0.0)) return std::nullopt;
  return homogenized_parameters(m, config.quadrature_nodes);
}

std::string format_vector(const Eigen::VectorXd& v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void write_preamble(std::ostream& os, const ExperimentConfig& config) {
  os << "# config: " << config.resolved.dump() << '\n';
  os << std::setprecision(17);
}

}  // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job, const RunControl& control) {
  unsigned threads = control.threads ? control.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      const std::size_t index = control.reverse_order ? count - 1 - k : k;
      try {
        job(index);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

TraceResult run_trace(const ExperimentConfig& config) {
  EstimationOptions options;
  options.stride = config.stride;
  options.initial = config.initial;
  options.initial_state = config.x0;
  TraceResult r;
  r.trace = run_estimation(config.model, config.grid(), config.filter, config.basis(), config.learning_rate,
                           config.seed, options);
  r.target = coefficient_target(config);
  r.alpha = config.model.slow.alpha();
  return r;
}

XiSweepResult run_xi_sweep(const ExperimentConfig& config, const RunControl& control) {
  const TimeGrid grid = config.grid();
  const BasisSet basis = config.basis();
  XiSweepResult r;
  r.xi = config.xi_grid;
  r.delta.resize(r.xi.size());
  r.terminal.resize(r.xi.size());
  r.alpha = config.model.slow.alpha();
  r.target = coefficient_target(config).value_or(Eigen::VectorXd::Constant(basis.size(), std::nan("")));

  parallel_for(
      r.xi.size(),
      [&](std::size_t i) {
        FilterSpec spec = config.filter;
        spec.xi = r.xi[i];
        r.delta[i] = effective_delta(spec, config.model.eps);
        EstimationOptions options;
        options.stride = grid.n_steps;
        options.initial = config.initial;
        options.initial_state = config.x0;
        // Every xi point sees the same sample path.
        r.terminal[i] =
            run_estimation(config.model, grid, spec, basis, config.learning_rate, config.seed, options).terminal();
      },
      control);
  return r;
}

std::vector<std::size_t> log_spaced_steps(std::size_t n_steps, int count) {
  if (count < 2) return {n_steps};
  std::vector<std::size_t> steps;
  const double top = std::log10(static_cast<double>(n_steps));
  for (int i = 0; i < count; ++i) {
    const auto n = static_cast<std::size_t>(std::llround(std::pow(10.0, top * i / (count - 1))));
    const std::size_t clamped = std::clamp<std::size_t>(n, 1, n_steps);
    if (steps.empty() || clamped > steps.back()) steps.push_back(clamped);
  }
  if (steps.back() != n_steps) steps.push_back(n_steps);
  return steps;
}

std::pair<double, std::size_t> loglog_slope(const std::vector<double>& t, const std::vector<double>& error, double lo,
                                            double hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo * (1.0 - 1e-12) || t[i] > hi * (1.0 + 1e-12) || !(t[i] > 0.0) || !(error[i] > 0.0)) continue;
    const double lx = std::log(t[i]);
    const double ly = std::log(error[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 5) {
    throw std::invalid_argument("slope fit window [" + fmt(lo) + ", " + fmt(hi) + "] holds only " +
                                std::to_string(n) + " points (need >= 5)");
  }
  const double dn = static_cast<double>(n);
  return {(dn * sxy - sx * sy) / (dn * sxx - sx * sx), n};
}

RateStudyResult run_rate_study(const ExperimentConfig& config, const RunControl& control) {
  const TimeGrid grid = config.grid();
  const BasisSet basis = config.basis();
  const auto target = coefficient_target(config);
  if (!target) throw std::invalid_argument("rate study needs an analytic target (slow-gradient basis, x-independent p)");

  const std::vector<std::size_t> checkpoints = log_spaced_steps(grid.n_steps, config.rate_checkpoints);
  std::vector<std::vector<double>> sq_error(config.replicas);

  parallel_for(
      config.replicas,
      [&](std::size_t i) {
        EstimationOptions options;
        options.stride = grid.n_steps;
        options.checkpoints = checkpoints;
        options.initial = config.initial;
        options.initial_state = config.x0;
        const EstimatorTrace trace =
            run_estimation(config.model, grid, config.filter, basis, config.learning_rate, config.seed + i, options);
        std::vector<double>& row = sq_error[i];
        row.reserve(trace.size());
        for (const auto& a : trace.values) row.push_back((a - *target).squaredNorm());
      },
      control);

  RateStudyResult r;
  r.target = *target;
  r.times.push_back(0.0);
  for (std::size_t n : checkpoints) r.times.push_back(static_cast<double>(n) * grid.dt);
  r.error.assign(r.times.size(), 0.0);
  for (const auto& row : sq_error) {
    if (row.size() != r.times.size()) throw std::logic_error("rate study trace does not match its checkpoints");
    for (std::size_t k = 0; k < row.size(); ++k) r.error[k] += row[k];
  }
  for (double& e : r.error) e = std::sqrt(e / static_cast<double>(config.replicas));
  std::tie(r.slope, r.fit_points) = loglog_slope(r.times, r.error, config.rate_window.first, config.rate_window.second);
  return r;
}

double relative_l2_error(const std::vector<double>& approx, const std::vector<double>& truth) {
  if (approx.size() != truth.size() || truth.empty()) throw std::invalid_argument("relative error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (approx[i] - truth[i]) * (approx[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  if (!(den > 0.0)) throw std::invalid_argument("relative error: reference vanishes on the grid");
  return std::sqrt(num / den);
}

DriftFunctionResult run_drift_function(const ExperimentConfig& config, const RunControl& control) {
  const TimeGrid grid = config.grid();
  DriftFunctionResult r;
  r.x = config.x_grid.values();

  const auto closed = effective_model_closed_form(config.model);
  const EffectiveModel eff =
      closed ? *closed : effective_model_quadrature(config.model, config.quadrature_nodes, config.fd_step);
  for (double x : r.x) r.truth.push_back(eff.b(x));

  r.runs.resize(config.basis_sizes.size());
  parallel_for(
      r.runs.size(),
      [&](std::size_t i) {
        const int n = config.basis_sizes[i];
        const BasisSet basis = config.basis(n);
        EstimationOptions options;
        options.stride = grid.n_steps;
        if (config.initial.size() == n) options.initial = config.initial;
        options.initial_state = config.x0;
        DriftFunctionRun& run = r.runs[i];
        run.basis_size = n;
        run.coefficients =
            run_estimation(config.model, grid, config.filter, basis, config.learning_rate, config.seed, options)
                .terminal();
        for (double x : r.x) run.learned.push_back(drift_eval(run.coefficients, basis, x));
        run.relative_error = relative_l2_error(run.learned, r.truth);
      },
      control);
  return r;
}

HomogenizeResult run_homogenize(const ExperimentConfig& config) {
  const MultiscaleModel& m = config.model;
  HomogenizeResult r;
  r.x = config.x_grid.values();
  const auto closed = effective_model_closed_form(m);
  const auto cutoff = m.fast.cutoff();
  for (double x : r.x) {
    r.K.push_back(k_effective_quadrature(m, x, config.quadrature_nodes));
    r.b.push_back(homogenized_drift(m, x, config.quadrature_nodes, config.fd_step));
    if (!closed) continue;
    r.K_closed_form.push_back(closed->K(x));
    r.b_closed_form.push_back(closed->b(x));
    r.max_K_gap = std::max(r.max_K_gap, std::abs(r.K.back() - r.K_closed_form.back()));
    const bool on_cutoff = cutoff && std::abs(std::abs(x) - *cutoff) < 1e-9;
    if (!on_cutoff) r.max_b_gap = std::max(r.max_b_gap, std::abs(r.b.back() - r.b_closed_form.back()));
  }
  r.target = coefficient_target(config);
  return r;
}

std::vector<CheckOutcome> check_trace(const CheckSpec& spec, const TraceResult& r) {
  std::vector<CheckOutcome> out;
  const Eigen::VectorXd& a = r.trace.terminal();
  for (std::size_t i = 0; i < spec.terminal_range.size() && i < static_cast<std::size_t>(a.size()); ++i) {
    const auto [lo, hi] = spec.terminal_range[i];
    const double v = a[static_cast<Eigen::Index>(i)];
    out.push_back({"terminal A_" + std::to_string(i + 1) + " in [" + fmt(lo) + ", " + fmt(hi) + "]",
                   v >= lo && v <= hi, "A_T = " + fmt(v)});
  }
  if (spec.min_distance_from_target) {
    const double d = r.target ? (a - *r.target).norm() : std::nan("");
    out.push_back({"|A_T - A| > " + fmt(*spec.min_distance_from_target), r.target && d > *spec.min_distance_from_target,
                   "distance = " + fmt(d)});
  }
  if (spec.relative_to_target) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double t = r.target ? (*r.target)[i] : std::nan("");
      const double rel = std::abs(a[i] - t) / std::abs(t);
      out.push_back({"A_" + std::to_string(i + 1) + " within " + fmt(100 * *spec.relative_to_target) + "% of target",
                     rel <= *spec.relative_to_target, "A_T = " + fmt(a[i]) + ", target = " + fmt(t) + ", rel = " + fmt(rel)});
    }
  }
  return out;
}

std::vector<CheckOutcome> check_homogenize(const CheckSpec& spec, const HomogenizeResult& r) {
  std::vector<CheckOutcome> out;
  for (std::size_t i = 0; i < spec.target_range.size(); ++i) {
    const auto [lo, hi] = spec.target_range[i];
    const double v = r.target && static_cast<Eigen::Index>(i) < r.target->size() ? (*r.target)[static_cast<Eigen::Index>(i)]
                                                                                  : std::nan("");
    out.push_back({"target A_" + std::to_string(i + 1) + " in [" + fmt(lo) + ", " + fmt(hi) + "]", v >= lo && v <= hi,
                   "A = " + fmt(v, 12)});
  }
  if (spec.closed_form_tolerance) {
    out.push_back({"K quadrature vs closed form < " + fmt(*spec.closed_form_tolerance),
                   !r.K_closed_form.empty() && r.max_K_gap < *spec.closed_form_tolerance, "max gap = " + fmt(r.max_K_gap)});
  }
  if (spec.drift_closed_form_tolerance) {
    out.push_back({"b quadrature vs closed form < " + fmt(*spec.drift_closed_form_tolerance),
                   !r.b_closed_form.empty() && r.max_b_gap < *spec.drift_closed_form_tolerance,
                   "max gap = " + fmt(r.max_b_gap)});
  }
  return out;
}

std::vector<CheckOutcome> check_xi_sweep(const CheckSpec& spec, const XiSweepResult& r) {
  std::vector<CheckOutcome> out;
  if (spec.small_xi_max && spec.small_xi_tolerance) {
    for (std::size_t i = 0; i < r.xi.size(); ++i) {
      if (r.xi[i] > *spec.small_xi_max) continue;
      const double gap = (r.terminal[i] - r.target).norm();
      out.push_back({"xi = " + fmt(r.xi[i]) + ": |A_T - A| <= " + fmt(*spec.small_xi_tolerance),
                     gap <= *spec.small_xi_tolerance, "A_T = " + format_vector(r.terminal[i]) + ", gap = " + fmt(gap)});
    }
  }
  if (spec.largest_xi_closer_to_alpha && !r.xi.empty()) {
    const auto last = static_cast<std::size_t>(std::max_element(r.xi.begin(), r.xi.end()) - r.xi.begin());
    const double to_alpha = (r.terminal[last] - r.alpha).norm();
    const double to_target = (r.terminal[last] - r.target).norm();
    out.push_back({"xi = " + fmt(r.xi[last]) + ": closer to alpha than to A", to_alpha < to_target,
                   "|A_T - alpha| = " + fmt(to_alpha) + ", |A_T - A| = " + fmt(to_target)});
  }
  return out;
}

std::vector<CheckOutcome> check_rate_study(const CheckSpec& spec, const RateStudyResult& r) {
  std::vector<CheckOutcome> out;
  if (spec.slope_range) {
    const auto [lo, hi] = *spec.slope_range;
    out.push_back({"log-log slope in [" + fmt(lo) + ", " + fmt(hi) + "]", r.slope >= lo && r.slope <= hi,
                   "slope = " + fmt(r.slope) + " over " + std::to_string(r.fit_points) + " points"});
  }
  if (spec.slope_below) {
    out.push_back({"log-log slope < " + fmt(*spec.slope_below), r.slope < *spec.slope_below,
                   "slope = " + fmt(r.slope) + " over " + std::to_string(r.fit_points) + " points"});
  }
  return out;
}

std::vector<CheckOutcome> check_drift_function(const CheckSpec& spec, const DriftFunctionResult& r) {
  std::vector<CheckOutcome> out;
  if (r.runs.empty()) return out;
  const DriftFunctionRun& primary = r.runs.front();
  if (spec.max_relative_error) {
    out.push_back({"N = " + std::to_string(primary.basis_size) + ": relative L2 error <= " + fmt(*spec.max_relative_error),
                   primary.relative_error <= *spec.max_relative_error, "error = " + fmt(primary.relative_error)});
  }
  if (spec.basis_ordering) {
    for (const auto& run : r.runs) {
      if (run.basis_size >= primary.basis_size) continue;
      out.push_back({"error(N = " + std::to_string(run.basis_size) + ") > error(N = " +
                         std::to_string(primary.basis_size) + ")",
                     run.relative_error > primary.relative_error,
                     fmt(run.relative_error) + " vs " + fmt(primary.relative_error)});
    }
  }
  return out;
}

void write_trace_csv(std::ostream& os, const ExperimentConfig& config, const EstimatorTrace& trace) {
  write_preamble(os, config);
  os << 't';
  const Eigen::Index n = trace.values.empty() ? 0 : trace.values.front().size();
  for (Eigen::Index i = 0; i < n; ++i) os << ",A_" << i + 1;
  os << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    os << trace.times[k];
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << trace.values[k][i];
    os << '\n';
  }
}

void write_xi_sweep_csv(std::ostream& os, const ExperimentConfig& config, const XiSweepResult& r) {
  write_preamble(os, config);
  const Eigen::Index n = r.target.size();
  os << "xi,delta";
  for (Eigen::Index i = 0; i < n; ++i) os << ",A_T_" << i + 1;
  for (Eigen::Index i = 0; i < n; ++i) os << ",A_" << i + 1;
  for (Eigen::Index i = 0; i < r.alpha.size(); ++i) os << ",alpha_" << i + 1;
  os << '\n';
  for (std::size_t k = 0; k < r.xi.size(); ++k) {
    os << r.xi[k] << ',' << r.delta[k];
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << r.terminal[k][i];
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << r.target[i];
    for (Eigen::Index i = 0; i < r.alpha.size(); ++i) os << ',' << r.alpha[i];
    os << '\n';
  }
}

void write_rate_csv(std::ostream& os, const ExperimentConfig& config, const RateStudyResult& r) {
  write_preamble(os, config);
  os << "# slope: " << r.slope << " fit_points: " << r.fit_points << '\n';
  os << "t,error\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) os << r.times[k] << ',' << r.error[k] << '\n';
}

void write_drift_function_csv(std::ostream& os, const ExperimentConfig& config, const DriftFunctionResult& r) {
  write_preamble(os, config);
  os << 'x';
  for (const auto& run : r.runs) os << ",b_tilde_N" << run.basis_size;
  os << ",b\n";
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    os << r.x[k];
    for (const auto& run : r.runs) os << ',' << run.learned[k];
    os << ',' << r.truth[k] << '\n';
  }
}

void write_homogenize_csv(std::ostream& os, const ExperimentConfig& config, const HomogenizeResult& r) {
  write_preamble(os, config);
  const bool closed = !r.K_closed_form.empty();
  os << "x,K,b" << (closed ? ",K_closed_form,b_closed_form" : "") << '\n';
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    os << r.x[k] << ',' << r.K[k] << ',' << r.b[k];
    if (closed) os << ',' << r.K_closed_form[k] << ',' << r.b_closed_form[k];
    os << '\n';
  }
}

bool ExperimentOutcome::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                 const RunControl& control) {
  ExperimentOutcome outcome;
  std::filesystem::create_directories(out_dir);
  outcome.csv = out_dir / config.output;
  std::ofstream csv(outcome.csv);
  if (!csv) throw std::runtime_error("cannot write " + outcome.csv.string());
  std::ostringstream report;
  report << std::setprecision(6);

  switch (config.kind) {
    case ExperimentKind::trace: {
      const TraceResult r = run_trace(config);
      write_trace_csv(csv, config, r.trace);
      report << "terminal A_T = " << format_vector(r.trace.terminal()) << " at t = " << r.trace.terminal_time() << '\n';
      if (r.target) report << "homogenized target A = " << format_vector(*r.target) << '\n';
      report << "multiscale alpha = " << format_vector(r.alpha) << '\n';
      outcome.checks = check_trace(config.check, r);
      break;
    }
    case ExperimentKind::xi_sweep: {
      const XiSweepResult r = run_xi_sweep(config, control);
      write_xi_sweep_csv(csv, config, r);
      report << "A = " << format_vector(r.target) << ", alpha = " << format_vector(r.alpha) << '\n';
      for (std::size_t i = 0; i < r.xi.size(); ++i) {
        report << "xi = " << r.xi[i] << "  delta = " << r.delta[i] << "  A_T = " << format_vector(r.terminal[i]) << '\n';
      }
      outcome.checks = check_xi_sweep(config.check, r);
      break;
    }
    case ExperimentKind::rate_study: {
      const RateStudyResult r = run_rate_study(config, control);
      write_rate_csv(csv, config, r);
      report << "A = " << format_vector(r.target) << ", M = " << config.replicas << '\n';
      report << "error at t = 0: " << r.error.front() << ", at T: " << r.error.back() << '\n';
      report << "log-log slope over [" << config.rate_window.first << ", " << config.rate_window.second
             << "] = " << r.slope << " (" << r.fit_points << " points)\n";
      outcome.checks = check_rate_study(config.check, r);
      break;
    }
    case ExperimentKind::drift_function: {
      const DriftFunctionResult r = run_drift_function(config, control);
      write_drift_function_csv(csv, config, r);
      for (const auto& run : r.runs) {
        report << "N = " << run.basis_size << "  A_T = " << format_vector(run.coefficients)
               << "  relative L2 error = " << run.relative_error << '\n';
      }
      outcome.checks = check_drift_function(config.check, r);
      break;
    }
    case ExperimentKind::homogenize: {
      const HomogenizeResult r = run_homogenize(config);
      write_homogenize_csv(csv, config, r);
      if (r.target) report << "homogenized target A = " << format_vector(*r.target, 12) << '\n';
      if (!r.K_closed_form.empty()) {
        report << "max |K_quad - K_closed| = " << r.max_K_gap << ", max |b_quad - b_closed| = " << r.max_b_gap << '\n';
      }
      outcome.checks = check_homogenize(config.check, r);
      break;
    }
  }
  outcome.report = report.str();
  return outcome;
}

}  // namespace msde
