#include "msde/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace msde {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument("config: " + what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail("unknown field '" + key + "' in " + where);
  }
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(std::string("field '") + key + "' must be a number");
  return obj[key].get<double>();
}

Eigen::VectorXd vector_of(const json& arr, const std::string& what) {
  if (!arr.is_array()) fail(what + " must be an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) fail(what + " must be an array of numbers");
    v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  }
  return v;
}

std::pair<double, double> pair_of(const json& arr, const std::string& what) {
  if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() || !arr[1].is_number()) {
    fail(what + " must be a [lo, hi] pair");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

SlowPotential parse_slow(const json& j) {
  reject_unknown(j, {"family", "alpha"}, "model.slow");
  const SlowFamily family = parse_slow_family(j.value("family", "quadratic"));
  if (!j.contains("alpha")) fail("model.slow.alpha is required");
  return {family, vector_of(j["alpha"], "model.slow.alpha")};
}

FastPotential parse_fast(const json& j) {
  reject_unknown(j, {"family", "amplitude", "period", "cutoff"}, "model.fast");
  const FastFamily family = parse_fast_family(j.value("family", "none"));
  const double amplitude = number(j, "amplitude", 1.0);
  const double period = number(j, "period", FastPotential::kTwoPi);
  switch (family) {
    case FastFamily::none: return FastPotential::none();
    case FastFamily::sine: return FastPotential::sine(amplitude, period);
    case FastFamily::modulated_cosine:
      return FastPotential::modulated_cosine(amplitude, number(j, "cutoff", 2.0), period);
    case FastFamily::custom: break;
  }
  fail("custom fast potentials cannot be declared in a config file");
}

double parse_dt(const json& j, double eps) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.rfind("eps^", 0) == 0) {
      try {
        return std::pow(eps, std::stod(s.substr(4)));
      } catch (const std::exception&) {
      }
    }
  }
  fail("grid.dt must be a number or \"eps^k\"");
}

CheckSpec parse_check(const json& j) {
  reject_unknown(j,
                 {"terminal_range", "min_distance_from_target", "relative_to_target", "target_range",
                  "closed_form_tolerance", "drift_closed_form_tolerance", "small_xi_max", "small_xi_tolerance", "largest_xi_closer_to_alpha",
                  "slope_range", "slope_below", "max_relative_error", "basis_ordering"},
                 "check");
  CheckSpec c;
  for (const char* key : {"terminal_range", "target_range"}) {
    if (!j.contains(key)) continue;
    auto& dst = std::string(key) == "terminal_range" ? c.terminal_range : c.target_range;
    for (const auto& r : j[key]) dst.push_back(pair_of(r, std::string("check.") + key));
  }
  auto opt = [&](const char* key, std::optional<double>& dst) {
    if (j.contains(key)) dst = number(j, key, 0.0);
  };
  opt("min_distance_from_target", c.min_distance_from_target);
  opt("relative_to_target", c.relative_to_target);
  opt("closed_form_tolerance", c.closed_form_tolerance);
  opt("drift_closed_form_tolerance", c.drift_closed_form_tolerance);
  opt("small_xi_max", c.small_xi_max);
  opt("small_xi_tolerance", c.small_xi_tolerance);
  opt("slope_below", c.slope_below);
  opt("max_relative_error", c.max_relative_error);
  if (j.contains("slope_range")) c.slope_range = pair_of(j["slope_range"], "check.slope_range");
  c.largest_xi_closer_to_alpha = j.value("largest_xi_closer_to_alpha", false);
  c.basis_ordering = j.value("basis_ordering", false);
  return c;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::trace: return "trace";
    case ExperimentKind::xi_sweep: return "xi_sweep";
    case ExperimentKind::rate_study: return "rate_study";
    case ExperimentKind::drift_function: return "drift_function";
    case ExperimentKind::homogenize: return "homogenize";
  }
  return "?";
}

std::vector<double> XGrid::values() const {
  std::vector<double> xs;
  if (points == 1) return {min};
  xs.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) xs.push_back(min + (max - min) * i / (points - 1));
  return xs;
}

BasisSet ExperimentConfig::basis() const {
  const std::string kind = basis_spec.value("kind", "slow-gradient");
  if (kind == "slow-gradient") return BasisSet::slow_gradient(model.slow);
  if (kind == "monomials") return BasisSet::monomials(basis_spec.value("n", 1));
  if (kind == "polynomials") {
    std::vector<Eigen::VectorXd> polys;
    for (const auto& c : basis_spec.at("coefficients")) polys.push_back(vector_of(c, "basis.coefficients"));
    return BasisSet::polynomials(std::move(polys));
  }
  fail("unknown basis kind '" + kind + "'");
}

BasisSet ExperimentConfig::basis(int n) const { return BasisSet::monomials(n); }

std::size_t ExperimentConfig::total_steps() const {
  const std::size_t n = grid().n_steps;
  switch (kind) {
    case ExperimentKind::trace: return n;
    case ExperimentKind::xi_sweep: return n * xi_grid.size();
    case ExperimentKind::rate_study: return n * replicas;
    case ExperimentKind::drift_function: return n * basis_sizes.size();
    case ExperimentKind::homogenize: return 0;
  }
  return n;
}

ExperimentConfig parse_config(json doc, bool full) {
  if (!doc.is_object()) fail("document must be a JSON object");
  if (full && doc.contains("full")) doc.merge_patch(doc["full"]);
  doc.erase("full");
  reject_unknown(doc,
                 {"name", "experiment", "model", "grid", "filter", "basis", "learning_rate", "seed", "replicas",
                  "stride", "initial", "x0", "xi_grid", "x_grid", "rate", "basis_sizes", "quadrature", "output", "check",
                  "comment"},
                 "config");

  ExperimentConfig c;
  c.name = doc.value("name", "experiment");
  const std::string kind = doc.value("experiment", "trace");
  if (kind == "trace") c.kind = ExperimentKind::trace;
  else if (kind == "xi_sweep") c.kind = ExperimentKind::xi_sweep;
  else if (kind == "rate_study") c.kind = ExperimentKind::rate_study;
  else if (kind == "drift_function") c.kind = ExperimentKind::drift_function;
  else if (kind == "homogenize") c.kind = ExperimentKind::homogenize;
  else fail("unknown experiment kind '" + kind + "'");

  if (!doc.contains("model")) fail("model is required");
  const json& m = doc["model"];
  reject_unknown(m, {"slow", "fast", "eps", "sigma"}, "model");
  c.model = MultiscaleModel(parse_slow(m.value("slow", json::object())), parse_fast(m.value("fast", json::object())),
                            number(m, "eps", 0.1), number(m, "sigma", 0.5));

  const json g = doc.value("grid", json::object());
  reject_unknown(g, {"dt", "T"}, "grid");
  c.dt = parse_dt(g.value("dt", json("eps^3")), c.model.eps);
  c.final_time = number(g, "T", 1.0);
  (void)c.grid();  // validates dt and T

  const json f = doc.value("filter", json::object());
  reject_unknown(f, {"kind", "delta", "xi"}, "filter");
  c.filter.kind = parse_filter_kind(f.value("kind", "exponential"));
  c.filter.delta = number(f, "delta", 1.0);
  if (f.contains("xi") && !f["xi"].is_null()) c.filter.xi = number(f, "xi", 0.0);

  c.basis_spec = doc.value("basis", json{{"kind", "slow-gradient"}});
  (void)c.basis();

  const json lr = doc.value("learning_rate", json::object());
  reject_unknown(lr, {"gamma", "beta"}, "learning_rate");
  c.learning_rate = LearningRate(number(lr, "gamma", 10.0), number(lr, "beta", 10.0));

  c.seed = doc.value("seed", std::uint64_t{1});
  c.replicas = doc.value("replicas", std::size_t{1});
  c.stride = doc.value("stride", std::size_t{0});
  c.x0 = number(doc, "x0", 0.0);
  if (doc.contains("initial")) {
    c.initial = vector_of(doc["initial"], "initial");
    if (c.initial.size() != c.basis().size()) fail("initial estimate does not match the basis size");
  }

  if (doc.contains("xi_grid")) {
    const json& xg = doc["xi_grid"];
    if (xg.is_array()) {
      for (const auto& v : xg) c.xi_grid.push_back(v.get<double>());
    } else {
      XGrid spaced{number(xg, "min", 0.2), number(xg, "max", 2.8), xg.value("points", 15)};
      c.xi_grid = spaced.values();
    }
  } else {
    c.xi_grid = XGrid{0.2, 2.8, 15}.values();
  }

  const json xg = doc.value("x_grid", json::object());
  reject_unknown(xg, {"min", "max", "points"}, "x_grid");
  c.x_grid = {number(xg, "min", -3.0), number(xg, "max", 3.0), xg.value("points", 61)};
  if (c.x_grid.points < 1 || !(c.x_grid.max >= c.x_grid.min)) fail("x_grid must be a non-empty interval");

  const json rate = doc.value("rate", json::object());
  reject_unknown(rate, {"window", "checkpoints"}, "rate");
  if (rate.contains("window")) c.rate_window = pair_of(rate["window"], "rate.window");
  if (c.rate_window.second <= 0.0) c.rate_window.second = c.final_time;
  c.rate_checkpoints = rate.value("checkpoints", 61);

  if (doc.contains("basis_sizes")) {
    c.basis_sizes = doc["basis_sizes"].get<std::vector<int>>();
  } else {
    c.basis_sizes = {static_cast<int>(c.basis().size())};
  }
  for (int n : c.basis_sizes) {
    if (n < 1) fail("basis_sizes entries must be >= 1");
  }

  const json q = doc.value("quadrature", json::object());
  reject_unknown(q, {"nodes", "fd_step"}, "quadrature");
  c.quadrature_nodes = q.value("nodes", kDefaultQuadratureNodes);
  c.fd_step = number(q, "fd_step", kDefaultFdStep);

  c.output = doc.value("output", c.name + ".csv");
  if (doc.contains("check")) c.check = parse_check(doc["check"]);

  // Up-front validation of kind-specific requirements.
  switch (c.kind) {
    case ExperimentKind::xi_sweep:
      if (c.xi_grid.empty()) fail("xi_grid must not be empty");
      if (c.filter.kind == FilterKind::none) fail("xi_sweep needs a filter");
      break;
    case ExperimentKind::rate_study:
      if (c.replicas < 2) fail("rate_study needs at least 2 replicas");
      break;
    case ExperimentKind::drift_function:
      if (c.basis_spec.value("kind", "") != "monomials") fail("drift_function needs a monomial basis");
      break;
    default: break;
  }

  c.resolved = doc;
  c.resolved["grid"]["dt"] = c.dt;
  c.resolved["grid"]["n_steps"] = c.grid().n_steps;
  c.resolved["filter"]["delta_effective"] = effective_delta(c.filter, c.model.eps);
  c.resolved["seed"] = c.seed;
  c.resolved["replicas"] = c.replicas;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool full) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return parse_config(std::move(doc), full);
}

}  // namespace msde
