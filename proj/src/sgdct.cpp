#include "msde/sgdct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace msde {

BasisSet BasisSet::monomials(int n) {
  if (n < 1) throw std::invalid_argument("basis needs at least one function");
  BasisSet b;
  b.size_ = n;
  b.monomial_ = true;
  return b;
}

BasisSet BasisSet::polynomials(std::vector<Eigen::VectorXd> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("basis needs at least one function");
  for (const auto& c : coefficients) {
    if (c.size() < 1 || !c.allFinite()) throw std::invalid_argument("polynomial basis coefficients must be finite");
  }
  BasisSet b;
  b.size_ = static_cast<Eigen::Index>(coefficients.size());
  b.polys_ = std::move(coefficients);
  return b;
}

BasisSet BasisSet::slow_gradient(const SlowPotential& slow) {
  std::vector<Eigen::VectorXd> polys;
  switch (slow.family()) {
    case SlowFamily::quadratic: polys.push_back(Eigen::Vector2d(0.0, 1.0)); break;
    case SlowFamily::double_well:
      polys.push_back(Eigen::Vector4d(0.0, 0.0, 0.0, 1.0));
      polys.push_back(Eigen::Vector2d(0.0, -1.0));
      break;
    case SlowFamily::polynomial:
      for (Eigen::Index k = 0; k < slow.alpha().size(); ++k) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(std::max<Eigen::Index>(k, 1));
        if (k >= 1) c[k - 1] = static_cast<double>(k);
        polys.push_back(std::move(c));
      }
      break;
  }
  return polynomials(std::move(polys));
}

BasisSet BasisSet::custom(std::vector<Fn> fns) {
  if (fns.empty()) throw std::invalid_argument("basis needs at least one function");
  for (const auto& f : fns) {
    if (!f) throw std::invalid_argument("custom basis function is empty");
  }
  BasisSet b;
  b.size_ = static_cast<Eigen::Index>(fns.size());
  b.custom_ = std::move(fns);
  return b;
}

void BasisSet::evaluate(double x, Eigen::Ref<Eigen::VectorXd> out) const {
  if (monomial_) {
    double power = 1.0;
    for (Eigen::Index k = 0; k < size_; ++k) {
      out[k] = power;
      power *= x;
    }
  } else if (!polys_.empty()) {
    for (Eigen::Index k = 0; k < size_; ++k) {
      const Eigen::VectorXd& c = polys_[static_cast<std::size_t>(k)];
      double v = 0.0;
      for (Eigen::Index j = c.size() - 1; j >= 0; --j) v = v * x + c[j];
      out[k] = v;
    }
  } else {
    for (Eigen::Index k = 0; k < size_; ++k) out[k] = custom_[static_cast<std::size_t>(k)](x);
  }
}

Eigen::VectorXd BasisSet::operator()(double x) const {
  Eigen::VectorXd u(size_);
  evaluate(x, u);
  return u;
}

std::string BasisSet::describe() const {
  std::ostringstream os;
  if (monomial_) {
    os << "monomials(" << size_ << ")";
  } else if (!polys_.empty()) {
    os << "polynomials[";
    for (std::size_t k = 0; k < polys_.size(); ++k) {
      if (k) os << "; ";
      for (Eigen::Index j = 0; j < polys_[k].size(); ++j) os << (j ? " " : "") << polys_[k][j];
    }
    os << "]";
  } else {
    os << "custom(" << size_ << ")";
  }
  return os.str();
}

LearningRate::LearningRate(double gamma_, double beta_) : gamma(gamma_), beta(beta_) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("learning-rate gamma must be >= 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("learning-rate beta must be > 0");
}

EstimatorDivergence::EstimatorDivergence(std::size_t step)
    : std::runtime_error("SGDCT estimate became non-finite at step " + std::to_string(step) +
                         " (learning rate too aggressive or path divergence)"),
      step_(step) {}

SgdctEstimator::SgdctEstimator(BasisSet basis, LearningRate lr, double dt, Eigen::VectorXd initial)
    : basis_(std::move(basis)), lr_(lr), dt_(dt), a_(std::move(initial)) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("estimator time step must be positive");
  if (a_.size() == 0) a_ = Eigen::VectorXd::Zero(basis_.size());
  if (a_.size() != basis_.size()) throw std::invalid_argument("initial estimate does not match the basis size");
  uz_.resize(basis_.size());
  ux_.resize(basis_.size());
}

const Eigen::VectorXd& SgdctEstimator::step(double x_n, double z_n, double x_next) {
  const double eta = lr_(static_cast<double>(n_) * dt_);
  basis_.evaluate(z_n, uz_);
  basis_.evaluate(x_n, ux_);
  // (U(z) U(x)^T) A dt + U(z) dX == U(z) * (U(x).A dt + dX)
  const double scale = eta * (ux_.dot(a_) * dt_ + (x_next - x_n));
  a_.noalias() -= scale * uz_;
  ++n_;
  if (!a_.allFinite()) throw EstimatorDivergence(n_);
  return a_;
}

void EstimatorTrace::record(double t, const Eigen::VectorXd& a) {
  times.push_back(t);
  values.push_back(a);
}

std::size_t default_trace_stride(std::size_t n_steps) { return std::max<std::size_t>(1, n_steps / 100000); }

EstimatorTrace run_estimation(PathStream& path, Filter filter, const BasisSet& basis, const LearningRate& lr,
                              const EstimationOptions& options) {
  const TimeGrid& grid = path.grid();
  const std::size_t stride = options.stride ? options.stride : default_trace_stride(grid.n_steps);
  SgdctEstimator est(basis, lr, grid.dt, options.initial);

  EstimatorTrace trace;
  auto checkpoint = options.checkpoints.begin();
  const auto checkpoints_end = options.checkpoints.end();
  while (checkpoint != checkpoints_end && *checkpoint == 0) ++checkpoint;
  trace.record(path.time(), est.coefficients());

  double x = path.state();
  double z = filter.step(x);
  while (!path.done()) {
    const double x_next = path.advance();
    est.step(x, z, x_next);
    x = x_next;
    z = filter.step(x);

    const std::size_t n = path.step();
    bool keep = n % stride == 0 || path.done();
    while (checkpoint != checkpoints_end && *checkpoint <= n) {
      keep = keep || *checkpoint == n;
      ++checkpoint;
    }
    if (keep) trace.record(path.time(), est.coefficients());
  }
  return trace;
}

EstimatorTrace run_estimation(const MultiscaleModel& model, const TimeGrid& grid, const FilterSpec& filter,
                              const BasisSet& basis, const LearningRate& lr, std::uint64_t seed,
                              const EstimationOptions& options) {
  PathStream path = simulate_multiscale(model, grid, seed, options.initial_state);
  return run_estimation(path, Filter(filter.kind, effective_delta(filter, model.eps), grid.dt), basis, lr, options);
}

}  // namespace msde
