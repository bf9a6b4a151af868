#include "msde/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace msde {

namespace {

void require_size(const Eigen::VectorXd& alpha, Eigen::Index n, const char* family) {
  if (alpha.size() != n) {
    throw std::invalid_argument(std::string(family) + " potential takes " + std::to_string(n) +
                                " parameter(s), got " + std::to_string(alpha.size()));
  }
}

}  // namespace

SlowPotential::SlowPotential(SlowFamily family, Eigen::VectorXd alpha)
    : family_(family), alpha_(std::move(alpha)) {
  switch (family_) {
    case SlowFamily::quadratic: require_size(alpha_, 1, "quadratic"); break;
    case SlowFamily::double_well: require_size(alpha_, 2, "double-well"); break;
    case SlowFamily::polynomial:
      if (alpha_.size() < 1) throw std::invalid_argument("polynomial potential needs coefficients");
      break;
  }
  if (!alpha_.allFinite()) throw std::invalid_argument("slow potential parameters must be finite");
}

SlowPotential SlowPotential::quadratic(double alpha) {
  return {SlowFamily::quadratic, Eigen::VectorXd::Constant(1, alpha)};
}

SlowPotential SlowPotential::double_well(double alpha1, double alpha2) {
  Eigen::VectorXd a(2);
  a << alpha1, alpha2;
  return {SlowFamily::double_well, std::move(a)};
}

SlowPotential SlowPotential::polynomial(Eigen::VectorXd coefficients) {
  return {SlowFamily::polynomial, std::move(coefficients)};
}

double SlowPotential::value(double x) const {
  switch (family_) {
    case SlowFamily::quadratic: return alpha_[0] * x * x / 2.0;
    case SlowFamily::double_well: {
      const double x2 = x * x;
      return alpha_[0] * x2 * x2 / 4.0 - alpha_[1] * x2 / 2.0;
    }
    case SlowFamily::polynomial: {
      double v = 0.0;
      for (Eigen::Index k = alpha_.size() - 1; k >= 0; --k) v = v * x + alpha_[k];
      return v;
    }
  }
  return 0.0;
}

double SlowPotential::derivative(double x) const {
  switch (family_) {
    case SlowFamily::quadratic: return alpha_[0] * x;
    case SlowFamily::double_well: return alpha_[0] * x * x * x - alpha_[1] * x;
    case SlowFamily::polynomial: {
      double d = 0.0;
      for (Eigen::Index k = alpha_.size() - 1; k >= 1; --k) d = d * x + static_cast<double>(k) * alpha_[k];
      return d;
    }
  }
  return 0.0;
}

Eigen::VectorXd SlowPotential::parameter_gradient(double x) const {
  Eigen::VectorXd g(alpha_.size());
  switch (family_) {
    case SlowFamily::quadratic: g[0] = x; break;
    case SlowFamily::double_well: g << x * x * x, -x; break;
    case SlowFamily::polynomial: {
      g[0] = 0.0;
      double power = 1.0;  // x^(k-1)
      for (Eigen::Index k = 1; k < g.size(); ++k) {
        g[k] = static_cast<double>(k) * power;
        power *= x;
      }
      break;
    }
  }
  return g;
}

FastPotential::FastPotential(FastFamily family, double amplitude, double period,
                             std::optional<double> cutoff)
    : family_(family), amplitude_(amplitude), period_(period), cutoff_(cutoff) {
  if (!(period_ > 0.0) || !std::isfinite(period_)) {
    throw std::invalid_argument("fast potential period must be positive");
  }
  if (!std::isfinite(amplitude_)) throw std::invalid_argument("fast potential amplitude must be finite");
  if (cutoff_ && !(*cutoff_ >= 0.0)) throw std::invalid_argument("cutoff radius must be non-negative");
}

FastPotential FastPotential::none() { return {FastFamily::none, 0.0, kTwoPi, std::nullopt}; }

FastPotential FastPotential::sine(double amplitude, double period) {
  return {FastFamily::sine, amplitude, period, std::nullopt};
}

FastPotential FastPotential::modulated_cosine(double amplitude, double cutoff, double period) {
  return {FastFamily::modulated_cosine, amplitude, period, cutoff};
}

FastPotential FastPotential::custom(Custom fns) {
  if (!fns.value || !fns.dy) throw std::invalid_argument("custom fast potential needs value and dy");
  FastPotential p{FastFamily::custom, 1.0, fns.period, fns.cutoff};
  p.custom_ = std::move(fns);
  return p;
}

bool FastPotential::depends_on_x() const {
  switch (family_) {
    case FastFamily::none:
    case FastFamily::sine: return false;
    case FastFamily::modulated_cosine: return true;
    case FastFamily::custom: return static_cast<bool>(custom_.dx);
  }
  return false;
}

bool FastPotential::vanishes_at(double x) const {
  if (family_ == FastFamily::none || amplitude_ == 0.0) return true;
  if (family_ == FastFamily::modulated_cosine && x == 0.0) return true;
  return cutoff_ && std::abs(x) > *cutoff_;
}

double FastPotential::value(double x, double y) const {
  const double k = kTwoPi / period_;
  switch (family_) {
    case FastFamily::none: return 0.0;
    case FastFamily::sine: return amplitude_ * std::sin(k * y);
    case FastFamily::modulated_cosine:
      if (std::abs(x) > *cutoff_) return 0.0;
      return amplitude_ * (x * x / 2.0) * std::cos(k * y);
    case FastFamily::custom: return custom_.value(x, y);
  }
  return 0.0;
}

double FastPotential::dy(double x, double y) const {
  const double k = kTwoPi / period_;
  switch (family_) {
    case FastFamily::none: return 0.0;
    case FastFamily::sine: return amplitude_ * k * std::cos(k * y);
    case FastFamily::modulated_cosine:
      if (std::abs(x) > *cutoff_) return 0.0;
      return -amplitude_ * (x * x / 2.0) * k * std::sin(k * y);
    case FastFamily::custom: return custom_.dy(x, y);
  }
  return 0.0;
}

double FastPotential::dx(double x, double y) const {
  const double k = kTwoPi / period_;
  switch (family_) {
    case FastFamily::none:
    case FastFamily::sine: return 0.0;
    case FastFamily::modulated_cosine:
      if (std::abs(x) > *cutoff_) return 0.0;
      return amplitude_ * x * std::cos(k * y);
    case FastFamily::custom: return custom_.dx ? custom_.dx(x, y) : 0.0;
  }
  return 0.0;
}

MultiscaleModel::MultiscaleModel(SlowPotential slow_, FastPotential fast_, double eps_, double sigma_)
    : slow(std::move(slow_)), fast(std::move(fast_)), eps(eps_), sigma(sigma_) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be non-negative");
}

double multiscale_drift(const MultiscaleModel& model, double x) {
  const double y = x / model.eps;
  const double grad = model.slow.derivative(x) + model.fast.dx(x, y) + model.fast.dy(x, y) / model.eps;
  if (!std::isfinite(grad)) {
    throw std::domain_error("non-finite multiscale drift at x = " + std::to_string(x));
  }
  return -grad;
}

double slow_drift(const MultiscaleModel& model, double x) { return -model.slow.derivative(x); }

std::string_view to_string(SlowFamily f) {
  switch (f) {
    case SlowFamily::quadratic: return "quadratic";
    case SlowFamily::double_well: return "double-well";
    case SlowFamily::polynomial: return "polynomial";
  }
  return "?";
}

std::string_view to_string(FastFamily f) {
  switch (f) {
    case FastFamily::none: return "none";
    case FastFamily::sine: return "sine";
    case FastFamily::modulated_cosine: return "x-modulated-cosine";
    case FastFamily::custom: return "custom";
  }
  return "?";
}

SlowFamily parse_slow_family(std::string_view s) {
  if (s == "quadratic") return SlowFamily::quadratic;
  if (s == "double-well" || s == "double_well") return SlowFamily::double_well;
  if (s == "polynomial" || s == "custom-polynomial") return SlowFamily::polynomial;
  throw std::invalid_argument("unknown slow potential family '" + std::string(s) + "'");
}

FastFamily parse_fast_family(std::string_view s) {
  if (s == "none") return FastFamily::none;
  if (s == "sine") return FastFamily::sine;
  if (s == "x-modulated-cosine" || s == "modulated_cosine") return FastFamily::modulated_cosine;
  throw std::invalid_argument("unknown fast potential family '" + std::string(s) + "'");
}

}  // namespace msde
