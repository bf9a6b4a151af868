#include "msde/filter.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace msde {

std::string_view to_string(FilterKind k) {
  switch (k) {
    case FilterKind::none: return "none";
    case FilterKind::exponential: return "exponential";
    case FilterKind::moving_average: return "moving-average";
  }
  return "?";
}

FilterKind parse_filter_kind(std::string_view s) {
  if (s == "none") return FilterKind::none;
  if (s == "exponential") return FilterKind::exponential;
  if (s == "moving-average" || s == "moving_average") return FilterKind::moving_average;
  throw std::invalid_argument("unknown filter kind '" + std::string(s) + "'");
}

double effective_delta(const FilterSpec& spec, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  return spec.xi ? std::pow(eps, *spec.xi) : spec.delta;
}

Filter::Filter(FilterKind kind, double delta, double dt) : kind_(kind), delta_(delta), dt_(dt) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("filter time step must be positive");
  if (kind_ == FilterKind::none) return;
  if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw std::invalid_argument("filter width must be positive");

  if (kind_ == FilterKind::exponential) {
    decay_ = std::exp(-dt_ / delta_);
    return;
  }
  const double ratio = delta_ / dt_;
  const double nearest = std::round(ratio);
  window_ = static_cast<std::size_t>(std::abs(ratio - nearest) <= 1e-9 * nearest ? nearest : std::floor(ratio));
  if (window_ == 0) {
    throw std::invalid_argument("moving-average width " + std::to_string(delta_) + " is below the time step " +
                                std::to_string(dt_));
  }
  ring_.assign(window_, 0.0);
}

double Filter::step(double x_n) {
  double z = x_n;
  switch (kind_) {
    case FilterKind::none: break;
    case FilterKind::exponential: z = step_exponential(x_n); break;
    case FilterKind::moving_average: z = step_moving_average(x_n); break;
  }
  ++n_;
  return z;
}

double Filter::step_exponential(double x_n) {
  if (n_ == 0) {
    z_ = 0.0;
  } else {
    z_ = decay_ * z_ + (1.0 / delta_) * decay_ * x_n * dt_;
  }
  return z_;
}

double Filter::step_moving_average(double x_n) {
  double z = 0.0;
  if (n_ >= window_) {
    z = sum_ * dt_ / delta_;
  } else if (n_ >= 1) {
    z = (sum_ + x_n) / static_cast<double>(n_);
  }

  if (n_ < window_) {
    ring_[head_] = x_n;
    sum_ += x_n;
  } else {
    sum_ += x_n - ring_[head_];
    ring_[head_] = x_n;
  }
  if (++head_ == window_) {
    head_ = 0;
    sum_ = std::accumulate(ring_.begin(), ring_.end(), 0.0);
  }
  return z;
}

}  // namespace msde
