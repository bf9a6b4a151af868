#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace msde {

enum class FilterKind { none, exponential, moving_average };

std::string_view to_string(FilterKind k);
FilterKind parse_filter_kind(std::string_view s);

struct FilterSpec {
  FilterKind kind = FilterKind::exponential;
  double delta = 1.0;
  std::optional<double> xi;  // when set, delta = eps^xi
};

// delta = eps^xi if xi is set, otherwise spec.delta.
double effective_delta(const FilterSpec& spec, double eps);

// Causal streaming filter producing Z_n from X_0, X_1, ... (one call per step).
//
// exponential:    Z_0 = 0,  Z_n = e^{-dt/delta} Z_{n-1} + (1/delta) e^{-dt/delta} X_n dt
// moving average: Z_0 = 0,
//                 Z_n = (n dt)^{-1} sum_{i=0}^{n} X_i dt       1 <= n < S
//                 Z_n = delta^{-1} sum_{i=n-S}^{n-1} X_i dt    n >= S,   S = floor(delta / dt)
// none:           Z_n = X_n
class Filter {
 public:
  Filter(FilterKind kind, double delta, double dt);

  double step(double x_n);

  FilterKind kind() const { return kind_; }
  double delta() const { return delta_; }
  std::size_t window() const { return window_; }
  std::size_t count() const { return n_; }

 private:
  double step_exponential(double x_n);
  double step_moving_average(double x_n);

  FilterKind kind_;
  double delta_;
  double dt_;
  double decay_ = 0.0;
  double z_ = 0.0;
  std::size_t n_ = 0;

  // moving average: last `window_` samples in a ring buffer and their sum,
  // re-summed from scratch each time the write head wraps.
  std::size_t window_ = 0;
  std::vector<double> ring_;
  std::size_t head_ = 0;
  double sum_ = 0.0;
};

}  // namespace msde
