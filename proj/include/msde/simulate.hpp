#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>

#include "msde/homogenize.hpp"
#include "msde/potential.hpp"

namespace msde {

struct TimeGrid {
  double dt;
  std::size_t n_steps;

  TimeGrid(double dt, std::size_t n_steps);
  // n_steps = floor(T / dt), tolerant of T being an exact multiple of dt in decimal.
  static TimeGrid from_final_time(double final_time, double dt);

  double final_time() const { return static_cast<double>(n_steps) * dt; }
};

class PathDivergence : public std::runtime_error {
 public:
  PathDivergence(std::size_t step, double value);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Brownian increments dW_n ~ N(0, dt). Streams seeded from the same value are
// identical; the seed is expanded through seed_seq so consecutive seeds give
// unrelated streams.
class GaussianIncrements {
 public:
  GaussianIncrements(std::uint64_t seed, double dt);
  double next() { return sqrt_dt_ * normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  double sqrt_dt_;
};

// dX = drift(X) dt + sqrt(2 diffusion(X)) dW
struct Dynamics {
  std::function<double(double)> drift;
  std::function<double(double)> diffusion;  // empty: constant diffusion below
  double constant_diffusion = 0.0;
};

inline constexpr double kDivergenceBound = 1e6;

// Single-pass Euler-Maruyama path. Holds X_n; advance() moves to X_{n+1}.
class PathStream {
 public:
  PathStream(Dynamics dynamics, TimeGrid grid, std::uint64_t seed, double x0 = 0.0);

  double advance();

  double state() const { return x_; }
  std::size_t step() const { return n_; }
  double time() const { return static_cast<double>(n_) * grid_.dt; }
  bool done() const { return n_ >= grid_.n_steps; }
  const TimeGrid& grid() const { return grid_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Dynamics dynamics_;
  TimeGrid grid_;
  std::uint64_t seed_;
  GaussianIncrements dw_;
  double noise_scale_;  // sqrt(2 * constant_diffusion)
  double x_;
  std::size_t n_ = 0;
};

// X_{n+1} = X_n + multiscale_drift(X_n) dt + sqrt(2 sigma) dW_n.
// Rejects dt > 8 eps^3 and warns above eps^3 when the fast potential is active.
PathStream simulate_multiscale(const MultiscaleModel& model, TimeGrid grid, std::uint64_t seed, double x0 = 0.0);

// X_{n+1} = X_n - b(X_n) dt + sqrt(2 Sigma(X_n)) dW_n. Negative Sigma aborts.
PathStream simulate_homogenized(const EffectiveModel& eff, TimeGrid grid, std::uint64_t seed, double x0 = 0.0);

}  // namespace msde
