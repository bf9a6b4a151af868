#include "msde/simulate.hpp"

#include <cmath>
#include <iostream>
#include <string>
#include <utility>

namespace msde {

TimeGrid::TimeGrid(double dt_, std::size_t n_steps_) : dt(dt_), n_steps(n_steps_) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive and finite");
  if (n_steps < 1) throw std::invalid_argument("time grid needs at least one step");
}

TimeGrid TimeGrid::from_final_time(double final_time, double dt) {
  if (!(dt > 0.0) || !(final_time > 0.0)) throw std::invalid_argument("final time and dt must be positive");
  const double ratio = final_time / dt;
  const double nearest = std::round(ratio);
  const double n = std::abs(ratio - nearest) <= 1e-9 * nearest ? nearest : std::floor(ratio);
  return {dt, static_cast<std::size_t>(n)};
}

PathDivergence::PathDivergence(std::size_t step, double value)
    : std::runtime_error("path diverged at step " + std::to_string(step) + " (|X| = " + std::to_string(std::abs(value)) +
                         ")"),
      step_(step) {}

GaussianIncrements::GaussianIncrements(std::uint64_t seed, double dt) : sqrt_dt_(std::sqrt(dt)) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

PathStream::PathStream(Dynamics dynamics, TimeGrid grid, std::uint64_t seed, double x0)
    : dynamics_(std::move(dynamics)),
      grid_(grid),
      seed_(seed),
      dw_(seed, grid.dt),
      noise_scale_(std::sqrt(2.0 * dynamics_.constant_diffusion)),
      x_(x0) {
  if (!dynamics_.drift) throw std::invalid_argument("path dynamics need a drift");
  if (!(dynamics_.constant_diffusion >= 0.0)) throw std::invalid_argument("diffusion must be non-negative");
}

double PathStream::advance() {
  if (done()) throw std::out_of_range("path stream exhausted");
  double scale = noise_scale_;
  if (dynamics_.diffusion) {
    const double s = dynamics_.diffusion(x_);
    if (!(s >= 0.0)) {
      throw std::domain_error("diffusion Sigma(x) < 0 at step " + std::to_string(n_) + ", x = " + std::to_string(x_));
    }
    scale = std::sqrt(2.0 * s);
  }
  x_ += dynamics_.drift(x_) * grid_.dt + scale * dw_.next();
  ++n_;
  if (!(std::abs(x_) <= kDivergenceBound)) throw PathDivergence(n_, x_);
  return x_;
}

PathStream simulate_multiscale(const MultiscaleModel& model, TimeGrid grid, std::uint64_t seed, double x0) {
  if (model.fast.family() != FastFamily::none) {
    const double eps3 = model.eps * model.eps * model.eps;
    if (grid.dt > 8.0 * eps3 * (1.0 + 1e-12)) {
      throw std::invalid_argument("time step " + std::to_string(grid.dt) + " exceeds 8 eps^3 = " +
                                  std::to_string(8.0 * eps3) + "; the fast scale is not resolved");
    }
    if (grid.dt > eps3 * (1.0 + 1e-9)) {
      std::clog << "warning: time step " << grid.dt << " is above eps^3 = " << eps3 << '\n';
    }
  }
  Dynamics dyn;
  dyn.drift = [model](double x) { return multiscale_drift(model, x); };
  dyn.constant_diffusion = model.sigma;
  return {std::move(dyn), grid, seed, x0};
}

PathStream simulate_homogenized(const EffectiveModel& eff, TimeGrid grid, std::uint64_t seed, double x0) {
  if (!eff.b || !eff.Sigma) throw std::invalid_argument("effective model needs b and Sigma");
  Dynamics dyn;
  dyn.drift = [b = eff.b](double x) { return -b(x); };
  dyn.diffusion = eff.Sigma;
  return {std::move(dyn), grid, seed, x0};
}

}  // namespace msde
