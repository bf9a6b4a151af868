#include "msde/homogenize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace msde {

namespace {

struct CellIntegrals {
  double minus;  // int e^{-p/sigma}
  double plus;   // int e^{+p/sigma}
};

CellIntegrals cell_integrals(const MultiscaleModel& model, double x, int nodes) {
  if (nodes < 16 || nodes % 2 != 0) {
    throw std::invalid_argument("quadrature needs an even node count >= 16, got " + std::to_string(nodes));
  }
  const double period = model.fast.period();
  if (model.fast.vanishes_at(x)) return {period, period};
  if (!(model.sigma > 0.0)) {
    throw std::invalid_argument("homogenization needs sigma > 0 for a non-trivial fast potential");
  }

  const double h = period / nodes;
  double minus = 0.0;
  double plus = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double s = model.fast.value(x, j * h) / model.sigma;
    minus += std::exp(-s);
    plus += std::exp(s);
  }
  minus *= h;
  plus *= h;
  if (!std::isfinite(minus) || !std::isfinite(plus) || !(minus > 0.0) || !(plus > 0.0)) {
    throw std::overflow_error("cell integrand e^{|p|/sigma} is not representable at x = " + std::to_string(x));
  }
  return {minus, plus};
}

// Derivative of f at x. Uses a central stencil unless it would straddle the
// cutoff radius, in which case a one-sided stencil on x's side is used.
template <typename F>
double x_derivative(const F& f, double x, double h, std::optional<double> cutoff) {
  if (cutoff) {
    const double r = *cutoff;
    const bool inside = std::abs(x) <= r;
    const auto same_side = [&](double y) { return (std::abs(y) <= r) == inside; };
    if (!same_side(x - h) || !same_side(x + h)) {
      const double outward = x >= 0.0 ? 1.0 : -1.0;
      const double s = inside ? -outward : outward;
      return s * (-3.0 * f(x) + 4.0 * f(x + s * h) - f(x + 2.0 * s * h)) / (2.0 * h);
    }
  }
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

std::string_view to_string(EffectiveModel::Provenance p) {
  switch (p) {
    case EffectiveModel::Provenance::quadrature: return "quadrature";
    case EffectiveModel::Provenance::closed_form: return "closed-form";
    case EffectiveModel::Provenance::user: return "user";
  }
  return "?";
}

double k_effective_quadrature(const MultiscaleModel& model, double x, int nodes) {
  const auto [minus, plus] = cell_integrals(model, x, nodes);
  const double period = model.fast.period();
  return (period / minus) * (period / plus);
}

double log_partition_quadrature(const MultiscaleModel& model, double x, int nodes) {
  return std::log(cell_integrals(model, x, nodes).minus);
}

double homogenized_drift(const MultiscaleModel& model, double x, int nodes, double fd_step) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
  const double k = k_effective_quadrature(model, x, nodes);
  double b = k * model.slow.derivative(x);
  if (model.fast.depends_on_x()) {
    const auto cutoff = model.fast.cutoff();
    const double dlog = x_derivative([&](double y) { return log_partition_quadrature(model, y, nodes); }, x,
                                     fd_step, cutoff);
    const double dk = x_derivative([&](double y) { return k_effective_quadrature(model, y, nodes); }, x,
                                   fd_step, cutoff);
    b -= model.sigma * (k * dlog + dk);
  }
  return b;
}

double modulated_double_well_drift(double x, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const double v_prime = x * x * x - x;
  if (std::abs(x) > 2.0) return v_prime;
  const double z = x * x / (2.0 * sigma);
  const double i0 = bessel_i(0, z);
  const double i1 = bessel_i(1, z);
  return v_prime / (i0 * i0) + x * i1 / (i0 * i0 * i0);
}

EffectiveModel effective_model_quadrature(const MultiscaleModel& model, int nodes, double fd_step) {
  EffectiveModel eff;
  eff.provenance = EffectiveModel::Provenance::quadrature;
  eff.K = [model, nodes](double x) { return k_effective_quadrature(model, x, nodes); };
  eff.b = [model, nodes, fd_step](double x) { return homogenized_drift(model, x, nodes, fd_step); };
  eff.Sigma = [model, nodes](double x) { return model.sigma * k_effective_quadrature(model, x, nodes); };
  return eff;
}

std::optional<EffectiveModel> effective_model_closed_form(const MultiscaleModel& model) {
  const SlowPotential slow = model.slow;
  const double sigma = model.sigma;
  const double a = std::abs(model.fast.amplitude());
  EffectiveModel eff;
  eff.provenance = EffectiveModel::Provenance::closed_form;

  switch (model.fast.family()) {
    case FastFamily::none:
      eff.K = [](double) { return 1.0; };
      eff.b = [slow](double x) { return slow.derivative(x); };
      break;
    case FastFamily::sine: {
      if (!(sigma > 0.0)) return std::nullopt;
      const double i0 = bessel_i(0, a / sigma);
      const double k = 1.0 / (i0 * i0);
      eff.K = [k](double) { return k; };
      eff.b = [slow, k](double x) { return k * slow.derivative(x); };
      break;
    }
    case FastFamily::modulated_cosine: {
      if (!(sigma > 0.0)) return std::nullopt;
      const double r = *model.fast.cutoff();
      eff.K = [a, sigma, r](double x) {
        if (std::abs(x) > r) return 1.0;
        const double i0 = bessel_i(0, a * x * x / (2.0 * sigma));
        return 1.0 / (i0 * i0);
      };
      eff.b = [slow, a, sigma, r](double x) {
        const double v_prime = slow.derivative(x);
        if (std::abs(x) > r) return v_prime;
        const double z = a * x * x / (2.0 * sigma);
        const double i0 = bessel_i(0, z);
        const double i1 = bessel_i(1, z);
        return v_prime / (i0 * i0) + a * x * i1 / (i0 * i0 * i0);
      };
      break;
    }
    case FastFamily::custom: return std::nullopt;
  }
  eff.Sigma = [k = eff.K, sigma](double x) { return sigma * k(x); };
  return eff;
}

Eigen::VectorXd homogenized_parameters(const MultiscaleModel& model, int nodes) {
  if (model.fast.depends_on_x()) {
    throw std::invalid_argument("homogenized parameters are only defined for x-independent fast potentials");
  }
  return k_effective_quadrature(model, 0.0, nodes) * model.slow.alpha();
}

}  // namespace msde
