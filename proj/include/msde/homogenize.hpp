#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "msde/bessel.hpp"
#include "msde/potential.hpp"

namespace msde {

inline constexpr int kDefaultQuadratureNodes = 2048;
inline constexpr double kDefaultFdStep = 1e-4;

// Homogenized coefficients of a 1D model: dX = -b(X) dt + sqrt(2 Sigma(X)) dW,
// with Sigma(x) = sigma K(x).
struct EffectiveModel {
  enum class Provenance { quadrature, closed_form, user };

  std::function<double(double)> K;
  std::function<double(double)> b;
  std::function<double(double)> Sigma;
  Provenance provenance = Provenance::user;
};

std::string_view to_string(EffectiveModel::Provenance p);

// Effective coefficient K(x) = L^2 / (int_0^L e^{-p/sigma} dy * int_0^L e^{p/sigma} dy),
// evaluated with the periodic trapezoid rule on `nodes` points.
double k_effective_quadrature(const MultiscaleModel& model, double x, int nodes = kDefaultQuadratureNodes);

// log int_0^L e^{-p(x,y)/sigma} dy
double log_partition_quadrature(const MultiscaleModel& model, double x, int nodes = kDefaultQuadratureNodes);

// b(x) = K V' - sigma K (log int e^{-p/sigma} dy)' - sigma K'.
// The two x-derivatives are central differences of step fd_step; near a
// cutoff radius of p they switch to one-sided second-order stencils that stay
// on the side of x. Both vanish identically when p does not depend on x.
double homogenized_drift(const MultiscaleModel& model, double x, int nodes = kDefaultQuadratureNodes,
                         double fd_step = kDefaultFdStep);

// Closed form of b for V = x^4/4 - x^2/2, p = (x^2/2) cos(y) 1{|x| <= 2}:
//   b = V'(x)                                       |x| > 2
//   b = V' I0(z)^-2 + x I1(z) I0(z)^-3,  z = x^2/2s  |x| <= 2
double modulated_double_well_drift(double x, double sigma);

// Effective model backed by quadrature (any fast potential).
EffectiveModel effective_model_quadrature(const MultiscaleModel& model, int nodes = kDefaultQuadratureNodes,
                                          double fd_step = kDefaultFdStep);

// Effective model from Bessel closed forms, available for the sine and
// x-modulated-cosine families (and trivially for p == 0).
std::optional<EffectiveModel> effective_model_closed_form(const MultiscaleModel& model);

// For x-independent p, K is a constant and b(x) = K V'(x; alpha) = (K alpha) . dV'/dalpha,
// so the homogenized parameters are K alpha. Throws if p depends on x.
Eigen::VectorXd homogenized_parameters(const MultiscaleModel& model, int nodes = kDefaultQuadratureNodes);

}  // namespace msde
