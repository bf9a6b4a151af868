#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace msde {

enum class SlowFamily { quadratic, double_well, polynomial };

// Slow-scale confining potential V(x; alpha).
//   quadratic:   V = alpha_1 x^2 / 2
//   double_well: V = alpha_1 x^4 / 4 - alpha_2 x^2 / 2
//   polynomial:  V = sum_k alpha_{k+1} x^k
class SlowPotential {
 public:
  SlowPotential(SlowFamily family, Eigen::VectorXd alpha);

  static SlowPotential quadratic(double alpha);
  static SlowPotential double_well(double alpha1, double alpha2);
  static SlowPotential polynomial(Eigen::VectorXd coefficients);

  double value(double x) const;
  double derivative(double x) const;

  // d V'(x; alpha) / d alpha. V' is linear in alpha for every family, so
  // V'(x) = parameter_gradient(x) . alpha.
  Eigen::VectorXd parameter_gradient(double x) const;

  SlowFamily family() const { return family_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }

 private:
  SlowFamily family_;
  Eigen::VectorXd alpha_;
};

enum class FastFamily { none, sine, modulated_cosine, custom };

// Fast-scale potential p(x, y), periodic in y with period L.
//   sine:             p = a sin(2 pi y / L)
//   modulated_cosine: p = a (x^2 / 2) cos(2 pi y / L) 1{|x| <= R}
class FastPotential {
 public:
  using Fn = std::function<double(double, double)>;

  struct Custom {
    Fn value;
    Fn dy;
    Fn dx;  // empty when p does not depend on x
    double period = 2.0 * 3.14159265358979323846;
    std::optional<double> cutoff;  // p(x, .) == 0 for |x| > cutoff
  };

  static FastPotential none();
  static FastPotential sine(double amplitude = 1.0, double period = kTwoPi);
  static FastPotential modulated_cosine(double amplitude = 1.0, double cutoff = 2.0,
                                        double period = kTwoPi);
  static FastPotential custom(Custom fns);

  double value(double x, double y) const;
  double dy(double x, double y) const;
  double dx(double x, double y) const;

  FastFamily family() const { return family_; }
  double period() const { return period_; }
  double amplitude() const { return amplitude_; }
  bool depends_on_x() const;
  // Radius beyond which p(x, .) vanishes identically, if any.
  std::optional<double> cutoff() const { return cutoff_; }
  // True when p(x, .) is identically zero at this x.
  bool vanishes_at(double x) const;

  static constexpr double kTwoPi = 6.283185307179586476925286766559;

 private:
  FastPotential(FastFamily family, double amplitude, double period, std::optional<double> cutoff);

  FastFamily family_;
  double amplitude_;
  double period_;
  std::optional<double> cutoff_;
  Custom custom_;
};

struct MultiscaleModel {
  SlowPotential slow;
  FastPotential fast;
  double eps;
  double sigma;

  MultiscaleModel(SlowPotential slow, FastPotential fast, double eps, double sigma);
};

// -(V^eps)'(x) = -[V'(x) + d_x p(x, x/eps) + (1/eps) d_y p(x, x/eps)]
double multiscale_drift(const MultiscaleModel& model, double x);

// -V'(x; alpha)
double slow_drift(const MultiscaleModel& model, double x);

std::string_view to_string(SlowFamily f);
std::string_view to_string(FastFamily f);
SlowFamily parse_slow_family(std::string_view s);
FastFamily parse_fast_family(std::string_view s);

}  // namespace msde
