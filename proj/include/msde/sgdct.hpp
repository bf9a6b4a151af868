#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msde/filter.hpp"
#include "msde/potential.hpp"
#include "msde/simulate.hpp"

namespace msde {

// (1, x, ..., x^{n-1})
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> monomial_vector(Scalar x, Eigen::Index n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u(n);
  Scalar power(1);
  for (Eigen::Index k = 0; k < n; ++k) {
    u[k] = power;
    power *= x;
  }
  return u;
}

// Basis functions U(x) = (u_1(x), ..., u_N(x)) of the drift expansion b(x) ~ A . U(x).
class BasisSet {
 public:
  using Fn = std::function<double(double)>;

  // u_k(x) = x^{k-1}, k = 1..n
  static BasisSet monomials(int n);
  // u_k(x) = sum_j c_{k,j} x^j
  static BasisSet polynomials(std::vector<Eigen::VectorXd> coefficients);
  // u_k = d V'(x; alpha) / d alpha_k, so that the target coefficients are K alpha.
  static BasisSet slow_gradient(const SlowPotential& slow);
  static BasisSet custom(std::vector<Fn> fns);

  Eigen::Index size() const { return size_; }
  void evaluate(double x, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd operator()(double x) const;
  std::string describe() const;

 private:
  BasisSet() = default;

  Eigen::Index size_ = 0;
  bool monomial_ = false;
  std::vector<Eigen::VectorXd> polys_;
  std::vector<Fn> custom_;
};

// A . U(x)
template <typename Derived>
typename Derived::Scalar drift_eval(const Eigen::MatrixBase<Derived>& coefficients, const BasisSet& basis,
                                    double x) {
  if (coefficients.size() != basis.size()) {
    throw std::invalid_argument("coefficient vector has " + std::to_string(coefficients.size()) +
                                " entries but the basis has " + std::to_string(basis.size()));
  }
  return coefficients.dot(basis(x));
}

// eta(t) = gamma / (beta + t)
struct LearningRate {
  double gamma = 10.0;
  double beta = 10.0;

  LearningRate() = default;
  LearningRate(double gamma, double beta);
  double operator()(double t) const { return gamma / (beta + t); }
};

class EstimatorDivergence : public std::runtime_error {
 public:
  explicit EstimatorDivergence(std::size_t step);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Euler-Maruyama discretisation of filtered SGDCT:
//   A_{n+1} = A_n - eta_n (U(Z_n) (x) U(X_n)) A_n dt - eta_n U(Z_n) (X_{n+1} - X_n)
// The outer product is deliberately asymmetric: filtered left factor, raw
// right factor. Passing Z_n = X_n gives the unfiltered estimator.
class SgdctEstimator {
 public:
  SgdctEstimator(BasisSet basis, LearningRate lr, double dt, Eigen::VectorXd initial = {});

  const Eigen::VectorXd& step(double x_n, double z_n, double x_next);

  const Eigen::VectorXd& coefficients() const { return a_; }
  std::size_t steps() const { return n_; }
  double time() const { return static_cast<double>(n_) * dt_; }
  const BasisSet& basis() const { return basis_; }
  const LearningRate& learning_rate() const { return lr_; }

 private:
  BasisSet basis_;
  LearningRate lr_;
  double dt_;
  Eigen::VectorXd a_;
  Eigen::VectorXd uz_;
  Eigen::VectorXd ux_;
  std::size_t n_ = 0;
};

struct EstimatorTrace {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> values;

  void record(double t, const Eigen::VectorXd& a);
  const Eigen::VectorXd& terminal() const { return values.back(); }
  double terminal_time() const { return times.back(); }
  std::size_t size() const { return times.size(); }
};

std::size_t default_trace_stride(std::size_t n_steps);

struct EstimationOptions {
  std::size_t stride = 0;                // 0: default_trace_stride
  std::vector<std::size_t> checkpoints;  // extra step indices to record, ascending
  Eigen::VectorXd initial;               // empty: zeros
  double initial_state = 0.0;            // X_0 of the simulated path
};

// Fused single pass: path -> filter -> SGDCT. Records n = 0, every stride-th
// step, the checkpoints and the final step.
EstimatorTrace run_estimation(PathStream& path, Filter filter, const BasisSet& basis, const LearningRate& lr,
                              const EstimationOptions& options = {});

EstimatorTrace run_estimation(const MultiscaleModel& model, const TimeGrid& grid, const FilterSpec& filter,
                              const BasisSet& basis, const LearningRate& lr, std::uint64_t seed,
                              const EstimationOptions& options = {});

}  // namespace msde
