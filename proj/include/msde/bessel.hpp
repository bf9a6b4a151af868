#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace msde {

// Modified Bessel function of the first kind I_0 / I_1 by the ascending series
//   I_n(z) = sum_k (z/2)^(2k+n) / (k! (k+n)!)
// All terms are positive, so the partial sums carry no cancellation; summation
// stops once a term past the peak falls below machine epsilon of the sum.
template <typename Scalar>
Scalar bessel_i(int order, Scalar z) {
  if (order != 0 && order != 1) {
    throw std::invalid_argument("bessel_i: only orders 0 and 1 are supported");
  }
  if (!(z >= Scalar(0))) throw std::domain_error("bessel_i: argument must be >= 0");
  if (!std::isfinite(z)) throw std::overflow_error("bessel_i: argument is not finite");

  const Scalar half = z / Scalar(2);
  const Scalar q = half * half;
  Scalar term = order == 0 ? Scalar(1) : half;
  Scalar sum = term;
  const Scalar tol = std::numeric_limits<Scalar>::epsilon() / Scalar(4);
  for (int k = 1;; ++k) {
    term *= q / (Scalar(k) * Scalar(k + order));
    sum += term;
    if (!std::isfinite(sum)) {
      throw std::overflow_error("bessel_i: I_" + std::to_string(order) + "(" + std::to_string(double(z)) +
                                ") exceeds the representable range");
    }
    if (Scalar(k) > half && term <= tol * sum) break;
  }
  return sum;
}

}  // namespace msde
