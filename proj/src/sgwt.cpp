#include "stgw/sgwt.hpp"

#include <numbers>

namespace stgw {

KernelDictionary make_dictionary(double lambda_max, Eigen::Index filters, double scale_lo,
                                 double scale_hi) {
  if (!(lambda_max > 0.0)) {
    throw ValidationError("kernel dictionary needs lambda_max > 0 (degenerate spectrum)");
  }
  if (filters < 2) throw ValidationError("kernel dictionary needs at least 2 filters");
  if (!(scale_lo > 0.0) || !(scale_hi > scale_lo)) {
    throw ValidationError("scale bounds must satisfy 0 < scale_lo < scale_hi");
  }
  KernelDictionary dict;
  dict.lambda_max = lambda_max;
  dict.amplitude = kernel_amplitude();
  const Eigen::Index count = filters - 1;
  const double lo = std::log(scale_lo / lambda_max);
  const double hi = std::log(scale_hi / lambda_max);
  if (count == 1) {
    dict.scales.push_back(scale_lo / lambda_max);
    dict.degenerate = true;
    return dict;
  }
  for (Eigen::Index j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(count - 1);
    dict.scales.push_back(std::exp(lo + t * (hi - lo)));
  }
  // Pin the endpoints exactly.
  dict.scales.front() = scale_lo / lambda_max;
  dict.scales.back() = scale_hi / lambda_max;
  return dict;
}

std::vector<Kernel> dictionary_kernels(const KernelDictionary& dict) {
  std::vector<Kernel> kernels;
  for (Eigen::Index m = 0; m < dict.size(); ++m) {
    kernels.push_back([dict, m](double lambda) { return dict(m, lambda); });
  }
  return kernels;
}

Eigen::VectorXd cheb_coeffs(const Kernel& kernel, double lambda_max, Eigen::Index order,
                            Eigen::Index points) {
  if (order < 0) throw ValidationError("Chebyshev order must be non-negative");
  if (points < 2) throw ValidationError("quadrature needs at least 2 intervals");
  if (!(lambda_max > 0.0)) throw ValidationError("Chebyshev domain needs lambda_max > 0");
  const double h = std::numbers::pi / static_cast<double>(points);
  const double half = 0.5 * lambda_max;
  Eigen::VectorXd samples(points + 1);
  for (Eigen::Index i = 0; i <= points; ++i) {
    const double weight = (i == 0 || i == points) ? 0.5 : 1.0;
    samples[i] = weight * kernel(half * (std::cos(static_cast<double>(i) * h) + 1.0));
  }
  Eigen::VectorXd c(order + 1);
  for (Eigen::Index k = 0; k <= order; ++k) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i <= points; ++i) {
      const Eigen::Index phase = (k * i) % (2 * points);
      sum += std::cos(static_cast<double>(phase) * h) * samples[i];
    }
    c[k] = 2.0 / std::numbers::pi * h * sum;
  }
  return c;
}

ChebyshevExpansion make_expansion(const std::vector<Kernel>& kernels, double lambda_max,
                                  Eigen::Index order, Eigen::Index points) {
  ChebyshevExpansion e;
  e.lambda_max = lambda_max;
  e.quadrature_points = points;
  for (const auto& k : kernels) e.coefficients.push_back(cheb_coeffs(k, lambda_max, order, points));
  return e;
}

ChebyshevExpansion make_expansion(const KernelDictionary& dict, Eigen::Index order,
                                  Eigen::Index points) {
  return make_expansion(dictionary_kernels(dict), dict.lambda_max, order, points);
}

}  // namespace stgw
