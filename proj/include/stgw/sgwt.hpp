#pragma once

// Spectral graph wavelet transform: kernel dictionary, exact transform via a
// dense eigendecomposition, and the fast transform via shifted Chebyshev
// polynomials on [0, lambda_max].

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "stgw/error.hpp"

namespace stgw {

/// Band-pass wavelet kernel: l^2 on [0,1), -5 + 11l - 6l^2 + l^3 on [1,2],
/// 4/l^2 beyond 2.
template <typename Scalar>
Scalar wavelet_kernel(Scalar lambda) {
  if (lambda < Scalar(0)) {
    throw ValidationError("wavelet kernel evaluated at negative eigenvalue");
  }
  if (lambda < Scalar(1)) return lambda * lambda;
  if (lambda <= Scalar(2)) {
    return Scalar(-5) + lambda * (Scalar(11) + lambda * (Scalar(-6) + lambda));
  }
  return Scalar(4) / (lambda * lambda);
}

/// Location of the kernel maximum, 2 - 1/sqrt(3).
inline double kernel_peak() { return 2.0 - 1.0 / std::sqrt(3.0); }

/// b = max over lambda of the wavelet kernel.
inline double kernel_amplitude() { return wavelet_kernel(kernel_peak()); }

/// Low-pass scaling kernel b * exp(-(10 l / (0.3 lambda_max))^4).
template <typename Scalar>
Scalar scaling_kernel(Scalar lambda, Scalar lambda_max, Scalar amplitude) {
  using std::exp;
  using std::pow;
  return amplitude * exp(-pow(Scalar(10) * lambda / (Scalar(0.3) * lambda_max), Scalar(4)));
}

/// Dictionary in written order: filter 0 is the scaling kernel, filter m >= 1
/// is g(s_{M-m} l), so the last filter uses the smallest scale s_1.
struct KernelDictionary {
  double lambda_max = 0.0;
  double amplitude = 0.0;
  std::vector<double> scales;  // s_1 < s_2 < ... < s_{M-1}
  bool degenerate = false;     // M == 2: single wavelet scale

  Eigen::Index size() const { return static_cast<Eigen::Index>(scales.size()) + 1; }
  /// Scale used by wavelet filter m (1 <= m < size()).
  double scale_of(Eigen::Index filter) const {
    return scales[scales.size() - static_cast<std::size_t>(filter)];
  }
  double operator()(Eigen::Index filter, double lambda) const {
    if (filter == 0) return scaling_kernel(lambda, lambda_max, amplitude);
    return wavelet_kernel(scale_of(filter) * lambda);
  }
};

/// M-1 scales log-spaced between scale_lo/lambda_max and scale_hi/lambda_max.
KernelDictionary make_dictionary(double lambda_max, Eigen::Index filters = 8,
                                 double scale_lo = 1.0, double scale_hi = 40.0);

using Kernel = std::function<double(double)>;

inline constexpr Eigen::Index kExactSgwtLimit = 5000;
inline constexpr Eigen::Index kDefaultQuadraturePoints = Eigen::Index(1) << 14;
inline constexpr Eigen::Index kDefaultChebyshevOrder = 40;

/// Dense eigendecomposition of a symmetric PSD matrix; eigenvalues in
/// [-1e-9, 0) are floored to zero.
template <typename Scalar>
Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>
spectral_decomposition(const Eigen::SparseMatrix<Scalar>& L) {
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (L.rows() > kExactSgwtLimit) {
    throw ValidationError("exact SGWT limited to " + std::to_string(kExactSgwtLimit) +
                          " vertices; use the Chebyshev transform for " +
                          std::to_string(L.rows()));
  }
  Eigen::SelfAdjointEigenSolver<Dense> solver{Dense(L)};
  if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
  return solver;
}

/// W(m, tau) = sum_l kernel_m(lambda_l) Xhat(lambda_l) u_l(tau).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> exact_filter_bank(
    const Eigen::SparseMatrix<Scalar>& L, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& X,
    const std::vector<Kernel>& kernels) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (X.size() != L.rows()) throw ValidationError("signal length does not match Laplacian");
  const auto solver = spectral_decomposition(L);
  Vector eigenvalues = solver.eigenvalues();
  for (Eigen::Index l = 0; l < eigenvalues.size(); ++l) {
    if (eigenvalues[l] < Scalar(0)) {
      if (eigenvalues[l] < Scalar(-1e-9)) {
        throw NumericError("Laplacian has a negative eigenvalue " +
                           std::to_string(static_cast<double>(eigenvalues[l])));
      }
      eigenvalues[l] = Scalar(0);
    }
  }
  const auto& U = solver.eigenvectors();
  const Vector spectrum = U.transpose() * X;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(X.size(),
                                                             static_cast<Eigen::Index>(kernels.size()));
  Vector response(eigenvalues.size());
  for (std::size_t m = 0; m < kernels.size(); ++m) {
    for (Eigen::Index l = 0; l < eigenvalues.size(); ++l) {
      response[l] = static_cast<Scalar>(kernels[m](static_cast<double>(eigenvalues[l])));
    }
    out.col(static_cast<Eigen::Index>(m)) = U * response.cwiseProduct(spectrum);
  }
  return out;
}

std::vector<Kernel> dictionary_kernels(const KernelDictionary& dict);

/// Exact transform; the table is |V| x M with column m for filter m.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> exact_sgwt(
    const Eigen::SparseMatrix<Scalar>& L, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& X,
    const KernelDictionary& dict) {
  return exact_filter_bank(L, X, dictionary_kernels(dict));
}

/// c_k = (2/pi) int_0^pi cos(k t) kernel(lambda_max/2 (cos t + 1)) dt, k = 0..order,
/// by the composite trapezoid rule on `points` intervals.
Eigen::VectorXd cheb_coeffs(const Kernel& kernel, double lambda_max, Eigen::Index order,
                            Eigen::Index points = kDefaultQuadraturePoints);

struct ChebyshevExpansion {
  double lambda_max = 0.0;
  Eigen::Index quadrature_points = kDefaultQuadraturePoints;
  std::vector<Eigen::VectorXd> coefficients;  // one list per filter, length K_m + 1

  Eigen::Index filters() const { return static_cast<Eigen::Index>(coefficients.size()); }
  Eigen::Index max_order() const {
    Eigen::Index k = 0;
    for (const auto& c : coefficients) k = std::max(k, c.size() - 1);
    return k;
  }
};

ChebyshevExpansion make_expansion(const std::vector<Kernel>& kernels, double lambda_max,
                                  Eigen::Index order = kDefaultChebyshevOrder,
                                  Eigen::Index points = kDefaultQuadraturePoints);
ChebyshevExpansion make_expansion(const KernelDictionary& dict,
                                  Eigen::Index order = kDefaultChebyshevOrder,
                                  Eigen::Index points = kDefaultQuadraturePoints);

struct ChebyshevStats {
  Eigen::Index matvecs = 0;
};

/// Fast transform. The recursion Tbar_k(L) X is shared by all filters, so
/// the cost is one sparse matrix-vector product per order.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cheb_apply(
    const Eigen::SparseMatrix<Scalar>& L, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& X,
    const ChebyshevExpansion& expansion, ChebyshevStats* stats = nullptr) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (X.size() != L.rows()) throw ValidationError("signal length does not match Laplacian");
  if (!(expansion.lambda_max > 0.0)) {
    throw ValidationError("Chebyshev domain needs lambda_max > 0");
  }
  const Eigen::Index filters = expansion.filters();
  const Eigen::Index order = expansion.max_order();
  const Scalar lmax = static_cast<Scalar>(expansion.lambda_max);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(X.size(), filters);

  auto accumulate = [&](Eigen::Index k, const Vector& term) {
    for (Eigen::Index m = 0; m < filters; ++m) {
      const auto& c = expansion.coefficients[static_cast<std::size_t>(m)];
      if (k < c.size()) out.col(m) += static_cast<Scalar>(c[k]) * term;
    }
  };

  for (Eigen::Index m = 0; m < filters; ++m) {
    out.col(m) = Scalar(0.5) * static_cast<Scalar>(expansion.coefficients[static_cast<std::size_t>(m)][0]) * X;
  }
  if (order == 0) return out;

  Vector previous = X;
  Vector current = (Scalar(2) / lmax) * (L * X) - X;
  Eigen::Index matvecs = 1;
  accumulate(1, current);
  for (Eigen::Index k = 2; k <= order; ++k) {
    Vector next = (Scalar(4) / lmax) * (L * current) - Scalar(2) * current - previous;
    ++matvecs;
    previous = std::move(current);
    current = std::move(next);
    accumulate(k, current);
  }
  if (stats != nullptr) stats->matvecs = matvecs;
  return out;
}

}  // namespace stgw
