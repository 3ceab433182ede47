#pragma once

// Seeded, platform-independent randomness and random kernel ensembles.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "dpm/kernel.hpp"

namespace dpm {

/// SplitMix64 stream keyed by (seed, stream). Counter based: the i-th output
/// is a fixed function of (seed, stream, i), so replays are bit-exact on any
/// platform. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 1, std::uint64_t stream = 0) : state_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do x = (*this)(); while (x >= limit);
    return x % n;
  }

  // Box-Muller; no cached second value so the stream position stays simple.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_normal() { return {normal() / std::numbers::sqrt2, normal() / std::numbers::sqrt2}; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

namespace random {

inline Matrix gaussian(Rng& rng, std::size_t rows, std::size_t cols, bool real = false) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = real ? Complex{rng.normal(), 0.0} : rng.complex_normal();
  return m;
}

inline Matrix unitary(Rng& rng, std::size_t n, bool real = false) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n, real));
  Matrix q = qr.householderQ();
  // fix column phases so the law is Haar
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Subspace subspace(Rng& rng, std::size_t n, std::size_t rank, bool real = false) {
  const Matrix u = unitary(rng, n, real);
  return Subspace(GroundSet::numbered(n), u.leftCols(static_cast<Eigen::Index>(rank)));
}

// Rank uniform on {0..n}.
inline Subspace any_subspace(Rng& rng, std::size_t n, bool real = false) {
  return subspace(rng, n, static_cast<std::size_t>(rng.below(n + 1)), real);
}

inline Kernel projection(Rng& rng, std::size_t n, bool real = false) {
  const auto h = any_subspace(rng, n, real);
  return Kernel(h.ground(), h.projection());
}

// Haar eigenvectors with eigenvalues drawn from a Gaussian clipped to [0, 1].
inline Kernel contraction(Rng& rng, std::size_t n, bool real = false) {
  const Matrix u = unitary(rng, n, real);
  RealVector lambda(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = std::clamp(0.5 + 0.4 * rng.normal(), 0.0, 1.0);
  Matrix q = u * lambda.cast<Complex>().asDiagonal() * u.adjoint();
  q = (q + q.adjoint()) / 2.0;
  return Kernel(std::move(q));
}

// Eigenvalues uniform on [0, 1].
inline Kernel uniform_spectrum_contraction(Rng& rng, std::size_t n, bool real = false) {
  const Matrix u = unitary(rng, n, real);
  RealVector lambda(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = rng.uniform();
  Matrix q = u * lambda.cast<Complex>().asDiagonal() * u.adjoint();
  q = (q + q.adjoint()) / 2.0;
  return Kernel(std::move(q));
}

// Fourier coefficients of |p(e^{iθ})|^2 / (Σ|p_k|)^2 for a random polynomial p
// of the given degree; the symbol takes values in [0, 1].
inline std::vector<Complex> toeplitz_symbol(Rng& rng, std::size_t degree) {
  std::vector<Complex> p(degree + 1);
  double l1 = 0.0;
  for (auto& c : p) {
    c = rng.complex_normal();
    l1 += std::abs(c);
  }
  std::vector<Complex> coeff(degree + 1);
  for (std::size_t k = 0; k <= degree; ++k) {
    Complex s{};
    for (std::size_t j = k; j <= degree; ++j) s += p[j] * std::conj(p[j - k]);
    coeff[k] = s / (l1 * l1);
  }
  coeff[0] = coeff[0].real();
  return coeff;
}

}  // namespace random
}  // namespace dpm
