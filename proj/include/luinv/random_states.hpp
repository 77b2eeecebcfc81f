#pragma once

// Seeded Haar-random states and local unitaries, random orthogonal
// matrices, and product test states.
//
// Every draw comes from a substream identified by (seed, stream index), so
// per-sample results do not depend on evaluation order.

#include "luinv/tensor_core.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace luinv {

struct Seed {
  std::uint64_t value = 0;
};

/// Independent generator for substream `stream` of `seed`.
class Rng {
public:
  explicit Rng(Seed seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed.value),
                      static_cast<std::uint32_t>(seed.value >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on (0, 1].
  double uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller, caching the second variate.
  double normal() {
    if (spare_) {
      spare_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    cached_ = r * std::sin(phi);
    spare_ = true;
    return r * std::cos(phi);
  }

  /// Complex Gaussian with E|z|^2 = 1.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  std::uint64_t next_u64() { return engine_(); }

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool spare_ = false;
};

inline PureState haar_random_pure(const SubsystemDims& dims, Rng& rng) {
  for (;;) {
    Vector amp(dims.total());
    for (Index k = 0; k < amp.size(); ++k)
      amp(k) = rng.complex_normal();
    if (amp.norm() > 0.0)
      return PureState::normalized(dims, std::move(amp));
  }
}

inline PureState haar_random_pure(const SubsystemDims& dims, Seed seed, std::uint64_t stream = 0) {
  Rng rng(seed, stream);
  return haar_random_pure(dims, rng);
}

/// Ginibre matrix -> QR -> Q * diag(R_kk / |R_kk|).
inline Matrix haar_random_unitary(Index d, Rng& rng) {
  if (d < 1)
    throw std::invalid_argument("invalid dimension: " + std::to_string(d));
  Matrix z(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      z(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index k = 0; k < d; ++k) {
    const double mag = std::abs(r(k, k));
    const Complex phase = mag > 0.0 ? r(k, k) / mag : Complex(1.0);
    q.col(k) *= phase;
  }
  return q;
}

inline Matrix haar_random_unitary(Index d, Seed seed, std::uint64_t stream = 0) {
  Rng rng(seed, stream);
  return haar_random_unitary(d, rng);
}

/// Real Ginibre matrix -> QR -> Q * diag(sign R_kk).
inline RealMatrix random_orthogonal(Index d, Rng& rng) {
  if (d < 1)
    throw std::invalid_argument("invalid dimension: " + std::to_string(d));
  RealMatrix z(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i)
      z(i, j) = rng.normal();
  Eigen::HouseholderQR<RealMatrix> qr(z);
  RealMatrix q = qr.householderQ();
  for (Index k = 0; k < d; ++k)
    if (qr.matrixQR()(k, k) < 0.0)
      q.col(k) = -q.col(k);
  return q;
}

inline RealMatrix random_orthogonal(Index d, Seed seed, std::uint64_t stream = 0) {
  Rng rng(seed, stream);
  return random_orthogonal(d, rng);
}

/// One Haar unitary per subsystem.
inline std::vector<Matrix> haar_local_unitaries(const SubsystemDims& dims, Rng& rng) {
  std::vector<Matrix> out;
  for (Index d : dims.values())
    out.push_back(haar_random_unitary(d, rng));
  return out;
}

/// Tensor product of the factors in the order given.
inline PureState product_state(std::span<const PureState> factors) {
  if (factors.empty())
    throw std::invalid_argument("product_state needs at least one factor");
  std::vector<Index> dims;
  Vector amp = Vector::Ones(1);
  for (const auto& f : factors) {
    dims.insert(dims.end(), f.dims().values().begin(), f.dims().values().end());
    amp = kron(amp, f.amp());
  }
  return PureState::normalized(SubsystemDims(std::move(dims)), std::move(amp));
}

enum class Separability { Bi, Tri };

/// Tripartite product state: Bi takes a two-party and a one-party factor (in
/// either order), Tri takes three one-party factors.
inline PureState separable_state(Separability kind, std::span<const PureState> factors) {
  std::size_t parties = 0;
  for (const auto& f : factors)
    parties += f.dims().count();
  if (parties != 3)
    throw std::invalid_argument("separable_state builds tripartite states; factors cover " +
                                std::to_string(parties) + " subsystems");
  if (kind == Separability::Bi && factors.size() != 2)
    throw std::invalid_argument("bi-separable state needs exactly two factors");
  if (kind == Separability::Tri && factors.size() != 3)
    throw std::invalid_argument("tri-separable state needs exactly three factors");
  return product_state(factors);
}

inline PureState separable_state(Separability kind, std::initializer_list<PureState> factors) {
  return separable_state(kind, std::span<const PureState>(factors.begin(), factors.size()));
}

/// Computational basis state |digits>.
inline PureState basis_state(const SubsystemDims& dims, std::span<const Index> digits) {
  if (digits.size() != dims.count())
    throw std::invalid_argument("one digit per subsystem is required");
  Vector amp = Vector::Zero(dims.total());
  Index flat = 0;
  for (std::size_t k = 0; k < dims.count(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims[k])
      throw std::invalid_argument("basis digit out of range");
    flat = flat * dims[k] + digits[k];
  }
  amp(flat) = 1.0;
  return PureState(dims, std::move(amp));
}

inline PureState basis_state(const SubsystemDims& dims, std::initializer_list<Index> digits) {
  return basis_state(dims, std::span<const Index>(digits.begin(), digits.size()));
}

/// (|00> + |11> + ... + |d-1 d-1>) / sqrt(d).
inline PureState max_entangled(Index d) {
  Vector amp = Vector::Zero(d * d);
  for (Index k = 0; k < d; ++k)
    amp(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureState::normalized(SubsystemDims{d, d}, std::move(amp));
}

inline PureState bell_state() { return max_entangled(2); }

} // namespace luinv
