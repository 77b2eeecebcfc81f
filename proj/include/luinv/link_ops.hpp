#pragma once

// Link matrices: the realigned partial transpose R(rho_{to,from}^{T_from})
// connecting two subsystems, the two-qubit Pauli-basis link, and the
// constant unitary U relating the two.

#include "luinv/tensor_core.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace luinv {

/// One edge of a path: a d_to^2 x d_from^2 matrix.
struct LinkMatrix {
  std::size_t from = 0;
  std::size_t to = 0;
  Index d_from = 1;
  Index d_to = 1;
  Matrix mat;
};

namespace pauli {

/// sigma_0 = I, sigma_1 = X, sigma_2 = Y, sigma_3 = Z.
inline const std::array<Matrix, 4>& basis() {
  static const std::array<Matrix, 4> sigma = [] {
    const Complex i(0.0, 1.0);
    std::array<Matrix, 4> s;
    for (auto& m : s)
      m = Matrix::Zero(2, 2);
    s[0] << 1.0, 0.0, 0.0, 1.0;
    s[1] << 0.0, 1.0, 1.0, 0.0;
    s[2] << 0.0, -i, i, 0.0;
    s[3] << 1.0, 0.0, 0.0, -1.0;
    return s;
  }();
  return sigma;
}

} // namespace pauli

namespace detail {

inline void validate_pair(const SubsystemDims& dims, std::size_t from, std::size_t to) {
  if (from >= dims.count() || to >= dims.count())
    throw std::invalid_argument("subsystem label out of range");
  if (from == to)
    throw std::invalid_argument("link endpoints must differ");
}

/// mat_{ij;ab} = (rho_{to,from})_{ib;ja}, with rho_{to,from} ordered (to, from).
inline Matrix link_from_pair_marginal(const Matrix& rho_to_from, Index d_to, Index d_from) {
  Matrix out(d_to * d_to, d_from * d_from);
  for (Index i = 0; i < d_to; ++i)
    for (Index j = 0; j < d_to; ++j)
      for (Index a = 0; a < d_from; ++a)
        for (Index b = 0; b < d_from; ++b)
          out(i * d_to + j, a * d_from + b) = rho_to_from(i * d_from + b, j * d_from + a);
  return out;
}

} // namespace detail

/// Link from subsystem `from` to subsystem `to` (0-based) of any state type
/// that supports reduced_density.
template <typename State>
LinkMatrix link_matrix(const State& state, std::size_t from, std::size_t to) {
  detail::validate_pair(state.dims(), from, to);
  const std::array<std::size_t, 2> order{to, from};
  const DensityMatrix rho = reduced_density(state, std::span<const std::size_t>(order));
  const Index d_to = state.dims()[to], d_from = state.dims()[from];
  return {from, to, d_from, d_to, detail::link_from_pair_marginal(rho.mat(), d_to, d_from)};
}

/// Same link built element by element from the trace formula
///   mat_{ij;ab} = tr[rho_{from,to} e_{ab} (x) (e_{ij})^T].
/// Slow (each element is a full trace); used to cross-check link_matrix.
template <typename State>
LinkMatrix link_matrix_by_trace(const State& state, std::size_t from, std::size_t to) {
  detail::validate_pair(state.dims(), from, to);
  const std::array<std::size_t, 2> order{from, to};
  const DensityMatrix rho = reduced_density(state, std::span<const std::size_t>(order));
  const Index d_to = state.dims()[to], d_from = state.dims()[from];
  Matrix out(d_to * d_to, d_from * d_from);
  for (Index i = 0; i < d_to; ++i)
    for (Index j = 0; j < d_to; ++j)
      for (Index a = 0; a < d_from; ++a)
        for (Index b = 0; b < d_from; ++b) {
          Matrix e_from = Matrix::Zero(d_from, d_from);
          e_from(a, b) = 1.0;
          Matrix e_to = Matrix::Zero(d_to, d_to);
          e_to(i, j) = 1.0;
          out(i * d_to + j, a * d_from + b) = (rho.mat() * kron(e_from, e_to.transpose())).trace();
        }
  return {from, to, d_from, d_to, out};
}

/// Two-qubit Pauli link S_{nm} = 1/2 tr[rho12 sigma_m (x) sigma_n].
inline RealMatrix pauli_link_matrix(const DensityMatrix& rho12) {
  if (rho12.dims().count() != 2 || rho12.dims()[0] != 2 || rho12.dims()[1] != 2)
    throw std::invalid_argument("pauli_link_matrix requires a two-qubit state");
  const auto& sigma = pauli::basis();
  RealMatrix s(4, 4);
  for (int n = 0; n < 4; ++n)
    for (int m = 0; m < 4; ++m) {
      const Complex v = 0.5 * (rho12.mat() * kron(sigma[m], sigma[n])).trace();
      if (std::abs(v.imag()) > 1e-14)
        throw NumericalFailure("Pauli link element has imaginary part " +
                               std::to_string(v.imag()));
      s(n, m) = v.real();
    }
  return s;
}

/// <ji|U|m> = sigma_m(j, i) / sqrt(2).
inline Matrix u_matrix() {
  const auto& sigma = pauli::basis();
  Matrix u(4, 4);
  for (int m = 0; m < 4; ++m)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        u(j * 2 + i, m) = sigma[m](j, i) / std::numbers::sqrt2;
  return u;
}

} // namespace luinv
