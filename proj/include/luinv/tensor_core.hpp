#pragma once

// Multi-index states and the elementary rearrangements used to build
// local-unitary invariants: partial trace, partial transpose, realignment
// and SWAP.
//
// Composite-index convention: subsystem 0 is the most significant digit,
// the last subsystem varies fastest. A bipartite operator on
// H_row (x) H_col is stored with element (i, alpha; j, beta) at
// (i * d_col + alpha, j * d_col + beta).

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace luinv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised when a computation produces a result that violates a structural
/// guarantee beyond tolerance (e.g. a trace that should be real is not).
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kNormalization = 1e-12;
inline constexpr double kPsd = 1e-10;
} // namespace tol

/// Ordered list of subsystem dimensions.
class SubsystemDims {
public:
  SubsystemDims() = default;
  SubsystemDims(std::initializer_list<Index> dims)
      : SubsystemDims(std::vector<Index>(dims)) {}
  explicit SubsystemDims(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.empty())
      throw std::invalid_argument("invalid dimension: empty dimension list");
    total_ = 1;
    for (Index d : dims_) {
      if (d < 1)
        throw std::invalid_argument("invalid dimension: " + std::to_string(d));
      if (total_ > (Index{1} << 40) / d)
        throw std::invalid_argument("invalid dimension: total size too large");
      total_ *= d;
    }
  }

  std::size_t count() const { return dims_.size(); }
  Index operator[](std::size_t k) const { return dims_.at(k); }
  Index total() const { return total_; }
  const std::vector<Index>& values() const { return dims_; }

  /// Row-major strides: stride(k) = product of dims after k.
  std::vector<Index> strides() const {
    std::vector<Index> s(dims_.size(), 1);
    for (std::size_t k = dims_.size() - 1; k-- > 0;)
      s[k] = s[k + 1] * dims_[k + 1];
    return s;
  }

  friend bool operator==(const SubsystemDims&, const SubsystemDims&) = default;

private:
  std::vector<Index> dims_;
  Index total_ = 0;
};

/// Block structure (d_row, d_col) for reading a square matrix as an
/// operator on H_{d_row} (x) H_{d_col}.
struct BipartiteShape {
  Index d_row = 1;
  Index d_col = 1;

  Index total() const { return d_row * d_col; }
};

inline void require_shape(const Matrix& m, BipartiteShape shape) {
  if (shape.d_row < 1 || shape.d_col < 1)
    throw std::invalid_argument("bipartite shape must have positive dimensions");
  if (m.rows() != shape.total() || m.cols() != shape.total())
    throw std::invalid_argument("matrix size " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) +
                                " does not match bipartite shape " +
                                std::to_string(shape.d_row) + "x" +
                                std::to_string(shape.d_col));
}

/// Normalized pure state with amplitudes in composite-index order.
class PureState {
public:
  PureState(SubsystemDims dims, Vector amp) : dims_(std::move(dims)), amp_(std::move(amp)) {
    if (amp_.size() != dims_.total())
      throw std::invalid_argument("amplitude vector length " + std::to_string(amp_.size()) +
                                  " does not match total dimension " +
                                  std::to_string(dims_.total()));
    if (std::abs(amp_.norm() - 1.0) > tol::kNormalization)
      throw std::invalid_argument("pure state is not normalized (norm = " +
                                  std::to_string(amp_.norm()) + ")");
  }

  /// Normalizes `amp` first; rejects the zero vector.
  static PureState normalized(SubsystemDims dims, Vector amp) {
    const double n = amp.norm();
    if (n == 0.0)
      throw std::invalid_argument("cannot normalize the zero vector");
    amp /= n;
    return PureState(std::move(dims), std::move(amp));
  }

  const SubsystemDims& dims() const { return dims_; }
  const Vector& amp() const { return amp_; }

private:
  SubsystemDims dims_;
  Vector amp_;
};

/// Hermitian unit-trace density matrix. Positivity is checked on demand.
class DensityMatrix {
public:
  DensityMatrix(SubsystemDims dims, Matrix mat) : dims_(std::move(dims)), mat_(std::move(mat)) {
    if (mat_.rows() != dims_.total() || mat_.cols() != dims_.total())
      throw std::invalid_argument("density matrix size does not match dimensions");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > tol::kHermitian)
      throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(mat_.trace() - Complex(1.0)) > tol::kNormalization)
      throw std::invalid_argument("density matrix does not have unit trace");
  }

  const SubsystemDims& dims() const { return dims_; }
  const Matrix& mat() const { return mat_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
  bool is_psd(double tolerance = tol::kPsd) const { return min_eigenvalue() >= -tolerance; }

private:
  SubsystemDims dims_;
  Matrix mat_;
};

inline DensityMatrix pure_to_density(const PureState& psi) {
  return DensityMatrix(psi.dims(), psi.amp() * psi.amp().adjoint());
}

namespace detail {

inline void validate_keep(const SubsystemDims& dims, std::span<const std::size_t> keep) {
  if (keep.empty())
    throw std::invalid_argument("at least one subsystem must be kept");
  std::vector<bool> seen(dims.count(), false);
  for (std::size_t k : keep) {
    if (k >= dims.count())
      throw std::invalid_argument("subsystem label out of range: " + std::to_string(k + 1));
    if (seen[k])
      throw std::invalid_argument("duplicate subsystem label: " + std::to_string(k + 1));
    seen[k] = true;
  }
}

/// Subsystems not in `keep`, ascending.
inline std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> keep) {
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < n; ++k)
    if (std::find(keep.begin(), keep.end(), k) == keep.end())
      rest.push_back(k);
  return rest;
}

/// Composite index of the digits `digits` in the sub-register `order`.
inline Index pack(const SubsystemDims& dims, std::span<const std::size_t> order,
                  std::span<const Index> digits) {
  Index idx = 0;
  for (std::size_t k : order)
    idx = idx * dims[k] + digits[k];
  return idx;
}

/// Visits every multi-index of `dims` in composite order.
template <typename F>
void for_each_multi_index(const SubsystemDims& dims, F&& f) {
  std::vector<Index> digits(dims.count(), 0);
  for (Index flat = 0; flat < dims.total(); ++flat) {
    f(flat, std::span<const Index>(digits));
    for (std::size_t k = dims.count(); k-- > 0;) {
      if (++digits[k] < dims[k])
        break;
      digits[k] = 0;
    }
  }
}

inline SubsystemDims select_dims(const SubsystemDims& dims, std::span<const std::size_t> keep) {
  std::vector<Index> out;
  for (std::size_t k : keep)
    out.push_back(dims[k]);
  return SubsystemDims(std::move(out));
}

} // namespace detail

/// Reduced state on `keep` (0-based labels), with result subsystems in the
/// order listed. The amplitudes are reshaped into a (kept x traced) matrix A
/// so that rho = A A^dagger.
inline DensityMatrix reduced_density(const PureState& psi, std::span<const std::size_t> keep) {
  const auto& dims = psi.dims();
  detail::validate_keep(dims, keep);
  const auto rest = detail::complement(dims.count(), keep);
  const auto kept_dims = detail::select_dims(dims, keep);
  Index rest_total = 1;
  for (std::size_t k : rest)
    rest_total *= dims[k];

  Matrix a(kept_dims.total(), rest_total);
  detail::for_each_multi_index(dims, [&](Index flat, std::span<const Index> digits) {
    a(detail::pack(dims, keep, digits), detail::pack(dims, rest, digits)) = psi.amp()(flat);
  });
  Matrix rho = a * a.adjoint();
  // Restore exact Hermiticity lost to rounding in the product.
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return DensityMatrix(kept_dims, std::move(rho));
}

inline DensityMatrix reduced_density(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const auto& dims = rho.dims();
  detail::validate_keep(dims, keep);
  const auto rest = detail::complement(dims.count(), keep);
  const auto kept_dims = detail::select_dims(dims, keep);

  Matrix out = Matrix::Zero(kept_dims.total(), kept_dims.total());
  // rho_keep(a, b) = sum_r rho((a, r), (b, r))
  detail::for_each_multi_index(dims, [&](Index row, std::span<const Index> rd) {
    const Index rest_row = detail::pack(dims, rest, rd);
    const Index keep_row = detail::pack(dims, keep, rd);
    detail::for_each_multi_index(dims, [&](Index col, std::span<const Index> cd) {
      if (detail::pack(dims, rest, cd) == rest_row)
        out(keep_row, detail::pack(dims, keep, cd)) += rho.mat()(row, col);
    });
  });
  return DensityMatrix(kept_dims, std::move(out));
}

inline DensityMatrix reduced_density(const PureState& psi, std::initializer_list<std::size_t> keep) {
  return reduced_density(psi, std::span<const std::size_t>(keep.begin(), keep.size()));
}
inline DensityMatrix reduced_density(const DensityMatrix& rho,
                                     std::initializer_list<std::size_t> keep) {
  return reduced_density(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

enum class Slot { Row, Col };

/// Transposition on one tensor factor. Slot::Col transposes the second
/// factor: <i beta|M^T2|j alpha> = <i alpha|M|j beta>.
inline Matrix partial_transpose(const Matrix& m, BipartiteShape shape, Slot part) {
  require_shape(m, shape);
  const Index dr = shape.d_row, dc = shape.d_col;
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < dr; ++i)
    for (Index a = 0; a < dc; ++a)
      for (Index j = 0; j < dr; ++j)
        for (Index b = 0; b < dc; ++b) {
          if (part == Slot::Col)
            out(i * dc + b, j * dc + a) = m(i * dc + a, j * dc + b);
          else
            out(j * dc + a, i * dc + b) = m(i * dc + a, j * dc + b);
        }
  return out;
}

/// Partial transpose of a bipartite density matrix on its first or second
/// subsystem.
inline Matrix partial_transpose(const DensityMatrix& rho, Slot part) {
  if (rho.dims().count() != 2)
    throw std::invalid_argument("partial transpose of a DensityMatrix requires two subsystems");
  return partial_transpose(rho.mat(), {rho.dims()[0], rho.dims()[1]}, part);
}

/// Realignment <i|<j|R(M)|alpha>|beta> = <i|<alpha|M|j>|beta>, producing a
/// d_row^2 x d_col^2 matrix.
inline Matrix realign(const Matrix& m, BipartiteShape shape) {
  require_shape(m, shape);
  const Index dr = shape.d_row, dc = shape.d_col;
  Matrix out(dr * dr, dc * dc);
  for (Index i = 0; i < dr; ++i)
    for (Index j = 0; j < dr; ++j)
      for (Index a = 0; a < dc; ++a)
        for (Index b = 0; b < dc; ++b)
          out(i * dr + j, a * dc + b) = m(i * dc + a, j * dc + b);
  return out;
}

/// Trace norm of the realigned matrix (computable cross norm).
inline double ccn_norm(const Matrix& m, BipartiteShape shape) {
  const Matrix r = realign(m, shape);
  Eigen::JacobiSVD<Matrix> svd(r);
  return svd.singularValues().sum();
}

inline double ccn_norm(const DensityMatrix& rho, BipartiteShape shape) {
  return ccn_norm(rho.mat(), shape);
}

/// SWAP on H_d (x) H_d: <lm|S|ij> = delta_lj delta_mi.
inline Matrix swap_operator(Index d) {
  if (d < 1)
    throw std::invalid_argument("invalid dimension: " + std::to_string(d));
  Matrix s = Matrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      s(j * d + i, i * d + j) = 1.0;
  return s;
}

/// Row-major vectorization.
inline Vector vecr(const Matrix& m) {
  Vector v(m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      v(i * m.cols() + j) = m(i, j);
  return v;
}

/// Kronecker product a (x) b.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Applies a matrix to one tensor factor of a state vector.
inline Vector apply_on_subsystem(const SubsystemDims& dims, const Vector& amp, std::size_t k,
                                 const Matrix& op) {
  if (op.rows() != dims[k] || op.cols() != dims[k])
    throw std::invalid_argument("local operator dimension mismatch");
  const auto strides = dims.strides();
  const Index stride = strides[k], d = dims[k];
  Vector out = Vector::Zero(amp.size());
  for (Index flat = 0; flat < amp.size(); ++flat) {
    const Index digit = (flat / stride) % d;
    const Index base = flat - digit * stride;
    for (Index r = 0; r < d; ++r)
      out(base + r * stride) += op(r, digit) * amp(flat);
  }
  return out;
}

/// (U_1 (x) ... (x) U_N) |psi>.
inline PureState apply_local(const PureState& psi, std::span<const Matrix> locals) {
  if (locals.size() != psi.dims().count())
    throw std::invalid_argument("one local operator per subsystem is required");
  Vector amp = psi.amp();
  for (std::size_t k = 0; k < locals.size(); ++k)
    amp = apply_on_subsystem(psi.dims(), amp, k, locals[k]);
  return PureState::normalized(psi.dims(), std::move(amp));
}

/// (U_1 (x) ... (x) U_N) rho (U_1 (x) ... (x) U_N)^dagger.
inline DensityMatrix apply_local(const DensityMatrix& rho, std::span<const Matrix> locals) {
  if (locals.size() != rho.dims().count())
    throw std::invalid_argument("one local operator per subsystem is required");
  Matrix u = locals[0];
  for (std::size_t k = 1; k < locals.size(); ++k)
    u = kron(u, locals[k]);
  Matrix out = u * rho.mat() * u.adjoint();
  out = (0.5 * (out + out.adjoint())).eval();
  return DensityMatrix(rho.dims(), std::move(out));
}

} // namespace luinv
