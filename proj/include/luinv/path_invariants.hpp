#pragma once

// Closed-path operators P = L(a_K -> a_1) ... L(a_2 -> a_3) L(a_1 -> a_2)
// and the local-unitary invariants extracted from them.

#include "luinv/link_ops.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace luinv {

/// Closed loop a_1 -> a_2 -> ... -> a_K -> a_1 over 0-based subsystem
/// labels. Labels may repeat, but never consecutively (including the
/// closing edge).
class Path {
public:
  explicit Path(std::vector<std::size_t> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2)
      throw std::invalid_argument("a path needs at least two labels");
    for (std::size_t k = 0; k < labels_.size(); ++k) {
      if (labels_[k] == labels_[(k + 1) % labels_.size()])
        throw std::invalid_argument("consecutive path labels must differ (label " +
                                    std::to_string(labels_[k] + 1) + " repeats)");
    }
  }
  Path(std::initializer_list<std::size_t> labels) : Path(std::vector<std::size_t>(labels)) {}

  /// Builds a path from 1-based labels.
  static Path from_one_based(const std::vector<int>& labels) {
    std::vector<std::size_t> zero;
    for (int l : labels) {
      if (l < 1)
        throw std::invalid_argument("path labels are 1-based and must be positive");
      zero.push_back(static_cast<std::size_t>(l - 1));
    }
    return Path(std::move(zero));
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t operator[](std::size_t k) const { return labels_[k]; }
  std::size_t base() const { return labels_.front(); }
  const std::vector<std::size_t>& labels() const { return labels_; }

  /// The same loop with base point moved forward by `shift`.
  Path rotated(std::size_t shift) const {
    std::vector<std::size_t> out(labels_.size());
    for (std::size_t k = 0; k < labels_.size(); ++k)
      out[k] = labels_[(k + shift) % labels_.size()];
    return Path(std::move(out));
  }

  void validate_for(const SubsystemDims& dims) const {
    for (std::size_t l : labels_)
      if (l >= dims.count())
        throw std::invalid_argument("path label " + std::to_string(l + 1) +
                                    " exceeds the number of subsystems (" +
                                    std::to_string(dims.count()) + ")");
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t k = 0; k < labels_.size(); ++k)
      s += (k ? "," : "") + std::to_string(labels_[k] + 1);
    return s;
  }

private:
  std::vector<std::size_t> labels_;
};

/// True iff the loop goes out a_1 ... a_L and comes back a_{L-1} ... a_2,
/// i.e. K = 2L - 2 and a_{L+j} = a_{L-j} for j = 1 .. L-2.
inline bool is_retracing(const Path& path) {
  const std::size_t k = path.size();
  if (k % 2 != 0)
    return false;
  const std::size_t turn = k / 2; // 0-based position of a_L
  for (std::size_t j = 1; j < turn; ++j)
    if (path[turn + j] != path[turn - j])
      return false;
  return true;
}

namespace detail {

/// Memoizes pair links while walking a path over one state.
template <typename State>
class LinkCache {
public:
  explicit LinkCache(const State& state) : state_(state) {}

  const Matrix& get(std::size_t from, std::size_t to) {
    auto key = std::make_pair(from, to);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, link_matrix(state_, from, to).mat).first;
    return it->second;
  }

private:
  const State& state_;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> cache_;
};

/// Product of links along the open walk labels[0] -> labels[1] -> ... ,
/// composed right to left.
template <typename State>
Matrix walk_product(LinkCache<State>& cache, std::span<const std::size_t> walk) {
  Matrix acc = cache.get(walk[0], walk[1]);
  for (std::size_t k = 1; k + 1 < walk.size(); ++k)
    acc = cache.get(walk[k], walk[k + 1]) * acc;
  return acc;
}

} // namespace detail

/// P({a}_K), a d_{a_1}^2 x d_{a_1}^2 matrix.
template <typename State>
Matrix path_operator(const State& state, const Path& path) {
  path.validate_for(state.dims());
  std::vector<std::size_t> walk = path.labels();
  walk.push_back(path.base());
  detail::LinkCache<State> cache(state);
  return detail::walk_product(cache, std::span<const std::size_t>(walk));
}

/// Half-path product M = L(a_{L-1} -> a_L) ... L(a_1 -> a_2) of a retracing
/// loop, so that P = M^dagger M.
template <typename State>
Matrix retracing_half_operator(const State& state, const Path& path) {
  if (!is_retracing(path))
    throw std::invalid_argument("path " + path.to_string() + " is not retracing");
  path.validate_for(state.dims());
  const std::size_t turn = path.size() / 2;
  std::vector<std::size_t> walk(path.labels().begin(), path.labels().begin() + turn + 1);
  detail::LinkCache<State> cache(state);
  return detail::walk_product(cache, std::span<const std::size_t>(walk));
}

/// Eigenvalues of a general complex square matrix (Hessenberg reduction plus
/// shifted QR). With `check_residual`, every pair must satisfy
/// ||P v - lambda v|| <= 1e-8 ||P|| ||v||.
inline std::vector<Complex> spectrum(const Matrix& p, bool check_residual = false) {
  if (p.rows() != p.cols())
    throw std::invalid_argument("spectrum requires a square matrix");
  if (p.rows() == 0)
    return {};
  Eigen::ComplexEigenSolver<Matrix> es(p, check_residual);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("eigensolver did not converge");
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + p.rows());
  if (check_residual) {
    const double scale = std::max(p.norm(), 1e-300);
    for (Index k = 0; k < p.rows(); ++k) {
      const Vector v = es.eigenvectors().col(k);
      const double res = (p * v - es.eigenvalues()(k) * v).norm();
      if (res > 1e-8 * scale * v.norm())
        throw NumericalFailure("eigenpair residual " + std::to_string(res) + " too large");
    }
  }
  return out;
}

/// Largest |lambda_a - conj(lambda_b)| over a greedy nearest pairing of the
/// multiset with its own complex conjugate. Zero for an exactly
/// conjugation-closed spectrum.
inline double conjugate_pairing_defect(std::span<const Complex> eigenvalues) {
  std::vector<bool> used(eigenvalues.size(), false);
  double worst = 0.0;
  for (std::size_t a = 0; a < eigenvalues.size(); ++a) {
    const Complex target = std::conj(eigenvalues[a]);
    std::size_t best = a;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < eigenvalues.size(); ++b) {
      if (used[b])
        continue;
      const double dist = std::abs(eigenvalues[b] - target);
      if (dist < best_d) {
        best_d = dist;
        best = b;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

/// Largest distance in a greedy nearest matching of two eigenvalue multisets.
inline double spectrum_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size())
    return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (!used[k] && std::abs(b[k] - x) < best_d) {
        best_d = std::abs(b[k] - x);
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

/// Expands prod_k (lambda - lambda_k); complex coefficients, highest power first.
inline std::vector<Complex> poly_from_roots(std::span<const Complex> roots) {
  std::vector<Complex> c{Complex(1.0)};
  for (const Complex& r : roots) {
    c.push_back(Complex(0.0));
    for (std::size_t k = c.size() - 1; k > 0; --k)
      c[k] -= r * c[k - 1];
  }
  return c;
}

/// Characteristic polynomial det(lambda I - P), highest power first. The
/// coefficients must come out real; imaginary residues above
/// 1e-9 * max(1, |c_k|) raise NumericalFailure.
inline std::vector<double> char_poly_coefficients(const Matrix& p) {
  const auto eig = spectrum(p);
  const auto c = poly_from_roots(eig);
  std::vector<double> out;
  out.reserve(c.size());
  for (const Complex& z : c) {
    if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z)))
      throw NumericalFailure("characteristic polynomial coefficient has imaginary part " +
                             std::to_string(z.imag()));
    out.push_back(z.real());
  }
  return out;
}

/// Real part of a trace that is real in exact arithmetic.
inline double checked_real_trace(const Complex& trace) {
  if (std::abs(trace.imag()) > 1e-10 * std::max(1.0, std::abs(trace)))
    throw NumericalFailure("path trace has imaginary residue " + std::to_string(trace.imag()));
  return trace.real();
}

template <typename State>
double path_trace_invariant(const State& state, const Path& path) {
  return checked_real_trace(path_operator(state, path).trace());
}

struct InvariantReport {
  Complex trace;
  std::vector<Complex> eigenvalues;
  std::vector<double> charpoly;
  bool retracing = false;
  /// All eigenvalues real and >= -1e-10 ||P||.
  bool positive = false;
};

inline InvariantReport analyze_operator(const Matrix& p, bool retracing) {
  InvariantReport r;
  r.trace = p.trace();
  r.eigenvalues = spectrum(p);
  r.charpoly = char_poly_coefficients(p);
  r.retracing = retracing;
  const double scale = std::max(1.0, p.norm());
  r.positive = std::all_of(r.eigenvalues.begin(), r.eigenvalues.end(), [&](const Complex& z) {
    return z.real() >= -1e-10 * scale && std::abs(z.imag()) <= 1e-9 * scale;
  });
  return r;
}

template <typename State>
InvariantReport compute_invariants(const State& state, const Path& path) {
  return analyze_operator(path_operator(state, path), is_retracing(path));
}

/// tau = 4 det[R(rho12^T2) R(rho21^T1)]^(1/4) on the real nonnegative branch.
inline double two_tangle(const PureState& psi) {
  if (psi.dims().count() != 2 || psi.dims()[0] != 2 || psi.dims()[1] != 2)
    throw std::invalid_argument("two_tangle requires a two-qubit pure state");
  const Matrix p = path_operator(psi, Path{0, 1});
  const Complex det = p.partialPivLu().determinant();
  if (std::abs(det.imag()) > 1e-12)
    throw NumericalFailure("two-tangle determinant is not real: " + std::to_string(det.imag()));
  if (det.real() < -1e-12)
    throw NumericalFailure("two-tangle determinant is negative: " + std::to_string(det.real()));
  return 4.0 * std::pow(std::max(det.real(), 0.0), 0.25);
}

/// tr P({1, ..., N}) for N >= 3 subsystems.
template <typename State>
double kempe_invariant(const State& state) {
  const std::size_t n = state.dims().count();
  if (n < 3)
    throw std::invalid_argument("kempe_invariant requires at least three subsystems");
  std::vector<std::size_t> labels(n);
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  return path_trace_invariant(state, Path(std::move(labels)));
}

} // namespace luinv
