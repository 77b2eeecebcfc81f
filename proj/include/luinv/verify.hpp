#pragma once

// Numerical verification of the structural identities satisfied by link and
// path operators: local-unitary covariance and invariance, SWAP conjugation,
// adjoint relation, retracing positivity, separable-state spectra, the
// Pauli-basis equivalence, and the realignment-only counterexample. Also the
// random-state spectral survey.
//
// Expected-negative controls report the fraction of trials that did NOT
// show the expected deviation as their violation, so a control passes only
// when invariance is actually broken.

#include "luinv/link_ops.hpp"
#include "luinv/path_invariants.hpp"
#include "luinv/random_states.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace luinv {

/// Every tolerance used by the harness.
namespace tolerances {
inline constexpr double kPauliEquivalence = 1e-12;
inline constexpr double kLuInvariance = 1e-9;   // relative to ||P||_F
inline constexpr double kLuConjugation = 1e-10; // max-entry, absolute
inline constexpr double kLinkCovariance = 1e-12;
inline constexpr double kSwapConjugation = 1e-13;
inline constexpr double kAdjoint = 1e-13;
inline constexpr double kRetracingMinEig = 1e-10; // relative to ||P||_F
inline constexpr double kRetracingFactor = 1e-12;
inline constexpr double kCharPolyImag = 1e-9;
inline constexpr double kSeparableSpectrum = 1e-10;
inline constexpr double kOrthogonalInvariance = 1e-10;
inline constexpr double kNegativeControlDeviation = 1e-6;
inline constexpr double kNonlocalDeviation = 1e-3;
inline constexpr double kNegativeControlMissRate = 0.1; // >= 90% must deviate
inline constexpr double kDominantImag = 1e-9;           // relative to modulus
inline constexpr double kStrictDominance = 1e-6;        // ratio > 1 + this
inline constexpr double kMagnitudeBand = 0.25;
} // namespace tolerances

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_violation = 0.0;
  double tolerance = 0.0;
  int trials = 0;
  std::map<std::string, std::string> details;

  void finalize() {
    passed = max_violation <= tolerance;
    details["tolerance"] = format_number(tolerance);
  }
};

/// Merges sub-checks into one result whose violation is the worst
/// tolerance-normalized violation (tolerance 1).
inline CheckResult combine(std::string name, const std::vector<CheckResult>& parts) {
  CheckResult out;
  out.name = std::move(name);
  out.tolerance = 1.0;
  for (const auto& p : parts) {
    const double normalized = p.tolerance > 0.0 ? p.max_violation / p.tolerance
                                                : (p.max_violation > 0.0 ? 1e300 : 0.0);
    out.max_violation = std::max(out.max_violation, normalized);
    out.trials = std::max(out.trials, p.trials);
    out.details[p.name + ".max_violation"] = format_number(p.max_violation);
    out.details[p.name + ".tolerance"] = format_number(p.tolerance);
    for (const auto& [k, v] : p.details)
      if (k != "tolerance")
        out.details[p.name + "." + k] = v;
  }
  out.finalize();
  return out;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Applies one local operator per subsystem; identity where `locals[k]` is empty.
template <typename State>
State transform_local(const State& state, const std::vector<Matrix>& locals) {
  std::vector<Matrix> full;
  for (std::size_t k = 0; k < state.dims().count(); ++k)
    full.push_back(locals[k].size() ? locals[k] : Matrix::Identity(state.dims()[k], state.dims()[k]));
  return apply_local(state, std::span<const Matrix>(full));
}

// ---------------------------------------------------------------------------
// Pauli-basis equivalence

/// ||S - U^dagger L(1->2) U||_max for a two-qubit state.
inline double pauli_equivalence_defect(const DensityMatrix& rho12) {
  const RealMatrix s = pauli_link_matrix(rho12);
  const Matrix u = u_matrix();
  const Matrix bridged = u.adjoint() * link_matrix(rho12, 0, 1).mat * u;
  return max_abs(bridged - s.cast<Complex>());
}

inline CheckResult check_pauli_equivalence(std::span<const DensityMatrix> states) {
  CheckResult r{.name = "pauli_equivalence", .tolerance = tolerances::kPauliEquivalence};
  for (const auto& rho : states) {
    r.max_violation = std::max(r.max_violation, pauli_equivalence_defect(rho));
    ++r.trials;
  }
  const Matrix u = u_matrix();
  const double unitarity = max_abs(u * u.adjoint() - Matrix::Identity(4, 4));
  const double swap = max_abs(u * u.transpose() - swap_operator(2));
  r.details["u_unitarity_defect"] = format_number(unitarity);
  r.details["u_ut_swap_defect"] = format_number(swap);
  r.max_violation = std::max({r.max_violation, unitarity, swap});
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Local-unitary covariance and invariance

template <typename State>
CheckResult check_lu_invariance(const State& state, const Path& path, int trials, double tol,
                                Rng& rng) {
  const Matrix p = path_operator(state, path);
  const auto eig = spectrum(p);
  const double scale = std::max(p.norm(), std::numeric_limits<double>::min());

  CheckResult inv{.name = "invariance", .tolerance = tol, .trials = trials};
  CheckResult conj{.name = "conjugation", .tolerance = tolerances::kLuConjugation, .trials = trials};
  for (int t = 0; t < trials; ++t) {
    const auto locals = haar_local_unitaries(state.dims(), rng);
    const State moved = apply_local(state, std::span<const Matrix>(locals));
    const Matrix pt = path_operator(moved, path);
    const double trace_dev = std::abs(pt.trace() - p.trace()) / scale;
    const double spec_dev = spectrum_distance(eig, spectrum(pt)) / scale;
    inv.max_violation = std::max({inv.max_violation, trace_dev, spec_dev});

    const Matrix& u1 = locals[path.base()];
    const Matrix w = kron(u1, u1.conjugate());
    conj.max_violation = std::max(conj.max_violation, max_abs(p - w.adjoint() * pt * w));
  }
  inv.finalize();
  conj.finalize();
  auto out = combine("lu_invariance[" + path.to_string() + "]", {inv, conj});
  out.trials = trials;
  return out;
}

/// Expected-negative control: a global Haar unitary on the whole space.
inline CheckResult check_nonlocal_control(const PureState& state, const Path& path, int trials,
                                          Rng& rng) {
  const double base = path_trace_invariant(state, path);
  int unchanged = 0;
  double min_dev = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const Matrix g = haar_random_unitary(state.dims().total(), rng);
    const PureState moved = PureState::normalized(state.dims(), g * state.amp());
    const double dev = std::abs(path_trace_invariant(moved, path) - base);
    min_dev = std::min(min_dev, dev);
    if (dev <= tolerances::kNonlocalDeviation)
      ++unchanged;
  }
  CheckResult r{.name = "nonlocal_control[" + path.to_string() + "]",
                .max_violation = static_cast<double>(unchanged) / trials,
                .tolerance = tolerances::kNegativeControlMissRate,
                .trials = trials};
  r.details["expected_negative"] = "true";
  r.details["min_deviation"] = format_number(min_dev);
  r.details["deviation_threshold"] = format_number(tolerances::kNonlocalDeviation);
  r.finalize();
  return r;
}

enum class CovarianceSide { Left, Right, Both };

/// L(from->to) = (U_to (x) U_to*)^dagger L~(from->to) (U_from (x) U_from*).
template <typename State>
CheckResult check_link_covariance(const State& state, std::size_t from, std::size_t to,
                                  CovarianceSide side, int trials, double tol, Rng& rng) {
  const Matrix link = link_matrix(state, from, to).mat;
  const char* side_name = side == CovarianceSide::Left ? "left" : side == CovarianceSide::Right ? "right" : "both";
  CheckResult r{.name = std::string("link_covariance[") + side_name + "]", .tolerance = tol, .trials = trials};
  for (int t = 0; t < trials; ++t) {
    std::vector<Matrix> locals(state.dims().count());
    const Index d_to = state.dims()[to], d_from = state.dims()[from];
    Matrix u_to = Matrix::Identity(d_to, d_to), u_from = Matrix::Identity(d_from, d_from);
    if (side != CovarianceSide::Right)
      u_to = haar_random_unitary(d_to, rng);
    if (side != CovarianceSide::Left)
      u_from = haar_random_unitary(d_from, rng);
    locals[to] = u_to;
    locals[from] = u_from;
    const Matrix moved = link_matrix(transform_local(state, locals), from, to).mat;
    const Matrix rebuilt = kron(u_to, u_to.conjugate()).adjoint() * moved * kron(u_from, u_from.conjugate());
    r.max_violation = std::max(r.max_violation, max_abs(link - rebuilt));
  }
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Realignment without partial transpose

namespace detail {

/// tr[R(rho_{ab}) R(rho_{ba})] for the pair (a, b).
inline double realign_only_quantity(const PureState& psi, std::size_t a, std::size_t b) {
  const std::array<std::size_t, 2> ab{a, b}, ba{b, a};
  const DensityMatrix rab = reduced_density(psi, std::span<const std::size_t>(ab));
  const DensityMatrix rba = reduced_density(psi, std::span<const std::size_t>(ba));
  const Index da = psi.dims()[a], db = psi.dims()[b];
  const Complex t = (realign(rab.mat(), {da, db}) * realign(rba.mat(), {db, da})).trace();
  return checked_real_trace(t);
}

inline PureState real_projection(const PureState& psi) {
  Vector amp = psi.amp().real().cast<Complex>();
  if (amp.norm() == 0.0)
    amp = psi.amp().imag().cast<Complex>();
  return PureState::normalized(psi.dims(), std::move(amp));
}

} // namespace detail

/// Expected-negative: Haar local unitaries change tr[R(rho_ab) R(rho_ba)].
inline CheckResult check_realign_only_unitary(const PureState& psi, std::size_t a, std::size_t b,
                                              int trials, Rng& rng) {
  const double base = detail::realign_only_quantity(psi, a, b);
  int unchanged = 0;
  for (int t = 0; t < trials; ++t) {
    const auto locals = haar_local_unitaries(psi.dims(), rng);
    const double q = detail::realign_only_quantity(apply_local(psi, std::span<const Matrix>(locals)), a, b);
    if (std::abs(q - base) <= tolerances::kNegativeControlDeviation)
      ++unchanged;
  }
  CheckResult r{.name = "realign_only_unitary",
                .max_violation = static_cast<double>(unchanged) / trials,
                .tolerance = tolerances::kNegativeControlMissRate,
                .trials = trials};
  r.details["expected_negative"] = "true";
  r.details["deviation_threshold"] = format_number(tolerances::kNegativeControlDeviation);
  r.details["base_value"] = format_number(base);
  r.finalize();
  return r;
}

/// Local orthogonal transforms of a real-amplitude state leave
/// tr[R(rho_ab) R(rho_ba)] unchanged. Complex input is replaced by its
/// normalized real part.
inline CheckResult check_realign_only_orthogonal(const PureState& psi, std::size_t a,
                                                 std::size_t b, int trials, Rng& rng) {
  const PureState real_psi = detail::real_projection(psi);
  const double base = detail::realign_only_quantity(real_psi, a, b);
  CheckResult r{.name = "realign_only_orthogonal", .tolerance = tolerances::kOrthogonalInvariance, .trials = trials};
  for (int t = 0; t < trials; ++t) {
    std::vector<Matrix> locals;
    for (Index d : real_psi.dims().values())
      locals.push_back(random_orthogonal(d, rng).cast<Complex>());
    const PureState moved = apply_local(real_psi, std::span<const Matrix>(locals));
    r.max_violation = std::max(r.max_violation, std::abs(detail::realign_only_quantity(moved, a, b) - base));
  }
  r.finalize();
  return r;
}

inline CheckResult check_realign_only(const PureState& psi, std::size_t a, std::size_t b, int trials,
                                      Rng& rng) {
  auto u = check_realign_only_unitary(psi, a, b, trials, rng);
  auto o = check_realign_only_orthogonal(psi, a, b, trials, rng);
  return combine("realign_only", {u, o});
}

// ---------------------------------------------------------------------------
// SWAP conjugation, adjoint relation, retracing positivity

template <typename State>
CheckResult check_srs(const State& state, std::size_t from, std::size_t to) {
  const LinkMatrix l = link_matrix(state, from, to);
  const Matrix lhs = swap_operator(l.d_to) * l.mat * swap_operator(l.d_from);
  CheckResult r{.name = "swap_conjugation",
                .max_violation = max_abs(lhs - l.mat.conjugate()),
                .tolerance = tolerances::kSwapConjugation,
                .trials = 1};
  r.finalize();
  return r;
}

template <typename State>
CheckResult check_adjoint(const State& state, std::size_t from, std::size_t to) {
  const Matrix fwd = link_matrix(state, from, to).mat;
  const Matrix back = link_matrix(state, to, from).mat;
  CheckResult r{.name = "adjoint",
                .max_violation = max_abs(fwd - back.adjoint()),
                .tolerance = tolerances::kAdjoint,
                .trials = 1};
  r.finalize();
  return r;
}

template <typename State>
CheckResult check_retracing_positivity(const State& state, const Path& path) {
  if (!is_retracing(path))
    throw std::invalid_argument("path " + path.to_string() + " is not retracing");
  const Matrix p = path_operator(state, path);
  const Matrix m = retracing_half_operator(state, path);
  const double scale = std::max(p.norm(), std::numeric_limits<double>::min());
  const auto eig = spectrum(p);
  double neg = 0.0, imag = 0.0;
  for (const Complex& z : eig) {
    neg = std::max(neg, -z.real() / scale);
    imag = std::max(imag, std::abs(z.imag()) / scale);
  }
  CheckResult pos{.name = "min_eigenvalue", .max_violation = std::max(neg, 0.0),
                  .tolerance = tolerances::kRetracingMinEig, .trials = 1};
  pos.details["max_relative_imag"] = format_number(imag);
  pos.finalize();
  CheckResult fac{.name = "half_path_factor", .max_violation = max_abs(p - m.adjoint() * m),
                  .tolerance = tolerances::kRetracingFactor, .trials = 1};
  fac.finalize();
  return combine("retracing_positivity[" + path.to_string() + "]", {pos, fac});
}

/// Largest imaginary residue of the characteristic polynomial coefficients,
/// relative to max(1, |c_k|).
inline double char_poly_imag_residue(const Matrix& p) {
  const auto c = poly_from_roots(spectrum(p));
  double worst = 0.0;
  for (const Complex& z : c)
    worst = std::max(worst, std::abs(z.imag()) / std::max(1.0, std::abs(z)));
  return worst;
}

template <typename State>
CheckResult check_char_poly_real(const State& state, const Path& path) {
  const Matrix p = path_operator(state, path);
  CheckResult r{.name = "char_poly_real[" + path.to_string() + "]",
                .max_violation = char_poly_imag_residue(p),
                .tolerance = tolerances::kCharPolyImag, .trials = 1};
  r.details["conjugate_pairing_defect"] = format_number(conjugate_pairing_defect(spectrum(p)));
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Separable states

/// tr[(rho^{T2})^3] of a bipartite density matrix.
inline double pt_cube_trace(const DensityMatrix& rho12) {
  const Matrix pt = partial_transpose(rho12, Slot::Col);
  return checked_real_trace((pt * pt * pt).trace());
}

/// Distance between a spectrum and {value, 0, ..., 0}.
inline double single_value_spectrum_defect(std::span<const Complex> eig, double value) {
  std::vector<Complex> expected(eig.size(), Complex(0.0));
  if (!expected.empty())
    expected[0] = value;
  return spectrum_distance(eig, expected);
}

/// Spectrum of P({1,2,1,2}) for a bi-separable |phi_12> (x) |chi_3>: the
/// squared pairwise products (lambda_k lambda_l)^2 of the eigenvalues of rho_1.
inline std::vector<Complex> bi_separable_loop4_spectrum(const DensityMatrix& rho1) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho1.mat(), Eigen::EigenvaluesOnly);
  const auto& lam = es.eigenvalues();
  std::vector<Complex> out;
  for (Index k = 0; k < lam.size(); ++k)
    for (Index l = 0; l < lam.size(); ++l)
      out.emplace_back(lam(k) * lam(k) * lam(l) * lam(l));
  return out;
}

/// Random |phi_12> (x) |chi_3> (kind Bi) or |a>|b>|c> (kind Tri) with the
/// given dims. Checks:
///   Bi:  eig P({1,2,3}) = {tr[(rho_12^T2)^3], 0, ...},
///        tr P({1,2,1,2}) = [tr rho_1^2]^2,
///        eig P({1,2,1,2}) = {(lambda_k lambda_l)^2};
///   Tri: eig P({1,2,3}) = eig P({1,2,1,2}) = {1, 0, ...}.
inline CheckResult separable_spectra_check(Separability kind, const SubsystemDims& dims,
                                           int trials, Rng& rng) {
  if (dims.count() != 3)
    throw std::invalid_argument("separable spectra check needs three subsystems");
  CheckResult r{.name = kind == Separability::Bi ? "separable_spectra[bi]" : "separable_spectra[tri]",
                .tolerance = tolerances::kSeparableSpectrum, .trials = trials};
  double loop3_dev = 0.0, loop4_trace_dev = 0.0, loop4_spec_dev = 0.0;
  std::size_t max_loop4_nonzero = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<PureState> factors;
    if (kind == Separability::Bi) {
      factors.push_back(haar_random_pure(SubsystemDims{dims[0], dims[1]}, rng));
      factors.push_back(haar_random_pure(SubsystemDims{dims[2]}, rng));
    } else {
      for (std::size_t k = 0; k < 3; ++k)
        factors.push_back(haar_random_pure(SubsystemDims{dims[k]}, rng));
    }
    const PureState psi = separable_state(kind, std::span<const PureState>(factors));

    double loop3 = 1.0, loop4 = 1.0;
    std::vector<Complex> loop4_expected(dims[0] * dims[0], Complex(0.0));
    loop4_expected[0] = 1.0;
    if (kind == Separability::Bi) {
      loop3 = pt_cube_trace(reduced_density(psi, {0, 1}));
      const DensityMatrix rho1 = reduced_density(psi, {0});
      const double purity = checked_real_trace((rho1.mat() * rho1.mat()).trace());
      loop4 = purity * purity;
      loop4_expected = bi_separable_loop4_spectrum(rho1);
    }
    const Matrix p3 = path_operator(psi, Path{0, 1, 2});
    const Matrix p4 = path_operator(psi, Path{0, 1, 0, 1});
    const auto eig4 = spectrum(p4);
    loop3_dev = std::max(loop3_dev, single_value_spectrum_defect(spectrum(p3), loop3));
    loop4_trace_dev = std::max(loop4_trace_dev, std::abs(p4.trace() - Complex(loop4)));
    loop4_spec_dev = std::max(loop4_spec_dev, spectrum_distance(eig4, loop4_expected));
    const auto nonzero = static_cast<std::size_t>(std::count_if(
        eig4.begin(), eig4.end(), [](const Complex& z) { return std::abs(z) > 1e-10; }));
    max_loop4_nonzero = std::max(max_loop4_nonzero, nonzero);
  }
  r.max_violation = std::max({loop3_dev, loop4_trace_dev, loop4_spec_dev});
  r.details["loop123_spectrum_defect"] = format_number(loop3_dev);
  r.details["loop1212_trace_defect"] = format_number(loop4_trace_dev);
  r.details["loop1212_spectrum_defect"] = format_number(loop4_spec_dev);
  r.details["loop1212_max_nonzero_eigenvalues"] = std::to_string(max_loop4_nonzero);
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Spectral survey of P({1,2,3}) over Haar-random states

struct SurveyRecord {
  std::size_t sample_index = 0;
  std::vector<Complex> eigenvalues;
  Complex dominant;
  double runner_up_modulus = 0.0;
  double trace = 0.0;
  double mean_abs_diag = 0.0;    // of rho_21
  double mean_abs_offdiag = 0.0; // of rho_21
  /// |lambda_1| / |lambda_2| of the link L(1->2) when it is square, else 0.
  double link_dominance = 0.0;
  std::string error;

  bool failed() const { return !error.empty(); }
  double dominance_ratio() const {
    return runner_up_modulus > 0.0 ? std::abs(dominant) / runner_up_modulus
                                   : std::numeric_limits<double>::infinity();
  }
  bool strictly_dominant() const { return dominance_ratio() > 1.0 + tolerances::kStrictDominance; }
};

struct SurveySummary {
  std::vector<Index> dims;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
  std::size_t strictly_dominant = 0;
  std::size_t dominant_real = 0; // among strictly dominant
  double max_dominant_relative_imag = 0.0;
  double mean_dominance_ratio = 0.0;
  double min_dominance_ratio = 0.0;
  double max_dominance_ratio = 0.0;
  double mean_link_dominance = 0.0;
  double mean_abs_diag = 0.0;
  double mean_abs_offdiag = 0.0;
  double predicted_diag = 0.0;
  double predicted_offdiag = 0.0;
};

namespace detail {

inline std::pair<Complex, double> dominant_and_runner_up(std::vector<Complex> eig) {
  std::sort(eig.begin(), eig.end(), [](const Complex& a, const Complex& b) { return std::abs(a) > std::abs(b); });
  if (eig.empty())
    return {Complex(0.0), 0.0};
  return {eig[0], eig.size() > 1 ? std::abs(eig[1]) : 0.0};
}

inline SurveyRecord survey_sample(const SubsystemDims& dims, Seed seed, std::size_t index) {
  SurveyRecord rec;
  rec.sample_index = index;
  try {
    const PureState psi = haar_random_pure(dims, seed, index);
    const Matrix p = path_operator(psi, Path{0, 1, 2});
    rec.eigenvalues = spectrum(p);
    std::tie(rec.dominant, rec.runner_up_modulus) = dominant_and_runner_up(rec.eigenvalues);
    rec.trace = checked_real_trace(p.trace());

    const DensityMatrix rho21 = reduced_density(psi, {1, 0});
    const Matrix& m = rho21.mat();
    const Index n = m.rows();
    rec.mean_abs_diag = m.diagonal().cwiseAbs().mean();
    rec.mean_abs_offdiag =
        n > 1 ? (m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum()) / static_cast<double>(n * n - n) : 0.0;

    if (dims[0] == dims[1]) {
      const auto [dom, runner] = dominant_and_runner_up(spectrum(link_matrix(psi, 0, 1).mat));
      rec.link_dominance = runner > 0.0 ? std::abs(dom) / runner : 0.0;
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

} // namespace detail

/// One record per sample; sample k uses substream k of `seed`, so results do
/// not depend on how samples are spread over threads.
inline std::vector<SurveyRecord> spectral_survey(const SubsystemDims& dims, std::size_t samples, Seed seed,
                                                 unsigned threads = 0) {
  if (dims.count() != 3)
    throw std::invalid_argument("spectral survey needs three subsystems");
  if (samples < 1)
    throw std::invalid_argument("spectral survey needs at least one sample");
  std::vector<SurveyRecord> records(samples);
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, samples));
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < samples; k += threads)
        records[k] = detail::survey_sample(dims, seed, k);
    });
  pool.clear();
  return records;
}

inline SurveySummary summarize_survey(const SubsystemDims& dims, Seed seed,
                                      std::span<const SurveyRecord> records) {
  SurveySummary s;
  s.dims = dims.values();
  s.samples = records.size();
  s.seed = seed.value;
  const double d1 = static_cast<double>(dims[0]), d2 = static_cast<double>(dims[1]);
  const double d3 = static_cast<double>(dims[2]);
  s.predicted_diag = 1.0 / (d1 * d2);
  s.predicted_offdiag = 1.0 / (d1 * d2 * std::sqrt(d3));
  s.min_dominance_ratio = std::numeric_limits<double>::infinity();
  std::size_t ok = 0, finite_ratios = 0, links = 0;
  for (const auto& r : records) {
    if (r.failed()) {
      ++s.failures;
      continue;
    }
    ++ok;
    s.mean_abs_diag += r.mean_abs_diag;
    s.mean_abs_offdiag += r.mean_abs_offdiag;
    const double ratio = r.dominance_ratio();
    if (std::isfinite(ratio)) {
      s.mean_dominance_ratio += ratio;
      s.min_dominance_ratio = std::min(s.min_dominance_ratio, ratio);
      s.max_dominance_ratio = std::max(s.max_dominance_ratio, ratio);
      ++finite_ratios;
    }
    if (r.link_dominance > 0.0) {
      s.mean_link_dominance += r.link_dominance;
      ++links;
    }
    if (r.strictly_dominant()) {
      ++s.strictly_dominant;
      const double rel = std::abs(r.dominant.imag()) / std::abs(r.dominant);
      s.max_dominant_relative_imag = std::max(s.max_dominant_relative_imag, rel);
      if (rel <= tolerances::kDominantImag)
        ++s.dominant_real;
    }
  }
  if (ok) {
    s.mean_abs_diag /= static_cast<double>(ok);
    s.mean_abs_offdiag /= static_cast<double>(ok);
  }
  if (finite_ratios)
    s.mean_dominance_ratio /= static_cast<double>(finite_ratios);
  else
    s.min_dominance_ratio = 0.0;
  if (links)
    s.mean_link_dominance /= static_cast<double>(links);
  return s;
}

inline nlohmann::json to_json(const SurveySummary& s) {
  return {{"dims", s.dims},
          {"samples", s.samples},
          {"seed", s.seed},
          {"failures", s.failures},
          {"strictly_dominant", s.strictly_dominant},
          {"dominant_real", s.dominant_real},
          {"dominant_real_fraction",
           s.strictly_dominant ? static_cast<double>(s.dominant_real) / s.strictly_dominant : 0.0},
          {"max_dominant_relative_imag", s.max_dominant_relative_imag},
          {"dominance_ratio", {{"mean", s.mean_dominance_ratio}, {"min", s.min_dominance_ratio}, {"max", s.max_dominance_ratio}}},
          {"link_dominance_ratio_mean", s.mean_link_dominance},
          {"rho21_mean_abs_diag", s.mean_abs_diag},
          {"rho21_mean_abs_offdiag", s.mean_abs_offdiag},
          {"predicted_diag", s.predicted_diag},
          {"predicted_offdiag", s.predicted_offdiag},
          {"tolerances",
           {{"dominant_imag", tolerances::kDominantImag}, {"strict_dominance", tolerances::kStrictDominance}}}};
}

/// CSV with columns sample_index,k,re,im (17 significant digits).
inline void write_survey_csv(std::ostream& out, std::span<const SurveyRecord> records) {
  out << "sample_index,k,re,im\n";
  for (const auto& r : records)
    for (std::size_t k = 0; k < r.eigenvalues.size(); ++k)
      out << r.sample_index << ',' << k << ',' << format_number(r.eigenvalues[k].real()) << ','
          << format_number(r.eigenvalues[k].imag()) << '\n';
}

/// Dominant eigenvalue of every strictly dominated sample must be real.
inline CheckResult check_dominant_real(std::span<const SurveyRecord> records) {
  CheckResult r{.name = "dominant_eigenvalue_real", .tolerance = tolerances::kDominantImag,
                .trials = static_cast<int>(records.size())};
  std::size_t dominant = 0;
  for (const auto& rec : records) {
    if (rec.failed() || !rec.strictly_dominant())
      continue;
    ++dominant;
    r.max_violation = std::max(r.max_violation, std::abs(rec.dominant.imag()) / std::abs(rec.dominant));
  }
  r.details["strictly_dominant_samples"] = std::to_string(dominant);
  r.finalize();
  return r;
}

/// Mean |diag| and |offdiag| of rho_21 against 1/(d1 d2) and 1/(d1 d2 sqrt d3).
inline CheckResult check_magnitude_law(const SurveySummary& s) {
  const double diag_dev = std::abs(s.mean_abs_diag - s.predicted_diag) / s.predicted_diag;
  const double off_dev = std::abs(s.mean_abs_offdiag - s.predicted_offdiag) / s.predicted_offdiag;
  CheckResult r{.name = "diagonal_dominance_magnitudes", .max_violation = std::max(diag_dev, off_dev),
                .tolerance = tolerances::kMagnitudeBand, .trials = static_cast<int>(s.samples)};
  r.details["mean_abs_diag"] = format_number(s.mean_abs_diag);
  r.details["mean_abs_offdiag"] = format_number(s.mean_abs_offdiag);
  r.details["predicted_diag"] = format_number(s.predicted_diag);
  r.details["predicted_offdiag"] = format_number(s.predicted_offdiag);
  r.finalize();
  return r;
}

// ---------------------------------------------------------------------------
// Suites

namespace detail {

/// Marginal of a random tripartite pure state with the first two dims given.
inline DensityMatrix random_mixed_pair(Index d1, Index d2, Index env, Rng& rng) {
  const PureState psi = haar_random_pure(SubsystemDims{d1, d2, env}, rng);
  return reduced_density(psi, {0, 1});
}

} // namespace detail

inline std::vector<CheckResult> suite_equiv(int trials, Seed seed) {
  Rng rng(seed, 0x6571);
  std::vector<DensityMatrix> states;
  for (int t = 0; t < trials; ++t) {
    states.push_back(pure_to_density(haar_random_pure(SubsystemDims{2, 2}, rng)));
    states.push_back(detail::random_mixed_pair(2, 2, 2 + t % 3, rng));
  }
  auto r = check_pauli_equivalence(states);
  return {r};
}

inline std::vector<CheckResult> suite_prop1(int trials, Seed seed) {
  Rng rng(seed, 0x7031);
  std::vector<CheckResult> out;
  const PureState a = haar_random_pure(SubsystemDims{2, 2, 2}, rng);
  const PureState b = haar_random_pure(SubsystemDims{3, 4, 2}, rng);
  for (const Path& p : {Path{0, 1, 2}, Path{0, 1, 2, 1}, Path{0, 1, 0, 1}}) {
    out.push_back(check_lu_invariance(a, p, trials, tolerances::kLuInvariance, rng));
    out.push_back(check_lu_invariance(b, p, trials, tolerances::kLuInvariance, rng));
  }
  const DensityMatrix mixed = detail::random_mixed_pair(2, 3, 3, rng);
  out.push_back(check_lu_invariance(mixed, Path{0, 1}, trials, tolerances::kLuInvariance, rng));
  for (auto side : {CovarianceSide::Left, CovarianceSide::Right, CovarianceSide::Both})
    out.push_back(check_link_covariance(b, 0, 1, side, trials, tolerances::kLinkCovariance, rng));
  out.push_back(check_nonlocal_control(a, Path{0, 1, 2}, trials, rng));
  return out;
}

inline std::vector<CheckResult> suite_prop2(int trials, Seed seed) {
  Rng rng(seed, 0x7032);
  std::vector<CheckResult> srs, adj;
  for (int t = 0; t < trials; ++t) {
    const Index d1 = t % 2 ? 3 : 2, d2 = t % 2 ? 5 : 2;
    const DensityMatrix rho = detail::random_mixed_pair(d1, d2, 2, rng);
    srs.push_back(check_srs(rho, 0, 1));
    srs.push_back(check_srs(rho, 1, 0));
    adj.push_back(check_adjoint(rho, 0, 1));
  }
  std::vector<CheckResult> out{combine("swap_conjugation", srs), combine("adjoint", adj)};
  const PureState two = haar_random_pure(SubsystemDims{3, 2}, rng);
  const PureState three = haar_random_pure(SubsystemDims{2, 3, 2}, rng);
  const PureState four = haar_random_pure(SubsystemDims{2, 2, 2, 2}, rng);
  out.push_back(check_retracing_positivity(two, Path{0, 1}));
  out.push_back(check_retracing_positivity(three, Path{0, 1, 2, 1}));
  out.push_back(check_retracing_positivity(four, Path{0, 1, 2, 3, 2, 1}));
  out.push_back(check_char_poly_real(three, Path{0, 1, 2}));
  out.push_back(check_char_poly_real(four, Path{0, 1, 2, 3}));
  out.push_back(check_char_poly_real(four, Path{0, 2, 1, 3, 1}));
  return out;
}

inline std::vector<CheckResult> suite_separable(int trials, Seed seed) {
  Rng rng(seed, 0x5e9a);
  return {separable_spectra_check(Separability::Bi, SubsystemDims{2, 2, 2}, trials, rng),
          separable_spectra_check(Separability::Bi, SubsystemDims{3, 3, 2}, trials, rng),
          separable_spectra_check(Separability::Tri, SubsystemDims{2, 2, 2}, trials, rng),
          separable_spectra_check(Separability::Tri, SubsystemDims{3, 3, 3}, trials, rng)};
}

inline std::vector<CheckResult> suite_realign(int trials, Seed seed) {
  Rng rng(seed, 0x7ea1);
  const PureState psi = haar_random_pure(SubsystemDims{2, 2}, rng);
  return {check_realign_only_unitary(psi, 0, 1, trials, rng),
          check_realign_only_orthogonal(psi, 0, 1, trials, rng)};
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all", "prop1", "prop2", "equiv", "separable", "realign"};
  return names;
}

inline std::vector<CheckResult> run_suite(const std::string& name, int trials, Seed seed) {
  if (trials < 1)
    throw std::invalid_argument("trials must be at least 1");
  if (name == "equiv")
    return suite_equiv(trials, seed);
  if (name == "prop1")
    return suite_prop1(trials, seed);
  if (name == "prop2")
    return suite_prop2(trials, seed);
  if (name == "separable")
    return suite_separable(trials, seed);
  if (name == "realign")
    return suite_realign(trials, seed);
  if (name == "all") {
    std::vector<CheckResult> out;
    for (const auto& n : suite_names())
      if (n != "all") {
        auto part = run_suite(n, trials, seed);
        out.insert(out.end(), part.begin(), part.end());
      }
    return out;
  }
  throw std::invalid_argument("unknown suite \"" + name + "\"");
}

inline nlohmann::json to_json(const CheckResult& r) {
  return {{"name", r.name},       {"passed", r.passed},   {"max_violation", r.max_violation},
          {"tolerance", r.tolerance}, {"trials", r.trials}, {"details", r.details}};
}

} // namespace luinv
