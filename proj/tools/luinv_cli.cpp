// luinv: command-line front end for path invariants.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include "luinv/luinv.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace luinv;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

/// Raised for bad flags or unusable input files; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SubsystemDims parse_dims(const std::vector<long long>& raw) {
  std::vector<Index> dims(raw.begin(), raw.end());
  return SubsystemDims(std::move(dims));
}

json complex_json(const Complex& z) { return {z.real(), z.imag()}; }

template <typename F>
decltype(auto) with_state(const State& state, F&& f) {
  return std::visit(std::forward<F>(f), state);
}

const SubsystemDims& state_dims(const State& s) {
  return std::visit([](const auto& x) -> const SubsystemDims& { return x.dims(); }, s);
}

void print_config(bool as_json, const json& config) {
  if (!as_json) {
    std::cout << "# config";
    for (const auto& [k, v] : config.items())
      std::cout << ' ' << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
    std::cout << '\n';
  }
}

// ---------------------------------------------------------------------------

struct RandomOpts {
  std::vector<long long> dims;
  std::uint64_t seed = 0;
  std::string out;
  bool json = false;
};

int cmd_random(const RandomOpts& o) {
  const SubsystemDims dims = parse_dims(o.dims);
  const json config{{"command", "random"}, {"dims", o.dims}, {"seed", o.seed}, {"out", o.out}};
  print_config(o.json, config);
  const PureState psi = haar_random_pure(dims, Seed{o.seed});
  try {
    write_state(o.out, psi);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  if (o.json)
    std::cout << json{{"config", config}, {"amplitudes", dims.total()}}.dump() << '\n';
  else
    std::cout << "wrote " << dims.total() << " amplitudes to " << o.out << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct PathOpts {
  std::string state;
  std::vector<int> path;
  std::string out;
  bool json = false;
};

int cmd_invariant(const PathOpts& o) {
  const State state = read_state(o.state);
  const Path path = Path::from_one_based(o.path);
  path.validate_for(state_dims(state));
  const json config{{"command", "invariant"}, {"state", o.state}, {"path", path.to_string()},
                    {"imag_tolerance", 1e-10}};
  print_config(o.json, config);

  const InvariantReport rep =
      with_state(state, [&](const auto& s) { return compute_invariants(s, path); });
  const double value = checked_real_trace(rep.trace);
  if (o.json) {
    json eig = json::array();
    for (const auto& z : rep.eigenvalues)
      eig.push_back(complex_json(z));
    std::cout << json{{"config", config},
                      {"trace", value},
                      {"imag_residue", rep.trace.imag()},
                      {"retracing", rep.retracing},
                      {"positive", rep.positive},
                      {"charpoly", rep.charpoly},
                      {"eigenvalues", eig}}
                     .dump()
              << '\n';
  } else {
    std::cout << "trace " << format_number(value) << '\n'
              << "imag_residue " << format_number(rep.trace.imag()) << '\n'
              << "retracing " << (rep.retracing ? "true" : "false") << '\n'
              << "positive " << (rep.positive ? "true" : "false") << '\n';
  }
  return kOk;
}

int cmd_spectrum(const PathOpts& o) {
  const State state = read_state(o.state);
  const Path path = Path::from_one_based(o.path);
  path.validate_for(state_dims(state));
  const json config{{"command", "spectrum"}, {"state", o.state}, {"path", path.to_string()}, {"out", o.out}};
  print_config(o.json, config);

  const InvariantReport rep =
      with_state(state, [&](const auto& s) { return compute_invariants(s, path); });
  std::ofstream csv(o.out);
  if (!csv)
    throw UsageError("cannot open " + o.out + " for writing");
  csv << "k,re,im\n";
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k)
    csv << k << ',' << format_number(rep.eigenvalues[k].real()) << ','
        << format_number(rep.eigenvalues[k].imag()) << '\n';
  if (!csv)
    throw UsageError("failed writing " + o.out);

  const double value = checked_real_trace(rep.trace);
  if (o.json)
    std::cout << json{{"config", config}, {"rows", rep.eigenvalues.size()}, {"trace", value},
                      {"retracing", rep.retracing}, {"positive", rep.positive}}
                     .dump()
              << '\n';
  else
    std::cout << "wrote " << rep.eigenvalues.size() << " eigenvalues to " << o.out << '\n'
              << "trace " << format_number(value) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyOpts {
  std::string suite = "all";
  int trials = 20;
  std::uint64_t seed = 7;
  bool json = false;
};

int cmd_verify(const VerifyOpts& o) {
  const json config{{"command", "verify"}, {"suite", o.suite}, {"trials", o.trials}, {"seed", o.seed}};
  print_config(o.json, config);
  std::vector<CheckResult> results;
  try {
    results = run_suite(o.suite, o.trials, Seed{o.seed});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  bool all = true;
  json arr = json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    if (o.json)
      arr.push_back(to_json(r));
    else
      std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " max_violation=" << format_number(r.max_violation)
                << " tolerance=" << format_number(r.tolerance) << " trials=" << r.trials << '\n';
  }
  if (o.json)
    std::cout << json{{"config", config}, {"checks", arr}, {"passed", all}}.dump() << '\n';
  else
    std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------

struct SurveyOpts {
  std::vector<long long> dims;
  std::size_t samples = 100;
  std::uint64_t seed = 7;
  std::string out;
  unsigned threads = 0;
  bool json = false;
};

int cmd_survey(const SurveyOpts& o) {
  const SubsystemDims dims = parse_dims(o.dims);
  if (dims.count() != 3)
    throw UsageError("survey needs exactly three subsystem dimensions");
  if (o.samples < 1)
    throw UsageError("--samples must be at least 1");
  const json config{{"command", "survey"}, {"dims", o.dims},   {"samples", o.samples},
                    {"seed", o.seed},      {"out", o.out},     {"path", "1,2,3"}};
  print_config(o.json, config);

  const auto records = spectral_survey(dims, o.samples, Seed{o.seed}, o.threads);
  for (const auto& r : records)
    if (r.failed())
      std::cerr << "sample " << r.sample_index << " failed: " << r.error << '\n';
  const SurveySummary summary = summarize_survey(dims, Seed{o.seed}, records);

  std::ofstream csv(o.out + ".csv");
  if (!csv)
    throw UsageError("cannot open " + o.out + ".csv for writing");
  write_survey_csv(csv, records);
  json summary_json = to_json(summary);
  summary_json["config"] = config;
  summary_json["dominant_real_check"] = to_json(check_dominant_real(records));
  summary_json["magnitude_law"] = to_json(check_magnitude_law(summary));
  std::ofstream js(o.out + ".json");
  if (!js)
    throw UsageError("cannot open " + o.out + ".json for writing");
  js << summary_json.dump(2) << '\n';
  if (!csv || !js)
    throw UsageError("failed writing survey output");

  if (o.json)
    std::cout << summary_json.dump() << '\n';
  else
    std::cout << "wrote " << o.out << ".csv and " << o.out << ".json\n"
              << "samples " << summary.samples << " failures " << summary.failures << '\n'
              << "strictly_dominant " << summary.strictly_dominant << " dominant_real " << summary.dominant_real
              << '\n'
              << "mean_dominance_ratio " << format_number(summary.mean_dominance_ratio) << '\n'
              << "rho21_mean_abs_diag " << format_number(summary.mean_abs_diag) << " (predicted "
              << format_number(summary.predicted_diag) << ")\n"
              << "rho21_mean_abs_offdiag " << format_number(summary.mean_abs_offdiag) << " (predicted "
              << format_number(summary.predicted_offdiag) << ")\n";
  return 100 * summary.failures > summary.samples ? kVerifyFailed : kOk;
}

// ---------------------------------------------------------------------------

struct EquivOpts {
  std::string state;
  std::vector<int> pair{1, 2};
  bool json = false;
};

/// Pauli link of a qubit pair against U^dagger L U.
int cmd_equiv(const EquivOpts& o) {
  const State state = read_state(o.state);
  if (o.pair.size() != 2 || o.pair[0] < 1 || o.pair[1] < 1 || o.pair[0] == o.pair[1])
    throw UsageError("--pair needs two distinct 1-based labels");
  const std::size_t a = o.pair[0] - 1, b = o.pair[1] - 1;
  const auto& dims = state_dims(state);
  if (a >= dims.count() || b >= dims.count())
    throw UsageError("--pair label out of range");
  if (dims[a] != 2 || dims[b] != 2)
    throw UsageError("--pair must select two qubits");
  const json config{{"command", "equiv"}, {"state", o.state}, {"pair", o.pair},
                    {"tolerance", tolerances::kPauliEquivalence}};
  print_config(o.json, config);

  const std::array<std::size_t, 2> keep{a, b};
  const DensityMatrix rho = with_state(
      state, [&](const auto& s) { return reduced_density(s, std::span<const std::size_t>(keep)); });
  const RealMatrix s = pauli_link_matrix(rho);
  const double defect = pauli_equivalence_defect(rho);
  const bool ok = defect <= tolerances::kPauliEquivalence;
  if (o.json) {
    json mat = json::array();
    for (Index n = 0; n < 4; ++n) {
      json row = json::array();
      for (Index m = 0; m < 4; ++m)
        row.push_back(s(n, m));
      mat.push_back(row);
    }
    std::cout << json{{"config", config}, {"pauli_link", mat}, {"max_defect", defect}, {"passed", ok}}.dump()
              << '\n';
  } else {
    std::cout << "pauli_link\n" << s << '\n'
              << "max_defect " << format_number(defect) << '\n'
              << (ok ? "PASS" : "FAIL") << '\n';
  }
  return ok ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-unitary invariants from partial transpose and realignment"};
  app.require_subcommand(1);

  RandomOpts ro;
  auto* random = app.add_subcommand("random", "write a Haar-random pure state");
  random->add_option("--dims", ro.dims, "subsystem dimensions, e.g. 2,2,2")->required()->delimiter(',');
  random->add_option("--seed", ro.seed, "generator seed");
  random->add_option("--out", ro.out, "output state file")->required();
  random->add_flag("--json", ro.json, "machine-readable output");

  PathOpts io;
  auto* invariant = app.add_subcommand("invariant", "trace invariant of a closed path");
  invariant->add_option("--state", io.state, "state file")->required();
  invariant->add_option("--path", io.path, "1-based path labels, e.g. 1,2,3")->required()->delimiter(',');
  invariant->add_flag("--json", io.json, "machine-readable output");

  PathOpts so;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "eigenvalues of a path operator as CSV");
  spectrum_cmd->add_option("--state", so.state, "state file")->required();
  spectrum_cmd->add_option("--path", so.path, "1-based path labels")->required()->delimiter(',');
  spectrum_cmd->add_option("--out", so.out, "output CSV")->required();
  spectrum_cmd->add_flag("--json", so.json, "machine-readable output");

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", vo.suite, "all|prop1|prop2|equiv|separable|realign");
  verify->add_option("--trials", vo.trials, "trials per check");
  verify->add_option("--seed", vo.seed, "generator seed");
  verify->add_flag("--json", vo.json, "machine-readable output");

  SurveyOpts sv;
  auto* survey = app.add_subcommand("survey", "spectra of P({1,2,3}) over Haar-random states");
  survey->add_option("--dims", sv.dims, "three subsystem dimensions")->required()->delimiter(',');
  survey->add_option("--samples", sv.samples, "number of states");
  survey->add_option("--seed", sv.seed, "generator seed");
  survey->add_option("--out", sv.out, "output prefix (writes PREFIX.csv and PREFIX.json)")->required();
  survey->add_option("--threads", sv.threads, "worker threads (0 = hardware)");
  survey->add_flag("--json", sv.json, "machine-readable output");

  EquivOpts eo;
  auto* equiv = app.add_subcommand("equiv", "compare the Pauli link with U^dagger L U");
  equiv->add_option("--state", eo.state, "state file")->required();
  equiv->add_option("--pair", eo.pair, "two 1-based qubit labels (default 1,2)")->delimiter(',');
  equiv->add_flag("--json", eo.json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*random)
      return cmd_random(ro);
    if (*invariant)
      return cmd_invariant(io);
    if (*spectrum_cmd)
      return cmd_spectrum(so);
    if (*verify)
      return cmd_verify(vo);
    if (*survey)
      return cmd_survey(sv);
    if (*equiv)
      return cmd_equiv(eo);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kUsage;
}
