#pragma once

// JSON state files:
//   {"dims":[d1,...], "kind":"pure",  "amp":[[re,im],...]}
//   {"dims":[d1,...], "kind":"mixed", "rho":[[[re,im],...],...]}
// Entries are in composite-index order (first subsystem most significant).

#include "luinv/tensor_core.hpp"

#include <json.hpp>

#include <fstream>
#include <string>
#include <variant>

namespace luinv {

using State = std::variant<PureState, DensityMatrix>;

namespace detail {

inline nlohmann::json complex_to_json(const Complex& z) { return {z.real(), z.imag()}; }

inline Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("complex entries must be [re, im] number pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace detail

inline nlohmann::json to_json(const PureState& psi) {
  nlohmann::json amp = nlohmann::json::array();
  for (Index k = 0; k < psi.amp().size(); ++k)
    amp.push_back(detail::complex_to_json(psi.amp()(k)));
  return {{"dims", psi.dims().values()}, {"kind", "pure"}, {"amp", std::move(amp)}};
}

inline nlohmann::json to_json(const DensityMatrix& rho) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < rho.mat().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < rho.mat().cols(); ++j)
      row.push_back(detail::complex_to_json(rho.mat()(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"dims", rho.dims().values()}, {"kind", "mixed"}, {"rho", std::move(rows)}};
}

inline nlohmann::json to_json(const State& state) {
  return std::visit([](const auto& s) { return to_json(s); }, state);
}

inline State state_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dims") || !j["dims"].is_array())
    throw std::invalid_argument("state file must contain a \"dims\" array");
  std::vector<Index> dims_raw;
  for (const auto& d : j["dims"]) {
    if (!d.is_number_integer())
      throw std::invalid_argument("invalid dimension: dims must be integers");
    dims_raw.push_back(d.get<Index>());
  }
  SubsystemDims dims(std::move(dims_raw));

  std::string kind = j.value("kind", j.contains("rho") ? "mixed" : "pure");
  if (kind == "pure") {
    if (!j.contains("amp") || !j["amp"].is_array())
      throw std::invalid_argument("pure state file must contain an \"amp\" array");
    const auto& amp_j = j["amp"];
    if (static_cast<Index>(amp_j.size()) != dims.total())
      throw std::invalid_argument("amplitude count does not match dims");
    Vector amp(dims.total());
    for (Index k = 0; k < dims.total(); ++k)
      amp(k) = detail::complex_from_json(amp_j[k]);
    return PureState(std::move(dims), std::move(amp));
  }
  if (kind == "mixed") {
    if (!j.contains("rho") || !j["rho"].is_array())
      throw std::invalid_argument("mixed state file must contain a \"rho\" array");
    const auto& rows = j["rho"];
    const Index n = dims.total();
    if (static_cast<Index>(rows.size()) != n)
      throw std::invalid_argument("rho row count does not match dims");
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
      if (!rows[i].is_array() || static_cast<Index>(rows[i].size()) != n)
        throw std::invalid_argument("rho must be square");
      for (Index c = 0; c < n; ++c)
        m(i, c) = detail::complex_from_json(rows[i][c]);
    }
    return DensityMatrix(std::move(dims), std::move(m));
  }
  throw std::invalid_argument("unknown state kind \"" + kind + "\"");
}

inline void write_state(const std::string& path, const State& state) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << to_json(state).dump() << '\n';
  if (!out)
    throw std::runtime_error("failed writing " + path);
}

inline State read_state(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open state file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed state file " + path + ": " + e.what());
  }
  return state_from_json(j);
}

} // namespace luinv
