#include "luinv/state_io.hpp"
#include "test_support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace luinv;
using namespace luinv::testing;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("luinv_io_" + name)).string();
}

} // namespace

TEST(StateIo, PureRoundTrip) {
  const auto psi = haar_random_pure(SubsystemDims{2, 3, 2}, Seed{1});
  const std::string path = temp_path("pure.json");
  write_state(path, psi);
  const State back = read_state(path);
  ASSERT_TRUE(std::holds_alternative<PureState>(back));
  const auto& got = std::get<PureState>(back);
  EXPECT_EQ(got.dims().values(), psi.dims().values());
  EXPECT_TRUE(MatrixNear(got.amp(), psi.amp(), 0.0));
  std::remove(path.c_str());
}

TEST(StateIo, MixedRoundTrip) {
  const auto rho = reduced_density(haar_random_pure(SubsystemDims{2, 3, 2}, Seed{2}), {0, 1});
  const std::string path = temp_path("mixed.json");
  write_state(path, rho);
  const State back = read_state(path);
  ASSERT_TRUE(std::holds_alternative<DensityMatrix>(back));
  EXPECT_TRUE(MatrixNear(std::get<DensityMatrix>(back).mat(), rho.mat(), 0.0));
  std::remove(path.c_str());
}

TEST(StateIo, JsonLayout) {
  const auto j = to_json(bell_state());
  EXPECT_EQ(j["kind"], "pure");
  EXPECT_EQ(j["dims"], nlohmann::json({2, 2}));
  ASSERT_EQ(j["amp"].size(), 4u);
  EXPECT_NEAR(j["amp"][0][0].get<double>(), 1.0 / std::sqrt(2.0), 1e-16);
  EXPECT_EQ(j["amp"][1][1].get<double>(), 0.0);
}

TEST(StateIo, RejectsMalformed) {
  using nlohmann::json;
  EXPECT_THROW(state_from_json(json{{"kind", "pure"}, {"dims", {2}}, {"amp", {{1, 0}}}}), std::invalid_argument);
  EXPECT_THROW(state_from_json(json{{"kind", "pure"}, {"dims", {2}}, {"amp", {{1, 0}, {1, 0}}}}),
               std::invalid_argument); // not normalized
  EXPECT_THROW(state_from_json(json{{"kind", "weird"}, {"dims", {2}}}), std::invalid_argument);
  EXPECT_THROW(state_from_json(json{{"kind", "pure"}, {"dims", {0}}, {"amp", json::array()}}),
               std::invalid_argument);
  EXPECT_THROW(state_from_json(json{{"kind", "mixed"}, {"dims", {2}}, {"rho", {{{1, 0}, {0, 0}}, {{0, 0}, {1, 0}}}}}),
               std::invalid_argument); // trace 2
  EXPECT_THROW(state_from_json(json::array()), std::invalid_argument);
}

TEST(StateIo, MissingOrCorruptFile) {
  EXPECT_THROW(read_state(temp_path("does_not_exist.json")), std::invalid_argument);
  const std::string path = temp_path("corrupt.json");
  std::ofstream(path) << "{ not json";
  EXPECT_THROW(read_state(path), std::invalid_argument);
  std::remove(path.c_str());
}

TEST(StateIo, UnwritablePath) {
  EXPECT_THROW(write_state("/nonexistent_dir/x/y.json", bell_state()), std::runtime_error);
}
