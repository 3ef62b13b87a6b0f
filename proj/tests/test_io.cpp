#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "npil/io.hpp"
#include "npil/rng.hpp"
#include "test_util.hpp"

using namespace npil;
using npil::testing::random_tensor;
using npil::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

bool bits_equal(const FactorModel& x, const FactorModel& y) {
  const auto eq = [](const double* a, const double* b, std::size_t n) {
    return std::memcmp(a, b, n * sizeof(double)) == 0;
  };
  return x.same_shape(y) && eq(x.A.data(), y.A.data(), x.A.size()) &&
         eq(x.B.data(), y.B.data(), x.B.size()) &&
         eq(x.C.data(), y.C.data(), x.C.size()) &&
         eq(x.u.data(), y.u.data(), x.u.size()) &&
         eq(x.f.data(), y.f.data(), x.f.size()) &&
         eq(x.d.data(), y.d.data(), x.d.size());
}

FactorModel awkward_model() {
  // values that stress shortest-round-trip formatting
  FactorModel m;
  m.A.resize(2, 2);
  m.A << 0.1, -1e-300, 3.0000000000000004, 5e300;
  m.B.resize(2, 2);
  m.B << -0.0, 1.0 / 3.0, 2.2250738585072014e-308, 1.7976931348623157e308;
  m.C.resize(1, 2);
  m.C << 0.05, -123456.789012345;
  m.u.resize(2);
  m.u << 0.0, -2.5e-17;
  m.f.resize(2);
  m.f << 1e-9, 7.0;
  m.d.resize(1);
  m.d << -0.9999999999999999;
  return m;
}

}  // namespace

TEST_CASE("COO write/read round-trips bit-exactly with dims preserved") {
  TempDir dir("coo");
  auto t = random_tensor(12, 7, 9, 150, 5);
  const auto path = dir.file("t.coo");
  write_coo(path, t);
  auto back = read_coo(path);
  CHECK(back.dim_i() == 12);
  CHECK(back.dim_j() == 7);
  CHECK(back.dim_k() == 9);
  CHECK(back.entries() == t.entries());

  // a second write is byte-identical
  const auto path2 = dir.file("t2.coo");
  write_coo(path2, back);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("COO reader ignores comments and infers dims without a dims line") {
  TempDir dir("coo_infer");
  const auto path = dir.file("raw.coo");
  spit(path,
       "# hand-written file\n"
       "i,j,k,value\n"
       "0,0,0,1.5\n"
       "# interleaved comment\n"
       "3,1,2,-0.25\n");
  auto t = read_coo(path);
  CHECK(t.dim_i() == 4);
  CHECK(t.dim_j() == 2);
  CHECK(t.dim_k() == 3);
  CHECK(t.size() == 2);
}

TEST_CASE("COO reader reports the offending line") {
  TempDir dir("coo_err");
  const auto path = dir.file("bad.coo");
  spit(path, "i,j,k,value\n0,0,0,1.0\n0,1,oops,2.0\n");
  CHECK_THROWS_WITH_AS(read_coo(path), doctest::Contains(":3:"), DataError);

  spit(path, "i,j,k\n");
  CHECK_THROWS_AS(read_coo(path), DataError);

  spit(path, "i,j,k,value\n1,2\n");
  CHECK_THROWS_WITH_AS(read_coo(path), doctest::Contains(":2:"), DataError);

  CHECK_THROWS_AS(read_coo(dir.file("missing.coo")), DataError);
}

TEST_CASE("COO comments carry through the writer") {
  TempDir dir("coo_comment");
  auto t = SparseTensor3::build(2, 2, 2, {{0, 0, 0, 1.0}});
  const std::vector<std::string> comments = {"config {\"seed\":1}"};
  const auto path = dir.file("c.coo");
  write_coo(path, t, comments);
  const std::string text = slurp(path);
  CHECK(text.find("# config {\"seed\":1}\n") != std::string::npos);
  CHECK(read_coo(path).size() == 1);
}

TEST_CASE("model save/load round-trips bit-exactly") {
  TempDir dir("model");
  const FactorModel m = awkward_model();
  const auto path = dir.file("m.npil");
  save_model(path, m);
  auto loaded = load_model(path);
  CHECK(bits_equal(loaded.model, m));
  CHECK(!loaded.params.has_value());

  const auto path2 = dir.file("m2.npil");
  save_model(path2, loaded.model);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("model files embed normalization params and comments") {
  TempDir dir("model_params");
  const FactorModel m = awkward_model();
  NormalizationParams params;
  params.channels = {{-3.25, 12.5}, {5.0, 5.0}};
  const std::vector<std::string> comments = {"gains Kp1=2.5", "seed 7"};
  const auto path = dir.file("m.npil");
  save_model(path, m, &params, comments);

  const std::string text = slurp(path);
  CHECK(text.find("# gains Kp1=2.5\n") != std::string::npos);

  auto loaded = load_model(path);
  CHECK(bits_equal(loaded.model, m));
  REQUIRE(loaded.params.has_value());
  REQUIRE(loaded.params->channels.size() == 2);
  CHECK(loaded.params->channels[0].min_raw == -3.25);
  CHECK(loaded.params->channels[1].max_raw == 5.0);
}

TEST_CASE("model loader rejects malformed files") {
  TempDir dir("model_err");
  const auto path = dir.file("bad.npil");
  spit(path, "not-a-model\n");
  CHECK_THROWS_AS(load_model(path), DataError);

  spit(path, "npil-model v1\ndims 2 2 1 rank 1\n0.5\n");
  CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("truncated"),
                       DataError);

  spit(path, "npil-model v1\ndims 2 2 1 rank 2\n0.5 0.5 0.5\n");
  CHECK_THROWS_AS(load_model(path), DataError);
}

TEST_CASE("params sidecar round-trips") {
  TempDir dir("params");
  NormalizationParams params;
  params.channels = {{0.0, 230.5}, {-1.5, -1.5}, {1e-6, 1e6}};
  const auto path = dir.file("t.params");
  write_params(path, params);
  auto back = read_params(path);
  REQUIRE(back.channels.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(back.channels[j].min_raw == params.channels[j].min_raw);
    CHECK(back.channels[j].max_raw == params.channels[j].max_raw);
  }

  spit(path, "1,0,1\n");
  CHECK_THROWS_AS(read_params(path), DataError);  // must start at channel 0
}

TEST_CASE("raw meter CSV parses headers, gaps and bad rows") {
  TempDir dir("raw");
  const auto path = dir.file("meter.csv");
  spit(path,
       "day,second,power,voltage\n"
       "0,0,230.1,241.2\n"
       "0,1,,240.9\n"
       "1,86399,228.4,\n");
  auto series = read_raw_csv(path);
  CHECK(series.channel_names == std::vector<std::string>{"power", "voltage"});
  REQUIRE(series.rows.size() == 3);
  CHECK(!series.rows[1].channels[0].has_value());
  CHECK(series.rows[1].channels[1].has_value());
  CHECK(series.rows[2].day == 1);

  spit(path, "day,second,power\n0,0\n");
  CHECK_THROWS_WITH_AS(read_raw_csv(path), doctest::Contains(":2:"), DataError);

  spit(path, "second,day,power\n");
  CHECK_THROWS_AS(read_raw_csv(path), DataError);
}

TEST_CASE("epoch CSV has the pinned schema") {
  TempDir dir("epoch");
  std::vector<EpochReport> reports = {{1, 0.5, 0.1, 0.08, 0.002},
                                      {2, 0.25, 0.09, 0.07, 0.0021}};
  const auto path = dir.file("epochs.csv");
  write_epoch_csv(path, reports);
  const std::string text = slurp(path);
  CHECK(text.find("epoch,train_loss,val_rmse,val_mae,seconds\n") !=
        std::string::npos);
  CHECK(text.find("1,0.5,0.1,0.08,0.002\n") != std::string::npos);
}

TEST_CASE("swarm CSV has the pinned schema") {
  TempDir dir("swarm");
  ParticleTraceRow row;
  row.iteration = 1;
  row.particle = 0;
  row.fitness = 0.25;
  row.gains = GainVector::identity_reduction();
  row.relative_fitness = std::numeric_limits<double>::quiet_NaN();
  const auto path = dir.file("swarm.csv");
  write_swarm_csv(path, std::vector<ParticleTraceRow>{row});
  const std::string text = slurp(path);
  CHECK(text.find("iteration,particle,fitness,"
                  "Kp1,Kp2,Kp3,Ki1,Ki2,Kd1,Kd2,Kd3,Kd4,F\n") !=
        std::string::npos);
  CHECK(text.find("1,0,0.25,1,0,0.001,0,0.001,0,0,0.001,0.001,nan") !=
        std::string::npos);
}
