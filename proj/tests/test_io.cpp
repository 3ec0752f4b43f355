#include <coorbit/coorbit.hpp>
#include <coorbit/io.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <unistd.h>

using namespace coorbit;
using io::Json;

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("coorbit-io-test-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("signal containers round-trip exactly") {
  TempDir tmp;
  auto g = FreqGrid::make1d(64, 0.25);
  auto f = random_band_signal(g, FrequencySet::symmetric_band(1.0, 3.0), 7);

  io::write_signal(tmp / "sig.c128", f);
  Signal f2 = io::read_signal(tmp / "sig.c128");
  REQUIRE(f.grid == f2.grid);
  REQUIRE(f2.fhat.size() == f.fhat.size());
  for (std::size_t i = 0; i < f.fhat.size(); ++i) REQUIRE(f.fhat[i] == f2.fhat[i]);

  // rewriting produces identical bytes
  io::write_signal(tmp / "sig2.c128", f);
  REQUIRE(io::read_file(tmp / "sig.c128") == io::read_file(tmp / "sig2.c128"));
}

TEST_CASE("numbers survive JSON even when not finite") {
  Json j;
  j["a"] = io::json_num(kInf);
  j["b"] = io::json_num(-kInf);
  j["c"] = io::json_num(2.0);
  REQUIRE(j["a"].is_string());
  REQUIRE(j["c"].is_number());
  REQUIRE(std::isinf(io::num_from_json(j["a"])));
  REQUIRE(io::num_from_json(j["a"]) > 0);
  REQUIRE(io::num_from_json(j["b"]) < 0);
  REQUIRE(io::num_from_json(j["c"]) == 2.0);
  REQUIRE_THROWS_AS(io::num_from_json(Json("banana")), error);
}

TEST_CASE("configuration parsers") {
  auto grp = io::group_from_json(Json::parse(R"({"kind":"diag2param","alpha":1.0,"beta":0.5})"));
  REQUIRE(grp.chart_dim() == 2);
  auto sim = io::group_from_json(Json::parse(R"({"kind":"similitude","dim":2})"));
  REQUIRE(sim.dim() == 2);
  REQUIRE_THROWS_AS(io::group_from_json(Json::parse(R"({"kind":"nonsense"})")), error);

  auto band = io::freqset_from_json(Json::parse(R"({"kind":"symmetric_band","inner":1,"outer":2})"));
  Vec x(1);
  x << -1.5;
  REQUIRE(band.contains(x));
  REQUIRE_THROWS_AS(io::freqset_from_json(Json::parse(R"({"kind":"blob"})")), error);

  auto grid = io::grid_from_json(Json::parse(R"({"n":64,"spacing":0.25})"));
  REQUIRE(grid.dim == 1);
  REQUIRE(grid.n[0] == 64);
  auto grid2 = io::grid_from_json(Json::parse(R"({"n":[16,8],"spacing":[0.5,0.25],"offset":[1,0]})"));
  REQUIRE(grid2.dim == 2);
  REQUIRE(grid2.offset[0] == 1.0);

  auto spec = io::normspec_from_json(Json::parse(R"({"p":2,"q":"inf"})"));
  REQUIRE(spec.p == 2.0);
  REQUIRE(std::isinf(spec.q));
}

TEST_CASE("coefficient tables carry chart coordinates") {
  auto sim = DilationGroup::similitude(1);
  auto ws = well_spread(sim, 0.0, 1e-9, std::log(2.0));
  auto grid = FreqGrid::make1d(256, 1.0 / 16);
  auto w0 = build_bump_window(grid, FrequencySet::symmetric_band(0.9, 1.9), 0.1);
  auto X = make_sampling_set(ws, 0.5, grid);
  auto f = random_band_signal(grid, FrequencySet::symmetric_band(0.9, 1.9), 3);
  auto sd = analysis(f, w0, X);

  std::string csv = io::sequence_csv(sd, X);
  REQUIRE(csv.substr(0, csv.find('\n')) == "j,k,hparam0,x0,re,im");
  std::size_t rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  REQUIRE(rows == sd.entries.size() + 1);
}

TEST_CASE("transform containers persist every slice") {
  TempDir tmp;
  auto sim = DilationGroup::similitude(1);
  auto grid = FreqGrid::make1d(256, 1.0 / 16);
  auto w0 = build_bump_window(grid, FrequencySet::symmetric_band(0.9, 1.9), 0.1);
  auto f = random_band_signal(grid, FrequencySet::symmetric_band(0.9, 1.9), 3);
  auto t = cwt(f, w0, haar_samples(sim, -0.3, 0.3, 5));
  t.window_id = "w";
  t.signal_id = "s";
  io::write_gtransform(tmp / "t.bin", t);

  const std::string raw = io::read_file(tmp / "t.bin");
  const Json header = Json::parse(raw.substr(0, raw.find('\n')));
  REQUIRE(header.at("samples").size() == 5u);
  REQUIRE(header.at("window_id") == "w");
  const std::size_t payload = raw.size() - raw.find('\n') - 1;
  REQUIRE(payload == 5u * grid.total() * sizeof(cplx));
}

TEST_CASE("unreadable containers are reported, not guessed") {
  TempDir tmp;
  REQUIRE_THROWS_AS(io::read_signal(tmp / "missing.c128"), error);

  io::atomic_write(tmp / "short.c128",
                   "{\"dim\":1,\"dtype\":\"c128\",\"n\":[8],\"offset\":[0],\"spacing\":[1]}\nxx");
  REQUIRE_THROWS_AS(io::read_signal(tmp / "short.c128"), error);

  io::atomic_write(tmp / "noheader.c128", "");
  REQUIRE_THROWS_AS(io::read_signal(tmp / "noheader.c128"), error);

  // atomic_write creates missing parents
  io::atomic_write(tmp / "a/b/c.txt", "payload");
  REQUIRE(io::read_file(tmp / "a/b/c.txt") == "payload");
}
