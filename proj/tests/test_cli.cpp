#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "pseudoherm/cli.hpp"

using namespace pseudoherm;
using cli::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "pseudoherm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("levels subcommand") {
  const auto r = invoke({"levels", "--family", "scarf2", "--A", "2", "--B", "1"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["levels"]["series1"].size() == 2);
  CHECK(j["levels"]["series2"][0].get<double>() == -0.25);
  CHECK(j["levels"]["derived"] == false);
  CHECK(j["coefficients"]["V1"].get<double>() == 7.0);
  CHECK(j["reality"]["ok"] == true);
}

TEST_CASE("configuration errors exit with code 2 and JSON on stderr") {
  const auto a = invoke({"spectrum", "--family", "first-order", "--d", "0.4"});
  CHECK(a.code == 2);
  const Json e = Json::parse(a.err);
  CHECK(e["code"] == 2);
  CHECK(e["message"].get<std::string>().find("d > 1/2") != std::string::npos);
  CHECK(e["context"]["subcommand"] == "spectrum");

  const auto b = invoke({"sweep", "--family", "scarf-v", "--param", "V2", "--start", "1",
                         "--stop", "0", "--step", "0.5"});
  CHECK(b.code == 2);
  const auto c = invoke({"sweep", "--family", "scarf-v", "--param", "d", "--start", "0",
                         "--stop", "1", "--step", "0.5"});
  CHECK(c.code == 2);
  const auto d = invoke({"spectrum", "--V", "2*foo(x)", "--N", "50"});
  CHECK(d.code == 2);
  CHECK(Json::parse(d.err)["context"]["position"] == 2);
  CHECK(invoke({"spectrum", "--N", "abc"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("non-finite evolution exits with code 4") {
  const auto r = invoke({"evolve", "--V", "1000*i", "--L", "4", "--N", "50", "--T", "1",
                         "--psi1", "gauss:0,1"});
  CHECK(r.code == 4);
  CHECK(Json::parse(r.err)["context"].contains("last_valid_step"));
}

TEST_CASE("spectrum reports deviations from the closed form") {
  const auto r = invoke({"spectrum", "--family", "scarf2", "--A", "2", "--B", "1", "--N", "400",
                         "--move-tol", "1e-2"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["bound_states"]["bound"].size() == 3);
  CHECK(j["levels"]["count_matches"] == true);
  CHECK(j["levels"]["max_abs_deviation"].get<double>() < 5e-3);
  CHECK(j["pt_symmetric"] == true);
}

TEST_CASE("evolve flags a mismatched metric") {
  const std::vector<std::string> base{"evolve", "--family", "special-b1", "--A", "2",
                                      "--beta", "0.5", "--nu", "tanh(x)", "--N", "200",
                                      "--T", "0.5", "--psi1", "eig:0,1*0.5"};
  auto eta = base;
  const auto good = invoke(eta);
  REQUIRE(good.code == 0);
  const Json g = Json::parse(good.out);
  CHECK(g["flags"].empty());
  CHECK(g["max_drift"].get<double>() < 1e-10);

  auto one = base;
  one.insert(one.end(), {"--weight", "one"});
  const auto bad = invoke(one);
  REQUIRE(bad.code == 0);
  const Json b = Json::parse(bad.out);
  CHECK(b["flags"][0] == "mismatched-metric");
  CHECK(b["max_drift"].get<double>() > 1e-2);
}

TEST_CASE("outputs are byte-identical across runs and job counts") {
  const std::vector<std::string> sweep{"sweep", "--family", "scarf-v", "--V1", "2",
                                       "--param", "V2", "--start", "0", "--stop", "3",
                                       "--step", "0.75", "--N", "200"};
  auto one = sweep;
  one.insert(one.end(), {"--jobs", "1"});
  auto three = sweep;
  three.insert(three.end(), {"--jobs", "3"});
  const auto a = invoke(one), b = invoke(three), c = invoke(three);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(b.out == c.out);
  CHECK(a.out.rfind("value,max_abs_imag,real_count,pair_count,unpaired_count,bound_count,error\n", 0) == 0);

  const std::vector<std::string> spec{"spectrum", "--family", "scarf2", "--A", "2", "--N", "300"};
  CHECK(invoke(spec).out == invoke(spec).out);
}

TEST_CASE("verify-eta reports residuals for combined metrics") {
  const auto r = invoke({"verify-eta", "--family", "first-order", "--d", "2", "--eta",
                         "parity+first-order", "--g", "2*sech(x)", "--N", "800"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["eta"].size() == 2);
  CHECK(j["intertwining"]["per_probe"].size() == 5);
  CHECK(j["eta_plus"]["residual"].get<double>() < 1e-6);
  CHECK(j["eta_minus"]["residual"].get<double>() < 1e-6);
  CHECK(invoke({"verify-eta", "--eta", "bogus", "--N", "50"}).code == 2);
}
