#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "wicklab/io.hpp"

namespace {

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path = "/tmp/wicklab_cli_test_out.txt";
  std::string cmd = std::string(WICKLAB_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exit status contract") {
  SUBCASE("passing checks exit 0") {
    CHECK(run_cli("combinat stirling --kind 2 --k 4 --l 2").exit_code == 0);
    CHECK(run_cli("verify-all --quick").exit_code == 0);
  }
  SUBCASE("usage errors exit 2") {
    CHECK(run_cli("combinat stirling").exit_code == 2);                 // missing required
    CHECK(run_cli("noise sample --noise cauchy").exit_code == 2);       // bad enum
    CHECK(run_cli("condexp verify --noise poisson --exponents 1 --volumes 2 --parent 1")
              .exit_code == 2);  // volume exceeds parent
    CHECK(run_cli("nonsense").exit_code == 2);
  }
  SUBCASE("rp on an asymmetric partition names the precondition and exits 2") {
    run_cli("qft build --dim 1 --level 0 --subgrid 2 --noise gauss --out /tmp/wl_level0.json");
    RunResult r = run_cli("qft rp --model /tmp/wl_level0.json --degree 1 --axis 0");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("symmetric") != std::string::npos);
  }
}

TEST_CASE("wick table emits the falling-factorial coefficients") {
  RunResult r = run_cli("wick table --noise poisson --n 4 --volume 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("4,1\n") != std::string::npos);
  CHECK(r.output.find("3,-6\n") != std::string::npos);
  CHECK(r.output.find("2,11\n") != std::string::npos);
  CHECK(r.output.find("1,-6\n") != std::string::npos);
}

TEST_CASE("condexp verify prints matching polynomials") {
  RunResult r =
      run_cli("condexp verify --noise gauss --exponents 2 --volumes 1/4 --parent 1");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("difference: 0") != std::string::npos);
}

TEST_CASE("field samples are valid json and reproducible") {
  RunResult a = run_cli("noise sample --noise poisson --dim 1 --level 2 --seed 9");
  RunResult b = run_cli("noise sample --noise poisson --dim 1 --level 2 --seed 9");
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output.find("\"level\": 2") != std::string::npos);
}

TEST_CASE("verify-all reports are byte-identical across runs with one seed") {
  RunResult a = run_cli("verify-all --quick --seed 77 --out /tmp/wl_rep_a.json");
  RunResult b = run_cli("verify-all --quick --seed 77 --out /tmp/wl_rep_b.json");
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp("/tmp/wl_rep_a.json") == slurp("/tmp/wl_rep_b.json"));
  CHECK(!slurp("/tmp/wl_rep_a.json").empty());
}

TEST_CASE("field json round trips, double and rational") {
  using namespace wicklab;
  Partition p = make_partition({2, make_rat(3, 2)}, 1);
  SUBCASE("double values") {
    Field<double> f = sample_field(p, NoiseKind::gauss, 4);
    Field<double> g = field_from_json(field_to_json(f));
    CHECK(f.values == g.values);
    CHECK(g.partition == p);
  }
  SUBCASE("rational values as num/den strings") {
    Field<Rat> f = make_field<Rat>(p);
    for (std::size_t i = 0; i < f.values.size(); ++i)
      f.values[i] = make_rat(static_cast<long>(i) - 1, 3);
    nlohmann::ordered_json j = field_to_json(f);
    CHECK(j["values"][0].get<std::string>() == "-1/3");
    Field<Rat> g = rat_field_from_json(j);
    CHECK(f.values == g.values);
  }
}

TEST_CASE("verify-all is independent of the worker cap") {
  const std::string base = std::string(WICKLAB_CLI_PATH) +
                           " verify-all --quick --seed 5 --out ";
  CHECK(std::system(("WICKLAB_THREADS=1 " + base + "/tmp/wl_t1.json > /dev/null").c_str()) == 0);
  CHECK(std::system(("WICKLAB_THREADS=8 " + base + "/tmp/wl_t8.json > /dev/null").c_str()) == 0);
  CHECK(slurp("/tmp/wl_t1.json") == slurp("/tmp/wl_t8.json"));
}

TEST_CASE("model files round-trip through qft npoint") {
  run_cli("qft build --dim 1 --level 1 --subgrid 2 --noise gauss --out /tmp/wl_ff.json");
  RunResult r = run_cli("qft npoint --model /tmp/wl_ff.json --cells 0,1");
  CHECK(r.exit_code == 0);
  // 2 alpha_{01} / vol^2 with alpha from the discrete propagator; positive
  CHECK(std::stod(r.output) > 0.0);
}

TEST_CASE("quartic model files round-trip through check-quartic") {
  run_cli("qft build --dim 1 --level 2 --subgrid 2 --quartic --out /tmp/wl_q4.json");
  RunResult r = run_cli("qft check-quartic --model /tmp/wl_q4.json --samples 100 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("value_at_zero,0") != std::string::npos);
}
