// Copyright 2026 the procmat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "procmat/discrimination.hpp"
#include "procmat/matrix_io.hpp"
#include "procmat/protocols.hpp"

using namespace procmat;
using nlohmann::json;

namespace {

struct CliRun {
  int exit_code;
  json output;
  std::string raw;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(PROCMAT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  CliRun r;
  r.exit_code = WEXITSTATUS(status);
  r.raw = out;
  if (!out.empty()) {
    try {
      r.output = json::parse(out);
    } catch (...) {
    }
  }
  return r;
}

std::string write_temp(const LabelledOperator& op, const std::string& name) {
  const std::string path = name;
  save_matrix(op, path);
  return path;
}

}  // namespace

TEST_CASE("matrix files round-trip") {
  Rng rng(3);
  auto w = random_process_matrix(qubit_party_labels(), rng);
  save_matrix(w.op(), "io_roundtrip.json");
  auto loaded = load_matrix("io_roundtrip.json");
  REQUIRE(max_abs(CMat(loaded.matrix() - w.matrix())) == 0.0);
  REQUIRE(loaded.labels().size() == 4);

  // canonical formatting is stable under rewrite
  save_matrix(loaded, "io_roundtrip2.json");
  std::ifstream f1("io_roundtrip.json"), f2("io_roundtrip2.json");
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  REQUIRE(s1.str() == s2.str());
}

TEST_CASE("matrix file errors") {
  {
    std::ofstream bad("io_bad.json");
    bad << "{ not json";
  }
  REQUIRE_THROWS(load_matrix("io_bad.json"));

  {
    std::ofstream nh("io_nonherm.json");
    nh << R"({"dims": [{"name": "AI", "dim": 2}], "re": [[0, 1], [0, 0]]})";
  }
  REQUIRE_THROWS_AS(load_matrix("io_nonherm.json"), std::invalid_argument);

  {
    std::ofstream mis("io_misdim.json");
    mis << R"({"dims": [{"name": "AI", "dim": 3}], "re": [[1, 0], [0, 1]]})";
  }
  REQUIRE_THROWS_AS(load_matrix("io_misdim.json"), std::invalid_argument);
}

TEST_CASE("cli validate") {
  auto cns = make_cns_example();
  const auto path = write_temp(cns.op(), "cli_cns.json");
  auto ok = run_cli("validate " + path);
  REQUIRE(ok.exit_code == 0);
  REQUIRE(ok.output.at("valid").get<bool>());

  auto zero = LabelledOperator(qubit_party_labels(), CMat::Zero(16, 16));
  write_temp(zero, "cli_zero.json");
  auto inv = run_cli("validate cli_zero.json");
  REQUIRE(inv.exit_code == 1);
  REQUIRE_FALSE(inv.output.at("valid").get<bool>());

  {
    std::ofstream bad("cli_bad.json");
    bad << "{ broken";
  }
  auto parse = run_cli("validate cli_bad.json");
  REQUIRE(parse.exit_code == 2);

  auto missing = run_cli("validate cli_missing_file.json");
  REQUIRE(missing.exit_code == 2);
}

TEST_CASE("cli classify") {
  Rng rng(5);
  auto wf = make_free(LabelledOperator({{kAI, 2}, {kBI, 2}}, random_density(4, rng)));
  write_temp(wf.op(), "cli_free.json");
  auto free_run = run_cli("classify cli_free.json");
  REQUIRE(free_run.exit_code == 0);
  REQUIRE(free_run.output.at("class").get<std::string>() == "free");

  write_temp(make_cns_example().op(), "cli_cns2.json");
  auto cns_run = run_cli("classify cli_cns2.json --json");
  REQUIRE(cns_run.exit_code == 0);
  REQUIRE(cns_run.output.at("class").get<std::string>() == "unclassified");
  REQUIRE(cns_run.output.at("separable_distance").get<double>() > 0.1);
}

TEST_CASE("cli psucc") {
  write_temp(make_cns_example().op(), "cli_w0.json");
  auto run_same = run_cli("psucc cli_w0.json cli_w0.json");
  REQUIRE(run_same.exit_code == 0);
  REQUIRE(run_same.output.at("p_succ").get<double>() == Catch::Approx(0.5).margin(1e-6));

  // perfect pair achieves one, with adaptive agreement and realization files
  Rng rng(7);
  auto pp = make_perfect_pair(random_density(2, rng), haar_unitary(2, rng));
  write_temp(pp.w_ab.op(), "cli_ab.json");
  write_temp(pp.w_ba.op(), "cli_ba.json");
  auto run_pp = run_cli("psucc cli_ab.json cli_ba.json --realize");
  REQUIRE(run_pp.exit_code == 0);
  REQUIRE(run_pp.output.at("p_succ").get<double>() == Catch::Approx(1.0).margin(1e-5));
  REQUIRE(run_pp.output.at("realized_probability").get<double>() ==
          Catch::Approx(1.0).margin(1e-5));
  // emitted strategy files load back as PSD operators with non-signalling sum
  auto s0 = load_matrix("psucc_s0.json");
  auto s1 = load_matrix("psucc_s1.json");
  auto sum = HermitianOperator(s0.labels(), CMat(s0.matrix() + s1.matrix()));
  REQUIRE(nonsignalling_report(sum, 1e-6).ok);
  REQUIRE(std::ifstream("realization_K.json").good());

  // adaptive flag on a comb pair
  auto run_ad = run_cli("psucc cli_ab.json cli_ab.json --adaptive");
  REQUIRE(run_ad.exit_code == 0);
  REQUIRE(run_ad.output.at("p_adapt").get<double>() == Catch::Approx(0.5).margin(1e-5));

  // dimension mismatch
  Rng rng3(9);
  auto pp3 = make_perfect_pair(random_density(3, rng3), haar_unitary(3, rng3));
  write_temp(pp3.w_ab.op(), "cli_ab3.json");
  auto mismatch = run_cli("psucc cli_ab.json cli_ab3.json");
  REQUIRE(mismatch.exit_code == 1);
}

TEST_CASE("cli distance") {
  write_temp(make_cns_example().op(), "cli_cns3.json");
  auto free_run = run_cli("distance cli_cns3.json --set free");
  REQUIRE(free_run.exit_code == 0);
  REQUIRE(free_run.output.at("distance").get<double>() == Catch::Approx(1.0).margin(1e-4));
  REQUIRE(free_run.output.at("closest_valid").get<bool>());
  auto closest = load_matrix("closest.json");
  REQUIRE(free_residual(HermitianOperator(closest)) < 1e-6);

  auto sep_run = run_cli("distance cli_cns3.json --set sep");
  REQUIRE(sep_run.exit_code == 0);
  REQUIRE(sep_run.output.at("distance").get<double>() ==
          Catch::Approx(1.0 - std::sqrt(2.0) / 2.0).margin(1e-4));

  Rng rng(11);
  auto wf = make_free(LabelledOperator({{kAI, 2}, {kBI, 2}}, random_density(4, rng)));
  write_temp(wf.op(), "cli_free2.json");
  auto zero_run = run_cli("distance cli_free2.json --set free");
  REQUIRE(zero_run.output.at("distance").get<double>() == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("cli basenorm") {
  write_temp(make_cns_example().op(), "cli_bn0.json");
  Rng rng(13);
  write_temp(random_process_matrix(qubit_party_labels(), rng).op(), "cli_bn1.json");
  auto diff_run = run_cli("basenorm cli_bn0.json cli_bn1.json");
  REQUIRE(diff_run.exit_code == 0);
  REQUIRE(diff_run.output.at("base_norm").get<double>() > 0.0);

  auto same_run = run_cli("basenorm cli_bn0.json cli_bn0.json");
  REQUIRE(same_run.output.at("base_norm").get<double>() == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("cli demo-perfect") {
  auto demo = run_cli("demo-perfect --dim 2 --seed 0");
  REQUIRE(demo.exit_code == 0);
  REQUIRE(demo.output.at("probability").get<double>() == Catch::Approx(1.0).margin(1e-12));

  auto demo3 = run_cli("demo-perfect --dim 3 --seed 5");
  REQUIRE(demo3.exit_code == 0);
  REQUIRE(demo3.output.at("probability").get<double>() == Catch::Approx(1.0).margin(1e-12));
  // registers follow the (i, i+1 mod d) pattern
  for (const auto& row : demo3.output.at("registers_a_before_b")) {
    const Index a = row.at("alice").get<Index>();
    const Index b = row.at("bob").get<Index>();
    REQUIRE(b == (a + 1) % 3);
  }

  // determinism under a fixed seed
  auto again = run_cli("demo-perfect --dim 3 --seed 5");
  REQUIRE(again.raw == demo3.raw);
}

TEST_CASE("cli cone-report") {
  auto rep = run_cli("cone-report --samples 20 --seed 1");
  REQUIRE(rep.exit_code == 0);
  REQUIRE(rep.output.at("ok").get<bool>());
  REQUIRE(rep.output.at("max_forward_residual").get<double>() <= 1e-9);
  REQUIRE(rep.output.at("per_sample").size() == 20);

  auto empty = run_cli("cone-report --samples 0 --seed 1");
  REQUIRE(empty.exit_code == 0);
  REQUIRE(empty.output.at("per_sample").empty());

  auto a = run_cli("cone-report --samples 5 --seed 42");
  auto b = run_cli("cone-report --samples 5 --seed 42");
  REQUIRE(a.raw == b.raw);
}
