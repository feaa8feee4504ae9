// Copyright 2026 The Rearrange Authors
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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "rearrange/certificate.hpp"
#include "rearrange/errors.hpp"
#include "rearrange/spec_file.hpp"
#include "rearrange/trace.hpp"

using namespace rearrange;
namespace fs = std::filesystem;

namespace {

const std::string kData = REARRANGE_TEST_DATA;
const std::string kCli = REARRANGE_CLI;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rearrange_tests";
  fs::create_directories(dir);
  return dir / name;
}

int exit_code(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

CertificateChain small_chain(const FamilyVector& fam, const TargetVector& x) {
  ExtendOptions opts;
  opts.seed = 4;
  return run(fam, x, 1, opts).chain;
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("parse_spec_text") {
  const auto two = parse_spec_text(R"({"families": [{"kind": "rademacher_harmonic", "level": 0},
                                                    {"kind": "rademacher_harmonic", "level": 1}]})");
  CHECK(two.size() == 2);
  CHECK(term(two[1], 2) == doctest::Approx(-1.0 / 3.0));

  CHECK_THROWS_AS(parse_spec_text(R"({"families": [{"kind": "power_alternating", "exponent": 1.5}]})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_spec_text(R"({"families": [{"kind": "composite", "combo": [{"coefficient": 1, "ref": 3}]}]})"),
                  ReferenceError);
  CHECK_THROWS_AS(parse_spec_text(R"({"families": [{"kind": "abs_power", "exponent": 0.5}]})"), ValidationError);
  CHECK_THROWS_AS(parse_spec_text(R"({"families": [{"kind": "wavelet"}]})"), ValidationError);
  CHECK_THROWS_AS(parse_spec_text(R"({"families": [{"kind": "power_alternating", "exp": 1}]})"), ValidationError);
  CHECK_THROWS_AS(parse_spec_text(R"({"families": [{"kind": "composite", "combo": [],
                                    "perturbation": {"kind": "power_alternating"}}]})"),
                  ValidationError);
  try {
    parse_spec_text("{\"families\": [\n  {\"kind\": ]}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 0);
  }
  CHECK_THROWS_AS(parse_spec_file(scratch("does_not_exist.json").string()), IoError);
}

TEST_CASE("spec files round-trip") {
  const auto fam = parse_spec_file(kData + "/dependent_triple.json");
  const auto again = parse_spec_text(serialize_spec(fam));
  REQUIRE(again.size() == 3);
  for (std::size_t m = 0; m < 200; ++m) CHECK(term(again[2], m) == term(fam[2], m));
  CHECK(serialize_spec(again) == serialize_spec(fam));
}

TEST_CASE("trace format") {
  CHECK(format_trace({}, 2) == "step,index,term_0,term_1,sum_0,sum_1\n");
  const auto fam = parse_spec_file(kData + "/rademacher4.json");
  PrefixPlan plan;
  plan.injection = {0, 2, 1};
  const auto rows = build_trace(fam, plan, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].sums[0] == doctest::Approx(1.0 + 1.0 / 3.0 - 0.5));
  const std::string text = format_trace(rows, 2);
  CHECK(text.find("1,2,0.33333333333333331,-0.33333333333333331,") != std::string::npos);
  const auto path = scratch("trace.csv");
  emit_trace(rows, 2, path.string());
  CHECK(read_text_file(path.string()) == text);
  CHECK_THROWS_AS(emit_trace(rows, 2, "/nonexistent_dir/x.csv"), IoError);
}

TEST_CASE("certificate round-trips through the verifier") {
  const auto fam = parse_spec_file(kData + "/rademacher4.json");
  const TargetVector x{0.2, -0.3};
  const auto chain = small_chain(fam, x);
  const std::string text = format_certificate(chain, published_schedule());
  const auto loaded = parse_certificate(text);
  CHECK(loaded.conditions == chain.conditions);
  CHECK(loaded.targets == chain.targets);
  const auto report = verify_certificate(loaded, fam, x);
  CHECK(report.ok);
  CHECK(report.first_failure.empty());

  SUBCASE("altered f entry is caught") {
    auto doc = nlohmann::json::parse(text);
    auto& f = doc["conditions"][1]["f"];
    REQUIRE(f.size() > 4);
    f[4] = f[2];
    const auto bad = verify_certificate(parse_certificate(doc.dump()), fam, x);
    CHECK_FALSE(bad.ok);
    CHECK(bad.first_failure == "condition 1: f is an injection");
  }
  SUBCASE("altered eps is caught") {
    auto doc = nlohmann::json::parse(text);
    doc["conditions"][1]["eps"] = "1/1000000000";
    const auto bad = verify_certificate(parse_certificate(doc.dump()), fam, x);
    CHECK_FALSE(bad.ok);
    CHECK(bad.first_failure.rfind("condition 1: |partial sum - targets|", 0) == 0);
  }
  SUBCASE("recorded link numbers must match") {
    auto doc = nlohmann::json::parse(text);
    doc["links"][0]["block_norm"] = 0.0;
    const auto bad = verify_certificate(parse_certificate(doc.dump()), fam, x);
    CHECK_FALSE(bad.ok);
    CHECK(bad.first_failure == "link 0 -> 1: recorded quantities match recomputation");
  }
  SUBCASE("different targets or schedule fail") {
    CHECK_FALSE(verify_certificate(loaded, fam, TargetVector{0.2, 0.3}).ok);
    CHECK_FALSE(verify_certificate(loaded, fam, x, ConstantSchedule({3.0})).ok);
  }
  SUBCASE("malformed certificates") {
    CHECK_THROWS_AS(parse_certificate("{"), ParseError);
    CHECK_THROWS_AS(parse_certificate(R"({"format": "other"})"), ValidationError);
  }
  SUBCASE("file entry point") {
    const auto path = scratch("cert.json");
    emit_certificate(chain, path.string());
    CHECK(verify_certificate(path.string(), kData + "/rademacher4.json", x).ok);
    CHECK_THROWS_AS(verify_certificate(path.string(), scratch("missing.json").string(), x), IoError);
    CHECK_THROWS_AS(verify_certificate(scratch("missing_cert.json").string(), kData + "/rademacher4.json", x),
                    IoError);
  }
}

TEST_CASE("command-line exit codes") {
  const std::string spec = kData + "/rademacher4.json";
  const auto cert = scratch("cli_cert.json").string();
  CHECK(exit_code("extend-run --spec " + spec + " --targets=0.2,-0.3 --rounds 1 --seed 1 --cert " + cert) == 0);
  CHECK(exit_code("verify --cert " + cert + " --spec " + spec + " --targets=0.2,-0.3") == 0);
  CHECK(exit_code("verify --cert " + cert + " --spec " + spec + " --targets=0.2,0.3") == 1);
  CHECK(exit_code("verify --cert " + cert + " --spec /nonexistent.json --targets=0.2,-0.3") == 2);
  CHECK(exit_code("rearrange --spec " + kData + "/alternating_harmonic.json --targets 0.25 --seed 1") == 0);
  CHECK(exit_code("rearrange --spec " + kData + "/alternating_harmonic.json --targets 3 --seed 1 --budget 100") == 3);
  CHECK(exit_code("rearrange --spec " + spec) == 2);
  CHECK(exit_code("analyze --spec " + kData + "/dependent_triple.json --truncation 4096") == 0);

  const auto vectors = scratch("vectors.txt");
  write_text_file(vectors.string(), "1,0\n-1,0\n0,1\n0,-1\n");
  CHECK(exit_code("confine " + vectors.string()) == 0);
  write_text_file(vectors.string(), "1,0\n-1\n");
  CHECK(exit_code("confine " + vectors.string()) == 2);
}

TEST_CASE("command-line outputs are byte-stable") {
  const std::string spec = kData + "/rademacher4.json";
  const auto a = scratch("run_a.json").string(), b = scratch("run_b.json").string();
  REQUIRE(exit_code("extend-run --spec " + spec + " --targets=0.1,-0.2,0.3 --rounds 2 --seed 3 --cert " + a) == 0);
  REQUIRE(exit_code("extend-run --spec " + spec + " --targets=0.1,-0.2,0.3 --rounds 2 --seed 3 --cert " + b) == 0);
  CHECK(read_text_file(a) == read_text_file(b));
  const auto t1 = scratch("t1.csv").string(), t2 = scratch("t2.csv").string();
  const std::string tri = kData + "/dependent_triple.json";
  REQUIRE(exit_code("rearrange --spec " + tri + " --targets=0.5,0.1 --seed 3 --eps 1e-3 --trace " + t1) == 0);
  REQUIRE(exit_code("rearrange --spec " + tri + " --targets=0.5,0.1 --seed 3 --eps 1e-3 --trace " + t2) == 0);
  CHECK(read_text_file(t1) == read_text_file(t2));
  const auto o1 = scratch("o1.json").string(), o2 = scratch("o2.json").string();
  REQUIRE(exit_code("analyze --spec " + tri + " --truncation 8192 --out " + o1) == 0);
  REQUIRE(exit_code("analyze --spec " + tri + " --truncation 8192 --out " + o2) == 0);
  CHECK(read_text_file(o1) == read_text_file(o2));
}

}  // TEST_SUITE
