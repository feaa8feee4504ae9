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

// rearrange: command-line front end.
//
//   rearrange confine [FILE] [--anchor] [--rho R] [--tol T]
//   rearrange rearrange --spec FILE --targets X,... --seed S [--eps E] [--budget N] [--trace FILE]
//   rearrange extend-run --spec FILE --targets X,... --rounds N --seed S [--budget N] [--cert FILE]
//   rearrange analyze --spec FILE [--truncation N] [--out FILE]
//   rearrange verify --cert FILE --spec FILE --targets X,...
//
// Exit status: 0 ok, 1 verification failure, 2 input error, 3 budget
// exhausted. RL_CONSTANT_SCHEDULE overrides the confinement constants.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "rearrange/certificate.hpp"
#include "rearrange/confinement.hpp"
#include "rearrange/errors.hpp"
#include "rearrange/forcing.hpp"
#include "rearrange/rearranger.hpp"
#include "rearrange/spec_file.hpp"
#include "rearrange/subspace.hpp"
#include "rearrange/trace.hpp"

namespace {

using namespace rearrange;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

VectorList parse_vectors(std::istream& in) {
  VectorList out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError("expected a number", line_no, pos + 1);
      }
      if (cell.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw ParseError("trailing characters after number", line_no, pos + used + 1);
      }
      row.push_back(v);
      pos = comma + 1;
    }
    if (!out.empty() && row.size() != out.dim()) {
      throw ParseError("vector has " + std::to_string(row.size()) + " coordinates, expected " +
                           std::to_string(out.dim()),
                       line_no, 1);
    }
    out.push_back(row);
  }
  return out;
}

struct ConfineArgs {
  std::string input;
  bool anchor = false;
  std::optional<double> rho;
  double tol = 1e-9;
};

int cmd_confine(const ConfineArgs& a) {
  VectorList vectors;
  if (a.input.empty() || a.input == "-") {
    vectors = parse_vectors(std::cin);
  } else {
    std::istringstream in(read_text_file(a.input));
    vectors = parse_vectors(in);
  }
  if (vectors.empty()) throw InvalidInput("no vectors given");

  ConfinementResult r;
  if (a.anchor) {
    double rho = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) rho = std::max(rho, norm(vectors[i]));
    if (a.rho) rho = *a.rho;
    r = confine_with_anchor(vectors, sum_of(vectors), rho);
  } else {
    r = confine_zero_sum(vectors, a.tol);
  }
  std::cout << "step,input_position,prefix_norm\n";
  for (std::size_t k = 0; k < r.permutation.size(); ++k) {
    std::cout << fmt::format("{},{},{:.17g}\n", k, r.permutation[k], r.prefix_norms[k]);
  }
  std::cerr << fmt::format("max prefix norm {:.6g}, bound {:.6g}\n", r.max_prefix_norm, r.bound_used);
  return kExitOk;
}

struct RearrangeArgs {
  std::string spec;
  std::vector<double> targets;
  double eps = 1e-3;
  std::uint64_t seed = 0;
  std::size_t budget = 1'000'000;
  std::string trace;
};

int cmd_rearrange(const RearrangeArgs& a) {
  const FamilyVector fam = parse_spec_file(a.spec);
  const std::size_t d = a.targets.size();
  if (d == 0 || d > fam.size()) throw InvalidInput("need between 1 and " + std::to_string(fam.size()) + " targets");

  PrefixPlan plan;
  if (d == 1) {
    plan = riemann_rearrange(fam[0], a.targets[0], a.eps, a.budget);
  } else {
    ChaseOptions opts;
    opts.eps = a.eps;
    opts.seed = a.seed;
    opts.budget = a.budget;
    plan = chase_target(fam.prefix(d), PrefixPlan{}, a.targets, opts);
  }
  if (!a.trace.empty()) emit_trace(build_trace(fam, plan, d), d, a.trace);

  const PrefixReport report = verify_prefix(fam, plan, a.targets, d);
  std::cout << fmt::format("terms {}\ndeviation {:.17g}\nmax_excursion {:.17g}\n", plan.injection.size(),
                           report.deviation, report.max_excursion);
  if (!report.ok || !(report.deviation < a.eps)) {
    for (const auto& f : report.failures) std::cerr << "error: " << f << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

struct ExtendArgs {
  std::string spec;
  std::vector<double> targets;
  std::size_t rounds = 3;
  std::uint64_t seed = 0;
  std::size_t budget = 10'000'000;
  std::string cert;
};

int cmd_extend_run(const ExtendArgs& a) {
  const FamilyVector fam = parse_spec_file(a.spec);
  if (a.targets.empty()) throw InvalidInput("no targets given");
  ExtendOptions opts;
  opts.seed = a.seed;
  opts.budget = a.budget;

  CertificateChain chain;
  int status = kExitOk;
  try {
    chain = run(fam, a.targets, a.rounds, opts).chain;
  } catch (const ChainInterrupted& e) {
    std::cerr << "error: " << e.what() << "\n";
    chain = e.partial();
    status = e.budget_exhausted() ? kExitBudget : kExitVerification;
  }
  if (!a.cert.empty()) emit_certificate(chain, a.cert);

  for (std::size_t i = 0; i < chain.conditions.size(); ++i) {
    const Condition& c = chain.conditions[i];
    std::cout << fmt::format("condition {}: |f| = {}, d = {}, eps = {} ({:.6g})\n", i, c.f.size(), c.d,
                             to_fraction(c.eps), to_double(c.eps));
  }
  return status;
}

struct AnalyzeArgs {
  std::string spec;
  std::size_t truncation = std::size_t{1} << 18;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const FamilyVector fam = parse_spec_file(a.spec);
  GrowthConfig cfg;
  cfg.truncation = a.truncation;
  const KSpaceAnalysis k = analyze_k_space(fam, fam.size(), cfg);
  const DependencyStructure dep = dependency_decompose(fam);

  json doc;
  doc["dimension"] = fam.size();
  json kb = json::array();
  for (const auto& s : k.k_basis) kb.push_back(s.dense(fam.size()));
  doc["k_basis"] = kb;
  doc["r_basis"] = k.r_basis;
  json coeffs = json::object();
  for (const auto& [j, list] : dep.coefficients) {
    json entries = json::array();
    for (const auto& [idx, value] : list) entries.push_back({{"index", idx}, {"coefficient", value}});
    coeffs[std::to_string(j)] = entries;
  }
  json abs_sums = json::object();
  for (const auto& [j, c] : dep.abs_sums) abs_sums[std::to_string(j)] = c;
  doc["dependency"] = {{"independent", dep.independent}, {"coefficients", coeffs}, {"abs_sums", abs_sums}};
  json diags = json::array();
  for (const auto& g : k.diagnostics) {
    diags.push_back({{"direction", g.direction},
                     {"declared_member", g.declared_member},
                     {"abs_sum_quarter", g.abs_sum_quarter},
                     {"abs_sum_half", g.abs_sum_half},
                     {"abs_sum_full", g.abs_sum_full},
                     {"increment_ratio", g.increment_ratio},
                     {"verdict", to_string(g.verdict)}});
  }
  doc["growth"] = diags;

  const std::string text = doc.dump(1) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(a.out, text);
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string cert;
  std::string spec;
  std::vector<double> targets;
};

int cmd_verify(const VerifyArgs& a) {
  const VerificationReport report = verify_certificate(a.cert, a.spec, a.targets);
  for (const auto& line : report.lines) std::cout << line << "\n";
  if (!report.ok) {
    std::cerr << "verification failed: " << report.first_failure << "\n";
    return kExitVerification;
  }
  std::cout << "certificate verified\n";
  return kExitOk;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ParseError& e) {
    std::cerr << "parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const DisagreementError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rearrange conditionally convergent series toward target sums"};
  app.require_subcommand(1);

  ConfineArgs confine;
  auto* c = app.add_subcommand("confine", "Order vectors so every prefix sum stays small");
  c->add_option("file", confine.input, "Vector list, one comma-separated vector per line (default stdin)");
  c->add_flag("--anchor", confine.anchor, "Vectors need not sum to zero; bound is rho * C_d + |sum|");
  c->add_option("--rho", confine.rho, "Norm bound for --anchor (default: largest input norm)");
  c->add_option("--tol", confine.tol, "Tolerance on |sum| for zero-sum input");

  RearrangeArgs rearr;
  auto* r = app.add_subcommand("rearrange", "Reorder series so their partial sums approach the targets");
  r->add_option("--spec", rearr.spec, "Series spec file")->required();
  r->add_option("--targets", rearr.targets, "Comma-separated target sums")->required()->delimiter(',');
  r->add_option("--eps", rearr.eps, "Accuracy");
  r->add_option("--seed", rearr.seed, "Random seed")->required();
  r->add_option("--budget", rearr.budget, "Largest index the search may touch");
  r->add_option("--trace", rearr.trace, "CSV trace output");

  ExtendArgs ext;
  auto* e = app.add_subcommand("extend-run", "Build a certified descending chain of conditions");
  e->add_option("--spec", ext.spec, "Series spec file")->required();
  e->add_option("--targets", ext.targets, "Comma-separated target sums")->required()->delimiter(',');
  e->add_option("--rounds", ext.rounds, "Number of extension rounds");
  e->add_option("--seed", ext.seed, "Random seed")->required();
  e->add_option("--budget", ext.budget, "Largest index a chase may touch");
  e->add_option("--cert", ext.cert, "Certificate output");

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "Report K, R, the dependency structure and growth diagnostics");
  z->add_option("--spec", an.spec, "Series spec file")->required();
  z->add_option("--truncation", an.truncation, "Terms used by the growth test");
  z->add_option("--out", an.out, "JSON output (default stdout)");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Recheck a certificate against the series");
  v->add_option("--cert", ver.cert, "Certificate file")->required();
  v->add_option("--spec", ver.spec, "Series spec file")->required();
  v->add_option("--targets", ver.targets, "Comma-separated target sums")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (*c) return guarded([&] { return cmd_confine(confine); });
  if (*r) return guarded([&] { return cmd_rearrange(rearr); });
  if (*e) return guarded([&] { return cmd_extend_run(ext); });
  if (*z) return guarded([&] { return cmd_analyze(an); });
  return guarded([&] { return cmd_verify(ver); });
}
