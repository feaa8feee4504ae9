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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "rearrange/certificate.hpp"
#include "rearrange/errors.hpp"
#include "rearrange/spec_file.hpp"
#include "rearrange/trace.hpp"

namespace rearrange {
namespace {

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> coords(const FamilyVector& fam, std::size_t m, std::size_t d) {
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = term(fam[i], m);
  return v;
}

bool same_number(double recorded, double recomputed) {
  return std::abs(recorded - recomputed) <= 1e-9 * std::max(1.0, std::abs(recomputed));
}

class Checker {
 public:
  explicit Checker(VerificationReport& report) : report_(report) {}

  void operator()(bool pass, const std::string& what) {
    report_.lines.push_back(fmt::format("{}: {}", pass ? "pass" : "FAIL", what));
    if (!pass && report_.ok) {
      report_.ok = false;
      report_.first_failure = what;
    }
  }

 private:
  VerificationReport& report_;
};

}  // namespace

VerificationReport verify_certificate(const LoadedCertificate& cert, const FamilyVector& fam,
                                      const TargetVector& targets, const ConstantSchedule& schedule) {
  VerificationReport report;
  Checker check(report);

  bool targets_match = targets.size() <= cert.targets.size();
  for (std::size_t i = 0; targets_match && i < targets.size(); ++i) targets_match = targets[i] == cert.targets[i];
  check(targets_match, "targets agree with the certificate");
  bool schedule_match = true;
  for (std::size_t d = 1; d <= cert.schedule.size(); ++d) schedule_match &= cert.schedule[d - 1] == schedule.at(d);
  check(schedule_match, "constant schedule agrees with the certificate");
  check(!cert.conditions.empty(), "certificate lists at least one condition");
  check(cert.recorded_links.size() + 1 == cert.conditions.size() || cert.conditions.empty(),
        "one link per consecutive pair of conditions");
  if (!report.ok) return report;

  const double slack = cert.slack;
  for (std::size_t i = 0; i < cert.conditions.size(); ++i) {
    const Condition& c = cert.conditions[i];
    const std::string at = fmt::format("condition {}", i);

    std::vector<std::size_t> sorted = c.f;
    std::sort(sorted.begin(), sorted.end());
    check(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), at + ": f is an injection");
    const bool dim_ok = c.d >= 1 && c.d <= fam.size() && c.d <= targets.size();
    check(dim_ok, at + ": d is a positive integer within the family");
    check(c.eps > 0, at + ": eps is a positive rational");
    if (!dim_ok) continue;

    const double eps = c.eps.convert_to<double>();
    std::vector<double> dev(c.d, 0.0);
    for (std::size_t i2 = 0; i2 < c.d; ++i2) {
      double s = 0.0;
      for (std::size_t m : c.f) s += term(fam[i2], m);
      dev[i2] = s - targets[i2];
    }
    const double deviation = euclid(dev);
    check(deviation < eps - slack, fmt::format("{}: |partial sum - targets| = {:.6g} < eps = {:.6g}", at, deviation, eps));

    const std::size_t cutoff = c.f.size() + cert.tail_window;
    std::vector<bool> used(cutoff, false);
    for (std::size_t m : c.f) {
      if (m < cutoff) used[m] = true;
    }
    double worst = 0.0;
    for (std::size_t m = 0; m < cutoff; ++m) {
      if (!used[m]) worst = std::max(worst, euclid(coords(fam, m, c.d)));
    }
    double envelope_sq = 0.0;
    for (std::size_t i2 = 0; i2 < c.d; ++i2) {
      const double b = tail_sup_bound(fam[i2], cutoff);
      envelope_sq += b * b;
    }
    const double threshold = eps / schedule.at(c.d);
    check(worst < threshold - slack && std::sqrt(envelope_sq) < threshold - slack,
          fmt::format("{}: unused terms (max {:.6g}, envelope {:.6g}) < eps / C_d = {:.6g}", at, worst,
                      std::sqrt(envelope_sq), threshold));
  }

  for (std::size_t i = 0; i + 1 < cert.conditions.size() && i < cert.recorded_links.size(); ++i) {
    const Condition& upper = cert.conditions[i];
    const Condition& lower = cert.conditions[i + 1];
    const OrderEvidence& rec = cert.recorded_links[i];
    const std::string at = fmt::format("link {} -> {}", i, i + 1);

    const bool extends = lower.f.size() >= upper.f.size() && std::equal(upper.f.begin(), upper.f.end(), lower.f.begin());
    check(extends, at + ": g extends f");
    check(lower.d >= upper.d, at + ": e >= d");

    const std::size_t d = std::min(upper.d, fam.size());
    std::vector<double> block(d, 0.0);
    double max_prefix = 0.0;
    for (std::size_t k = upper.f.size(); k < lower.f.size(); ++k) {
      const auto v = coords(fam, lower.f[k], d);
      for (std::size_t j = 0; j < d; ++j) block[j] += v[j];
      max_prefix = std::max(max_prefix, euclid(block));
    }
    const double two_eps = 2.0 * upper.eps.convert_to<double>();
    check(max_prefix < two_eps - slack,
          fmt::format("{}: block prefix sums (max {:.6g}) < 2 eps = {:.6g}", at, max_prefix, two_eps));
    const double shrink = 2.0 * lower.eps.convert_to<double>() + euclid(block);
    check(shrink <= two_eps, fmt::format("{}: 2 delta + |block sum| = {:.6g} <= 2 eps = {:.6g}", at, shrink, two_eps));
    check(rec.extends == extends && rec.dimension_ok == (lower.d >= upper.d) &&
              same_number(rec.max_block_prefix_norm, max_prefix) && same_number(rec.block_norm, euclid(block)) &&
              same_number(rec.two_delta_plus_block, shrink),
          at + ": recorded quantities match recomputation");
  }
  return report;
}

VerificationReport verify_certificate(const std::string& cert_path, const std::string& spec_path,
                                      const TargetVector& targets, const ConstantSchedule& schedule) {
  const FamilyVector fam = parse_spec_file(spec_path);
  const LoadedCertificate cert = parse_certificate(read_text_file(cert_path));
  return verify_certificate(cert, fam, targets, schedule);
}

}  // namespace rearrange
