// Copyright 2026 The lucasim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance suite: one PASS/FAIL line per criterion. Every check compares
// the simulator against an oracle computed here from the ground-truth log or
// against fixed expectations, never against the code path under test.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lucasim/adversary.h"
#include "lucasim/crypto.h"
#include "lucasim/objectives.h"
#include "lucasim/report.h"
#include "lucasim/rng.h"
#include "lucasim/runner.h"
#include "lucasim/scenario.h"
#include "lucasim/secret_scan.h"
#include "lucasim/status.h"

namespace lucasim {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

// Runs that several criteria share, keyed by bundled scenario name.
std::map<std::string, RunArtifacts>& BundledRuns() {
  static auto* runs = new std::map<std::string, RunArtifacts>();
  return *runs;
}

absl::StatusOr<ScenarioConfig> Bundled(const std::string& name) {
  return LoadScenario(BundledScenarioPath(name));
}

absl::StatusOr<RunArtifacts*> BundledRun(const std::string& name) {
  auto& runs = BundledRuns();
  if (auto it = runs.find(name); it != runs.end()) return &it->second;
  auto config = Bundled(name);
  if (!config.ok()) return config.status();
  auto run = RunScenario(*config);
  if (!run.ok()) return run.status();
  return &runs.emplace(name, std::move(*run)).first->second;
}

std::string Fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Ground-truth helpers
// ---------------------------------------------------------------------------

struct GtVisit {
  RecordId record = 0;
  UserId user;
  VenueId venue;
  SimTime in = 0;
  std::optional<SimTime> out;
  std::optional<std::int64_t> group;
};

std::vector<GtVisit> GtVisits(const GroundTruthLog& log) {
  std::vector<GtVisit> visits;
  std::map<RecordId, std::size_t> at;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kCheckin && e.record && e.user && e.venue) {
      at[*e.record] = visits.size();
      visits.push_back({*e.record, *e.user, *e.venue, e.time, std::nullopt, e.group});
    } else if (e.kind == EventKind::kCheckout && e.record) {
      if (auto it = at.find(*e.record); it != at.end()) visits[it->second].out = e.time;
    }
  }
  return visits;
}

// Pairwise scoring from scratch: owners come from the ground-truth visits.
PairwiseMetrics ScoreAgainstOwners(const std::vector<std::vector<RecordId>>& groups,
                                   const std::map<RecordId, std::string>& label,
                                   std::int64_t true_pairs) {
  PairwiseMetrics m;
  m.true_pairs = true_pairs;
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = i + 1; j < g.size(); ++j) {
        ++m.hypothesized_pairs;
        auto a = label.find(g[i]);
        auto b = label.find(g[j]);
        if (a != label.end() && b != label.end() && a->second == b->second) {
          ++m.correct_pairs;
        }
      }
    }
  }
  m.precision = m.hypothesized_pairs == 0
                    ? 1.0
                    : static_cast<double>(m.correct_pairs) / m.hypothesized_pairs;
  m.recall = m.true_pairs == 0 ? 1.0
                               : static_cast<double>(m.correct_pairs) / m.true_pairs;
  return m;
}

std::int64_t PairsWithin(const std::map<RecordId, std::string>& label) {
  std::map<std::string, std::int64_t> sizes;
  for (const auto& [r, l] : label) ++sizes[l];
  std::int64_t pairs = 0;
  for (const auto& [l, n] : sizes) pairs += n * (n - 1) / 2;
  return pairs;
}

PairwiseMetrics OwnerMetrics(const RunArtifacts& run) {
  std::map<RecordId, std::string> owner;
  for (const GtVisit& v : GtVisits(run.sim->log())) owner[v.record] = v.user.value();
  std::vector<std::vector<RecordId>> groups;
  for (const Cluster& c : run.knowledge.linked_clusters) groups.push_back(c.records);
  return ScoreAgainstOwners(groups, owner, PairsWithin(owner));
}

PairwiseMetrics GroupTagMetrics(const RunArtifacts& run) {
  std::map<RecordId, std::string> tag;
  for (const GtVisit& v : GtVisits(run.sim->log())) {
    if (v.group) tag[v.record] = std::to_string(*v.group);
  }
  return ScoreAgainstOwners(run.knowledge.group_hypotheses, tag, PairsWithin(tag));
}

// ---------------------------------------------------------------------------
// 1. Trace contacts against a brute-force cotenancy oracle
// ---------------------------------------------------------------------------

json RandomScenario(int i, SimRng& rng) {
  const int days = 1 + static_cast<int>(rng.Uniform(3));
  const int venues = 2 + static_cast<int>(rng.Uniform(7));
  json unavailable = json::array();
  for (int v = 0; v < venues; ++v) {
    if (rng.Bernoulli(0.15)) unavailable.push_back(v);
  }
  const int vmax = 1 + static_cast<int>(rng.Uniform(4));
  return json{
      {"schema_version", 1},
      {"name", "random_" + std::to_string(i)},
      {"seed", 50000 + i},
      {"duration_days", days},
      {"population",
       {{"guests", 10 + rng.Uniform(60)},
        {"visits_per_day", {{"min", 0}, {"max", vmax}}},
        {"groups_per_day", rng.Uniform(4)},
        {"checkout_probability", 0.4 + 0.6 * rng.UniformDouble()},
        {"self_checkin_fraction", rng.UniformDouble()}}},
      {"venues",
       {{"count", venues},
        {"scanners", {{"min", 1}, {"max", 1 + rng.Uniform(2)}}},
        {"self_checkin_fraction", rng.UniformDouble()}}},
      {"health_departments", {{"count", 2 + rng.Uniform(5)}}},
      {"positives",
       {{"count", 1 + rng.Uniform(4)}, {"lookback_days", rng.Uniform(3)}}},
      {"tracing",
       {{"enabled", true},
        {"include_index_case", rng.Bernoulli(0.3)},
        {"overlap_slack", rng.Bernoulli(0.5) ? 0 : rng.Uniform(900)},
        {"max_stay", 1800 + rng.Uniform(4 * 3600)},
        {"unavailable_venues", unavailable}}}};
}

std::set<UserId> OracleContacts(const std::vector<GtVisit>& visits,
                                const UserId& index, const std::vector<int>& days,
                                const ScenarioConfig& config,
                                const std::set<VenueId>& unavailable) {
  const std::set<int> day_set(days.begin(), days.end());
  const SimTime max_stay = config.tracing.max_stay;
  const SimTime slack = config.tracing.overlap_slack;
  std::set<UserId> out;
  for (const GtVisit& a : visits) {
    if (a.user != index || !day_set.contains(DayOf(a.in))) continue;
    if (unavailable.contains(a.venue)) continue;
    const SimTime a_end = a.out ? *a.out : a.in + max_stay;
    for (const GtVisit& b : visits) {
      if (b.user == index || b.venue != a.venue) continue;
      const SimTime b_end = b.out ? *b.out : b.in + max_stay;
      if (a.in < b_end + slack && b.in < a_end + slack) out.insert(b.user);
    }
  }
  if (config.tracing.include_index_case) out.insert(index);
  return out;
}

Outcome Criterion1() {
  Outcome o;
  SimRng rng(20240601);
  int traces = 0;
  int nonempty = 0;
  double slowest = 0;
  for (int i = 0; i < 100; ++i) {
    const json doc = RandomScenario(i, rng);
    auto config = ParseScenario(doc);
    if (!config.ok()) {
      o.Fail("scenario " + std::to_string(i) + ": " + std::string(config.status().message()));
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    auto run = RunScenario(*config);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    slowest = std::max(slowest, secs);
    if (!run.ok()) {
      o.Fail("scenario " + std::to_string(i) + ": " + std::string(run.status().message()));
      continue;
    }
    if (secs >= 60) o.Fail("scenario " + std::to_string(i) + " took " + Fmt(secs) + " s");
    if (run->traces.size() != run->positives.size()) {
      o.Fail("scenario " + std::to_string(i) + ": not every positive was traced");
    }
    const std::vector<GtVisit> visits = GtVisits(run->sim->log());
    std::set<VenueId> unavailable;
    for (const auto& [id, venue] : run->sim->venues()) {
      if (std::count(config->tracing.unavailable_venues.begin(),
                     config->tracing.unavailable_venues.end(), venue.index)) {
        unavailable.insert(id);
      }
    }
    for (const TraceResult& t : run->traces) {
      ++traces;
      const std::set<UserId> expected =
          OracleContacts(visits, t.index_user, t.days, *config, unavailable);
      const std::set<UserId> got = t.ContactIds();
      if (!expected.empty()) ++nonempty;
      if (got != expected) {
        o.Fail("scenario " + std::to_string(i) + " index " + t.index_user.value() +
               ": " + std::to_string(got.size()) + " contacts, oracle " +
               std::to_string(expected.size()));
      }
    }
  }
  if (nonempty == 0) o.Fail("no trace had any contact; oracle comparison vacuous");
  if (o.pass) {
    o.detail = std::to_string(traces) + " traces in 100 scenarios, " +
               std::to_string(nonempty) + " with contacts; slowest run " + Fmt(slowest) +
               " s";
  }
  return o;
}

// ---------------------------------------------------------------------------
// 2. Honest mode leaks no secret
// ---------------------------------------------------------------------------

Outcome Criterion2() {
  Outcome o;
  int scanned = 0;
  std::size_t secrets = 0;
  for (const std::string& name : BundledScenarioNames()) {
    auto config = Bundled(name);
    if (!config.ok()) {
      o.Fail(name + ": " + std::string(config.status().message()));
      continue;
    }
    RunArtifacts* run = nullptr;
    std::optional<RunArtifacts> own;
    if (config->adversary.posture == Posture::kPassive) {
      auto shared = BundledRun(name);
      if (!shared.ok()) {
        o.Fail(name + ": " + std::string(shared.status().message()));
        continue;
      }
      run = *shared;
    } else {
      auto honest = WithOverrides(*config, std::nullopt, Posture::kPassive);
      auto fresh = honest.ok() ? RunScenario(*honest)
                               : absl::StatusOr<RunArtifacts>(honest.status());
      if (!fresh.ok()) {
        o.Fail(name + ": " + std::string(fresh.status().message()));
        continue;
      }
      own = std::move(*fresh);
      run = &*own;
    }
    secrets += CollectSecrets(*run->sim).size();
    const std::vector<SecretHit> hits = ScanRun(*run->sim);
    ++scanned;
    if (!hits.empty()) {
      o.Fail(name + ": " + hits[0].label + " found in " + hits[0].location);
    }
  }
  // The scanner must see secrets once an attack exfiltrates them.
  auto attacked = BundledRun("full_attack_matrix");
  if (!attacked.ok()) {
    o.Fail("full_attack_matrix: " + std::string(attacked.status().message()));
  } else if (ScanRun(*(*attacked)->sim).empty()) {
    o.Fail("control: no secret found in the attacked run");
  }
  if (scanned < 8) o.Fail("only " + std::to_string(scanned) + " scenarios scanned");
  if (o.pass) {
    o.detail = std::to_string(scanned) + " scenarios, " + std::to_string(secrets) +
               " secrets checked, 0 hits; attacked control detected";
  }
  return o;
}

// ---------------------------------------------------------------------------
// 3. Attack matrix against mitigations
// ---------------------------------------------------------------------------

bool ExpectedToSucceed(AttackType type, bool pki, bool qr) {
  switch (type) {
    case AttackType::kSubstituteMasterKey:
    case AttackType::kImpersonateHd:
      return !pki;
    case AttackType::kSubstituteVenueKey:
      return !qr;
    default:
      return true;
  }
}

Outcome Criterion3() {
  Outcome o;
  auto base = Bundled("full_attack_matrix");
  if (!base.ok()) {
    o.Fail(std::string(base.status().message()));
    return o;
  }
  std::ostringstream table;
  int cells = 0;
  for (int variant = 0; variant < 4; ++variant) {
    const bool pki = variant & 1;
    const bool qr = variant & 2;
    json doc = base->source;
    doc["mitigations"] = {{"pki", pki}, {"qr_key", qr}};
    auto config = ParseScenario(doc);
    auto run = config.ok() ? RunScenario(*config)
                           : absl::StatusOr<RunArtifacts>(config.status());
    if (!run.ok()) {
      o.Fail(std::string(run.status().message()));
      continue;
    }
    std::set<AttackType> seen;
    table << (variant ? " " : "") << (pki ? "P" : "-") << (qr ? "Q" : "-") << ":";
    for (const AttackOutcome& a : run->knowledge.attack_outcomes) {
      seen.insert(a.type);
      ++cells;
      table << (a.succeeded ? '1' : '0');
      const bool want = ExpectedToSucceed(a.type, pki, qr);
      const std::string where = std::string(AttackTypeName(a.type)) +
                                (pki ? "+pki" : "") + (qr ? "+qr" : "");
      if (a.succeeded != want) {
        o.Fail(where + (a.succeeded ? " succeeded" : " failed: " + a.failure_reason));
      }
      if (a.succeeded && a.verified_items <= 0) {
        o.Fail(where + " succeeded without verified items");
      }
    }
    if (seen.size() != AllAttackTypes().size() ||
        run->knowledge.attack_outcomes.size() != AllAttackTypes().size()) {
      o.Fail("variant " + std::to_string(variant) + " did not run each attack once");
    }
  }
  if (o.pass) o.detail = std::to_string(cells) + " cells as expected [" + table.str() + "]";
  return o;
}

// ---------------------------------------------------------------------------
// 4./5. Metadata linkage
// ---------------------------------------------------------------------------

Outcome LinkageCriterion(const std::string& name, double min_precision,
                         double min_recall, bool exact) {
  Outcome o;
  auto run = BundledRun(name);
  if (!run.ok()) {
    o.Fail(std::string(run.status().message()));
    return o;
  }
  const PairwiseMetrics m = OwnerMetrics(**run);
  if (m.true_pairs == 0) o.Fail("no linkable pairs in the fixture");
  const bool ok = exact ? (m.correct_pairs == m.hypothesized_pairs &&
                           m.correct_pairs == m.true_pairs)
                        : (m.precision >= min_precision && m.recall >= min_recall);
  const std::string numbers = "precision " + Fmt(m.precision) + ", recall " +
                              Fmt(m.recall) + " over " + std::to_string(m.true_pairs) +
                              " true pairs";
  if (!ok) o.Fail(numbers);
  if (o.pass) o.detail = numbers;
  return o;
}

// ---------------------------------------------------------------------------
// 6. Group linkage
// ---------------------------------------------------------------------------

Outcome Criterion6() {
  Outcome o;
  auto run = BundledRun("group_linkage");
  if (!run.ok()) {
    o.Fail(std::string(run.status().message()));
    return o;
  }
  std::map<std::int64_t, std::vector<RecordId>> truth;
  for (const GtVisit& v : GtVisits((*run)->sim->log())) {
    if (v.group) truth[*v.group].push_back(v.record);
  }
  std::set<std::vector<RecordId>> hypotheses;
  for (auto h : (*run)->knowledge.group_hypotheses) {
    std::sort(h.begin(), h.end());
    hypotheses.insert(h);
  }
  int checked = 0;
  for (auto& [g, records] : truth) {
    if (records.size() < 2) continue;
    std::sort(records.begin(), records.end());
    ++checked;
    if (!hypotheses.contains(records)) {
      o.Fail("group " + std::to_string(g) + " not recovered exactly");
    }
  }
  if (checked == 0) o.Fail("fixture has no groups");

  auto base = Bundled("group_linkage");
  double worst = 1.0;
  for (std::uint64_t seed : {11, 12, 13, 14, 15}) {
    auto config = WithOverrides(*base, seed, std::nullopt);
    auto variant = config.ok() ? RunScenario(*config)
                               : absl::StatusOr<RunArtifacts>(config.status());
    if (!variant.ok()) {
      o.Fail(std::string(variant.status().message()));
      continue;
    }
    const PairwiseMetrics m = GroupTagMetrics(*variant);
    worst = std::min(worst, m.precision);
    if (m.precision < 0.95) {
      o.Fail("seed " + std::to_string(seed) + " precision " + Fmt(m.precision));
    }
    if (m.true_pairs == 0) o.Fail("seed " + std::to_string(seed) + " has no groups");
  }
  if (o.pass) {
    o.detail = std::to_string(checked) + " groups recovered exactly; worst precision on " +
               "randomized seeds " + Fmt(worst);
  }
  return o;
}

// ---------------------------------------------------------------------------
// 7. Objective coverage
// ---------------------------------------------------------------------------

Outcome Criterion7() {
  Outcome o;
  std::map<Objective, std::string> violated_in;
  for (const std::string& name : BundledScenarioNames()) {
    auto run = BundledRun(name);
    if (!run.ok()) {
      o.Fail(name + ": " + std::string(run.status().message()));
      continue;
    }
    for (const ObjectiveVerdict& v : (*run)->verdicts) {
      if (v.holds) continue;
      if (v.witness.empty()) {
        o.Fail(name + ": " + std::string(ObjectiveName(v.objective)) + " without witness");
      }
      if (name == "honest_baseline") {
        o.Fail("honest_baseline violates " + std::string(ObjectiveName(v.objective)));
      }
      violated_in.try_emplace(v.objective, name);
    }
  }
  std::string coverage;
  for (Objective obj : AllObjectives()) {
    auto it = violated_in.find(obj);
    if (it == violated_in.end()) {
      o.Fail(std::string(ObjectiveName(obj)) + " never violated");
      continue;
    }
    coverage += std::string(coverage.empty() ? "" : ", ") +
                std::string(ObjectiveName(obj)) + "@" + it->second;
  }
  if (o.pass) o.detail = coverage + "; honest_baseline clean";
  return o;
}

// ---------------------------------------------------------------------------
// 8. Trace leakage
// ---------------------------------------------------------------------------

Outcome Criterion8() {
  Outcome o;
  auto run = BundledRun("trace_leakage");
  if (!run.ok()) {
    o.Fail(std::string(run.status().message()));
    return o;
  }
  const GroundTruthLog& log = (*run)->sim->log();
  const AdversaryKnowledge& k = (*run)->knowledge;
  std::map<std::string, UserId> code_user;
  std::map<std::string, std::string> code_address;
  std::map<UserId, std::set<int>> traced_days;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kReportPositive && e.code && e.user && e.address) {
      code_user[*e.code] = *e.user;
      code_address[*e.code] = *e.address;
    } else if (e.kind == EventKind::kTraceRequest && e.user) {
      traced_days[*e.user].insert(e.days.begin(), e.days.end());
    }
  }
  std::map<UserId, std::vector<RecordId>> histories;
  for (const GtVisit& v : GtVisits(log)) {
    auto it = traced_days.find(v.user);
    if (it != traced_days.end() && it->second.contains(DayOf(v.in))) {
      histories[v.user].push_back(v.record);
    }
  }
  std::map<UserId, std::vector<RecordId>> got_histories = k.visit_histories;
  for (auto& [u, records] : got_histories) std::sort(records.begin(), records.end());
  for (auto& [u, records] : histories) std::sort(records.begin(), records.end());

  if (code_user.empty()) o.Fail("no positive report in the fixture");
  if (k.code_to_user_id != code_user) o.Fail("code_to_user_id differs from ground truth");
  if (k.code_to_address != code_address) o.Fail("code_to_address differs from ground truth");
  if (got_histories != histories) o.Fail("visit_histories differ from ground truth");
  if (o.pass) {
    std::size_t visits = 0;
    for (const auto& [u, r] : histories) visits += r.size();
    o.detail = std::to_string(code_user.size()) + " codes mapped to user and address, " +
               std::to_string(visits) + " visits exact";
  }
  return o;
}

// ---------------------------------------------------------------------------
// 9. Determinism
// ---------------------------------------------------------------------------

std::map<std::string, std::string> ReadTree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[entry.path().filename().string()] = ss.str();
  }
  return files;
}

Outcome Criterion9() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() /
                        ("lucasim_acceptance_" + std::to_string(::getpid()));
  std::size_t bytes = 0;
  int scenarios = 0;
  for (const std::string& name : BundledScenarioNames()) {
    auto first = BundledRun(name);
    auto config = Bundled(name);
    auto second = config.ok() ? RunScenario(*config)
                              : absl::StatusOr<RunArtifacts>(config.status());
    if (!first.ok() || !second.ok()) {
      o.Fail(name + ": run failed");
      continue;
    }
    const fs::path a = root / name / "a";
    const fs::path b = root / name / "b";
    if (!WriteArtifacts(**first, a).ok() || !WriteArtifacts(*second, b).ok()) {
      o.Fail(name + ": could not write artifacts");
      continue;
    }
    const auto fa = ReadTree(a);
    const auto fb = ReadTree(b);
    if (fa.size() < 4) o.Fail(name + ": missing artifacts");
    if (fa != fb) {
      for (const auto& [file, content] : fa) {
        auto it = fb.find(file);
        if (it == fb.end() || it->second != content) o.Fail(name + "/" + file + " differs");
      }
    }
    for (const auto& [file, content] : fa) bytes += content.size();
    ++scenarios;
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  if (o.pass) {
    o.detail = std::to_string(scenarios) + " scenarios, " + std::to_string(bytes) +
               " bytes identical across two runs";
  }
  return o;
}

// ---------------------------------------------------------------------------
// 10. Cryptographic properties
// ---------------------------------------------------------------------------

Outcome Criterion10() {
  Outcome o;
  constexpr int kCases = 1000;
  SimRng rng(424242);
  int failures = 0;
  const crypto::KeyRole roles[] = {crypto::KeyRole::kVenue,
                                   crypto::KeyRole::kHealthDeptEncryption,
                                   crypto::KeyRole::kDailyMaster};
  for (int i = 0; i < kCases; ++i) {
    const crypto::KeyRole role = roles[i % 3];
    const auto k = crypto::GenerateKeyPair(role, rng);
    const auto other = crypto::GenerateKeyPair(role, rng);
    const Bytes m = rng.RandomBytes(1 + rng.Uniform(crypto::kMaxPlaintextSize));
    auto c = crypto::Encrypt(k.public_key, m, rng);
    if (!c.ok()) {
      ++failures;
      continue;
    }
    auto p = crypto::Decrypt(k.private_key, *c);
    if (!p.ok() || *p != m) ++failures;
    if (!HasErrorKind(crypto::Decrypt(other.private_key, *c).status(),
                      ErrorKind::kDecryptionFailure)) {
      ++failures;
    }
    Bytes t = *c;
    t[rng.Uniform(t.size())] ^= static_cast<std::uint8_t>(1u << rng.Uniform(8));
    if (!HasErrorKind(crypto::Decrypt(k.private_key, t).status(),
                      ErrorKind::kDecryptionFailure)) {
      ++failures;
    }
  }
  if (failures) o.Fail(std::to_string(failures) + " encryption property failures");

  failures = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto k = crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptSigning, rng);
    const auto other = crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptSigning, rng);
    Bytes m = rng.RandomBytes(1 + rng.Uniform(256));
    const crypto::Signature sig = crypto::Sign(k.private_key, m);
    if (!crypto::Verify(k.public_key, m, sig)) ++failures;
    if (crypto::Verify(other.public_key, m, sig)) ++failures;
    m[rng.Uniform(m.size())] ^= 0x01;
    if (crypto::Verify(k.public_key, m, sig)) ++failures;
  }
  if (failures) o.Fail(std::to_string(failures) + " signature property failures");

  failures = 0;
  std::set<crypto::TraceId> ids;
  for (int i = 0; i < 10000; ++i) {
    crypto::TracingSeed seed{.day = i % 7, .secret = rng.RandomArray<32>()};
    const std::uint64_t counter = rng.Uniform(64);
    const crypto::TraceId id = crypto::DeriveTraceId(seed, counter);
    if (id != crypto::DeriveTraceId(seed, counter)) ++failures;
    ids.insert(id);
  }
  if (failures) o.Fail(std::to_string(failures) + " non-deterministic trace ids");
  if (ids.size() != 10000) {
    o.Fail(std::to_string(10000 - ids.size()) + " trace id collisions");
  }
  if (o.pass) {
    o.detail = "1000 encrypt/decrypt/wrong-key/tamper, 1000 sign/verify, " +
               std::string("10000 trace ids deterministic and collision-free");
  }
  return o;
}

}  // namespace
}  // namespace lucasim

int main() {
  using lucasim::Outcome;
  struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "trace contacts equal brute-force cotenancy oracle", lucasim::Criterion1},
      {2, "honest runs leak no secret", lucasim::Criterion2},
      {3, "attack matrix matches mitigations", lucasim::Criterion3},
      {4, "IPv6 linkage exact",
       [] { return lucasim::LinkageCriterion("ipv6_linkage", 1.0, 1.0, true); }},
      {5, "NAT linkage precision >= 0.9, recall >= 0.6",
       [] { return lucasim::LinkageCriterion("nat_linkage", 0.9, 0.6, false); }},
      {6, "group linkage", lucasim::Criterion6},
      {7, "every objective violated somewhere, none in honest baseline",
       lucasim::Criterion7},
      {8, "trace leakage matches ground truth", lucasim::Criterion8},
      {9, "artifacts byte-identical across runs", lucasim::Criterion9},
      {10, "cryptographic properties", lucasim::Criterion10},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = c.check();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d  %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
