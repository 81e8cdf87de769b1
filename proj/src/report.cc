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


#include "lucasim/report.h"

#include <algorithm>
#include <set>

#include "absl/strings/str_cat.h"
#include "lucasim/status.h"

namespace lucasim {
namespace {

using nlohmann::json;

json MetricsJson(const PairwiseMetrics& m) {
  return {{"hypothesized_pairs", m.hypothesized_pairs},
          {"true_pairs", m.true_pairs},
          {"correct_pairs", m.correct_pairs},
          {"precision", m.precision},
          {"recall", m.recall}};
}

json OutcomeJson(const AttackOutcome& o) {
  json j = {{"id", o.attack_id},
            {"type", AttackTypeName(o.type)},
            {"succeeded", o.succeeded},
            {"secrets_learned", o.secrets_learned},
            {"detectable", DetectabilityName(o.detectable)},
            {"verified_items", o.verified_items}};
  if (!o.failure_reason.empty()) j["failure_reason"] = o.failure_reason;
  return j;
}

json NetworkJson(const NetworkConfig& n) {
  json carriers = json::array();
  for (const CarrierConfig& c : n.carriers) {
    carriers.push_back({{"ipv6_probability", c.ipv6_probability}});
  }
  return {{"carriers", carriers},
          {"nat_pool", {{"min", n.nat_pool_min}, {"max", n.nat_pool_max}}},
          {"adoption_fraction", n.adoption_fraction},
          {"device_types", n.device_types},
          {"min_open_gateways", n.min_open_gateways},
          {"reconnects_per_day", n.reconnects_per_day},
          {"background_ports_per_hour", n.background_ports_per_hour}};
}

}  // namespace

json BuildReport(const RunArtifacts& run) {
  const ScenarioConfig& c = run.config;
  const Simulation& sim = *run.sim;
  const AdversaryKnowledge& k = run.knowledge;
  json r;
  r["schema_version"] = kReportSchemaVersion;
  r["scenario"] = {{"name", c.name},
                   {"digest", ScenarioDigest(c)},
                   {"seed", c.seed},
                   {"duration_days", c.duration_days},
                   {"posture", PostureName(c.adversary.posture)},
                   {"mitigations",
                    {{"pki", c.mitigations.pki_enabled},
                     {"qr_key", c.mitigations.qr_embeds_venue_key}}}};
  r["counts"] = {{"guests", sim.guest_count()},
                 {"venues", sim.venues().size()},
                 {"health_departments", sim.health_depts().size()},
                 {"checkins", sim.server().checkins.size()},
                 {"positive_reports", run.positives.size()},
                 {"traces", run.traces.size()},
                 {"messages", sim.transcript().size()},
                 {"observations", sim.server().observations.size()},
                 {"events", sim.log().size()}};
  // Modelling assumptions, surfaced so results are read with them in mind.
  r["network_assumptions"] = NetworkJson(c.network);

  json attacks = json::array();
  for (const AttackOutcome& o : k.attack_outcomes) attacks.push_back(OutcomeJson(o));
  r["attacks"] = attacks;

  r["linkage"] = {{"metadata", MetricsJson(run.linkage_metrics)},
                  {"groups", MetricsJson(run.group_metrics)},
                  {"clusters", k.linked_clusters.size()},
                  {"group_hypotheses", k.group_hypotheses.size()},
                  {"relationships", k.relationships.size()}};

  json objectives = json::array();
  for (const ObjectiveVerdict& v : run.verdicts) {
    json j = {{"objective", ObjectiveName(v.objective)},
              {"summary", ObjectiveSummary(v.objective)},
              {"holds", v.holds}};
    if (!v.holds) j["witness"] = v.witness;
    if (v.metrics) j["metrics"] = MetricsJson(*v.metrics);
    objectives.push_back(j);
  }
  r["objectives"] = objectives;

  json occupancy = json::array();
  for (const auto& [venue, series] : k.venue_occupancy) {
    int peak = 0;
    for (const OccupancyPoint& p : series) peak = std::max(peak, p.count);
    occupancy.push_back(
        {{"venue", venue.value()}, {"peak", peak}, {"points", series.size()}});
  }
  r["occupancy"] = occupancy;
  json risk = json::array();
  for (const VenueRisk& v : k.venue_risk) {
    risk.push_back({{"venue", v.venue.value()}, {"positive_visits", v.positive_visits}});
  }
  r["risk_rank"] = risk;

  json traces = json::array();
  for (const TraceResult& t : run.traces) {
    json unavailable = json::array();
    for (const VenueId& v : t.unavailable_venues) unavailable.push_back(v.value());
    traces.push_back({{"index_user", t.index_user.value()},
                      {"days", t.days},
                      {"index_records", t.index_records.size()},
                      {"venues_asked", t.venue_requests.size()},
                      {"unavailable_venues", unavailable},
                      {"contacts", t.contacts.size()}});
  }
  r["traces"] = traces;

  std::size_t traced = 0;
  for (const auto& [index, contacts] : k.traced_contacts) traced += contacts.size();
  r["inference"] = {{"codes_to_users", k.code_to_user_id.size()},
                    {"codes_to_addresses", k.code_to_address.size()},
                    {"addresses_to_users", k.address_to_user_id.size()},
                    {"visit_histories", k.visit_histories.size()},
                    {"traced_contacts", traced},
                    {"attributed_records", Attributions(k).size()},
                    {"recovered_keys", k.recovered_keys.size()},
                    {"decrypted_refs", k.decrypted_refs.size()},
                    {"stripped_refs", k.stripped_refs.size()},
                    {"decrypted_contacts", k.decrypted_contacts.size()}};

  std::set<std::string> labels;
  for (const SecretHit& h : run.secret_hits) {
    labels.insert(h.label.substr(0, h.label.find(':')));
  }
  r["secret_scan"] = {{"hits", run.secret_hits.size()},
                      {"kinds", std::vector<std::string>(labels.begin(), labels.end())}};
  r["artifacts"] = {{"report", "report.json"},
                    {"events", "events.ndjson"},
                    {"transcript", "transcript.ndjson"},
                    {"observations", "observations.ndjson"}};
  return r;
}

absl::StatusOr<json> CompareReports(const json& a, const json& b) {
  const json va = a.value("schema_version", json());
  const json vb = b.value("schema_version", json());
  if (va.is_null() || va != vb) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("schema version mismatch: ", va.dump(), " vs ", vb.dump()));
  }
  json attacks = json::array();
  std::map<std::string, std::pair<json, json>> by_id;
  for (const json& o : a.value("attacks", json::array())) by_id[o["id"]].first = o["succeeded"];
  for (const json& o : b.value("attacks", json::array())) by_id[o["id"]].second = o["succeeded"];
  for (const auto& [id, pair] : by_id) {
    if (pair.first != pair.second) {
      attacks.push_back({{"id", id}, {"before", pair.first}, {"after", pair.second}});
    }
  }
  json objectives = json::array();
  std::map<std::string, std::pair<json, json>> by_obj;
  for (const json& o : a.value("objectives", json::array())) by_obj[o["objective"]].first = o["holds"];
  for (const json& o : b.value("objectives", json::array())) by_obj[o["objective"]].second = o["holds"];
  for (const auto& [name, pair] : by_obj) {
    if (pair.first != pair.second) {
      objectives.push_back({{"objective", name}, {"before", pair.first}, {"after", pair.second}});
    }
  }
  return json{{"attacks", attacks},
              {"objectives", objectives},
              {"identical", a == b}};
}

}  // namespace lucasim
