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


#include "lucasim/scenario.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "lucasim/bytes.h"
#include "lucasim/status.h"

namespace lucasim {
namespace {

using nlohmann::json;

absl::Status ConfigError(std::string_view path, std::string_view message) {
  return Error(ErrorKind::kConfigError,
               absl::StrCat(std::string(path), ": ", std::string(message)));
}

std::string Join(std::string_view path, std::string_view key) {
  return path.empty() ? std::string(key)
                      : absl::StrCat(std::string(path), ".", std::string(key));
}

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  absl::Status CheckIsObject() const {
    if (!j_.is_object()) {
      return ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }
    return absl::OkStatus();
  }

  bool Has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& At(const std::string& key) const { return j_.at(key); }
  std::string PathOf(std::string_view key) const { return Join(path_, key); }

  absl::Status Int(const std::string& key, int& out, std::optional<int> lo = {},
                   std::optional<int> hi = {}) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_number_integer()) return ConfigError(PathOf(key), "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (lo && x < *lo) return ConfigError(PathOf(key), absl::StrCat("must be >= ", *lo));
    if (hi && x > *hi) return ConfigError(PathOf(key), absl::StrCat("must be <= ", *hi));
    out = static_cast<int>(x);
    return absl::OkStatus();
  }

  absl::Status Time(const std::string& key, SimTime& out, SimTime lo = 0) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_number_integer()) return ConfigError(PathOf(key), "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo) return ConfigError(PathOf(key), absl::StrCat("must be >= ", lo));
    out = x;
    return absl::OkStatus();
  }

  absl::Status Double(const std::string& key, double& out, double lo, double hi) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_number()) return ConfigError(PathOf(key), "expected a number");
    const double x = v.get<double>();
    if (x < lo || x > hi) {
      return ConfigError(PathOf(key), absl::StrFormat("must be within [%g, %g]", lo, hi));
    }
    out = x;
    return absl::OkStatus();
  }

  absl::Status Bool(const std::string& key, bool& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_boolean()) return ConfigError(PathOf(key), "expected true or false");
    out = v.get<bool>();
    return absl::OkStatus();
  }

  absl::Status String(const std::string& key, std::string& out) {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_string()) return ConfigError(PathOf(key), "expected a string");
    out = v.get<std::string>();
    return absl::OkStatus();
  }

  absl::Status Range(const std::string& key, IntRange& out, int lo) {
    if (!Has(key)) return absl::OkStatus();
    ObjectReader r(j_.at(key), PathOf(key));
    LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
    LUCASIM_RETURN_IF_ERROR(r.Int("min", out.min, lo));
    LUCASIM_RETURN_IF_ERROR(r.Int("max", out.max, lo));
    if (out.max < out.min) return ConfigError(r.PathOf("max"), "must be >= min");
    return r.Finish();
  }

  absl::Status Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) return ConfigError(PathOf(key), "unknown field");
    }
    return absl::OkStatus();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

absl::Status ParsePopulation(const json& j, PopulationConfig& p) {
  ObjectReader r(j, "population");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  LUCASIM_RETURN_IF_ERROR(r.Int("guests", p.guests, 1, 100000));
  LUCASIM_RETURN_IF_ERROR(r.Range("visits_per_day", p.visits_per_day, 0));
  LUCASIM_RETURN_IF_ERROR(r.Int("groups_per_day", p.groups_per_day, 0));
  LUCASIM_RETURN_IF_ERROR(r.Range("group_size", p.group_size, 2));
  LUCASIM_RETURN_IF_ERROR(r.Double("self_checkin_fraction", p.self_checkin_fraction, 0, 1));
  LUCASIM_RETURN_IF_ERROR(r.Double("checkout_probability", p.checkout_probability, 0, 1));
  LUCASIM_RETURN_IF_ERROR(r.Bool("motorized", p.motorized));
  if (r.Has("scripted_groups")) {
    const json& arr = r.At("scripted_groups");
    const std::string path = r.PathOf("scripted_groups");
    if (!arr.is_array()) return ConfigError(path, "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ScriptedGroup g;
      ObjectReader gr(arr[i], absl::StrCat(path, "[", i, "]"));
      LUCASIM_RETURN_IF_ERROR(gr.CheckIsObject());
      LUCASIM_RETURN_IF_ERROR(gr.Int("day", g.day, 0));
      LUCASIM_RETURN_IF_ERROR(gr.Int("venue", g.venue, 0));
      LUCASIM_RETURN_IF_ERROR(gr.Time("arrival", g.arrival, 0));
      LUCASIM_RETURN_IF_ERROR(gr.Time("stay", g.stay, 60));
      if (g.arrival + g.stay >= 21 * 3600) {
        return ConfigError(gr.PathOf("stay"), "visit must end before 21:00");
      }
      if (!gr.Has("members") || !gr.At("members").is_array() ||
          gr.At("members").size() < 2) {
        return ConfigError(gr.PathOf("members"), "expected at least two guest indices");
      }
      for (const json& m : gr.At("members")) {
        if (!m.is_number_integer() || m.get<int>() < 0) {
          return ConfigError(gr.PathOf("members"), "expected guest indices");
        }
        g.members.push_back(m.get<int>());
      }
      LUCASIM_RETURN_IF_ERROR(gr.Finish());
      p.scripted_groups.push_back(std::move(g));
    }
  }
  return r.Finish();
}

absl::Status ParseVenues(const json& j, VenuesConfig& v) {
  ObjectReader r(j, "venues");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  LUCASIM_RETURN_IF_ERROR(r.Int("count", v.count, 1, 10000));
  LUCASIM_RETURN_IF_ERROR(r.Range("scanners", v.scanners, 1));
  LUCASIM_RETURN_IF_ERROR(r.Double("self_checkin_fraction", v.self_checkin_fraction, 0, 1));
  if (r.Has("types")) {
    const json& mix = r.At("types");
    if (!mix.is_object()) return ConfigError(r.PathOf("types"), "expected an object");
    for (const auto& [name, weight] : mix.items()) {
      const std::string path = Join(r.PathOf("types"), name);
      auto type = ParseVenueType(name);
      if (!type) return ConfigError(path, "unknown venue type");
      if (!weight.is_number() || weight.get<double>() < 0) {
        return ConfigError(path, "expected a non-negative weight");
      }
      v.type_mix[*type] = weight.get<double>();
    }
  }
  if (r.Has("bbox")) {
    ObjectReader b(r.At("bbox"), r.PathOf("bbox"));
    LUCASIM_RETURN_IF_ERROR(b.CheckIsObject());
    LUCASIM_RETURN_IF_ERROR(b.Double("lat_min", v.bbox.lat_min, -90, 90));
    LUCASIM_RETURN_IF_ERROR(b.Double("lat_max", v.bbox.lat_max, -90, 90));
    LUCASIM_RETURN_IF_ERROR(b.Double("lon_min", v.bbox.lon_min, -180, 180));
    LUCASIM_RETURN_IF_ERROR(b.Double("lon_max", v.bbox.lon_max, -180, 180));
    if (v.bbox.lat_max < v.bbox.lat_min) {
      return ConfigError(b.PathOf("lat_max"), "must be >= lat_min");
    }
    if (v.bbox.lon_max < v.bbox.lon_min) {
      return ConfigError(b.PathOf("lon_max"), "must be >= lon_min");
    }
    LUCASIM_RETURN_IF_ERROR(b.Finish());
  }
  return r.Finish();
}

absl::Status ParseNetwork(const json& j, NetworkConfig& n) {
  ObjectReader r(j, "network");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  if (r.Has("carriers")) {
    const json& arr = r.At("carriers");
    const std::string path = r.PathOf("carriers");
    if (!arr.is_array() || arr.empty()) return ConfigError(path, "expected a non-empty array");
    n.carriers.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      CarrierConfig c;
      ObjectReader cr(arr[i], absl::StrCat(path, "[", i, "]"));
      LUCASIM_RETURN_IF_ERROR(cr.CheckIsObject());
      LUCASIM_RETURN_IF_ERROR(cr.Double("ipv6_probability", c.ipv6_probability, 0, 1));
      LUCASIM_RETURN_IF_ERROR(cr.Finish());
      n.carriers.push_back(c);
    }
  }
  IntRange pool{n.nat_pool_min, n.nat_pool_max};
  LUCASIM_RETURN_IF_ERROR(r.Range("nat_pool", pool, 1));
  n.nat_pool_min = pool.min;
  n.nat_pool_max = pool.max;
  LUCASIM_RETURN_IF_ERROR(r.Double("adoption_fraction", n.adoption_fraction, 0.001, 1));
  LUCASIM_RETURN_IF_ERROR(r.Int("device_types", n.device_types, 1, 1000));
  LUCASIM_RETURN_IF_ERROR(r.Int("min_open_gateways", n.min_open_gateways, 1, 10000));
  LUCASIM_RETURN_IF_ERROR(r.Double("reconnects_per_day", n.reconnects_per_day, 0, 24));
  LUCASIM_RETURN_IF_ERROR(
      r.Double("background_ports_per_hour", n.background_ports_per_hour, 0, 10000));
  return r.Finish();
}

absl::Status ParsePositives(const json& j, PositivesConfig& p) {
  ObjectReader r(j, "positives");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  LUCASIM_RETURN_IF_ERROR(r.Int("count", p.count, 0, 8));
  LUCASIM_RETURN_IF_ERROR(r.Int("report_day", p.report_day, 0));
  LUCASIM_RETURN_IF_ERROR(r.Int("lookback_days", p.lookback_days, 0, 30));
  return r.Finish();
}

absl::Status ParseTracing(const json& j, TracingConfig& t) {
  ObjectReader r(j, "tracing");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  LUCASIM_RETURN_IF_ERROR(r.Bool("enabled", t.enabled));
  LUCASIM_RETURN_IF_ERROR(r.Bool("include_index_case", t.include_index_case));
  LUCASIM_RETURN_IF_ERROR(r.Int("max_checkins_per_day", t.max_checkins_per_day, 1, 4096));
  LUCASIM_RETURN_IF_ERROR(r.Time("overlap_slack", t.overlap_slack));
  LUCASIM_RETURN_IF_ERROR(r.Time("max_stay", t.max_stay, 60));
  if (r.Has("unavailable_venues")) {
    const json& arr = r.At("unavailable_venues");
    if (!arr.is_array()) return ConfigError(r.PathOf("unavailable_venues"), "expected an array");
    for (const json& v : arr) {
      if (!v.is_number_integer() || v.get<int>() < 0) {
        return ConfigError(r.PathOf("unavailable_venues"), "expected venue indices");
      }
      t.unavailable_venues.push_back(v.get<int>());
    }
  }
  return r.Finish();
}

absl::Status ParseMitigations(const json& j, MitigationConfig& m) {
  ObjectReader r(j, "mitigations");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  LUCASIM_RETURN_IF_ERROR(r.Bool("pki", m.pki_enabled));
  LUCASIM_RETURN_IF_ERROR(r.Bool("qr_key", m.qr_embeds_venue_key));
  return r.Finish();
}

absl::Status ParseAnalysis(const json& j, AnalysisToggles& a, LinkageConfig& l) {
  ObjectReader r(j, "analysis");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  LUCASIM_RETURN_IF_ERROR(r.Bool("linkage", a.linkage));
  LUCASIM_RETURN_IF_ERROR(r.Bool("groups", a.groups));
  LUCASIM_RETURN_IF_ERROR(r.Bool("occupancy", a.occupancy));
  LUCASIM_RETURN_IF_ERROR(r.Bool("risk_rank", a.risk_rank));
  LUCASIM_RETURN_IF_ERROR(r.Bool("correlate", a.correlate));
  LUCASIM_RETURN_IF_ERROR(r.Bool("trace_leakage", a.trace_leakage));
  LUCASIM_RETURN_IF_ERROR(r.Bool("use_ipv6", l.use_ipv6));
  LUCASIM_RETURN_IF_ERROR(r.Bool("use_nat", l.use_nat));
  LUCASIM_RETURN_IF_ERROR(r.Bool("spatiotemporal", l.spatiotemporal));
  LUCASIM_RETURN_IF_ERROR(r.Double("walking_kmh", l.walking_kmh, 0.1, 1000));
  LUCASIM_RETURN_IF_ERROR(r.Double("motorized_kmh", l.motorized_kmh, 0.1, 1000));
  LUCASIM_RETURN_IF_ERROR(r.Int("port_gap_base", l.port_gap_base, 0));
  LUCASIM_RETURN_IF_ERROR(r.Double("port_gap_per_hour", l.port_gap_per_hour, 0, 100000));
  LUCASIM_RETURN_IF_ERROR(r.Time("group_checkin_window", l.group_checkin_window));
  LUCASIM_RETURN_IF_ERROR(r.Time("group_checkout_window", l.group_checkout_window));
  LUCASIM_RETURN_IF_ERROR(r.Time("correlation_window", l.correlation_window));
  return r.Finish();
}

absl::Status ParseAdversary(const json& j, const ScenarioConfig& c,
                            AdversaryConfig& a) {
  ObjectReader r(j, "adversary");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  std::string posture = std::string(PostureName(a.posture));
  LUCASIM_RETURN_IF_ERROR(r.String("posture", posture));
  auto p = ParsePosture(posture);
  if (!p) return ConfigError(r.PathOf("posture"), "expected passive or active");
  a.posture = *p;
  if (!r.Has("attacks")) return r.Finish();
  const json& arr = r.At("attacks");
  const std::string path = r.PathOf("attacks");
  if (!arr.is_array()) return ConfigError(path, "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    AttackSpec s;
    s.index = static_cast<int>(i);
    ObjectReader ar(arr[i], absl::StrCat(path, "[", i, "]"));
    LUCASIM_RETURN_IF_ERROR(ar.CheckIsObject());
    std::string type;
    LUCASIM_RETURN_IF_ERROR(ar.String("type", type));
    auto t = ParseAttackType(type);
    if (!t) return ConfigError(ar.PathOf("type"), "unknown attack type");
    s.type = *t;
    LUCASIM_RETURN_IF_ERROR(ar.Int("day", s.day, 0, c.duration_days - 1));
    LUCASIM_RETURN_IF_ERROR(ar.Int("count", s.count, 0));
    int venue = -1;
    LUCASIM_RETURN_IF_ERROR(ar.Int("venue", venue, 0, c.venues.count - 1));
    if (venue >= 0) s.venue = VenueId(absl::StrFormat("v-%04d", venue));
    int scanner = -1;
    LUCASIM_RETURN_IF_ERROR(ar.Int("scanner", scanner, 0, c.venues.scanners.min - 1));
    if (scanner >= 0) {
      if (venue < 0) return ConfigError(ar.PathOf("scanner"), "requires venue");
      s.scanner = ScannerId(absl::StrFormat("s-%04d-%d", venue, scanner));
    }
    int hd = -1;
    LUCASIM_RETURN_IF_ERROR(ar.Int("hd", hd, 0, c.health_departments - 1));
    if (hd >= 0) s.hd = HealthDeptId(absl::StrFormat("hd-%03d", hd));
    std::string mode = "none";
    LUCASIM_RETURN_IF_ERROR(ar.String("mode", mode));
    auto m = ParseExfilMode(mode);
    if (!m) return ConfigError(ar.PathOf("mode"), "unknown mode");
    s.mode = *m;
    switch (s.type) {
      case AttackType::kSubstituteVenueKey:
      case AttackType::kExfiltrateVenueKey:
        if (!s.venue) return ConfigError(ar.PathOf("venue"), "required for this attack");
        break;
      case AttackType::kModifyScanner:
        if (!s.scanner) return ConfigError(ar.PathOf("scanner"), "required for this attack");
        break;
      case AttackType::kExfiltrateHdKey:
        if (!s.hd) return ConfigError(ar.PathOf("hd"), "required for this attack");
        break;
      default:
        break;
    }
    if ((s.type == AttackType::kExfiltrateVenueKey ||
         s.type == AttackType::kExfiltrateHdKey) &&
        s.mode == ExfilMode::kNone) {
      return ConfigError(ar.PathOf("mode"), "required for this attack");
    }
    LUCASIM_RETURN_IF_ERROR(ar.Finish());
    a.attacks.push_back(std::move(s));
  }
  return r.Finish();
}

}  // namespace

std::string_view PostureName(Posture p) {
  return p == Posture::kActive ? "active" : "passive";
}

std::optional<Posture> ParsePosture(std::string_view name) {
  if (name == "passive") return Posture::kPassive;
  if (name == "active") return Posture::kActive;
  return std::nullopt;
}

absl::StatusOr<ScenarioConfig> ParseScenario(const json& doc) {
  ScenarioConfig c;
  ObjectReader r(doc, "");
  LUCASIM_RETURN_IF_ERROR(r.CheckIsObject());
  int version = kScenarioSchemaVersion;
  LUCASIM_RETURN_IF_ERROR(r.Int("schema_version", version));
  if (version != kScenarioSchemaVersion) {
    return ConfigError("schema_version",
                       absl::StrCat("unsupported version ", version));
  }
  LUCASIM_RETURN_IF_ERROR(r.String("name", c.name));
  LUCASIM_RETURN_IF_ERROR(r.String("description", c.description));
  if (!r.Has("seed")) return ConfigError("seed", "required field missing");
  const json& seed = r.At("seed");
  if (!seed.is_number_integer() ||
      (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
    return ConfigError("seed", "expected a non-negative integer");
  }
  c.seed = r.At("seed").get<std::uint64_t>();
  LUCASIM_RETURN_IF_ERROR(r.Int("duration_days", c.duration_days, 1, 366));
  if (r.Has("population")) LUCASIM_RETURN_IF_ERROR(ParsePopulation(r.At("population"), c.population));
  if (r.Has("venues")) LUCASIM_RETURN_IF_ERROR(ParseVenues(r.At("venues"), c.venues));
  if (r.Has("health_departments")) {
    ObjectReader h(r.At("health_departments"), "health_departments");
    LUCASIM_RETURN_IF_ERROR(h.CheckIsObject());
    LUCASIM_RETURN_IF_ERROR(h.Int("count", c.health_departments, 1, 1000));
    LUCASIM_RETURN_IF_ERROR(h.Finish());
  }
  if (r.Has("network")) LUCASIM_RETURN_IF_ERROR(ParseNetwork(r.At("network"), c.network));
  if (r.Has("positives")) LUCASIM_RETURN_IF_ERROR(ParsePositives(r.At("positives"), c.positives));
  if (r.Has("tracing")) LUCASIM_RETURN_IF_ERROR(ParseTracing(r.At("tracing"), c.tracing));
  if (r.Has("mitigations")) {
    LUCASIM_RETURN_IF_ERROR(ParseMitigations(r.At("mitigations"), c.mitigations));
  }
  if (r.Has("analysis")) {
    LUCASIM_RETURN_IF_ERROR(ParseAnalysis(r.At("analysis"), c.analysis, c.linkage));
  }
  c.linkage.motorized = c.population.motorized;
  if (r.Has("adversary")) {
    LUCASIM_RETURN_IF_ERROR(ParseAdversary(r.At("adversary"), c, c.adversary));
  }
  LUCASIM_RETURN_IF_ERROR(r.Finish());

  // Cross-field checks.
  if (c.ReportDay() >= c.duration_days) {
    return ConfigError("positives.report_day", "must be before duration_days");
  }
  if (c.positives.count > c.population.guests) {
    return ConfigError("positives.count", "exceeds population.guests");
  }
  for (std::size_t i = 0; i < c.population.scripted_groups.size(); ++i) {
    const ScriptedGroup& g = c.population.scripted_groups[i];
    const std::string path = absl::StrCat("population.scripted_groups[", i, "]");
    if (g.day >= c.duration_days) return ConfigError(path + ".day", "outside the run");
    if (g.venue >= c.venues.count) return ConfigError(path + ".venue", "no such venue");
    for (int m : g.members) {
      if (m >= c.population.guests) return ConfigError(path + ".members", "no such guest");
    }
  }
  for (int v : c.tracing.unavailable_venues) {
    if (v >= c.venues.count) {
      return ConfigError("tracing.unavailable_venues", "no such venue");
    }
  }
  c.source = doc;
  return c;
}

absl::StatusOr<ScenarioConfig> ParseScenarioText(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) return ConfigError("<root>", "malformed JSON");
  return ParseScenario(doc);
}

absl::StatusOr<ScenarioConfig> LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) return ConfigError("<file>", absl::StrCat("cannot read ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseScenarioText(buf.str());
}

absl::StatusOr<ScenarioConfig> WithOverrides(const ScenarioConfig& config,
                                             std::optional<std::uint64_t> seed,
                                             std::optional<Posture> posture) {
  json doc = config.source;
  if (seed) doc["seed"] = *seed;
  if (posture) doc["adversary"]["posture"] = std::string(PostureName(*posture));
  return ParseScenario(doc);
}

std::string ScenarioDigest(const ScenarioConfig& config) {
  return Sha256Hex(config.source.dump());
}

std::vector<std::string> BundledScenarioNames() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry :
       std::filesystem::directory_iterator(LUCASIM_SCENARIO_DIR, ec)) {
    if (entry.path().extension() == ".json") {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string BundledScenarioPath(std::string_view name) {
  return absl::StrCat(LUCASIM_SCENARIO_DIR, "/", std::string(name), ".json");
}

}  // namespace lucasim
