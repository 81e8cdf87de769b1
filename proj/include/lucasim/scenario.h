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


#ifndef LUCASIM_SCENARIO_H_
#define LUCASIM_SCENARIO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "lucasim/adversary.h"
#include "lucasim/domain.h"
#include "lucasim/netsim.h"
#include "lucasim/pki.h"

namespace lucasim {

inline constexpr int kScenarioSchemaVersion = 1;

struct IntRange {
  int min = 0;
  int max = 0;
};

// A group visit fixed by the scenario author rather than sampled.
struct ScriptedGroup {
  int day = 0;
  int venue = 0;  // venue index
  std::vector<int> members;  // guest indices
  SimTime arrival = 17 * 3600;  // seconds into the day
  SimTime stay = 3600;
};

struct PopulationConfig {
  int guests = 100;
  IntRange visits_per_day = {0, 3};
  int groups_per_day = 0;
  IntRange group_size = {2, 4};
  std::vector<ScriptedGroup> scripted_groups;
  double self_checkin_fraction = 0.5;
  double checkout_probability = 1.0;
  bool motorized = false;
};

struct BoundingBox {
  double lat_min = 52.50;
  double lat_max = 52.55;
  double lon_min = 13.35;
  double lon_max = 13.42;
};

struct VenuesConfig {
  int count = 20;
  // Relative weights; defaults to an even mix over all types.
  std::map<VenueType, double> type_mix;
  BoundingBox bbox;
  IntRange scanners = {1, 2};
  double self_checkin_fraction = 0.5;
};

struct PositivesConfig {
  int count = 0;
  int report_day = -1;  // -1: last day
  int lookback_days = 1;
};

struct TracingConfig {
  bool enabled = true;
  bool include_index_case = false;
  int max_checkins_per_day = 64;
  SimTime overlap_slack = 0;
  SimTime max_stay = 4 * 3600;
  std::vector<int> unavailable_venues;  // venue indices
};

enum class Posture { kPassive, kActive };
std::string_view PostureName(Posture p);
std::optional<Posture> ParsePosture(std::string_view name);

struct AdversaryConfig {
  Posture posture = Posture::kPassive;
  std::vector<AttackSpec> attacks;
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  std::uint64_t seed = 0;
  int duration_days = 1;
  PopulationConfig population;
  VenuesConfig venues;
  int health_departments = 400;
  NetworkConfig network;
  PositivesConfig positives;
  TracingConfig tracing;
  MitigationConfig mitigations;
  LinkageConfig linkage;
  AnalysisToggles analysis;
  AdversaryConfig adversary;

  // Normalized document the config was read from; the run digest covers it.
  nlohmann::json source;

  int ReportDay() const {
    return positives.report_day < 0 ? duration_days - 1 : positives.report_day;
  }
};

// Errors: ConfigError naming the offending field path.
absl::StatusOr<ScenarioConfig> ParseScenario(const nlohmann::json& doc);
absl::StatusOr<ScenarioConfig> ParseScenarioText(std::string_view text);
absl::StatusOr<ScenarioConfig> LoadScenario(const std::string& path);

// Seed and posture overrides, re-validated and reflected in `source`.
absl::StatusOr<ScenarioConfig> WithOverrides(
    const ScenarioConfig& config, std::optional<std::uint64_t> seed,
    std::optional<Posture> posture);

std::string ScenarioDigest(const ScenarioConfig& config);

// Bundled scenario files, sorted by name.
std::vector<std::string> BundledScenarioNames();
std::string BundledScenarioPath(std::string_view name);

}  // namespace lucasim

#endif  // LUCASIM_SCENARIO_H_
