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


#include <string>

#include "gtest/gtest.h"
#include "json.hpp"
#include "lucasim/report.h"
#include "lucasim/runner.h"
#include "lucasim/scenario.h"
#include "lucasim/status.h"

namespace lucasim {
namespace {

using nlohmann::json;

json Minimal() {
  return json{{"schema_version", 1},
              {"name", "tiny"},
              {"seed", 5},
              {"duration_days", 1},
              {"population", {{"guests", 20}}},
              {"venues", {{"count", 3}}},
              {"health_departments", {{"count", 4}}},
              {"positives", {{"count", 1}}}};
}

void ExpectConfigError(const json& doc, const std::string& field) {
  auto parsed = ParseScenario(doc);
  ASSERT_FALSE(parsed.ok()) << doc.dump();
  EXPECT_TRUE(HasErrorKind(parsed.status(), ErrorKind::kConfigError));
  EXPECT_NE(std::string(parsed.status().message()).find(field), std::string::npos)
      << parsed.status();
}

TEST(ScenarioTest, MinimalParses) {
  auto parsed = ParseScenario(Minimal());
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(parsed->seed, 5u);
  EXPECT_EQ(parsed->population.guests, 20);
  EXPECT_EQ(parsed->ReportDay(), 0);
}

TEST(ScenarioTest, ErrorsNameTheField) {
  json doc = Minimal();
  doc.erase("seed");
  ExpectConfigError(doc, "seed");

  doc = Minimal();
  doc["duration_days"] = 0;
  ExpectConfigError(doc, "duration_days");

  doc = Minimal();
  doc["population"]["guests"] = "many";
  ExpectConfigError(doc, "population.guests");

  doc = Minimal();
  doc["venues"]["colour"] = "red";
  ExpectConfigError(doc, "venues.colour");

  doc = Minimal();
  doc["schema_version"] = 99;
  ExpectConfigError(doc, "schema_version");

  doc = Minimal();
  doc["adversary"] = {{"posture", "active"},
                      {"attacks", json::array({{{"type", "teleport"}}})}};
  ExpectConfigError(doc, "adversary.attacks[0].type");

  doc = Minimal();
  doc["adversary"] = {{"posture", "sideways"}};
  ExpectConfigError(doc, "adversary.posture");

  doc = Minimal();
  doc["network"] = {{"carriers", json::array({{{"ipv6_probability", 1.5}}})}};
  ExpectConfigError(doc, "network.carriers[0].ipv6_probability");

  EXPECT_TRUE(HasErrorKind(ParseScenarioText("{ not json").status(), ErrorKind::kConfigError));
}

TEST(ScenarioTest, BundledScenariosLoad) {
  const auto names = BundledScenarioNames();
  EXPECT_GE(names.size(), 8u);
  for (const std::string& name : names) {
    auto config = LoadScenario(BundledScenarioPath(name));
    EXPECT_TRUE(config.ok()) << name << ": " << config.status();
    if (config.ok()) {
      EXPECT_EQ(config->name, name);
    }
  }
}

TEST(ScenarioTest, OverridesChangeDigest) {
  auto base = ParseScenario(Minimal());
  ASSERT_TRUE(base.ok());
  auto other = WithOverrides(*base, 6, std::nullopt);
  ASSERT_TRUE(other.ok());
  EXPECT_EQ(other->seed, 6u);
  EXPECT_NE(ScenarioDigest(*base), ScenarioDigest(*other));
  EXPECT_EQ(ScenarioDigest(*base), ScenarioDigest(*ParseScenario(Minimal())));
}

TEST(RunnerTest, RunsAreDeterministic) {
  auto config = ParseScenario(Minimal());
  ASSERT_TRUE(config.ok());
  auto a = RunScenario(*config);
  auto b = RunScenario(*config);
  ASSERT_TRUE(a.ok()) << a.status();
  ASSERT_TRUE(b.ok()) << b.status();
  EXPECT_EQ(BuildReport(*a).dump(), BuildReport(*b).dump());
  EXPECT_EQ(a->sim->log().ExportNdjson(), b->sim->log().ExportNdjson());
  EXPECT_EQ(a->sim->transcript().ExportNdjson(), b->sim->transcript().ExportNdjson());

  auto other = RunScenario(*WithOverrides(*config, 77, std::nullopt));
  ASSERT_TRUE(other.ok());
  EXPECT_NE(a->sim->log().ExportNdjson(), other->sim->log().ExportNdjson());
}

TEST(ReportTest, CompareIdenticalAndSchemaMismatch) {
  auto config = ParseScenario(Minimal());
  auto run = RunScenario(*config);
  ASSERT_TRUE(run.ok());
  const json report = BuildReport(*run);
  EXPECT_EQ(report["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(report["objectives"].size(), 6u);
  auto same = CompareReports(report, report);
  ASSERT_TRUE(same.ok());
  EXPECT_TRUE((*same)["identical"].get<bool>());

  json flipped = report;
  flipped["objectives"][0]["holds"] = !report["objectives"][0]["holds"].get<bool>();
  auto diff = CompareReports(report, flipped);
  ASSERT_TRUE(diff.ok());
  EXPECT_FALSE((*diff)["identical"].get<bool>());
  EXPECT_EQ((*diff)["objectives"].size(), 1u);

  json future = report;
  future["schema_version"] = kReportSchemaVersion + 1;
  EXPECT_TRUE(absl::IsInvalidArgument(CompareReports(report, future).status()));
}

}  // namespace
}  // namespace lucasim
