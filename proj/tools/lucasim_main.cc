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


// Command-line front end: run, validate, list and compare scenarios.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lucasim/report.h"
#include "lucasim/runner.h"
#include "lucasim/scenario.h"
#include "lucasim/status.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

int ExitCodeFor(const absl::Status& status) {
  if (lucasim::HasErrorKind(status, lucasim::ErrorKind::kConfigError)) {
    return kExitConfig;
  }
  return kExitInternal;
}

// Accepts a file path or the name of a bundled scenario.
std::string ResolveConfig(const std::string& config) {
  if (std::filesystem::exists(config)) return config;
  const std::string bundled = lucasim::BundledScenarioPath(config);
  return std::filesystem::exists(bundled) ? bundled : config;
}

void PrintSummary(const nlohmann::json& report, const std::string& out_dir) {
  const auto& s = report["scenario"];
  std::cout << "scenario " << s["name"].get<std::string>() << " (seed "
            << s["seed"] << ", posture " << s["posture"].get<std::string>()
            << ", pki " << s["mitigations"]["pki"] << ", qr_key "
            << s["mitigations"]["qr_key"] << ")\n";
  const auto& c = report["counts"];
  std::cout << "  " << c["guests"] << " guests, " << c["venues"] << " venues, "
            << c["checkins"] << " check-ins, " << c["traces"] << " traces\n";
  const auto& m = report["linkage"]["metadata"];
  std::cout << "  linkage precision " << m["precision"] << " recall "
            << m["recall"] << "\n";
  for (const auto& a : report["attacks"]) {
    std::cout << "  attack " << a["id"].get<std::string>() << ": "
              << (a["succeeded"].get<bool>() ? "succeeded" : "failed") << "\n";
  }
  for (const auto& o : report["objectives"]) {
    std::cout << "  " << o["objective"].get<std::string>() << " "
              << (o["holds"].get<bool>() ? "holds" : "VIOLATED");
    if (o.contains("witness")) std::cout << ": " << o["witness"].get<std::string>();
    std::cout << "\n";
  }
  std::cout << "  secret scan hits: " << report["secret_scan"]["hits"] << "\n";
  if (!out_dir.empty()) std::cout << "  artifacts in " << out_dir << "\n";
}

absl::StatusOr<nlohmann::json> ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return lucasim::Error(lucasim::ErrorKind::kConfigError,
                          "cannot read " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) {
    return lucasim::Error(lucasim::ErrorKind::kConfigError,
                          path + ": malformed JSON");
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lucasim: presence-tracing protocol simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::string posture;
  bool json_only = false;
  auto* run = app.add_subcommand("run", "simulate a scenario and write a report");
  run->add_option("--config", config, "scenario file or bundled name")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed-override", seed_override, "replace the scenario seed");
  run->add_option("--posture", posture, "passive or active");
  run->add_flag("--json-only", json_only, "print only the report JSON");

  auto* validate = app.add_subcommand("validate", "check a scenario without running it");
  validate->add_option("--config", config, "scenario file or bundled name")->required();

  auto* list = app.add_subcommand("list", "list bundled scenarios");

  std::string report_a;
  std::string report_b;
  auto* compare = app.add_subcommand("compare", "diff two reports");
  compare->add_option("a", report_a, "baseline report.json")->required();
  compare->add_option("b", report_b, "other report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*list) {
    for (const std::string& name : lucasim::BundledScenarioNames()) {
      auto c = lucasim::LoadScenario(lucasim::BundledScenarioPath(name));
      std::cout << name;
      if (c.ok() && !c->description.empty()) std::cout << "  " << c->description;
      std::cout << "\n";
    }
    return kExitOk;
  }

  if (*compare) {
    auto a = ReadJson(report_a);
    auto b = a.ok() ? ReadJson(report_b) : a;
    if (!b.ok()) {
      std::cerr << b.status().message() << "\n";
      return kExitConfig;
    }
    auto diff = lucasim::CompareReports(*a, *b);
    if (!diff.ok()) {
      std::cerr << diff.status().message() << "\n";
      return kExitConfig;
    }
    std::cout << diff->dump(2) << "\n";
    return kExitOk;
  }

  auto scenario = lucasim::LoadScenario(ResolveConfig(config));
  if (!scenario.ok()) {
    std::cerr << scenario.status().message() << "\n";
    return ExitCodeFor(scenario.status());
  }
  if (*validate) {
    std::cout << "ok\n";
    return kExitOk;
  }

  std::optional<lucasim::Posture> posture_override;
  if (!posture.empty()) {
    posture_override = lucasim::ParsePosture(posture);
    if (!posture_override) {
      std::cerr << "--posture: expected passive or active\n";
      return kExitConfig;
    }
  }
  if (seed_override || posture_override) {
    scenario = lucasim::WithOverrides(*scenario, seed_override, posture_override);
    if (!scenario.ok()) {
      std::cerr << scenario.status().message() << "\n";
      return ExitCodeFor(scenario.status());
    }
  }

  auto result = lucasim::RunScenario(*scenario);
  if (!result.ok()) {
    std::cerr << result.status().message() << "\n";
    return ExitCodeFor(result.status());
  }
  if (!out_dir.empty()) {
    if (absl::Status s = lucasim::WriteArtifacts(*result, out_dir); !s.ok()) {
      std::cerr << s.message() << "\n";
      return kExitInternal;
    }
  }
  const nlohmann::json report = lucasim::BuildReport(*result);
  if (json_only) {
    std::cout << report.dump(2) << "\n";
  } else {
    PrintSummary(report, out_dir);
  }
  return kExitOk;
}
