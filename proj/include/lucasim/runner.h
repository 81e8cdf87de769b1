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


#ifndef LUCASIM_RUNNER_H_
#define LUCASIM_RUNNER_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "lucasim/adversary.h"
#include "lucasim/objectives.h"
#include "lucasim/scenario.h"
#include "lucasim/secret_scan.h"
#include "lucasim/simulation.h"

namespace lucasim {

// Times of day used by the driver, in seconds after midnight.
inline constexpr SimTime kRotationTime = 60;
inline constexpr SimTime kFirstArrival = 8 * 3600;
inline constexpr SimTime kLastArrival = 18 * 3600;
inline constexpr SimTime kGroupArrivalStart = 16 * 3600;
inline constexpr SimTime kGroupMemberVisitCutoff = 15 * 3600 + 1800;
inline constexpr SimTime kReportTime = 21 * 3600 + 1800;
inline constexpr SimTime kTraceTime = 22 * 3600;
inline constexpr SimTime kTraceSpacing = 600;
inline constexpr SimTime kAttackTime = 23 * 3600 + 1800;

struct PositiveCase {
  int guest = 0;
  UserId user;
  std::vector<int> days;
  crypto::VerificationCode code;
};

struct RunArtifacts {
  ScenarioConfig config;
  std::unique_ptr<Simulation> sim;
  std::vector<PositiveCase> positives;
  std::vector<TraceResult> traces;
  AdversaryKnowledge knowledge;
  PairwiseMetrics linkage_metrics;
  PairwiseMetrics group_metrics;
  std::vector<ObjectiveVerdict> verdicts;
  std::vector<SecretHit> secret_hits;
};

// Simulates the scenario day by day (rotation, visits, reports, traces),
// runs the planned attacks, the passive analyses and the objective checks.
// Errors: SimulationError when a protocol flow fails unexpectedly.
absl::StatusOr<RunArtifacts> RunScenario(const ScenarioConfig& config);

// report.json, events.ndjson, transcript.ndjson and observations.ndjson.
absl::Status WriteArtifacts(const RunArtifacts& run,
                            const std::filesystem::path& out_dir);

}  // namespace lucasim

#endif  // LUCASIM_RUNNER_H_
