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


#ifndef LUCASIM_REPORT_H_
#define LUCASIM_REPORT_H_

#include "absl/status/statusor.h"
#include "json.hpp"
#include "lucasim/runner.h"

namespace lucasim {

inline constexpr int kReportSchemaVersion = 1;

// Deterministic summary of a run; carries no wall-clock data.
nlohmann::json BuildReport(const RunArtifacts& run);

// Per-attack and per-objective changes from `a` to `b`. An empty "attacks"
// and "objectives" list means the runs agree on both. Errors:
// InvalidArgument when the schema versions differ.
absl::StatusOr<nlohmann::json> CompareReports(const nlohmann::json& a,
                                              const nlohmann::json& b);

}  // namespace lucasim

#endif  // LUCASIM_REPORT_H_
