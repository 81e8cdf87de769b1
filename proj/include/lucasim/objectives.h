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


#ifndef LUCASIM_OBJECTIVES_H_
#define LUCASIM_OBJECTIVES_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lucasim/adversary.h"
#include "lucasim/domain.h"
#include "lucasim/pki.h"

namespace lucasim {

enum class Objective { kO1, kO2, kO3, kO4, kO5, kO6 };

std::string_view ObjectiveName(Objective o);
std::string_view ObjectiveSummary(Objective o);
const std::vector<Objective>& AllObjectives();

struct ObjectiveVerdict {
  Objective objective = Objective::kO1;
  bool holds = true;
  // Verified violating inference; empty when the objective holds.
  std::string witness;
  // Raw linkage numbers reported alongside O3.
  std::optional<PairwiseMetrics> metrics;
};

// Each check re-verifies every candidate witness against the ground truth
// and only reports a violation for one that survives.

// O1: contact data of a guest who never reported was decrypted.
ObjectiveVerdict CheckO1(const AdversaryKnowledge& k, const GroundTruthLog& log);
// O2: a check-in of a guest who never reported is tied to their user id, or
// to their unique network address by a cluster that holds only their records.
ObjectiveVerdict CheckO2(const AdversaryKnowledge& k, const GroundTruthLog& log);
// O3: two check-ins of one guest who never reported are linked.
ObjectiveVerdict CheckO3(const AdversaryKnowledge& k, const GroundTruthLog& log);
// O4: two or more check-ins of a guest who never reported are attributed to
// their user id.
ObjectiveVerdict CheckO4(const AdversaryKnowledge& k, const GroundTruthLog& log);
// O5: an infected guest's check-in outside the reported days is attributed
// to them, or a trace revealed someone who was not a cotenant of the index
// case on the reported days.
ObjectiveVerdict CheckO5(const AdversaryKnowledge& k, const GroundTruthLog& log,
                         const StayModel& stay);
// O6: an outer layer was removed outside any venue decryption a legitimate
// trace asked for.
ObjectiveVerdict CheckO6(const AdversaryKnowledge& k, const GroundTruthLog& log);

std::vector<ObjectiveVerdict> CheckAllObjectives(const AdversaryKnowledge& k,
                                                 const GroundTruthLog& log,
                                                 const StayModel& stay);

// Certificate binding `subject` to `role`, as issued by the third-party CA.
Certificate IssueCertificate(const CertificateAuthority& ca,
                             const crypto::PublicKey& subject,
                             std::string_view role);

}  // namespace lucasim

#endif  // LUCASIM_OBJECTIVES_H_
