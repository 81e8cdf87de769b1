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


#ifndef LUCASIM_ADVERSARY_H_
#define LUCASIM_ADVERSARY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "lucasim/actors.h"
#include "lucasim/crypto.h"
#include "lucasim/domain.h"
#include "lucasim/ids.h"
#include "lucasim/rng.h"
#include "lucasim/simulation.h"

namespace lucasim {

// ---------------------------------------------------------------------------
// Knowledge
// ---------------------------------------------------------------------------

struct PairwiseMetrics {
  std::int64_t hypothesized_pairs = 0;
  std::int64_t true_pairs = 0;
  std::int64_t correct_pairs = 0;
  // 1.0 when there is nothing to be wrong (resp. nothing to find).
  double precision = 1.0;
  double recall = 1.0;
};

struct Cluster {
  std::vector<RecordId> records;  // sorted
  double score = 0;
  std::string basis;  // "ipv6", "nat" or "singleton"
  // Unique network identity the cluster was built from (IPv6 only).
  std::optional<std::string> address;
};

struct OccupancyPoint {
  SimTime time = 0;
  int count = 0;
  bool operator==(const OccupancyPoint&) const = default;
};
using OccupancySeries = std::vector<OccupancyPoint>;

struct VenueRisk {
  VenueId venue;
  int positive_visits = 0;
  bool operator==(const VenueRisk&) const = default;
};

enum class Detectability { kUndetectable, kDetectableByHd, kDetectableByVenue };
std::string_view DetectabilityName(Detectability d);

enum class AttackType {
  kVenueDecryptionOracle,
  kExpandWindow,
  kSubstituteVenueKey,
  kExfiltrateVenueKey,
  kSubstituteMasterKey,
  kImpersonateHd,
  kHdDecryptionOracle,
  kModifyScanner,
  kExfiltrateHdKey,
};

std::string_view AttackTypeName(AttackType type);
std::optional<AttackType> ParseAttackType(std::string_view name);
const std::vector<AttackType>& AllAttackTypes();

struct AttackOutcome {
  std::string attack_id;
  AttackType type = AttackType::kVenueDecryptionOracle;
  bool succeeded = false;
  std::string secrets_learned;
  Detectability detectable = Detectability::kUndetectable;
  // Ground-truth records/keys the learned secrets were checked against.
  std::int64_t verified_items = 0;
  std::string failure_reason;
};

// Everything the server-side adversary believes. Every claim is checkable
// against the ground-truth log.
struct AdversaryKnowledge {
  std::vector<Cluster> linked_clusters;
  std::map<int, UserId> cluster_to_user_id;
  std::vector<std::vector<RecordId>> group_hypotheses;
  // Pseudonymous relationships: pairs of cluster indices seen arriving
  // together.
  std::vector<std::pair<int, int>> relationships;
  std::map<VenueId, OccupancySeries> venue_occupancy;
  std::vector<VenueRisk> venue_risk;
  std::map<std::string, std::string> code_to_address;
  std::map<std::string, UserId> code_to_user_id;
  std::map<std::string, UserId> address_to_user_id;
  std::map<std::string, crypto::PrivateKey> recovered_keys;
  std::map<RecordId, UserId> decrypted_refs;
  // Records whose outer layer the adversary holds removed, with the path.
  std::map<RecordId, crypto::EncryptedUserReference> stripped_refs;
  std::map<RecordId, std::string> stripped_via;
  std::map<UserId, ContactData> decrypted_contacts;
  // Visit lists attributed to a user id (trace leakage, decrypted uploads).
  std::map<UserId, std::vector<RecordId>> visit_histories;
  // Contacts the server saw fetched for each traced index case.
  std::map<UserId, std::set<UserId>> traced_contacts;
  std::vector<AttackOutcome> attack_outcomes;

  bool HasActiveResults() const {
    return !recovered_keys.empty() || !decrypted_refs.empty();
  }
};

struct Attribution {
  RecordId record = 0;
  UserId user;
  std::string source;
};

// Every record-to-user claim the knowledge implies, including records that
// sit in a cluster mapped to a user.
std::vector<Attribution> Attributions(const AdversaryKnowledge& k);

// ---------------------------------------------------------------------------
// Passive analyses
// ---------------------------------------------------------------------------

struct LinkageConfig {
  bool use_ipv6 = true;
  bool use_nat = true;
  bool spatiotemporal = true;
  double walking_kmh = 5.0;
  double motorized_kmh = 50.0;
  bool motorized = false;
  int port_gap_base = 8;
  double port_gap_per_hour = 2.0;
  SimTime group_checkin_window = 30;
  SimTime group_checkout_window = 120;
  SimTime correlation_window = 60;
};

struct AnalysisToggles {
  bool linkage = true;
  bool groups = true;
  bool occupancy = true;
  bool risk_rank = true;
  bool correlate = true;
  bool trace_leakage = true;
};

// Partition of all stored check-in records by network metadata.
std::vector<Cluster> LinkCheckinsByMetadata(const BackendServer& server,
                                            const LinkageConfig& config);

// Standard pairwise scoring of a partition (or any set of groups) against
// the true owners of the records.
PairwiseMetrics ScorePartition(const std::vector<std::vector<RecordId>>& groups,
                               const GroundTruthLog& log);
PairwiseMetrics ScoreClusters(const std::vector<Cluster>& clusters,
                              const GroundTruthLog& log);

// Co-arrivals at one scanner (check-ins within the check-in window, both
// checkouts present and within the checkout window), closed transitively.
std::vector<std::vector<RecordId>> LinkGroups(const BackendServer& server,
                                              const LinkageConfig& config);
// Pairs are scored against the group tag of the ground-truth check-ins.
PairwiseMetrics ScoreGroups(const std::vector<std::vector<RecordId>>& groups,
                            const GroundTruthLog& log);
std::vector<std::pair<int, int>> GroupRelationships(
    const std::vector<std::vector<RecordId>>& groups,
    const std::vector<Cluster>& clusters);

// Step function of visible presence per venue (+1 at check-in, -1 at an
// explicit checkout). A venue without records has the series {(0, 0)}.
std::map<VenueId, OccupancySeries> VenueOccupancyProfile(
    const BackendServer& server);

// Venues by index-case visits seen during tracing; ties by venue id.
std::vector<VenueRisk> VenueRiskRank(const BackendServer& server);

// Pairs each upload fetch by code with the same requester's next
// contact-record fetch within `window`.
std::map<std::string, UserId> CorrelateTraceRequests(const BackendServer& server,
                                                     SimTime window);
std::map<std::string, std::string> CodeToAddress(const BackendServer& server);

// Folds what the server saw during traces into `k`.
void ObserveTraceLeakage(const BackendServer& server, AdversaryKnowledge& k);

// Maps clusters to user ids where the records they hold were attributed
// unambiguously by other means.
void PropagateClusterAttributions(AdversaryKnowledge& k);

AdversaryKnowledge RunPassiveAnalysis(const BackendServer& server,
                                      const LinkageConfig& config,
                                      const AnalysisToggles& toggles);

// ---------------------------------------------------------------------------
// Active attacks
// ---------------------------------------------------------------------------

struct AttackSpec {
  AttackType type = AttackType::kVenueDecryptionOracle;
  int index = 0;
  int day = 0;
  std::optional<VenueId> venue;
  std::optional<ScannerId> scanner;
  std::optional<HealthDeptId> hd;
  ExfilMode mode = ExfilMode::kNone;
  int count = 5;
  std::vector<RecordId> records;
};

// When each attack type must be armed relative to the protocol flows.
enum class ArmPhase {
  kNone,           // nothing to prepare
  kBeforeSetup,    // before actors register
  kBeforeRotation, // before the day's key rotation
  kAfterRotation,  // after the day's key rotation, before visits
  kBeforeTraces,   // before the day's traces
};
ArmPhase ArmPhaseOf(AttackType type);
std::string AttackIdOf(const AttackSpec& spec);

// Drives the deviating server. Arm() installs the deviation; Execute() runs
// the remaining steps, verifies what was learned against ground truth and
// records it in the knowledge.
class ActiveAdversary {
 public:
  ActiveAdversary(Simulation& sim, SimRng rng) : sim_(sim), rng_(rng) {}

  absl::Status Arm(const AttackSpec& spec, SimTime t);
  absl::StatusOr<AttackOutcome> Execute(const AttackSpec& spec, SimTime t,
                                        AdversaryKnowledge& k);

 private:
  struct Prepared {
    crypto::AsymKeyPair keys;
    std::optional<SimTime> armed_at;
  };

  absl::StatusOr<AttackOutcome> VenueOracle(const AttackSpec& spec, SimTime t,
                                            AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> ExpandWindow(const AttackSpec& spec,
                                             AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> SubstituteVenueKey(const AttackSpec& spec,
                                                   AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> ExfiltrateVenueKey(const AttackSpec& spec,
                                                   SimTime t,
                                                   AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> SubstituteMasterKey(const AttackSpec& spec,
                                                    SimTime t,
                                                    AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> ImpersonateHd(const AttackSpec& spec,
                                              AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> HdOracle(const AttackSpec& spec, SimTime t,
                                         AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> ModifyScanner(const AttackSpec& spec, SimTime t,
                                              AdversaryKnowledge& k);
  absl::StatusOr<AttackOutcome> ExfiltrateHdKey(const AttackSpec& spec,
                                                AdversaryKnowledge& k);

  // Venue-oracle step shared by several attacks: outer layers off the given
  // records, verified and recorded. Returns the verified inner references.
  absl::StatusOr<std::map<RecordId, crypto::EncryptedUserReference>> StripViaOracle(
      const std::vector<RecordId>& records, SimTime t, std::string_view via,
      AdversaryKnowledge& k);
  // Opens inner layers with `master`, keeps the ones that verify.
  std::int64_t OpenInnerLayers(
      const std::map<RecordId, crypto::EncryptedUserReference>& refs,
      const crypto::PrivateKey& master, AdversaryKnowledge& k);
  bool RecordStripped(RecordId record, const crypto::EncryptedUserReference& inner,
                      std::string_view via, AdversaryKnowledge& k);
  bool RecordOpened(RecordId record, const crypto::UserReference& ref,
                    AdversaryKnowledge& k);
  bool ContactOpened(const UserId& user, const crypto::SymmetricKey& key,
                     AdversaryKnowledge& k);
  // Verifies a recovered daily master key; on success stores it.
  bool AcceptMasterKey(int day, const crypto::PrivateKey& key,
                       AdversaryKnowledge& k);

  Simulation& sim_;
  SimRng rng_;
  std::map<int, Prepared> prepared_;
};

}  // namespace lucasim

#endif  // LUCASIM_ADVERSARY_H_
