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


#ifndef LUCASIM_SIMULATION_H_
#define LUCASIM_SIMULATION_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "lucasim/actors.h"
#include "lucasim/crypto.h"
#include "lucasim/domain.h"
#include "lucasim/netsim.h"
#include "lucasim/pki.h"
#include "lucasim/rng.h"
#include "lucasim/transcript.h"

namespace lucasim {

struct SimulationOptions {
  std::uint64_t seed = 1;
  MitigationConfig mitigations;
  NetworkConfig network;
  StayModel stay;
  bool include_index_case = false;
  // Highest per-day counter the server tries when expanding a tracing seed.
  int max_checkins_per_day = 64;
  std::set<VenueId> unavailable_venues;
};

struct VenueInfo {
  std::string name;
  std::string owner_contact;
  GeoPoint location;
  VenueType type = VenueType::kOther;
  int scanner_count = 1;
  bool self_checkin_qr = false;
};

struct TracedContact {
  UserId user_id;
  ContactData contact;
};

struct TraceResult {
  crypto::VerificationCode code;
  UserId index_user;
  std::vector<int> days;
  std::vector<RecordId> index_records;
  std::map<VenueId, std::vector<RecordId>> venue_requests;
  std::vector<VenueId> unavailable_venues;
  std::vector<RecordId> undecryptable;
  std::vector<TracedContact> contacts;
  SimTime finished = 0;

  std::set<UserId> ContactIds() const;
};

// Plaintext of a positive-report upload.
struct PositivePayload {
  UserId user_id;
  crypto::SymmetricKey contact_key;
  std::vector<crypto::TracingSeed> seeds;
};

Bytes EncodePositivePayload(const PositivePayload& payload);
absl::StatusOr<PositivePayload> DecodePositivePayload(ByteSpan encoded);

// Offsets of the trace pipeline stages from the moment a trace starts.
inline constexpr SimTime kTraceContactFetchOffset = 5;
inline constexpr SimTime kTraceSubmitOffset = 10;
inline constexpr SimTime kTraceVenueOffset = 60;
inline constexpr SimTime kTraceHealthDeptOffset = 120;
inline constexpr SimTime kTraceContactsOffset = 180;

// Owns every actor of one run and implements the protocol flows. Each flow
// appends to the message transcript, the server's observation log and the
// ground-truth log. Callers drive time forward monotonically.
class Simulation {
 public:
  explicit Simulation(SimulationOptions options);

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Creates a device with a network identity; not yet registered.
  int AddGuest(ContactData contact, SimTime t = 0);

  // Errors: AlreadyRegistered.
  absl::StatusOr<UserId> RegisterUser(int guest, SimTime t);
  absl::StatusOr<VenueId> RegisterVenue(const VenueInfo& info, SimTime t);
  absl::StatusOr<HealthDeptId> RegisterHealthDept(SimTime t);
  // Errors: KeyAlreadyExists.
  absl::StatusOr<PublishedMasterKey> RotateDailyMasterKey(
      const HealthDeptId& first_hd, int day, SimTime t);

  // Errors: UnknownUser, InvalidArgument, NoMasterKey, UnconfirmedCheckin.
  absl::StatusOr<RecordId> CheckInScanner(
      int guest, const ScannerId& scanner, SimTime t,
      std::optional<std::int64_t> group = std::nullopt);
  absl::StatusOr<RecordId> CheckInSelf(
      int guest, const VenueId& venue, SimTime t,
      std::optional<std::int64_t> group = std::nullopt);
  // Errors: NoOpenCheckin.
  absl::Status CheckOut(int guest, SimTime t);
  // Errors: UnknownUser, NoMasterKey.
  absl::StatusOr<crypto::VerificationCode> ReportPositive(
      int guest, const std::vector<int>& days, SimTime t);
  // Runs from t to t + kTraceContactsOffset. Errors: UnknownCode, NoMasterKey,
  // DecryptionFailure. Unavailable venues contribute nothing.
  absl::StatusOr<TraceResult> Trace(
      const HealthDeptId& hd, const crypto::VerificationCode& code, SimTime t,
      std::optional<TimeWindow> window = std::nullopt);
  absl::Status Reconnect(int guest, SimTime t);
  absl::Status RecordGroupArrival(std::int64_t group,
                                  const std::vector<int>& guests,
                                  const VenueId& venue, SimTime t);

  // Server-to-venue decryption request. The venue frontend cannot tell a
  // legitimate request from an abusive one; `authorized` only feeds the
  // ground truth. Errors: VenueUnavailable, InvalidArgument.
  absl::StatusOr<std::map<RecordId, crypto::EncryptedUserReference>>
  RequestVenueDecryption(const VenueId& venue,
                         const std::vector<RecordId>& records,
                         const std::vector<RecordId>& authorized, SimTime t,
                         std::string_view detail = "");
  // Server-to-HD request to strip the inner layer. Undecryptable records are
  // omitted from the result. The per-record user ids go back to the server
  // only when `report_to_server` is set; an honest trace keeps them local.
  absl::StatusOr<std::map<RecordId, UserId>> RequestHealthDeptDecryption(
      const HealthDeptId& hd,
      const std::map<RecordId, crypto::EncryptedUserReference>& records,
      const std::vector<RecordId>& authorized, SimTime t,
      std::string_view detail = "", bool report_to_server = false);
  // A venue frontend loaded with skip_checks code decrypts every record of
  // its venue without a request. Errors: NotApplicable otherwise.
  absl::StatusOr<std::map<RecordId, crypto::EncryptedUserReference>>
  LoadVenueFrontend(const VenueId& venue, SimTime t);

  // Master key as obtained and checked by a client. Under PKI a key whose
  // signer lacks a valid certificate is rejected; a rejected substitute is
  // reported and dropped so the client falls back to the honest key.
  absl::StatusOr<crypto::PublicKey> FetchVerifiedMasterKey(
      int day, const std::string& client, bool skip_checks, SimTime t);

  BackendServer& server() { return server_; }
  const BackendServer& server() const { return server_; }
  GroundTruthLog& log() { return log_; }
  const GroundTruthLog& log() const { return log_; }
  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }
  NetworkModel& network() { return network_; }
  const NetworkModel& network() const { return network_; }
  SimRng& rng() { return rng_; }
  const SimulationOptions& options() const { return options_; }
  const CertificateAuthority* ca() const { return ca_.get(); }

  std::size_t guest_count() const { return guests_.size(); }
  GuestApp& guest(int index) { return guests_.at(index); }
  const GuestApp& guest(int index) const { return guests_.at(index); }
  std::optional<int> GuestOfUser(const UserId& user) const;

  const std::map<VenueId, VenueActor>& venues() const { return venues_; }
  const VenueActor& venue(const VenueId& id) const { return venues_.at(id); }
  const std::map<ScannerId, ScannerFrontend>& scanners() const {
    return scanners_;
  }
  const std::map<HealthDeptId, HealthDept>& health_depts() const {
    return health_depts_;
  }
  const HealthDept& health_dept(const HealthDeptId& id) const {
    return health_depts_.at(id);
  }
  std::vector<HealthDeptId> health_dept_ids() const;

  // Record ids the server would ask venues about for the given index-case
  // records: same venue, overlapping stay, index records excluded.
  std::map<VenueId, std::vector<RecordId>> RelevantRecords(
      const std::vector<RecordId>& index_records) const;

 private:
  std::int64_t Send(SimTime t, std::string from, std::string to,
                    std::string kind,
                    std::vector<std::pair<std::string, Bytes>> fields);
  // Guest message through the network model, recorded as a server observation.
  void GuestToServer(GuestApp& guest, MessageKind kind,
                     std::optional<crypto::TraceId> trace_id, SimTime t);
  void StaticToServer(Endpoint endpoint, const std::string& address,
                      std::optional<crypto::TraceId> trace_id, SimTime t);
  absl::StatusOr<crypto::PrivateKey> HealthDeptMasterKey(HealthDept& hd,
                                                         int day, SimTime t);
  absl::StatusOr<RecordId> StoreCheckin(GuestApp& guest, const ScannerId& id,
                                        const crypto::TraceId& trace_id,
                                        crypto::EncryptedUserReference outer,
                                        const Bytes& inner_digest_source,
                                        SimTime t,
                                        std::optional<std::int64_t> group,
                                        bool self_checkin);
  absl::StatusOr<GuestApp*> RegisteredGuest(int guest);
  void PickPadding(const TraceCase& tc, int extra);

  SimulationOptions options_;
  SimRng rng_;
  NetworkModel network_;
  std::unique_ptr<CertificateAuthority> ca_;
  BackendServer server_;
  GroundTruthLog log_;
  Transcript transcript_;
  std::vector<GuestApp> guests_;
  std::map<VenueId, VenueActor> venues_;
  std::map<ScannerId, ScannerFrontend> scanners_;
  std::map<HealthDeptId, HealthDept> health_depts_;
  std::map<UserId, int> guest_of_user_;
};

// Seed the backdoored key generator derives a target's key from.
std::array<std::uint8_t, 32> BackdoorSeed(
    const std::array<std::uint8_t, 32>& secret, std::string_view target);

}  // namespace lucasim

#endif  // LUCASIM_SIMULATION_H_
