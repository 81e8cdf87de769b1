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


#ifndef LUCASIM_DOMAIN_H_
#define LUCASIM_DOMAIN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "lucasim/bytes.h"
#include "lucasim/crypto.h"
#include "lucasim/ids.h"
#include "lucasim/pki.h"

namespace lucasim {

enum class VenueType {
  kRestaurant,
  kBar,
  kReligious,
  kPolitical,
  kPrivateEvent,
  kSchool,
  kOther,
};

std::string_view VenueTypeName(VenueType type);
std::optional<VenueType> ParseVenueType(std::string_view name);

struct GeoPoint {
  double lat = 0;
  double lon = 0;
};

// Great-circle distance.
double DistanceKm(GeoPoint a, GeoPoint b);

struct ContactData {
  std::string name;
  std::string address;
  std::string phone;

  std::string Serialize() const;
  static std::optional<ContactData> Parse(std::string_view serialized);
  bool operator==(const ContactData&) const = default;
};

struct UserRecord {
  UserId user_id;
  Bytes encrypted_contact;
  bool phone_validated = false;
};

struct VenueRecord {
  VenueId venue_id;
  std::string name;
  std::string owner_contact;
  GeoPoint location;
  VenueType type = VenueType::kOther;
  crypto::PublicKey public_key;
  std::vector<ScannerId> scanner_ids;
  // Printed self check-in QR code, if the venue offers one. Its id doubles as
  // the scanner id of self check-in records.
  std::optional<ScannerId> self_checkin_qr;
};

struct CheckInRecord {
  RecordId id = 0;
  ScannerId scanner_id;
  crypto::TraceId trace_id;
  crypto::EncryptedUserReference double_enc_ref;
  SimTime checkin_time = 0;
  std::optional<SimTime> checkout_time;

  // Set-once; must be strictly after check-in.
  absl::Status SetCheckout(SimTime t);
};

struct HealthDeptRecord {
  HealthDeptId hd_id;
  crypto::PublicKey enc_public;
  crypto::PublicKey sign_public;
  std::optional<Certificate> enc_cert;
  std::optional<Certificate> sign_cert;
  // Daily master private key encrypted to this department, by day.
  std::map<int, Bytes> encrypted_master_keys;
};

// ---------------------------------------------------------------------------
// Ground truth
// ---------------------------------------------------------------------------

enum class EventKind {
  kRegisterUser,
  kRegisterVenue,
  kRegisterHealthDept,
  kKeyRotation,
  kCheckin,
  kCheckout,
  kReportPositive,
  kTraceRequest,
  kGroupArrival,
  kVenueDecryption,
  kHealthDeptDecryption,
  kReconnect,
};

std::string_view EventKindName(EventKind kind);

// One omniscient fact about the run. Only the fields relevant to `kind` are
// populated. Digests are SHA-256 hex of the secret they stand for, so the
// exported log never carries key material or contact cleartext.
struct GroundTruthEvent {
  EventKind kind = EventKind::kRegisterUser;
  SimTime time = 0;
  std::int64_t sequence = -1;  // assigned by the log

  std::optional<UserId> user;
  std::optional<VenueId> venue;
  std::optional<ScannerId> scanner;
  std::optional<HealthDeptId> hd;
  std::optional<RecordId> record;
  std::optional<std::string> trace_id;
  std::optional<std::int64_t> group;
  std::optional<std::string> address;
  std::optional<std::string> digest;
  std::optional<int> day;
  std::optional<std::string> code;
  std::vector<UserId> members;
  std::vector<RecordId> records;
  // For decryption events: the subset a legitimate tracing query authorised.
  std::vector<RecordId> authorized_records;
  std::vector<int> days;
  std::string detail;
};

// Append-only, totally ordered by (time, sequence).
class GroundTruthLog {
 public:
  // Errors: OutOfOrderEvent if e.time precedes the last recorded time.
  absl::Status Record(GroundTruthEvent e);

  const std::vector<GroundTruthEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  SimTime last_time() const { return last_time_; }

  bool IsRegistered(const UserId& user) const {
    return registered_.contains(user);
  }
  const std::set<UserId>& registered_users() const { return registered_; }
  // Guests with a report_positive event.
  std::set<UserId> InfectedUsers() const;
  const GroundTruthEvent* CheckinEvent(RecordId record) const;
  std::optional<UserId> UserOfRecord(RecordId record) const;
  std::optional<std::string> ContactDigest(const UserId& user) const;

  // One JSON object per line, keys sorted.
  std::string ExportNdjson() const;

 private:
  std::vector<GroundTruthEvent> events_;
  SimTime last_time_ = 0;
  std::set<UserId> registered_;
  std::map<RecordId, std::size_t> checkin_index_;
  std::map<UserId, std::size_t> register_index_;
};

// Stay imputation for visits without a checkout, and the overlap rule used by
// both tracing and the cotenancy oracle.
struct StayModel {
  SimTime max_stay = 4 * 3600;
  SimTime overlap_slack = 0;

  SimTime EffectiveEnd(SimTime checkin,
                       const std::optional<SimTime>& checkout) const {
    return checkout.value_or(checkin + max_stay);
  }
};

// Intervals [a_in, a_end) and [b_in, b_end) overlap by a positive amount,
// each extended by `slack` on its far side.
inline bool VisitsOverlap(SimTime a_in, SimTime a_end, SimTime b_in,
                          SimTime b_end, SimTime slack) {
  return a_in < b_end + slack && b_in < a_end + slack;
}

// Half-open [begin, end).
struct TimeWindow {
  SimTime begin = 0;
  SimTime end = 0;

  bool Contains(SimTime t) const { return t >= begin && t < end; }
  static TimeWindow Days(int first_day, int last_day) {
    return {first_day * kSecondsPerDay, (last_day + 1) * kSecondsPerDay};
  }
  static TimeWindow All() { return {INT64_MIN / 2, INT64_MAX / 2}; }
};

struct TrueVisit {
  RecordId record = 0;
  VenueId venue;
  SimTime checkin = 0;
  std::optional<SimTime> checkout;
};

// Chronological visit history. Errors: UnknownUser.
absl::StatusOr<std::vector<TrueVisit>> TrueVisits(const GroundTruthLog& log,
                                                  const UserId& user);

// Users (other than `user`) with a visit overlapping one of `user`'s visits
// that checked in within `window`, at the same venue. Errors: UnknownUser.
absl::StatusOr<std::set<UserId>> TrueCotenants(const GroundTruthLog& log,
                                               const UserId& user,
                                               const TimeWindow& window,
                                               const StayModel& stay);

}  // namespace lucasim

#endif  // LUCASIM_DOMAIN_H_
