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


#include "lucasim/domain.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "lucasim/status.h"

namespace lucasim {
namespace {

constexpr std::array<std::pair<VenueType, std::string_view>, 7> kVenueTypes = {{
    {VenueType::kRestaurant, "restaurant"},
    {VenueType::kBar, "bar"},
    {VenueType::kReligious, "religious"},
    {VenueType::kPolitical, "political"},
    {VenueType::kPrivateEvent, "private-event"},
    {VenueType::kSchool, "school"},
    {VenueType::kOther, "other"},
}};

}  // namespace

std::string_view VenueTypeName(VenueType type) {
  for (const auto& [t, name] : kVenueTypes) {
    if (t == type) return name;
  }
  return "other";
}

std::optional<VenueType> ParseVenueType(std::string_view name) {
  for (const auto& [t, n] : kVenueTypes) {
    if (n == name) return t;
  }
  return std::nullopt;
}

double DistanceKm(GeoPoint a, GeoPoint b) {
  constexpr double kEarthRadiusKm = 6371.0;
  constexpr double kRad = M_PI / 180.0;
  const double dlat = (b.lat - a.lat) * kRad;
  const double dlon = (b.lon - a.lon) * kRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * kRad) * std::cos(b.lat * kRad) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

std::string ContactData::Serialize() const {
  return absl::StrCat(name, "\n", address, "\n", phone);
}

std::optional<ContactData> ContactData::Parse(std::string_view serialized) {
  std::vector<std::string> parts = absl::StrSplit(std::string(serialized), '\n');
  if (parts.size() != 3) return std::nullopt;
  return ContactData{parts[0], parts[1], parts[2]};
}

absl::Status CheckInRecord::SetCheckout(SimTime t) {
  if (checkout_time.has_value()) {
    return Error(ErrorKind::kInvalidArgument, "checkout already recorded");
  }
  if (t <= checkin_time) {
    return Error(ErrorKind::kInvalidArgument,
                 "checkout must be after check-in");
  }
  checkout_time = t;
  return absl::OkStatus();
}

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kRegisterUser:
      return "register_user";
    case EventKind::kRegisterVenue:
      return "register_venue";
    case EventKind::kRegisterHealthDept:
      return "register_health_dept";
    case EventKind::kKeyRotation:
      return "key_rotation";
    case EventKind::kCheckin:
      return "checkin";
    case EventKind::kCheckout:
      return "checkout";
    case EventKind::kReportPositive:
      return "report_positive";
    case EventKind::kTraceRequest:
      return "trace_request";
    case EventKind::kGroupArrival:
      return "group_arrival";
    case EventKind::kVenueDecryption:
      return "venue_decryption";
    case EventKind::kHealthDeptDecryption:
      return "health_dept_decryption";
    case EventKind::kReconnect:
      return "reconnect";
  }
  return "unknown";
}

absl::Status GroundTruthLog::Record(GroundTruthEvent e) {
  if (!events_.empty() && e.time < last_time_) {
    return Error(ErrorKind::kOutOfOrderEvent,
                 absl::StrCat("event at t=", e.time, " after t=", last_time_));
  }
  e.sequence = static_cast<std::int64_t>(events_.size());
  last_time_ = e.time;
  const std::size_t index = events_.size();
  if (e.kind == EventKind::kRegisterUser && e.user.has_value()) {
    registered_.insert(*e.user);
    register_index_[*e.user] = index;
  }
  if (e.kind == EventKind::kCheckin && e.record.has_value()) {
    checkin_index_[*e.record] = index;
  }
  events_.push_back(std::move(e));
  return absl::OkStatus();
}

std::set<UserId> GroundTruthLog::InfectedUsers() const {
  std::set<UserId> out;
  for (const GroundTruthEvent& e : events_) {
    if (e.kind == EventKind::kReportPositive && e.user) out.insert(*e.user);
  }
  return out;
}

const GroundTruthEvent* GroundTruthLog::CheckinEvent(RecordId record) const {
  auto it = checkin_index_.find(record);
  return it == checkin_index_.end() ? nullptr : &events_[it->second];
}

std::optional<UserId> GroundTruthLog::UserOfRecord(RecordId record) const {
  const GroundTruthEvent* e = CheckinEvent(record);
  if (e == nullptr || !e->user) return std::nullopt;
  return e->user;
}

std::optional<std::string> GroundTruthLog::ContactDigest(
    const UserId& user) const {
  auto it = register_index_.find(user);
  if (it == register_index_.end()) return std::nullopt;
  return events_[it->second].digest;
}

std::string GroundTruthLog::ExportNdjson() const {
  std::string out;
  for (const GroundTruthEvent& e : events_) {
    nlohmann::json j;
    j["kind"] = EventKindName(e.kind);
    j["time"] = e.time;
    j["seq"] = e.sequence;
    if (e.user) j["user"] = e.user->value();
    if (e.venue) j["venue"] = e.venue->value();
    if (e.scanner) j["scanner"] = e.scanner->value();
    if (e.hd) j["hd"] = e.hd->value();
    if (e.record) j["record"] = *e.record;
    if (e.trace_id) j["trace_id"] = *e.trace_id;
    if (e.group) j["group"] = *e.group;
    if (e.address) j["address"] = *e.address;
    if (e.digest) j["digest"] = *e.digest;
    if (e.day) j["day"] = *e.day;
    if (e.code) j["code"] = *e.code;
    if (!e.members.empty()) {
      auto& m = j["members"] = nlohmann::json::array();
      for (const UserId& u : e.members) m.push_back(u.value());
    }
    if (!e.records.empty()) j["records"] = e.records;
    if (!e.authorized_records.empty()) {
      j["authorized_records"] = e.authorized_records;
    }
    if (!e.days.empty()) j["days"] = e.days;
    if (!e.detail.empty()) j["detail"] = e.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

absl::StatusOr<std::vector<TrueVisit>> TrueVisits(const GroundTruthLog& log,
                                                  const UserId& user) {
  if (!log.IsRegistered(user)) {
    return Error(ErrorKind::kUnknownUser, user.value());
  }
  std::vector<TrueVisit> visits;
  std::map<RecordId, std::size_t> by_record;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kCheckin && e.user == user && e.record &&
        e.venue) {
      by_record[*e.record] = visits.size();
      visits.push_back({*e.record, *e.venue, e.time, std::nullopt});
    } else if (e.kind == EventKind::kCheckout && e.user == user && e.record) {
      auto it = by_record.find(*e.record);
      if (it != by_record.end()) visits[it->second].checkout = e.time;
    }
  }
  std::stable_sort(visits.begin(), visits.end(),
                   [](const TrueVisit& a, const TrueVisit& b) {
                     return a.checkin < b.checkin;
                   });
  return visits;
}

absl::StatusOr<std::set<UserId>> TrueCotenants(const GroundTruthLog& log,
                                               const UserId& user,
                                               const TimeWindow& window,
                                               const StayModel& stay) {
  if (!log.IsRegistered(user)) {
    return Error(ErrorKind::kUnknownUser, user.value());
  }
  struct Interval {
    UserId user;
    SimTime begin;
    SimTime end;
  };
  // Visit intervals per venue, with checkouts folded in.
  std::map<RecordId, std::pair<VenueId, Interval>> visits;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kCheckin && e.user && e.record && e.venue) {
      visits.emplace(*e.record,
                     std::make_pair(*e.venue, Interval{*e.user, e.time, -1}));
    } else if (e.kind == EventKind::kCheckout && e.record) {
      auto it = visits.find(*e.record);
      if (it != visits.end()) it->second.second.end = e.time;
    }
  }
  std::map<VenueId, std::vector<Interval>> by_venue;
  for (auto& [record, entry] : visits) {
    Interval& iv = entry.second;
    iv.end = stay.EffectiveEnd(
        iv.begin, iv.end >= 0 ? std::optional<SimTime>(iv.end) : std::nullopt);
    by_venue[entry.first].push_back(iv);
  }
  std::set<UserId> out;
  for (const auto& [venue, intervals] : by_venue) {
    for (const Interval& mine : intervals) {
      if (mine.user != user || !window.Contains(mine.begin)) continue;
      for (const Interval& other : intervals) {
        if (other.user == user) continue;
        if (VisitsOverlap(mine.begin, mine.end, other.begin, other.end,
                          stay.overlap_slack)) {
          out.insert(other.user);
        }
      }
    }
  }
  return out;
}

}  // namespace lucasim
