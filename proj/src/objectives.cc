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


#include "lucasim/objectives.h"

#include <array>
#include <map>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace lucasim {
namespace {

constexpr std::array<std::pair<Objective, std::string_view>, 6> kNames = {{
    {Objective::kO1, "O1"},
    {Objective::kO2, "O2"},
    {Objective::kO3, "O3"},
    {Objective::kO4, "O4"},
    {Objective::kO5, "O5"},
    {Objective::kO6, "O6"},
}};

ObjectiveVerdict Holds(Objective o) { return {.objective = o, .holds = true}; }

ObjectiveVerdict Violated(Objective o, std::string witness) {
  return {.objective = o, .holds = false, .witness = std::move(witness)};
}

// Days each infected guest reported for.
std::map<UserId, std::set<int>> ReportedDays(const GroundTruthLog& log) {
  std::map<UserId, std::set<int>> out;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kReportPositive && e.user) {
      out[*e.user].insert(e.days.begin(), e.days.end());
    }
  }
  return out;
}

std::vector<Attribution> CorrectAttributions(const AdversaryKnowledge& k,
                                             const GroundTruthLog& log) {
  std::vector<Attribution> out;
  for (Attribution& a : Attributions(k)) {
    if (log.UserOfRecord(a.record) == a.user) out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

std::string_view ObjectiveName(Objective o) {
  for (const auto& [obj, name] : kNames) {
    if (obj == o) return name;
  }
  return "O?";
}

std::string_view ObjectiveSummary(Objective o) {
  switch (o) {
    case Objective::kO1:
      return "contact data readable only by the guest app";
    case Objective::kO2:
      return "check-ins not associable with the guest";
    case Objective::kO3:
      return "check-ins not associable with each other";
    case Objective::kO4:
      return "visit history disclosed only with the guest's consent";
    case Objective::kO5:
      return "tracing reveals only the relevant visits";
    case Objective::kO6:
      return "records decrypted only with the venue's consent";
  }
  return "";
}

const std::vector<Objective>& AllObjectives() {
  static const std::vector<Objective> kAll = {Objective::kO1, Objective::kO2,
                                              Objective::kO3, Objective::kO4,
                                              Objective::kO5, Objective::kO6};
  return kAll;
}

ObjectiveVerdict CheckO1(const AdversaryKnowledge& k, const GroundTruthLog& log) {
  const std::set<UserId> infected = log.InfectedUsers();
  for (const auto& [user, contact] : k.decrypted_contacts) {
    if (infected.contains(user)) continue;
    if (log.ContactDigest(user) == Sha256Hex(contact.Serialize())) {
      return Violated(Objective::kO1,
                      absl::StrCat("contact data of ", user.value(), " decrypted"));
    }
  }
  return Holds(Objective::kO1);
}

ObjectiveVerdict CheckO2(const AdversaryKnowledge& k, const GroundTruthLog& log) {
  const std::set<UserId> infected = log.InfectedUsers();
  for (const Attribution& a : CorrectAttributions(k, log)) {
    if (infected.contains(a.user)) continue;
    return Violated(Objective::kO2,
                    absl::StrFormat("record %d attributed to %s (%s)", a.record,
                                    a.user.value(), a.source));
  }
  for (const Cluster& c : k.linked_clusters) {
    if (!c.address || c.records.empty()) continue;
    const std::optional<UserId> owner = log.UserOfRecord(c.records.front());
    if (!owner || infected.contains(*owner)) continue;
    bool pure = true;
    bool address_matches = false;
    for (RecordId r : c.records) {
      const GroundTruthEvent* e = log.CheckinEvent(r);
      if (e == nullptr || e->user != owner) {
        pure = false;
        break;
      }
      if (e->address == c.address) address_matches = true;
    }
    if (pure && address_matches) {
      return Violated(Objective::kO2,
                      absl::StrFormat("%d check-ins tied to address %s of %s",
                                      c.records.size(), *c.address, owner->value()));
    }
  }
  return Holds(Objective::kO2);
}

ObjectiveVerdict CheckO3(const AdversaryKnowledge& k, const GroundTruthLog& log) {
  const std::set<UserId> infected = log.InfectedUsers();
  ObjectiveVerdict v = Holds(Objective::kO3);
  v.metrics = ScoreClusters(k.linked_clusters, log);
  for (const Cluster& c : k.linked_clusters) {
    std::map<UserId, std::vector<RecordId>> by_user;
    for (RecordId r : c.records) {
      if (auto u = log.UserOfRecord(r)) by_user[*u].push_back(r);
    }
    for (const auto& [u, recs] : by_user) {
      if (recs.size() < 2 || infected.contains(u)) continue;
      v.holds = false;
      v.witness = absl::StrFormat("records %d and %d of %s linked (%s)", recs[0],
                                  recs[1], u.value(), c.basis);
      return v;
    }
  }
  return v;
}

ObjectiveVerdict CheckO4(const AdversaryKnowledge& k, const GroundTruthLog& log) {
  const std::set<UserId> infected = log.InfectedUsers();
  std::map<UserId, std::set<RecordId>> history;
  for (const Attribution& a : CorrectAttributions(k, log)) {
    if (!infected.contains(a.user)) history[a.user].insert(a.record);
  }
  for (const auto& [u, recs] : history) {
    if (recs.size() >= 2) {
      return Violated(Objective::kO4,
                      absl::StrFormat("%d visits of %s reconstructed without a report",
                                      recs.size(), u.value()));
    }
  }
  return Holds(Objective::kO4);
}

ObjectiveVerdict CheckO5(const AdversaryKnowledge& k, const GroundTruthLog& log,
                         const StayModel& stay) {
  const std::map<UserId, std::set<int>> reported = ReportedDays(log);
  for (const Attribution& a : CorrectAttributions(k, log)) {
    auto it = reported.find(a.user);
    if (it == reported.end()) continue;
    const GroundTruthEvent* e = log.CheckinEvent(a.record);
    if (e == nullptr || it->second.contains(DayOf(e->time))) continue;
    return Violated(Objective::kO5,
                    absl::StrFormat("record %d of %s on unreported day %d (%s)",
                                    a.record, a.user.value(), DayOf(e->time),
                                    a.source));
  }
  std::map<UserId, std::set<int>> traced_days;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kTraceRequest && e.user) {
      traced_days[*e.user].insert(e.days.begin(), e.days.end());
    }
  }
  for (const auto& [index, contacts] : k.traced_contacts) {
    std::set<UserId> relevant;
    for (int day : traced_days[index]) {
      auto co = TrueCotenants(log, index, TimeWindow::Days(day, day), stay);
      if (co.ok()) relevant.insert(co->begin(), co->end());
    }
    for (const UserId& u : contacts) {
      if (!log.IsRegistered(u) || relevant.contains(u)) continue;
      return Violated(Objective::kO5,
                      absl::StrCat("trace of ", index.value(), " revealed ", u.value(),
                                   ", not a cotenant on the reported days"));
    }
  }
  return Holds(Objective::kO5);
}

ObjectiveVerdict CheckO6(const AdversaryKnowledge& k, const GroundTruthLog& log) {
  std::set<RecordId> authorized;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kVenueDecryption) {
      authorized.insert(e.authorized_records.begin(), e.authorized_records.end());
    }
  }
  for (const auto& [r, inner] : k.stripped_refs) {
    if (authorized.contains(r)) continue;
    const GroundTruthEvent* e = log.CheckinEvent(r);
    if (e == nullptr || e->digest != Sha256Hex(inner.ciphertext)) continue;
    auto via = k.stripped_via.find(r);
    return Violated(
        Objective::kO6,
        absl::StrFormat("record %d unwrapped via %s without a tracing request", r,
                        via == k.stripped_via.end() ? "unknown" : via->second));
  }
  return Holds(Objective::kO6);
}

std::vector<ObjectiveVerdict> CheckAllObjectives(const AdversaryKnowledge& k,
                                                 const GroundTruthLog& log,
                                                 const StayModel& stay) {
  return {CheckO1(k, log), CheckO2(k, log), CheckO3(k, log),
          CheckO4(k, log), CheckO5(k, log, stay), CheckO6(k, log)};
}

Certificate IssueCertificate(const CertificateAuthority& ca,
                             const crypto::PublicKey& subject,
                             std::string_view role) {
  return ca.Issue(subject, role);
}

}  // namespace lucasim
