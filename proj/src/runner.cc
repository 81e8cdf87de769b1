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


#include "lucasim/runner.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <queue>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "lucasim/report.h"
#include "lucasim/status.h"
#include "lucasim/transcript.h"

namespace lucasim {
namespace {

constexpr std::array<const char*, 12> kFirstNames = {
    "Anna", "Ben", "Clara", "David", "Emma", "Felix",
    "Greta", "Hannes", "Ida", "Jonas", "Lena", "Moritz"};
constexpr std::array<const char*, 10> kLastNames = {
    "Schmidt", "Meyer", "Weber", "Wagner", "Becker",
    "Hoffmann", "Koch", "Richter", "Klein", "Wolf"};
constexpr std::array<const char*, 8> kStreets = {
    "Lindenstrasse", "Gartenweg", "Schulstrasse", "Bahnhofstrasse",
    "Waldweg", "Kirchplatz", "Parkallee", "Muehlenweg"};

// Discrete-event queue ordered by (time, insertion order).
class EventQueue {
 public:
  using Action = std::function<absl::Status()>;

  void Push(SimTime t, Action action) {
    queue_.push(Entry{t, next_++, std::move(action)});
  }

  absl::Status RunAll() {
    while (!queue_.empty()) {
      Entry e = queue_.top();
      queue_.pop();
      if (absl::Status s = e.action(); !s.ok()) {
        return Error(ErrorKind::kSimulationError,
                     absl::StrCat("t=", e.time, ": ", s.ToString()));
      }
    }
    return absl::OkStatus();
  }

 private:
  struct Entry {
    SimTime time;
    std::int64_t order;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.order > b.order;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::int64_t next_ = 0;
};

VenueType PickVenueType(const VenuesConfig& v, SimRng& rng) {
  double total = 0;
  for (const auto& [type, w] : v.type_mix) total += w;
  if (total <= 0) return static_cast<VenueType>(rng.Uniform(7));
  double x = rng.UniformDouble() * total;
  for (const auto& [type, w] : v.type_mix) {
    if (x < w) return type;
    x -= w;
  }
  return v.type_mix.rbegin()->first;
}

ContactData MakeContact(int index, SimRng& rng) {
  ContactData c;
  c.name = absl::StrCat(kFirstNames[rng.Uniform(kFirstNames.size())], " ",
                        kLastNames[rng.Uniform(kLastNames.size())]);
  c.address = absl::StrFormat("%s %d, 10%03d Berlin",
                              kStreets[rng.Uniform(kStreets.size())],
                              rng.UniformInt(1, 120), rng.UniformInt(100, 999));
  // The index keeps phone numbers unique.
  c.phone = absl::StrFormat("+49 15%d %07d", rng.UniformInt(1, 9), 1000000 + index);
  return c;
}

// Merges what the attacks established into the passive picture.
void MergeActive(const AdversaryKnowledge& a, AdversaryKnowledge& k) {
  k.recovered_keys.insert(a.recovered_keys.begin(), a.recovered_keys.end());
  k.decrypted_refs.insert(a.decrypted_refs.begin(), a.decrypted_refs.end());
  // The attack that stripped a record knows the path better than the
  // passive view of the server's singly encrypted store.
  for (const auto& [r, ref] : a.stripped_refs) k.stripped_refs.insert_or_assign(r, ref);
  for (const auto& [r, via] : a.stripped_via) k.stripped_via.insert_or_assign(r, via);
  k.decrypted_contacts.insert(a.decrypted_contacts.begin(), a.decrypted_contacts.end());
  k.code_to_user_id.insert(a.code_to_user_id.begin(), a.code_to_user_id.end());
  for (const auto& [user, recs] : a.visit_histories) {
    std::vector<RecordId>& h = k.visit_histories[user];
    h.insert(h.end(), recs.begin(), recs.end());
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
  }
  k.attack_outcomes = a.attack_outcomes;
}

class Driver {
 public:
  explicit Driver(const ScenarioConfig& config, RunArtifacts& run)
      : config_(config),
        run_(run),
        root_(config.seed),
        plan_(root_.Fork(100)),
        adversary_(*run.sim, root_.Fork(200)) {}

  absl::Status Run();

 private:
  bool Active() const { return config_.adversary.posture == Posture::kActive; }
  void ScheduleArms(ArmPhase phase, int day, SimTime t);
  absl::Status Setup();
  void PlanDay(int day);
  void PlanGroup(std::int64_t group, const std::vector<int>& members, int venue,
                 SimTime arrival, SimTime stay);
  void PlanVisits(int guest, int day, SimTime cutoff);
  void PlanReports(int day);
  SimTime TravelSeconds(int from, int to) const;

  Simulation& sim() { return *run_.sim; }

  const ScenarioConfig& config_;
  RunArtifacts& run_;
  SimRng root_;
  SimRng plan_;
  ActiveAdversary adversary_;
  AdversaryKnowledge active_;
  EventQueue queue_;
  std::vector<VenueId> venue_ids_;
  std::vector<HealthDeptId> hd_ids_;
  std::map<int, std::string> arm_failures_;
  std::int64_t next_group_ = 0;
};

void Driver::ScheduleArms(ArmPhase phase, int day, SimTime t) {
  if (!Active()) return;
  for (const AttackSpec& spec : config_.adversary.attacks) {
    if (ArmPhaseOf(spec.type) != phase) continue;
    if (phase != ArmPhase::kBeforeSetup && spec.day != day) continue;
    queue_.Push(t, [this, &spec, t]() {
      if (absl::Status s = adversary_.Arm(spec, t); !s.ok()) {
        arm_failures_[spec.index] = std::string(s.message());
      }
      return absl::OkStatus();
    });
  }
}

absl::Status Driver::Setup() {
  for (int i = 0; i < config_.health_departments; ++i) {
    LUCASIM_ASSIGN_OR_RETURN(HealthDeptId id, sim().RegisterHealthDept(0));
    hd_ids_.push_back(id);
  }
  std::set<VenueId> need_qr;
  if (Active()) {
    for (const AttackSpec& spec : config_.adversary.attacks) {
      if (spec.type == AttackType::kSubstituteVenueKey && spec.venue) {
        need_qr.insert(*spec.venue);
      }
    }
  }
  const BoundingBox& box = config_.venues.bbox;
  for (int i = 0; i < config_.venues.count; ++i) {
    VenueInfo info;
    info.name = absl::StrFormat("Venue %d", i);
    info.owner_contact = absl::StrFormat("owner%04d@venues.example", i);
    info.location = {box.lat_min + plan_.UniformDouble() * (box.lat_max - box.lat_min),
                     box.lon_min + plan_.UniformDouble() * (box.lon_max - box.lon_min)};
    info.type = PickVenueType(config_.venues, plan_);
    info.scanner_count = static_cast<int>(
        plan_.UniformInt(config_.venues.scanners.min, config_.venues.scanners.max));
    info.self_checkin_qr = plan_.Bernoulli(config_.venues.self_checkin_fraction) ||
                           need_qr.contains(VenueId(absl::StrFormat("v-%04d", i)));
    LUCASIM_ASSIGN_OR_RETURN(VenueId id, sim().RegisterVenue(info, 0));
    venue_ids_.push_back(id);
  }
  for (int i = 0; i < config_.population.guests; ++i) {
    const int g = sim().AddGuest(MakeContact(i, plan_), 0);
    LUCASIM_RETURN_IF_ERROR(sim().RegisterUser(g, 0).status());
  }
  return absl::OkStatus();
}

SimTime Driver::TravelSeconds(int from, int to) const {
  const auto& venues = run_.sim->server().venues;
  const double km = DistanceKm(venues.at(venue_ids_[from]).location,
                               venues.at(venue_ids_[to]).location);
  const double kmh = config_.population.motorized ? config_.linkage.motorized_kmh
                                                  : config_.linkage.walking_kmh;
  return static_cast<SimTime>(std::ceil(km / kmh * 3600.0));
}

void Driver::PlanGroup(std::int64_t group, const std::vector<int>& members,
                       int venue, SimTime arrival, SimTime stay) {
  const VenueActor& v = sim().venue(venue_ids_[venue]);
  const ScannerId scanner = v.scanners[plan_.Uniform(v.scanners.size())];
  const VenueId vid = venue_ids_[venue];
  queue_.Push(arrival, [this, group, members, vid, arrival]() {
    return sim().RecordGroupArrival(group, members, vid, arrival);
  });
  SimTime t = arrival;
  for (int m : members) {
    queue_.Push(t, [this, m, scanner, t, group]() {
      return sim().CheckInScanner(m, scanner, t, group).status();
    });
    const SimTime out = arrival + stay + plan_.UniformInt(0, 60);
    queue_.Push(out, [this, m, out]() { return sim().CheckOut(m, out); });
    t += plan_.UniformInt(0, 4);
  }
}

void Driver::PlanVisits(int guest, int day, SimTime cutoff) {
  const PopulationConfig& p = config_.population;
  const SimTime base = static_cast<SimTime>(day) * kSecondsPerDay;
  const int n = static_cast<int>(plan_.UniformInt(p.visits_per_day.min, p.visits_per_day.max));
  SimTime t = base + plan_.UniformInt(kFirstArrival, 12 * 3600);
  SimTime prev_end = 0;
  int prev_venue = -1;
  for (int i = 0; i < n; ++i) {
    const int venue = static_cast<int>(plan_.Uniform(venue_ids_.size()));
    if (prev_venue >= 0) {
      t = prev_end + TravelSeconds(prev_venue, venue) + plan_.UniformInt(600, 3600);
    }
    if (t > base + kLastArrival) break;
    SimTime stay = plan_.UniformInt(900, 3 * 3600);
    if (t + stay > base + cutoff) {
      stay = base + cutoff - t;
      if (stay < 900) break;
    }
    const VenueActor& v = sim().venue(venue_ids_[venue]);
    const bool self = v.self_checkin_qr && plan_.Bernoulli(p.self_checkin_fraction);
    const ScannerId scanner = v.scanners[plan_.Uniform(v.scanners.size())];
    const bool checkout = plan_.Bernoulli(p.checkout_probability);
    const VenueId vid = venue_ids_[venue];
    if (self) {
      queue_.Push(t, [this, guest, vid, t]() {
        return sim().CheckInSelf(guest, vid, t).status();
      });
    } else {
      queue_.Push(t, [this, guest, scanner, t]() {
        return sim().CheckInScanner(guest, scanner, t).status();
      });
    }
    const SimTime end = t + stay;
    if (checkout) {
      queue_.Push(end, [this, guest, end]() { return sim().CheckOut(guest, end); });
    }
    prev_end = end;
    prev_venue = venue;
  }
}

void Driver::PlanDay(int day) {
  const SimTime base = static_cast<SimTime>(day) * kSecondsPerDay;
  const PopulationConfig& p = config_.population;

  ScheduleArms(ArmPhase::kBeforeRotation, day, base + 30);
  queue_.Push(base + kRotationTime, [this, day, base]() {
    const HealthDeptId& first = hd_ids_[plan_.Uniform(hd_ids_.size())];
    return sim().RotateDailyMasterKey(first, day, base + kRotationTime).status();
  });
  ScheduleArms(ArmPhase::kAfterRotation, day, base + 120);

  // Network churn.
  const double rate = config_.network.reconnects_per_day;
  for (int g = 0; g < p.guests && rate > 0; ++g) {
    int count = static_cast<int>(rate);
    if (plan_.Bernoulli(rate - count)) ++count;
    for (int i = 0; i < count; ++i) {
      const SimTime t = base + plan_.UniformInt(6 * 3600, 21 * 3600);
      queue_.Push(t, [this, g, t]() { return sim().Reconnect(g, t); });
    }
  }

  // Groups first so members' own visits can end before the gathering.
  std::set<int> in_group;
  for (const ScriptedGroup& sg : p.scripted_groups) {
    if (sg.day != day) continue;
    in_group.insert(sg.members.begin(), sg.members.end());
    PlanGroup(next_group_++, sg.members, sg.venue, base + sg.arrival, sg.stay);
  }
  for (int i = 0; i < p.groups_per_day; ++i) {
    const int size = static_cast<int>(plan_.UniformInt(p.group_size.min, p.group_size.max));
    std::vector<int> members;
    for (int tries = 0; tries < 20 * size && static_cast<int>(members.size()) < size;
         ++tries) {
      const int g = static_cast<int>(plan_.Uniform(p.guests));
      if (!in_group.contains(g)) {
        in_group.insert(g);
        members.push_back(g);
      }
    }
    if (members.size() < 2) break;
    const int venue = static_cast<int>(plan_.Uniform(venue_ids_.size()));
    const SimTime arrival = base + plan_.UniformInt(kGroupArrivalStart, kLastArrival);
    PlanGroup(next_group_++, members, venue, arrival,
              plan_.UniformInt(1800, 2 * 3600 + 2700));
  }
  for (int g = 0; g < p.guests; ++g) {
    PlanVisits(g, day, in_group.contains(g) ? kGroupMemberVisitCutoff : 21 * 3600);
  }

  if (day == config_.ReportDay()) PlanReports(day);
  ScheduleArms(ArmPhase::kBeforeTraces, day, base + kTraceTime - 60);
}

void Driver::PlanReports(int day) {
  const SimTime base = static_cast<SimTime>(day) * kSecondsPerDay;
  std::vector<int> pool(config_.population.guests);
  for (int i = 0; i < config_.population.guests; ++i) pool[i] = i;
  std::vector<int> days;
  for (int d = std::max(0, day - config_.positives.lookback_days); d <= day; ++d) {
    days.push_back(d);
  }
  for (int i = 0; i < config_.positives.count; ++i) {
    const std::size_t pick = i + plan_.Uniform(pool.size() - i);
    std::swap(pool[i], pool[pick]);
    const int guest = pool[i];
    const std::size_t slot = static_cast<std::size_t>(i);
    const SimTime report_at = base + kReportTime + 60 * i;
    queue_.Push(report_at, [this, guest, days, report_at]() {
      LUCASIM_ASSIGN_OR_RETURN(crypto::VerificationCode code,
                               sim().ReportPositive(guest, days, report_at));
      run_.positives.push_back(PositiveCase{.guest = guest,
                                            .user = sim().guest(guest).user_id(),
                                            .days = days,
                                            .code = code});
      return absl::OkStatus();
    });
    if (!config_.tracing.enabled) continue;
    const HealthDeptId hd = hd_ids_[plan_.Uniform(hd_ids_.size())];
    const SimTime trace_at = base + kTraceTime + kTraceSpacing * i;
    queue_.Push(trace_at, [this, slot, hd, trace_at]() {
      LUCASIM_ASSIGN_OR_RETURN(
          TraceResult result,
          sim().Trace(hd, run_.positives.at(slot).code, trace_at));
      run_.traces.push_back(std::move(result));
      return absl::OkStatus();
    });
  }
}

absl::Status Driver::Run() {
  ScheduleArms(ArmPhase::kBeforeSetup, 0, 0);
  queue_.Push(0, [this]() { return Setup(); });
  // Day plans need the registered venues, so each is laid out at midnight.
  for (int day = 0; day < config_.duration_days; ++day) {
    queue_.Push(static_cast<SimTime>(day) * kSecondsPerDay, [this, day]() {
      PlanDay(day);
      return absl::OkStatus();
    });
  }
  if (Active()) {
    const SimTime end = static_cast<SimTime>(config_.duration_days - 1) * kSecondsPerDay +
                        kAttackTime;
    SimTime t = end;
    for (const AttackSpec& spec : config_.adversary.attacks) {
      queue_.Push(t, [this, &spec, t]() {
        auto fail = [&](std::string reason) {
          active_.attack_outcomes.push_back(AttackOutcome{
              .attack_id = AttackIdOf(spec), .type = spec.type,
              .succeeded = false, .failure_reason = std::move(reason)});
        };
        if (auto it = arm_failures_.find(spec.index); it != arm_failures_.end()) {
          fail(absl::StrCat("not armed: ", it->second));
          return absl::OkStatus();
        }
        auto out = adversary_.Execute(spec, t, active_);
        if (!out.ok()) fail(std::string(out.status().message()));
        return absl::OkStatus();
      });
      t += 30;
    }
  }
  LUCASIM_RETURN_IF_ERROR(queue_.RunAll());

  AdversaryKnowledge k =
      RunPassiveAnalysis(sim().server(), config_.linkage, config_.analysis);
  MergeActive(active_, k);
  PropagateClusterAttributions(k);
  run_.knowledge = std::move(k);
  return absl::OkStatus();
}

SimulationOptions OptionsFor(const ScenarioConfig& c) {
  SimulationOptions o;
  o.seed = c.seed;
  o.mitigations = c.mitigations;
  o.network = c.network;
  o.stay.max_stay = c.tracing.max_stay;
  o.stay.overlap_slack = c.tracing.overlap_slack;
  o.include_index_case = c.tracing.include_index_case;
  o.max_checkins_per_day = c.tracing.max_checkins_per_day;
  for (int v : c.tracing.unavailable_venues) {
    o.unavailable_venues.insert(VenueId(absl::StrFormat("v-%04d", v)));
  }
  return o;
}

absl::Status WriteFile(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  out.close();
  if (!out) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("cannot write ", path.string()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<RunArtifacts> RunScenario(const ScenarioConfig& config) {
  RunArtifacts run;
  run.config = config;
  run.sim = std::make_unique<Simulation>(OptionsFor(config));
  {
    Driver driver(run.config, run);
    LUCASIM_RETURN_IF_ERROR(driver.Run());
  }
  const GroundTruthLog& log = run.sim->log();
  run.linkage_metrics = ScoreClusters(run.knowledge.linked_clusters, log);
  run.group_metrics = ScoreGroups(run.knowledge.group_hypotheses, log);
  StayModel stay;
  stay.max_stay = config.tracing.max_stay;
  stay.overlap_slack = config.tracing.overlap_slack;
  run.verdicts = CheckAllObjectives(run.knowledge, log, stay);
  run.secret_hits = ScanRun(*run.sim);
  return run;
}

absl::Status WriteArtifacts(const RunArtifacts& run,
                            const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("cannot create ", out_dir.string()));
  }
  LUCASIM_RETURN_IF_ERROR(
      WriteFile(out_dir / "report.json", BuildReport(run).dump(2) + "\n"));
  LUCASIM_RETURN_IF_ERROR(
      WriteFile(out_dir / "events.ndjson", run.sim->log().ExportNdjson()));
  LUCASIM_RETURN_IF_ERROR(
      WriteFile(out_dir / "transcript.ndjson", run.sim->transcript().ExportNdjson()));
  return WriteFile(out_dir / "observations.ndjson",
                   ExportObservationsNdjson(run.sim->server().observations));
}

}  // namespace lucasim
