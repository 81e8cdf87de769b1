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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "lucasim/adversary.h"

namespace lucasim {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t Find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::int64_t Choose2(std::int64_t n) { return n * (n - 1) / 2; }

PairwiseMetrics Finish(PairwiseMetrics m) {
  m.precision = m.hypothesized_pairs == 0
                    ? 1.0
                    : static_cast<double>(m.correct_pairs) / m.hypothesized_pairs;
  m.recall = m.true_pairs == 0
                 ? 1.0
                 : static_cast<double>(m.correct_pairs) / m.true_pairs;
  return m;
}

// Guest-side observations of one record, in arrival order.
struct RecordView {
  RecordId id = 0;
  SimTime checkin = 0;
  std::optional<SimTime> checkout;
  GeoPoint location;
  std::vector<const NetworkObservation*> obs;
};

std::vector<RecordView> BuildViews(const BackendServer& server) {
  std::unordered_map<crypto::TraceId, std::vector<const NetworkObservation*>,
                     crypto::TraceIdHash>
      by_trace;
  for (const NetworkObservation& o : server.observations) {
    if (o.endpoint == Endpoint::kGuestApp && o.trace_id) {
      by_trace[*o.trace_id].push_back(&o);
    }
  }
  std::vector<RecordView> views;
  views.reserve(server.checkins.size());
  for (const CheckInRecord& r : server.checkins) {
    RecordView v{.id = r.id, .checkin = r.checkin_time, .checkout = r.checkout_time};
    if (auto venue = server.VenueOfRecord(r.id)) {
      v.location = server.venues.at(*venue).location;
    }
    if (auto it = by_trace.find(r.trace_id); it != by_trace.end()) v.obs = it->second;
    views.push_back(std::move(v));
  }
  return views;
}

struct NatChain {
  std::size_t root = 0;
  int device_type = 0;
  int last_port = 0;
  SimTime last_time = 0;
  SimTime last_checkin = 0;
  std::optional<SimTime> last_checkout;
  GeoPoint last_location;
  double score_sum = 0;
  int joins = 0;
};

}  // namespace

std::vector<Attribution> Attributions(const AdversaryKnowledge& k) {
  std::vector<Attribution> out;
  for (const auto& [r, u] : k.decrypted_refs) {
    out.push_back({.record = r, .user = u, .source = "decrypted"});
  }
  for (const auto& [u, recs] : k.visit_histories) {
    for (RecordId r : recs) out.push_back({.record = r, .user = u, .source = "history"});
  }
  for (const auto& [c, u] : k.cluster_to_user_id) {
    if (c < 0 || c >= static_cast<int>(k.linked_clusters.size())) continue;
    for (RecordId r : k.linked_clusters[c].records) {
      out.push_back({.record = r, .user = u, .source = "cluster"});
    }
  }
  return out;
}

std::vector<Cluster> LinkCheckinsByMetadata(const BackendServer& server,
                                            const LinkageConfig& config) {
  const std::vector<RecordView> views = BuildViews(server);
  UnionFind uf(views.size());
  std::vector<double> join_score(views.size(), 0);
  std::vector<int> join_count(views.size(), 0);
  std::vector<std::string> basis(views.size(), "singleton");
  std::vector<std::optional<std::string>> v6_address(views.size());

  // Exact address matches.
  if (config.use_ipv6) {
    std::map<std::string, std::size_t> first_with_address;
    for (std::size_t i = 0; i < views.size(); ++i) {
      for (const NetworkObservation* o : views[i].obs) {
        if (o->ip_version != IpVersion::kV6) continue;
        basis[i] = "ipv6";
        if (!v6_address[i]) v6_address[i] = o->src_address;
        auto [it, inserted] = first_with_address.emplace(o->src_address, i);
        if (!inserted) uf.Union(i, it->second);
      }
    }
  }

  // Port-cursor continuity behind a shared IPv4 address.
  if (config.use_nat) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < views.size(); ++i) {
      if (!views[i].obs.empty() && views[i].obs.front()->ip_version == IpVersion::kV4) {
        order.push_back(i);
      }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return views[a].checkin < views[b].checkin;
    });
    const double speed =
        config.motorized ? config.motorized_kmh : config.walking_kmh;
    std::map<std::string, std::vector<NatChain>> chains;
    for (std::size_t i : order) {
      const RecordView& v = views[i];
      const NetworkObservation* first = v.obs.front();
      int min_port = first->src_port;
      int max_port = first->src_port;
      SimTime last_time = first->timestamp;
      for (const NetworkObservation* o : v.obs) {
        if (o->src_address != first->src_address) continue;
        min_port = std::min(min_port, o->src_port);
        max_port = std::max(max_port, o->src_port);
        last_time = std::max(last_time, o->timestamp);
      }
      std::vector<NatChain>& pool = chains[first->src_address];
      NatChain* best = nullptr;
      int best_gap = 0;
      double best_allowance = 1;
      for (NatChain& c : pool) {
        if (c.device_type != first->device_type) continue;
        if (min_port <= c.last_port || first->timestamp < c.last_time) continue;
        const int gap = min_port - c.last_port;
        const double hours = (first->timestamp - c.last_time) / 3600.0;
        const double allowance =
            config.port_gap_base + std::ceil(config.port_gap_per_hour * hours);
        if (gap > allowance) continue;
        if (config.spatiotemporal) {
          const SimTime prev_end = c.last_checkout.value_or(c.last_checkin);
          const double travel_s =
              DistanceKm(c.last_location, v.location) / speed * 3600.0;
          if (static_cast<double>(v.checkin) < prev_end + travel_s) continue;
        }
        if (best == nullptr || gap < best_gap) {
          best = &c;
          best_gap = gap;
          best_allowance = allowance;
        }
      }
      if (best == nullptr) {
        pool.push_back(NatChain{.root = i, .device_type = first->device_type});
        best = &pool.back();
      } else {
        uf.Union(i, best->root);
        best->score_sum += 1.0 - best_gap / (best_allowance + 1.0);
        best->joins += 1;
        join_score[best->root] = best->score_sum;
        join_count[best->root] = best->joins;
      }
      if (basis[i] == "singleton") basis[i] = "nat";
      best->last_port = max_port;
      best->last_time = last_time;
      best->last_checkin = v.checkin;
      best->last_checkout = v.checkout;
      best->last_location = v.location;
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < views.size(); ++i) members[uf.Find(i)].push_back(i);
  std::vector<Cluster> out;
  for (const auto& [root, idx] : members) {
    Cluster c;
    for (std::size_t i : idx) c.records.push_back(views[i].id);
    std::sort(c.records.begin(), c.records.end());
    c.basis = basis[root];
    if (c.records.size() == 1 && c.basis == "nat") c.basis = "singleton";
    if (c.basis == "ipv6") {
      c.address = v6_address[root];
      c.score = 1.0;
    } else {
      double sum = 0;
      int joins = 0;
      for (std::size_t i : idx) {
        sum += join_score[i];
        joins += join_count[i];
      }
      c.score = joins == 0 ? 1.0 : sum / joins;
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    return a.records.front() < b.records.front();
  });
  return out;
}

PairwiseMetrics ScorePartition(const std::vector<std::vector<RecordId>>& groups,
                               const GroundTruthLog& log) {
  PairwiseMetrics m;
  std::map<UserId, std::int64_t> per_user_total;
  std::set<RecordId> seen;
  for (const auto& g : groups) {
    m.hypothesized_pairs += Choose2(static_cast<std::int64_t>(g.size()));
    std::map<UserId, std::int64_t> per_user;
    for (RecordId r : g) {
      if (!seen.insert(r).second) continue;
      if (auto u = log.UserOfRecord(r)) {
        ++per_user[*u];
        ++per_user_total[*u];
      }
    }
    for (const auto& [u, n] : per_user) m.correct_pairs += Choose2(n);
  }
  for (const auto& [u, n] : per_user_total) m.true_pairs += Choose2(n);
  return Finish(m);
}

PairwiseMetrics ScoreClusters(const std::vector<Cluster>& clusters,
                              const GroundTruthLog& log) {
  std::vector<std::vector<RecordId>> groups;
  groups.reserve(clusters.size());
  for (const Cluster& c : clusters) groups.push_back(c.records);
  return ScorePartition(groups, log);
}

std::vector<std::vector<RecordId>> LinkGroups(const BackendServer& server,
                                              const LinkageConfig& config) {
  std::map<ScannerId, std::vector<const CheckInRecord*>> by_scanner;
  for (const CheckInRecord& r : server.checkins) {
    by_scanner[r.scanner_id].push_back(&r);
  }
  UnionFind uf(server.checkins.size());
  std::vector<bool> linked(server.checkins.size(), false);
  for (auto& [scanner, recs] : by_scanner) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const CheckInRecord* a, const CheckInRecord* b) {
                       return a->checkin_time < b->checkin_time;
                     });
    for (std::size_t i = 0; i < recs.size(); ++i) {
      for (std::size_t j = i + 1; j < recs.size(); ++j) {
        if (recs[j]->checkin_time - recs[i]->checkin_time >
            config.group_checkin_window) {
          break;
        }
        if (!recs[i]->checkout_time || !recs[j]->checkout_time) continue;
        if (std::llabs(*recs[i]->checkout_time - *recs[j]->checkout_time) >
            config.group_checkout_window) {
          continue;
        }
        uf.Union(recs[i]->id, recs[j]->id);
        linked[recs[i]->id] = linked[recs[j]->id] = true;
      }
    }
  }
  std::map<std::size_t, std::vector<RecordId>> comps;
  for (std::size_t i = 0; i < server.checkins.size(); ++i) {
    if (linked[i]) comps[uf.Find(i)].push_back(static_cast<RecordId>(i));
  }
  std::vector<std::vector<RecordId>> out;
  for (auto& [root, recs] : comps) {
    if (recs.size() >= 2) out.push_back(std::move(recs));
  }
  return out;
}

PairwiseMetrics ScoreGroups(const std::vector<std::vector<RecordId>>& groups,
                            const GroundTruthLog& log) {
  PairwiseMetrics m;
  std::map<std::int64_t, std::int64_t> tag_size;
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == EventKind::kCheckin && e.group) ++tag_size[*e.group];
  }
  for (const auto& [tag, n] : tag_size) m.true_pairs += Choose2(n);
  for (const auto& g : groups) {
    m.hypothesized_pairs += Choose2(static_cast<std::int64_t>(g.size()));
    std::map<std::int64_t, std::int64_t> per_tag;
    for (RecordId r : g) {
      const GroundTruthEvent* e = log.CheckinEvent(r);
      if (e != nullptr && e->group) ++per_tag[*e->group];
    }
    for (const auto& [tag, n] : per_tag) m.correct_pairs += Choose2(n);
  }
  return Finish(m);
}

std::vector<std::pair<int, int>> GroupRelationships(
    const std::vector<std::vector<RecordId>>& groups,
    const std::vector<Cluster>& clusters) {
  std::map<RecordId, int> cluster_of;
  for (int c = 0; c < static_cast<int>(clusters.size()); ++c) {
    for (RecordId r : clusters[c].records) cluster_of[r] = c;
  }
  std::set<std::pair<int, int>> edges;
  for (const auto& g : groups) {
    std::set<int> cs;
    for (RecordId r : g) {
      if (auto it = cluster_of.find(r); it != cluster_of.end()) cs.insert(it->second);
    }
    for (auto a = cs.begin(); a != cs.end(); ++a) {
      for (auto b = std::next(a); b != cs.end(); ++b) edges.emplace(*a, *b);
    }
  }
  return {edges.begin(), edges.end()};
}

std::map<VenueId, OccupancySeries> VenueOccupancyProfile(
    const BackendServer& server) {
  std::map<VenueId, std::map<SimTime, int>> deltas;
  for (const auto& [id, v] : server.venues) deltas[id];
  for (const CheckInRecord& r : server.checkins) {
    const std::optional<VenueId> venue = server.VenueOfRecord(r.id);
    if (!venue) continue;
    deltas[*venue][r.checkin_time] += 1;
    if (r.checkout_time) deltas[*venue][*r.checkout_time] -= 1;
  }
  std::map<VenueId, OccupancySeries> out;
  for (const auto& [venue, steps] : deltas) {
    OccupancySeries series = {{0, 0}};
    int count = 0;
    for (const auto& [t, d] : steps) {
      count += d;
      if (series.back().time == t) {
        series.back().count = count;
      } else {
        series.push_back({t, count});
      }
    }
    out[venue] = std::move(series);
  }
  return out;
}

std::vector<VenueRisk> VenueRiskRank(const BackendServer& server) {
  std::map<VenueId, int> counts;
  for (const TraceCase& tc : server.traces) {
    for (RecordId r : tc.index_records) {
      if (auto v = server.VenueOfRecord(r)) ++counts[*v];
    }
  }
  std::vector<VenueRisk> out;
  for (const auto& [v, n] : counts) out.push_back({v, n});
  std::stable_sort(out.begin(), out.end(), [](const VenueRisk& a, const VenueRisk& b) {
    return a.positive_visits > b.positive_visits;
  });
  return out;
}

std::map<std::string, UserId> CorrelateTraceRequests(const BackendServer& server,
                                                     SimTime window) {
  std::map<std::string, UserId> out;
  const std::vector<ServerRequest>& reqs = server.requests;
  for (std::size_t i = 0; i < reqs.size(); ++i) {
    const ServerRequest& up = reqs[i];
    if (up.kind != "fetch_upload" || !up.code) continue;
    for (std::size_t j = i + 1; j < reqs.size(); ++j) {
      const ServerRequest& next = reqs[j];
      if (next.time > up.time + window) break;
      if (next.requester != up.requester) continue;
      if (next.kind == "fetch_upload") break;
      if (next.kind == "fetch_contact" && next.user_ids.size() == 1) {
        out[*up.code] = next.user_ids.front();
        break;
      }
    }
  }
  return out;
}

std::map<std::string, std::string> CodeToAddress(const BackendServer& server) {
  std::map<std::string, std::string> out;
  for (const auto& [code, upload] : server.uploads) {
    if (upload.observation >= 0 &&
        upload.observation < static_cast<std::int64_t>(server.observations.size())) {
      out[code] = server.observations[upload.observation].src_address;
    }
  }
  return out;
}

void ObserveTraceLeakage(const BackendServer& server, AdversaryKnowledge& k) {
  for (const TraceCase& tc : server.traces) {
    std::vector<RecordId>& history = k.visit_histories[tc.index_user];
    history.insert(history.end(), tc.index_records.begin(), tc.index_records.end());
    std::sort(history.begin(), history.end());
    history.erase(std::unique(history.begin(), history.end()), history.end());
    k.traced_contacts[tc.index_user].insert(tc.contact_user_ids.begin(),
                                            tc.contact_user_ids.end());
    // A single requested record and a single fetched contact pin each other.
    std::vector<RecordId> requested;
    for (const auto& [venue, recs] : tc.relevant) {
      requested.insert(requested.end(), recs.begin(), recs.end());
    }
    if (requested.size() == 1 && tc.contact_user_ids.size() == 1) {
      k.visit_histories[tc.contact_user_ids.front()].push_back(requested.front());
    }
  }
  for (const auto& [r, ref] : server.singly_encrypted) {
    if (k.stripped_refs.emplace(r, ref).second) k.stripped_via[r] = "trace";
  }
  for (const auto& [code, user] : k.code_to_user_id) {
    if (auto a = k.code_to_address.find(code); a != k.code_to_address.end()) {
      k.address_to_user_id[a->second] = user;
    }
  }
}

void PropagateClusterAttributions(AdversaryKnowledge& k) {
  std::map<RecordId, std::set<UserId>> claims;
  for (const auto& [r, u] : k.decrypted_refs) claims[r].insert(u);
  for (const auto& [u, recs] : k.visit_histories) {
    for (RecordId r : recs) claims[r].insert(u);
  }
  k.cluster_to_user_id.clear();
  for (int c = 0; c < static_cast<int>(k.linked_clusters.size()); ++c) {
    std::set<UserId> users;
    for (RecordId r : k.linked_clusters[c].records) {
      if (auto it = claims.find(r); it != claims.end()) {
        users.insert(it->second.begin(), it->second.end());
      }
    }
    if (users.size() == 1) k.cluster_to_user_id[c] = *users.begin();
  }
}

AdversaryKnowledge RunPassiveAnalysis(const BackendServer& server,
                                      const LinkageConfig& config,
                                      const AnalysisToggles& toggles) {
  AdversaryKnowledge k;
  if (toggles.linkage) k.linked_clusters = LinkCheckinsByMetadata(server, config);
  if (toggles.groups) {
    k.group_hypotheses = LinkGroups(server, config);
    k.relationships = GroupRelationships(k.group_hypotheses, k.linked_clusters);
  }
  if (toggles.occupancy) k.venue_occupancy = VenueOccupancyProfile(server);
  if (toggles.risk_rank) k.venue_risk = VenueRiskRank(server);
  if (toggles.correlate) {
    k.code_to_address = CodeToAddress(server);
    k.code_to_user_id = CorrelateTraceRequests(server, config.correlation_window);
  }
  if (toggles.trace_leakage) ObserveTraceLeakage(server, k);
  PropagateClusterAttributions(k);
  return k;
}

}  // namespace lucasim
