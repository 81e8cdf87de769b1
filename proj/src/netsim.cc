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


#include "lucasim/netsim.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"
#include "lucasim/status.h"

namespace lucasim {

std::string_view MessageKindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kCheckinPoll:
      return "checkin_poll";
    case MessageKind::kCheckout:
      return "checkout";
    case MessageKind::kPositiveUpload:
      return "positive_upload";
    case MessageKind::kOther:
      return "other";
  }
  return "other";
}

std::string_view EndpointName(Endpoint endpoint) {
  switch (endpoint) {
    case Endpoint::kGuestApp:
      return "guest_app";
    case Endpoint::kVenue:
      return "venue";
    case Endpoint::kHealthDept:
      return "health_dept";
  }
  return "unknown";
}

NetworkModel::NetworkModel(NetworkConfig config, SimRng rng)
    : config_(std::move(config)), rng_(rng) {}

int NetworkModel::OpenGatewayCount(int carrier) const {
  return static_cast<int>(std::count_if(
      gateways_.begin(), gateways_.end(), [carrier](const Gateway& g) {
        return g.carrier == carrier && g.occupancy < g.luca_capacity;
      }));
}

int NetworkModel::PickGateway(int carrier) {
  std::vector<int> open;
  for (int i = 0; i < static_cast<int>(gateways_.size()); ++i) {
    const Gateway& g = gateways_[i];
    if (g.carrier == carrier && g.occupancy < g.luca_capacity) open.push_back(i);
  }
  while (static_cast<int>(open.size()) < std::max(1, config_.min_open_gateways)) {
    Gateway g;
    g.carrier = carrier;
    const int index = static_cast<int>(gateways_.size());
    g.address = absl::StrFormat("100.%d.%d.%d", 64 + carrier, index / 256,
                                index % 256);
    g.pool_size = static_cast<int>(
        rng_.UniformInt(config_.nat_pool_min, config_.nat_pool_max));
    g.luca_capacity = std::clamp(
        static_cast<int>(std::lround(config_.adoption_fraction * g.pool_size)),
        1, g.pool_size);
    g.slot_used.assign(g.pool_size, false);
    gateways_.push_back(std::move(g));
    open.push_back(index);
  }
  return open[rng_.Uniform(open.size())];
}

void NetworkModel::TakeSlot(NetworkIdentity& identity, int gateway) {
  Gateway& g = gateways_[gateway];
  std::vector<int> free;
  for (int s = 0; s < g.pool_size; ++s) {
    if (!g.slot_used[s]) free.push_back(s);
  }
  const int slot = free[rng_.Uniform(free.size())];
  g.slot_used[slot] = true;
  ++g.occupancy;
  identity.gateway = gateway;
  identity.slot = slot;
  identity.address = g.address;
  // Each slot owns a disjoint stretch of the port space; the cursor starts in
  // the first quarter of it.
  const std::int64_t stride = (kMaxPort - kMinPort) / g.pool_size;
  identity.nat_port_cursor = kMinPort + slot * stride +
                             rng_.UniformInt(0, std::max<std::int64_t>(0, stride / 4));
}

NetworkIdentity NetworkModel::AssignIdentity(int device, SimTime t) {
  NetworkIdentity id;
  id.device = device;
  id.carrier = static_cast<int>(rng_.Uniform(config_.carriers.size()));
  id.uses_ipv6 = rng_.Bernoulli(config_.carriers[id.carrier].ipv6_probability);
  id.device_type = static_cast<int>(rng_.Uniform(std::max(1, config_.device_types)));
  id.stable_since = t;
  id.last_activity = t;
  if (id.uses_ipv6) {
    id.address = absl::StrFormat("2001:db8:%x::%x", id.carrier + 1, next_ipv6_++);
  } else {
    TakeSlot(id, PickGateway(id.carrier));
  }
  return id;
}

NetworkIdentity NetworkModel::Reconnect(const NetworkIdentity& identity,
                                        SimTime t) {
  NetworkIdentity id = identity;
  id.stable_since = t;
  id.last_activity = t;
  if (id.uses_ipv6) {
    id.address = absl::StrFormat("2001:db8:%x::%x", id.carrier + 1, next_ipv6_++);
    return id;
  }
  if (id.gateway >= 0) {
    Gateway& old = gateways_[id.gateway];
    old.slot_used[id.slot] = false;
    --old.occupancy;
  }
  TakeSlot(id, PickGateway(id.carrier));
  return id;
}

absl::StatusOr<int> NetworkModel::NextPort(NetworkIdentity& identity) {
  if (identity.uses_ipv6) {
    return Error(ErrorKind::kNotApplicable, "IPv6 identities are not NATed");
  }
  if (identity.nat_port_cursor > kMaxPort) identity.nat_port_cursor = kMinPort;
  return static_cast<int>(identity.nat_port_cursor++);
}

NetworkObservation NetworkModel::Deliver(
    NetworkIdentity& from, MessageKind kind,
    std::optional<crypto::TraceId> trace_id, SimTime t) {
  NetworkObservation obs;
  obs.endpoint = Endpoint::kGuestApp;
  obs.src_address = from.address;
  obs.ip_version = from.uses_ipv6 ? IpVersion::kV6 : IpVersion::kV4;
  obs.device_type = from.device_type;
  obs.timestamp = t;
  obs.message_kind = kind;
  obs.trace_id = trace_id;
  if (!from.uses_ipv6) {
    const double hours =
        std::max<SimTime>(0, t - from.last_activity) / 3600.0;
    const auto spread = static_cast<std::int64_t>(
        std::floor(2.0 * config_.background_ports_per_hour * hours));
    from.nat_port_cursor += rng_.UniformInt(0, spread);
    obs.src_port = *NextPort(from);
  }
  from.last_activity = t;
  return obs;
}

NetworkObservation NetworkModel::DeliverStatic(
    Endpoint endpoint, const std::string& address, MessageKind kind,
    std::optional<crypto::TraceId> trace_id, SimTime t) const {
  NetworkObservation obs;
  obs.endpoint = endpoint;
  obs.src_address = address;
  obs.ip_version = IpVersion::kV4;
  obs.timestamp = t;
  obs.message_kind = kind;
  obs.trace_id = trace_id;
  return obs;
}

std::string NetworkModel::StaticAddress(Endpoint endpoint, int index) {
  const int net = endpoint == Endpoint::kVenue ? 51 : 113;
  return absl::StrFormat("198.%d.%d.%d", net, index / 250, 1 + index % 250);
}

}  // namespace lucasim
