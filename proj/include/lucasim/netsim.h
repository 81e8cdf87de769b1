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


#ifndef LUCASIM_NETSIM_H_
#define LUCASIM_NETSIM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lucasim/bytes.h"
#include "lucasim/crypto.h"
#include "lucasim/rng.h"

// Parametric carrier model standing in for real network measurements. Guest
// devices get either a unique IPv6 address or a slot behind a carrier-grade
// IPv4 NAT gateway with an incrementing source-port cursor; venues and health
// departments use static addresses. Delivery is lossless and same-tick.
namespace lucasim {

struct CarrierConfig {
  double ipv6_probability = 0.0;
};

// All defaults are modelling assumptions rather than measurements.
struct NetworkConfig {
  std::vector<CarrierConfig> carriers = {{1.0}, {1.0}, {0.0}};
  // Total devices (Luca or not) sharing one public IPv4 address.
  int nat_pool_min = 16;
  int nat_pool_max = 64;
  // Fraction of a gateway pool running the app.
  double adoption_fraction = 0.3;
  int device_types = 12;
  // Non-full gateways kept available per carrier for new assignments.
  int min_open_gateways = 4;
  double reconnects_per_day = 0.0;
  // Mean NAT ports consumed per hour by unrelated traffic of a device.
  double background_ports_per_hour = 1.0;
};

enum class IpVersion { kV4, kV6 };
enum class MessageKind { kCheckinPoll, kCheckout, kPositiveUpload, kOther };
enum class Endpoint { kGuestApp, kVenue, kHealthDept };

std::string_view MessageKindName(MessageKind kind);
std::string_view EndpointName(Endpoint endpoint);

inline constexpr int kMinPort = 1024;
inline constexpr int kMaxPort = 65535;

struct NetworkIdentity {
  int device = -1;
  int carrier = 0;
  bool uses_ipv6 = false;
  std::string address;
  int gateway = -1;  // IPv4 only
  int slot = -1;     // IPv4 only
  std::int64_t nat_port_cursor = 0;
  int device_type = 0;
  SimTime stable_since = 0;
  SimTime last_activity = 0;
};

struct NetworkObservation {
  std::int64_t index = -1;  // position in the server's observation log
  Endpoint endpoint = Endpoint::kGuestApp;
  std::string src_address;
  int src_port = 0;  // 0 when not NAT-assigned
  IpVersion ip_version = IpVersion::kV4;
  int device_type = -1;  // -1 for non-guest endpoints
  SimTime timestamp = 0;
  MessageKind message_kind = MessageKind::kOther;
  std::optional<crypto::TraceId> trace_id;
};

struct Gateway {
  int carrier = 0;
  std::string address;
  int pool_size = 0;
  int luca_capacity = 0;
  int occupancy = 0;
  std::vector<bool> slot_used;
};

class NetworkModel {
 public:
  NetworkModel(NetworkConfig config, SimRng rng);

  const NetworkConfig& config() const { return config_; }
  const std::vector<Gateway>& gateways() const { return gateways_; }
  int OpenGatewayCount(int carrier) const;

  // Gateway choice never looks at device location.
  NetworkIdentity AssignIdentity(int device, SimTime t = 0);
  // Fresh gateway/address; port cursor re-seeded.
  NetworkIdentity Reconnect(const NetworkIdentity& identity, SimTime t);
  // p, p+1, p+2, ... between reconnects. Errors: NotApplicable for IPv6.
  absl::StatusOr<int> NextPort(NetworkIdentity& identity);

  // Guest-originated message as seen by the server. Advances the NAT cursor
  // by background traffic since the last message, then takes the next port.
  NetworkObservation Deliver(NetworkIdentity& from, MessageKind kind,
                             std::optional<crypto::TraceId> trace_id,
                             SimTime t);
  NetworkObservation DeliverStatic(Endpoint endpoint,
                                   const std::string& address,
                                   MessageKind kind,
                                   std::optional<crypto::TraceId> trace_id,
                                   SimTime t) const;

  static std::string StaticAddress(Endpoint endpoint, int index);

 private:
  int PickGateway(int carrier);
  void TakeSlot(NetworkIdentity& identity, int gateway);

  NetworkConfig config_;
  SimRng rng_;
  std::vector<Gateway> gateways_;
  std::int64_t next_ipv6_ = 1;
};

}  // namespace lucasim

#endif  // LUCASIM_NETSIM_H_
