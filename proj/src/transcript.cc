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


#include "lucasim/transcript.h"

#include "json.hpp"

namespace lucasim {

const Bytes* Message::Field(std::string_view name) const {
  for (const auto& [key, value] : fields) {
    if (key == name) return &value;
  }
  return nullptr;
}

std::int64_t Transcript::Append(Message m) {
  m.sequence = static_cast<std::int64_t>(messages_.size());
  messages_.push_back(std::move(m));
  return messages_.back().sequence;
}

std::string Transcript::ExportNdjson() const {
  std::string out;
  for (const Message& m : messages_) {
    nlohmann::json j;
    j["seq"] = m.sequence;
    j["time"] = m.time;
    j["from"] = m.from;
    j["to"] = m.to;
    j["kind"] = m.kind;
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [key, value] : m.fields) fields[key] = HexEncode(value);
    j["fields"] = std::move(fields);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string ExportObservationsNdjson(
    const std::vector<NetworkObservation>& observations) {
  std::string out;
  for (const NetworkObservation& o : observations) {
    nlohmann::json j;
    j["index"] = o.index;
    j["endpoint"] = EndpointName(o.endpoint);
    j["src_address"] = o.src_address;
    j["src_port"] = o.src_port;
    j["ip_version"] = o.ip_version == IpVersion::kV6 ? 6 : 4;
    j["device_type"] = o.device_type;
    j["timestamp"] = o.timestamp;
    j["message_kind"] = MessageKindName(o.message_kind);
    if (o.trace_id) j["trace_id"] = o.trace_id->Hex();
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace lucasim
