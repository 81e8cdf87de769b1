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


#ifndef LUCASIM_TRANSCRIPT_H_
#define LUCASIM_TRANSCRIPT_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lucasim/bytes.h"
#include "lucasim/netsim.h"

namespace lucasim {

// One protocol message between two actors. Field values are raw bytes; the
// NDJSON export hex-encodes them.
struct Message {
  std::int64_t sequence = -1;
  SimTime time = 0;
  std::string from;
  std::string to;
  std::string kind;
  std::vector<std::pair<std::string, Bytes>> fields;

  const Bytes* Field(std::string_view name) const;
};

class Transcript {
 public:
  // Assigns the sequence number and returns it.
  std::int64_t Append(Message m);

  const std::vector<Message>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }

  std::string ExportNdjson() const;

 private:
  std::vector<Message> messages_;
};

std::string ExportObservationsNdjson(
    const std::vector<NetworkObservation>& observations);

}  // namespace lucasim

#endif  // LUCASIM_TRANSCRIPT_H_
