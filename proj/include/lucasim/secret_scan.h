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


#ifndef LUCASIM_SECRET_SCAN_H_
#define LUCASIM_SECRET_SCAN_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lucasim/bytes.h"
#include "lucasim/simulation.h"

namespace lucasim {

// Key material or cleartext that must never reach the server or the wire.
struct KnownSecret {
  std::string label;  // e.g. "venue-sk:v-0003", "contact:u-..."
  std::string bytes;
};

struct SecretHit {
  std::string label;
  std::string location;
  std::int64_t offset = 0;
  bool hex = false;
};

// Venue private keys, health-department encryption and signing keys, every
// cached daily master private key, and each guest's contact cleartext.
// Private keys are cut to 32 bytes, so Ed25519 keys are matched on their
// seed half rather than the embedded public key.
std::vector<KnownSecret> CollectSecrets(const Simulation& sim);

// Searches each haystack for the raw secret bytes and for their lowercase
// hex spelling.
std::vector<SecretHit> ScanForSecrets(
    const std::vector<KnownSecret>& secrets,
    const std::vector<std::pair<std::string, std::string>>& haystacks);

// Transcript message fields, the serialized server state and the three
// NDJSON exports of the run.
std::vector<std::pair<std::string, std::string>> RunHaystacks(
    const Simulation& sim);

std::vector<SecretHit> ScanRun(const Simulation& sim);

}  // namespace lucasim

#endif  // LUCASIM_SECRET_SCAN_H_
