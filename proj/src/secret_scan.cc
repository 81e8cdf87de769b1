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


#include "lucasim/secret_scan.h"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "lucasim/transcript.h"

namespace lucasim {
namespace {

constexpr std::size_t kFingerprint = 12;
constexpr std::size_t kMaxKeyBytes = 32;

std::string KeyPrefix(const Bytes& key) {
  const std::size_t n = std::min(key.size(), kMaxKeyBytes);
  return std::string(key.begin(), key.begin() + n);
}

// Prefix index over one spelling (raw or hex) of all secrets.
class Matcher {
 public:
  explicit Matcher(std::vector<std::string> needles)
      : needles_(std::move(needles)) {
    for (std::size_t i = 0; i < needles_.size(); ++i) {
      const std::string& n = needles_[i];
      if (n.size() < kFingerprint) {
        short_.push_back(i);
      } else {
        index_[std::string_view(n).substr(0, kFingerprint)].push_back(i);
      }
    }
  }

  // Calls `hit(needle, offset)` for every occurrence.
  template <typename F>
  void Scan(std::string_view hay, F&& hit) const {
    if (hay.size() >= kFingerprint && !index_.empty()) {
      for (std::size_t pos = 0; pos + kFingerprint <= hay.size(); ++pos) {
        auto it = index_.find(hay.substr(pos, kFingerprint));
        if (it == index_.end()) continue;
        for (std::size_t i : it->second) {
          if (hay.substr(pos, needles_[i].size()) == needles_[i]) hit(i, pos);
        }
      }
    }
    for (std::size_t i : short_) {
      if (needles_[i].empty()) continue;
      for (std::size_t pos = hay.find(needles_[i]); pos != hay.npos;
           pos = hay.find(needles_[i], pos + 1)) {
        hit(i, pos);
      }
    }
  }

 private:
  std::vector<std::string> needles_;
  std::unordered_map<std::string_view, std::vector<std::size_t>> index_;
  std::vector<std::size_t> short_;
};

}  // namespace

std::vector<KnownSecret> CollectSecrets(const Simulation& sim) {
  std::vector<KnownSecret> out;
  std::set<std::string> seen;
  auto add = [&](std::string label, std::string bytes) {
    if (bytes.empty() || !seen.insert(bytes).second) return;
    out.push_back({std::move(label), std::move(bytes)});
  };
  for (const auto& [id, venue] : sim.venues()) {
    add(absl::StrCat("venue-sk:", id.value()), KeyPrefix(venue.keys.private_key.bytes));
  }
  for (const auto& [id, hd] : sim.health_depts()) {
    add(absl::StrCat("hd-enc-sk:", id.value()), KeyPrefix(hd.enc_keys.private_key.bytes));
    add(absl::StrCat("hd-sign-sk:", id.value()),
        KeyPrefix(hd.sign_keys.private_key.bytes));
    for (const auto& [day, key] : hd.master_keys) {
      add(absl::StrCat("master-sk:", day), KeyPrefix(key.bytes));
    }
  }
  for (std::size_t i = 0; i < sim.guest_count(); ++i) {
    const ContactData& c = sim.guest(static_cast<int>(i)).contact();
    add(absl::StrCat("contact:", i), c.Serialize());
    add(absl::StrCat("phone:", i), c.phone);
    add(absl::StrCat("address:", i), c.address);
  }
  return out;
}

std::vector<SecretHit> ScanForSecrets(
    const std::vector<KnownSecret>& secrets,
    const std::vector<std::pair<std::string, std::string>>& haystacks) {
  std::vector<std::string> raw;
  std::vector<std::string> hex;
  for (const KnownSecret& s : secrets) {
    raw.push_back(s.bytes);
    hex.push_back(HexEncode(ToBytes(s.bytes)));
  }
  const Matcher raw_matcher(std::move(raw));
  const Matcher hex_matcher(std::move(hex));
  std::vector<SecretHit> hits;
  for (const auto& [location, hay] : haystacks) {
    raw_matcher.Scan(hay, [&](std::size_t i, std::size_t pos) {
      hits.push_back({secrets[i].label, location, static_cast<std::int64_t>(pos), false});
    });
    hex_matcher.Scan(hay, [&](std::size_t i, std::size_t pos) {
      hits.push_back({secrets[i].label, location, static_cast<std::int64_t>(pos), true});
    });
  }
  return hits;
}

std::vector<std::pair<std::string, std::string>> RunHaystacks(
    const Simulation& sim) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Message& m : sim.transcript().messages()) {
    for (const auto& [name, value] : m.fields) {
      out.emplace_back(absl::StrCat("transcript#", m.sequence, ".", name),
                       ToString(value));
    }
  }
  out.emplace_back("server-state", ToString(sim.server().SerializeState()));
  out.emplace_back("transcript.ndjson", sim.transcript().ExportNdjson());
  out.emplace_back("events.ndjson", sim.log().ExportNdjson());
  out.emplace_back("observations.ndjson",
                   ExportObservationsNdjson(sim.server().observations));
  return out;
}

std::vector<SecretHit> ScanRun(const Simulation& sim) {
  return ScanForSecrets(CollectSecrets(sim), RunHaystacks(sim));
}

}  // namespace lucasim
