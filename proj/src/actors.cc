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


#include "lucasim/actors.h"

#include <array>

#include "absl/strings/str_cat.h"

namespace lucasim {
namespace {

constexpr std::array<std::pair<ExfilMode, std::string_view>, 5> kModes = {{
    {ExfilMode::kNone, "none"},
    {ExfilMode::kBackdoorKeygen, "backdoor_keygen"},
    {ExfilMode::kExfilOnGen, "exfil_on_gen"},
    {ExfilMode::kExfilOnUse, "exfil_on_use"},
    {ExfilMode::kSkipChecks, "skip_checks"},
}};

void AppendString(Bytes& out, std::string_view s) {
  AppendLengthPrefixed(out, ToBytes(s));
}

void AppendKey(Bytes& out, const crypto::PublicKey& key) {
  AppendLengthPrefixed(out, key.bytes);
}

void AppendCert(Bytes& out, const std::optional<Certificate>& cert) {
  if (!cert) return;
  AppendKey(out, cert->subject);
  AppendString(out, cert->subject_role);
  AppendLengthPrefixed(out, cert->ca_signature.bytes);
}

void AppendPublished(Bytes& out, const PublishedMasterKey& p) {
  AppendU64(out, static_cast<std::uint64_t>(p.day));
  AppendKey(out, p.key);
  AppendLengthPrefixed(out, p.signature.bytes);
  AppendString(out, p.signer.value());
  AppendKey(out, p.signer_key);
  AppendCert(out, p.signer_cert);
}

}  // namespace

std::string_view ExfilModeName(ExfilMode mode) {
  for (const auto& [m, name] : kModes) {
    if (m == mode) return name;
  }
  return "none";
}

std::optional<ExfilMode> ParseExfilMode(std::string_view name) {
  for (const auto& [m, n] : kModes) {
    if (n == name) return m;
  }
  return std::nullopt;
}

Bytes MasterKeyMessage(int day, const crypto::PublicKey& key) {
  Bytes msg = ToBytes("daily-master-key");
  AppendU64(msg, static_cast<std::uint64_t>(day));
  AppendLengthPrefixed(msg, key.bytes);
  return msg;
}

const crypto::TracingSeed& GuestApp::SeedFor(int day, SimRng& rng) {
  auto it = seeds_.find(day);
  if (it == seeds_.end()) {
    it = seeds_
             .emplace(day, crypto::TracingSeed{.day = day,
                                               .secret = rng.RandomArray<32>()})
             .first;
  }
  return it->second;
}

crypto::TraceId GuestApp::NextTraceId(int day, SimRng& rng) {
  if (day != counter_day_) {
    counter_day_ = day;
    counter_ = 0;
  }
  const crypto::TraceId id = crypto::DeriveTraceId(SeedFor(day, rng), counter_++);
  issued_[day].push_back(id);
  return id;
}

ExfilMode FrontendCodeProvider::VenueMode(const VenueId& id) const {
  auto it = venue_frontend.find(id);
  return it == venue_frontend.end() ? ExfilMode::kNone : it->second;
}

ExfilMode FrontendCodeProvider::HealthDeptMode(const HealthDeptId& id) const {
  auto it = hd_frontend.find(id);
  return it == hd_frontend.end() ? ExfilMode::kNone : it->second;
}

std::int64_t BackendServer::Observe(NetworkObservation obs) {
  obs.index = static_cast<std::int64_t>(observations.size());
  observations.push_back(std::move(obs));
  return observations.back().index;
}

const CheckInRecord* BackendServer::FindByTraceId(
    const crypto::TraceId& id) const {
  auto it = by_trace_id.find(id);
  return it == by_trace_id.end() ? nullptr : &checkins[it->second];
}

std::optional<VenueId> BackendServer::VenueOfScanner(const ScannerId& id) const {
  auto it = scanner_to_venue.find(id);
  if (it == scanner_to_venue.end()) return std::nullopt;
  return it->second;
}

std::optional<VenueId> BackendServer::VenueOfRecord(RecordId id) const {
  if (id < 0 || id >= static_cast<RecordId>(checkins.size())) return std::nullopt;
  return VenueOfScanner(checkins[id].scanner_id);
}

Bytes BackendServer::SerializeState() const {
  Bytes out;
  for (const auto& [id, u] : users) {
    AppendString(out, id.value());
    AppendLengthPrefixed(out, u.encrypted_contact);
  }
  for (const auto& [id, v] : venues) {
    AppendString(out, id.value());
    AppendString(out, v.name);
    AppendString(out, v.owner_contact);
    AppendKey(out, v.public_key);
  }
  for (const auto& [id, h] : health_depts) {
    AppendString(out, id.value());
    AppendKey(out, h.enc_public);
    AppendKey(out, h.sign_public);
    AppendCert(out, h.enc_cert);
    AppendCert(out, h.sign_cert);
    for (const auto& [day, ct] : h.encrypted_master_keys) {
      AppendLengthPrefixed(out, ct);
    }
  }
  for (const auto& [day, p] : master_keys) AppendPublished(out, p);
  for (const CheckInRecord& r : checkins) {
    AppendString(out, r.scanner_id.value());
    AppendLengthPrefixed(out, r.trace_id.bytes);
    AppendLengthPrefixed(out, r.double_enc_ref.ciphertext);
  }
  for (const auto& [code, u] : uploads) {
    AppendString(out, code);
    AppendLengthPrefixed(out, u.ciphertext);
  }
  for (const ServerRequest& r : requests) {
    AppendString(out, r.requester);
    AppendString(out, r.kind);
    for (const UserId& u : r.user_ids) AppendString(out, u.value());
  }
  for (const TraceCase& t : traces) {
    AppendString(out, t.index_user.value());
    for (const crypto::TracingSeed& s : t.seeds) {
      AppendLengthPrefixed(out, s.secret);
    }
    for (const UserId& u : t.contact_user_ids) AppendString(out, u.value());
  }
  for (const auto& [rec, ref] : singly_encrypted) {
    AppendLengthPrefixed(out, ref.ciphertext);
  }
  // Adversary-side material; empty for an honest server.
  for (const auto& [id, k] : vault.venue_keys) AppendLengthPrefixed(out, k.bytes);
  for (const auto& [id, k] : vault.hd_enc_keys) AppendLengthPrefixed(out, k.bytes);
  for (const auto& [id, k] : vault.hd_sign_keys) AppendLengthPrefixed(out, k.bytes);
  for (const auto& [d, k] : vault.substituted_master_private) {
    AppendLengthPrefixed(out, k.bytes);
  }
  for (const auto& [code, p] : vault.upload_plaintexts) AppendLengthPrefixed(out, p);
  for (const auto& [rec, ref] : vault.stripped_at_ingest) {
    AppendLengthPrefixed(out, ref.ciphertext);
  }
  return out;
}

}  // namespace lucasim
