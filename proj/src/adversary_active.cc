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
#include <array>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "lucasim/adversary.h"
#include "lucasim/status.h"

namespace lucasim {
namespace {

constexpr std::array<std::pair<AttackType, std::string_view>, 9> kAttackNames = {{
    {AttackType::kVenueDecryptionOracle, "venue_decryption_oracle"},
    {AttackType::kExpandWindow, "expand_window"},
    {AttackType::kSubstituteVenueKey, "substitute_venue_key"},
    {AttackType::kExfiltrateVenueKey, "exfiltrate_venue_key"},
    {AttackType::kSubstituteMasterKey, "substitute_master_key"},
    {AttackType::kImpersonateHd, "impersonate_hd"},
    {AttackType::kHdDecryptionOracle, "hd_decryption_oracle"},
    {AttackType::kModifyScanner, "modify_scanner"},
    {AttackType::kExfiltrateHdKey, "exfiltrate_hd_key"},
}};

constexpr char kInjectedHd[] = "hd-adv";

std::optional<std::string> EventDigest(const GroundTruthLog& log, EventKind kind,
                                       const auto& match) {
  for (const GroundTruthEvent& e : log.events()) {
    if (e.kind == kind && match(e)) return e.digest;
  }
  return std::nullopt;
}

std::optional<std::string> VenueKeyDigest(const GroundTruthLog& log,
                                          const VenueId& venue) {
  return EventDigest(log, EventKind::kRegisterVenue,
                     [&](const GroundTruthEvent& e) { return e.venue == venue; });
}

std::optional<std::string> HdKeyDigest(const GroundTruthLog& log,
                                       const HealthDeptId& hd) {
  return EventDigest(log, EventKind::kRegisterHealthDept,
                     [&](const GroundTruthEvent& e) { return e.hd == hd; });
}

std::optional<std::string> MasterKeyDigest(const GroundTruthLog& log, int day) {
  return EventDigest(log, EventKind::kKeyRotation,
                     [&](const GroundTruthEvent& e) { return e.day == day; });
}

AttackOutcome NewOutcome(const AttackSpec& spec, Detectability d) {
  AttackOutcome o;
  o.attack_id = AttackIdOf(spec);
  o.type = spec.type;
  o.detectable = d;
  return o;
}

AttackOutcome Fail(AttackOutcome o, std::string reason) {
  o.succeeded = false;
  o.failure_reason = std::move(reason);
  return o;
}

}  // namespace

std::string_view DetectabilityName(Detectability d) {
  switch (d) {
    case Detectability::kUndetectable:
      return "undetectable";
    case Detectability::kDetectableByHd:
      return "detectable-by-HD";
    case Detectability::kDetectableByVenue:
      return "detectable-by-venue";
  }
  return "undetectable";
}

std::string_view AttackTypeName(AttackType type) {
  for (const auto& [t, name] : kAttackNames) {
    if (t == type) return name;
  }
  return "unknown";
}

std::optional<AttackType> ParseAttackType(std::string_view name) {
  for (const auto& [t, n] : kAttackNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

const std::vector<AttackType>& AllAttackTypes() {
  static const std::vector<AttackType> kAll = [] {
    std::vector<AttackType> v;
    for (const auto& [t, name] : kAttackNames) v.push_back(t);
    return v;
  }();
  return kAll;
}

ArmPhase ArmPhaseOf(AttackType type) {
  switch (type) {
    case AttackType::kExpandWindow:
      return ArmPhase::kBeforeTraces;
    case AttackType::kSubstituteVenueKey:
    case AttackType::kSubstituteMasterKey:
    case AttackType::kModifyScanner:
      return ArmPhase::kAfterRotation;
    case AttackType::kExfiltrateVenueKey:
    case AttackType::kExfiltrateHdKey:
      return ArmPhase::kBeforeSetup;
    case AttackType::kImpersonateHd:
      return ArmPhase::kBeforeRotation;
    case AttackType::kVenueDecryptionOracle:
    case AttackType::kHdDecryptionOracle:
      return ArmPhase::kNone;
  }
  return ArmPhase::kNone;
}

std::string AttackIdOf(const AttackSpec& spec) {
  return absl::StrFormat("%s#%d", std::string(AttackTypeName(spec.type)),
                         spec.index);
}

// ---------------------------------------------------------------------------
// Verification helpers
// ---------------------------------------------------------------------------

bool ActiveAdversary::RecordStripped(RecordId record,
                                     const crypto::EncryptedUserReference& inner,
                                     std::string_view via, AdversaryKnowledge& k) {
  const GroundTruthEvent* e = sim_.log().CheckinEvent(record);
  if (e == nullptr || inner.layers != 1 ||
      e->digest != Sha256Hex(inner.ciphertext)) {
    return false;
  }
  k.stripped_refs[record] = inner;
  k.stripped_via.emplace(record, std::string(via));
  return true;
}

bool ActiveAdversary::RecordOpened(RecordId record,
                                   const crypto::UserReference& ref,
                                   AdversaryKnowledge& k) {
  const UserId user(ref.user_id);
  if (sim_.log().UserOfRecord(record) != user) return false;
  k.decrypted_refs[record] = user;
  ContactOpened(user, ref.contact_key, k);
  return true;
}

bool ActiveAdversary::ContactOpened(const UserId& user,
                                    const crypto::SymmetricKey& key,
                                    AdversaryKnowledge& k) {
  const auto& users = sim_.server().users;
  auto it = users.find(user);
  if (it == users.end()) return false;
  auto opened = crypto::OpenSymmetric(key, it->second.encrypted_contact);
  if (!opened.ok()) return false;
  const std::string text = ToString(*opened);
  auto contact = ContactData::Parse(text);
  if (!contact || sim_.log().ContactDigest(user) != Sha256Hex(text)) return false;
  k.decrypted_contacts[user] = *contact;
  return true;
}

bool ActiveAdversary::AcceptMasterKey(int day, const crypto::PrivateKey& key,
                                      AdversaryKnowledge& k) {
  if (MasterKeyDigest(sim_.log(), day) != Sha256Hex(key.bytes)) return false;
  k.recovered_keys[absl::StrCat("master:", day)] = key;
  return true;
}

absl::StatusOr<std::map<RecordId, crypto::EncryptedUserReference>>
ActiveAdversary::StripViaOracle(const std::vector<RecordId>& records, SimTime t,
                                std::string_view via, AdversaryKnowledge& k) {
  std::map<VenueId, std::vector<RecordId>> by_venue;
  std::map<RecordId, crypto::EncryptedUserReference> out;
  for (RecordId r : records) {
    if (auto it = k.stripped_refs.find(r); it != k.stripped_refs.end()) {
      out[r] = it->second;
      continue;
    }
    if (auto v = sim_.server().VenueOfRecord(r)) by_venue[*v].push_back(r);
  }
  for (const auto& [venue, recs] : by_venue) {
    auto got = sim_.RequestVenueDecryption(venue, recs, {}, t, via);
    if (!got.ok()) {
      if (HasErrorKind(got.status(), ErrorKind::kVenueUnavailable)) continue;
      return got.status();
    }
    for (const auto& [r, inner] : *got) {
      if (RecordStripped(r, inner, via, k)) out[r] = inner;
    }
  }
  return out;
}

std::int64_t ActiveAdversary::OpenInnerLayers(
    const std::map<RecordId, crypto::EncryptedUserReference>& refs,
    const crypto::PrivateKey& master, AdversaryKnowledge& k) {
  std::int64_t opened = 0;
  for (const auto& [r, inner] : refs) {
    auto ref = crypto::OpenUserReference(inner, master);
    if (ref.ok() && RecordOpened(r, *ref, k)) ++opened;
  }
  return opened;
}

// ---------------------------------------------------------------------------
// Arming
// ---------------------------------------------------------------------------

absl::Status ActiveAdversary::Arm(const AttackSpec& spec, SimTime t) {
  BackendServer& server = sim_.server();
  Prepared& prep = prepared_[spec.index];
  prep.armed_at = t;
  switch (spec.type) {
    case AttackType::kVenueDecryptionOracle:
    case AttackType::kHdDecryptionOracle:
      return absl::OkStatus();
    case AttackType::kExpandWindow:
      if (!spec.records.empty()) {
        for (RecordId r : spec.records) {
          auto v = server.VenueOfRecord(r);
          if (!v) return Error(ErrorKind::kInvalidArgument, absl::StrCat("no record ", r));
          server.behavior.padding[*v].push_back(r);
        }
      } else {
        server.behavior.expand_window_extra = spec.count;
      }
      return absl::OkStatus();
    case AttackType::kSubstituteVenueKey:
      if (!spec.venue) return Error(ErrorKind::kInvalidArgument, "target venue required");
      prep.keys = crypto::GenerateKeyPair(crypto::KeyRole::kAdversary,
                                          crypto::KeyUsage::kEncryption, rng_);
      server.behavior.substituted_venue_keys[*spec.venue] = prep.keys;
      return absl::OkStatus();
    case AttackType::kExfiltrateVenueKey:
      if (!spec.venue) return Error(ErrorKind::kInvalidArgument, "target venue required");
      server.frontend_code.venue_frontend[*spec.venue] = spec.mode;
      return absl::OkStatus();
    case AttackType::kSubstituteMasterKey: {
      auto honest = server.master_keys.find(spec.day);
      if (honest == server.master_keys.end()) {
        return Error(ErrorKind::kNoMasterKey,
                     absl::StrCat("no published key to replace on day ", spec.day));
      }
      prep.keys = crypto::GenerateKeyPair(crypto::KeyRole::kAdversary,
                                          crypto::KeyUsage::kEncryption, rng_);
      const crypto::AsymKeyPair signer = crypto::GenerateKeyPair(
          crypto::KeyRole::kAdversary, crypto::KeyUsage::kSignature, rng_);
      // Claims the honest signer and reuses its certificate, which cannot
      // cover the adversary's own signing key.
      server.behavior.substituted_master_keys[spec.day] = PublishedMasterKey{
          .day = spec.day,
          .key = prep.keys.public_key,
          .signature = crypto::Sign(signer.private_key,
                                    MasterKeyMessage(spec.day, prep.keys.public_key)),
          .signer = honest->second.signer,
          .signer_key = signer.public_key,
          .signer_cert = honest->second.signer_cert};
      server.vault.substituted_master_private[spec.day] = prep.keys.private_key;
      return absl::OkStatus();
    }
    case AttackType::kImpersonateHd: {
      prep.keys = crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptEncryption, rng_);
      const crypto::AsymKeyPair signer =
          crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptSigning, rng_);
      server.behavior.injected_hd = HealthDeptRecord{.hd_id = HealthDeptId(kInjectedHd),
                                                     .enc_public = prep.keys.public_key,
                                                     .sign_public = signer.public_key};
      server.vault.injected_hd_private = prep.keys.private_key;
      return absl::OkStatus();
    }
    case AttackType::kModifyScanner:
      if (!spec.scanner) return Error(ErrorKind::kInvalidArgument, "target scanner required");
      prep.keys = crypto::GenerateKeyPair(crypto::KeyRole::kAdversary,
                                          crypto::KeyUsage::kEncryption, rng_);
      server.frontend_code.scanner_master_key[*spec.scanner] = prep.keys.public_key;
      return absl::OkStatus();
    case AttackType::kExfiltrateHdKey:
      if (!spec.hd) return Error(ErrorKind::kInvalidArgument, "target department required");
      server.frontend_code.hd_frontend[*spec.hd] = spec.mode;
      if (spec.mode == ExfilMode::kSkipChecks && !server.behavior.injected_hd) {
        prep.keys = crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptEncryption, rng_);
        server.behavior.injected_hd =
            HealthDeptRecord{.hd_id = HealthDeptId(kInjectedHd),
                             .enc_public = prep.keys.public_key,
                             .sign_public = prep.keys.public_key};
        server.vault.injected_hd_private = prep.keys.private_key;
      }
      return absl::OkStatus();
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

absl::StatusOr<AttackOutcome> ActiveAdversary::Execute(const AttackSpec& spec,
                                                       SimTime t,
                                                       AdversaryKnowledge& k) {
  absl::StatusOr<AttackOutcome> out;
  switch (spec.type) {
    case AttackType::kVenueDecryptionOracle:
      out = VenueOracle(spec, t, k);
      break;
    case AttackType::kExpandWindow:
      out = ExpandWindow(spec, k);
      break;
    case AttackType::kSubstituteVenueKey:
      out = SubstituteVenueKey(spec, k);
      break;
    case AttackType::kExfiltrateVenueKey:
      out = ExfiltrateVenueKey(spec, t, k);
      break;
    case AttackType::kSubstituteMasterKey:
      out = SubstituteMasterKey(spec, t, k);
      break;
    case AttackType::kImpersonateHd:
      out = ImpersonateHd(spec, k);
      break;
    case AttackType::kHdDecryptionOracle:
      out = HdOracle(spec, t, k);
      break;
    case AttackType::kModifyScanner:
      out = ModifyScanner(spec, t, k);
      break;
    case AttackType::kExfiltrateHdKey:
      out = ExfiltrateHdKey(spec, k);
      break;
  }
  if (out.ok()) k.attack_outcomes.push_back(*out);
  return out;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::VenueOracle(const AttackSpec& spec,
                                                           SimTime t,
                                                           AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  std::vector<RecordId> targets = spec.records;
  if (targets.empty()) {
    for (const CheckInRecord& r : sim_.server().checkins) {
      if (static_cast<int>(targets.size()) >= spec.count) break;
      if (k.stripped_refs.contains(r.id)) continue;
      if (spec.venue && sim_.server().VenueOfRecord(r.id) != spec.venue) continue;
      targets.push_back(r.id);
    }
  }
  if (targets.empty()) {
    o.succeeded = true;
    o.secrets_learned = "nothing requested";
    return o;
  }
  LUCASIM_ASSIGN_OR_RETURN(auto stripped, StripViaOracle(targets, t, "venue_oracle", k));
  o.verified_items = static_cast<std::int64_t>(stripped.size());
  if (stripped.size() != targets.size()) {
    return Fail(o, absl::StrFormat("%d of %d outer layers removed", stripped.size(),
                                   targets.size()));
  }
  o.succeeded = true;
  o.secrets_learned =
      absl::StrFormat("outer layer removed from %d records without a trace", targets.size());
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::ExpandWindow(const AttackSpec& spec,
                                                            AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  const auto& padded = sim_.server().behavior.padded;
  std::int64_t total = 0;
  std::int64_t verified = 0;
  for (const auto& [venue, recs] : padded) {
    for (RecordId r : recs) {
      ++total;
      auto it = sim_.server().singly_encrypted.find(r);
      if (it != sim_.server().singly_encrypted.end() &&
          RecordStripped(r, it->second, "expand_window", k)) {
        ++verified;
      }
    }
  }
  o.verified_items = verified;
  const std::int64_t wanted =
      spec.records.empty() ? spec.count : static_cast<std::int64_t>(spec.records.size());
  if (wanted > 0 && total == 0) return Fail(o, "no trace was available to pad");
  if (verified != total) {
    return Fail(o, absl::StrFormat("%d of %d padded records decrypted", verified, total));
  }
  o.succeeded = true;
  o.secrets_learned = absl::StrFormat(
      "%d records outside the traced interval decrypted by the venue", total);
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::SubstituteVenueKey(
    const AttackSpec& spec, AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  std::int64_t verified = 0;
  for (const auto& [r, inner] : sim_.server().vault.stripped_at_ingest) {
    if (sim_.server().VenueOfRecord(r) != spec.venue) continue;
    if (!RecordStripped(r, inner, "venue_key_substitution", k)) {
      return Fail(o, absl::StrCat("record ", r, " did not verify"));
    }
    ++verified;
  }
  o.verified_items = verified;
  if (verified == 0) {
    return Fail(o, "no self check-in used the substituted venue key");
  }
  o.succeeded = true;
  o.secrets_learned = absl::StrFormat(
      "outer layer of %d self check-ins at %s stripped at upload", verified,
      spec.venue->value());
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::ExfiltrateVenueKey(
    const AttackSpec& spec, SimTime t, AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  const VenueId& venue = *spec.venue;
  if (spec.mode == ExfilMode::kSkipChecks) {
    auto got = sim_.LoadVenueFrontend(venue, t);
    if (!got.ok()) return Fail(o, std::string(got.status().message()));
    std::int64_t verified = 0;
    for (const auto& [r, inner] : *got) {
      if (RecordStripped(r, inner, "frontend_skip_checks", k)) ++verified;
    }
    o.verified_items = verified;
    if (verified == 0 || verified != static_cast<std::int64_t>(got->size())) {
      return Fail(o, "frontend returned no verifiable records");
    }
    o.succeeded = true;
    o.secrets_learned =
        absl::StrFormat("%d records of %s decrypted by the modified frontend", verified,
                        venue.value());
    return o;
  }

  std::optional<crypto::PrivateKey> key;
  if (spec.mode == ExfilMode::kBackdoorKeygen) {
    key = crypto::KeyPairFromSeed(
              crypto::KeyRole::kVenue, crypto::KeyUsage::kEncryption,
              BackdoorSeed(sim_.server().behavior.backdoor_secret, venue.value()))
              .private_key;
  } else if (auto it = sim_.server().vault.venue_keys.find(venue);
             it != sim_.server().vault.venue_keys.end()) {
    key = it->second;
  }
  if (!key) return Fail(o, "no key exfiltrated yet");
  if (VenueKeyDigest(sim_.log(), venue) != Sha256Hex(key->bytes)) {
    return Fail(o, "recovered key does not match the venue key");
  }
  k.recovered_keys[absl::StrCat("venue:", venue.value())] = *key;
  std::int64_t verified = 1;
  for (const CheckInRecord& r : sim_.server().checkins) {
    if (sim_.server().VenueOfRecord(r.id) != venue) continue;
    auto inner = crypto::RemoveOuterLayer(r.double_enc_ref, *key);
    if (inner.ok() && RecordStripped(r.id, *inner, "exfiltrated_venue_key", k)) {
      ++verified;
    }
  }
  o.verified_items = verified;
  o.succeeded = true;
  o.secrets_learned = absl::StrFormat(
      "private key of %s (%s); %d stored records unwrapped", venue.value(),
      std::string(ExfilModeName(spec.mode)), verified - 1);
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::SubstituteMasterKey(
    const AttackSpec& spec, SimTime t, AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  const BackendServer& server = sim_.server();
  auto sk_it = server.vault.substituted_master_private.find(spec.day);
  if (sk_it == server.vault.substituted_master_private.end()) {
    return Fail(o, "substitution was never armed");
  }
  const crypto::PrivateKey sk = sk_it->second;

  std::vector<RecordId> day_records;
  for (const CheckInRecord& r : server.checkins) {
    if (DayOf(r.checkin_time) == spec.day) day_records.push_back(r.id);
  }
  // Only bother the venues if some client accepted the key.
  std::int64_t opened = 0;
  if (server.behavior.substituted_master_keys.contains(spec.day) &&
      !day_records.empty()) {
    LUCASIM_ASSIGN_OR_RETURN(auto stripped,
                             StripViaOracle(day_records, t, "venue_oracle", k));
    opened = OpenInnerLayers(stripped, sk, k);
  }

  std::int64_t uploads = 0;
  std::int64_t reconstructed = 0;
  for (const auto& [code, plaintext] : server.vault.upload_plaintexts) {
    auto payload = DecodePositivePayload(plaintext);
    if (!payload.ok()) continue;
    bool code_matches = false;
    for (const GroundTruthEvent& e : sim_.log().events()) {
      if (e.kind == EventKind::kReportPositive && e.code == code) {
        code_matches = e.user == payload->user_id;
      }
    }
    if (!code_matches) continue;
    ++uploads;
    k.code_to_user_id[code] = payload->user_id;
    std::vector<RecordId>& history = k.visit_histories[payload->user_id];
    for (const crypto::TracingSeed& seed : payload->seeds) {
      for (const crypto::TraceId& id : crypto::DeriveAllTraceIds(
               seed, static_cast<std::uint64_t>(sim_.options().max_checkins_per_day))) {
        const CheckInRecord* r = server.FindByTraceId(id);
        if (r == nullptr) continue;
        if (sim_.log().UserOfRecord(r->id) != payload->user_id) {
          return Fail(o, "reconstructed visit belongs to another user");
        }
        history.push_back(r->id);
        ++reconstructed;
      }
    }
    std::sort(history.begin(), history.end());
    history.erase(std::unique(history.begin(), history.end()), history.end());
    ContactOpened(payload->user_id, payload->contact_key, k);
  }
  o.verified_items = opened + uploads;
  if (opened == 0 && uploads == 0) {
    const bool rejected = !server.vault.detections.empty() &&
                          !server.behavior.substituted_master_keys.contains(spec.day);
    return Fail(o, rejected ? "clients rejected the uncertified master key"
                            : "no record or upload used the substituted key");
  }
  o.succeeded = true;
  o.secrets_learned = absl::StrFormat(
      "day %d: %d inner layers opened, %d uploads read, %d visits reconstructed",
      spec.day, opened, uploads, reconstructed);
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::ImpersonateHd(const AttackSpec& spec,
                                                             AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  const AdversaryVault& vault = sim_.server().vault;
  if (!vault.injected_hd_private) return Fail(o, "impersonation was never armed");
  std::int64_t recovered = 0;
  std::int64_t opened = 0;
  for (const auto& [day, ct] : vault.injected_hd_ciphertexts) {
    if (day < spec.day) continue;
    auto sk = crypto::Decrypt(*vault.injected_hd_private, ct);
    if (!sk.ok()) continue;
    const crypto::PrivateKey key{.role = crypto::KeyRole::kDailyMaster,
                                 .usage = crypto::KeyUsage::kEncryption,
                                 .bytes = *sk};
    if (!AcceptMasterKey(day, key, k)) continue;
    ++recovered;
    std::map<RecordId, crypto::EncryptedUserReference> same_day;
    for (const auto& [r, inner] : k.stripped_refs) {
      if (DayOf(sim_.server().checkins[r].checkin_time) == day) same_day[r] = inner;
    }
    opened += OpenInnerLayers(same_day, key, k);
  }
  o.verified_items = recovered;
  if (recovered == 0) {
    return Fail(o, "no rotation encrypted the master key to the injected key");
  }
  o.succeeded = true;
  o.secrets_learned = absl::StrFormat(
      "%d daily master private keys from day %d; %d held references opened",
      recovered, spec.day, opened);
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::HdOracle(const AttackSpec& spec,
                                                        SimTime t,
                                                        AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kDetectableByHd);
  HealthDeptId hd = spec.hd.value_or(HealthDeptId());
  if (hd.empty()) {
    const auto ids = sim_.health_dept_ids();
    if (ids.empty()) return Fail(o, "no health department");
    hd = ids.front();
  }
  std::map<RecordId, crypto::EncryptedUserReference> targets;
  if (!spec.records.empty()) {
    LUCASIM_ASSIGN_OR_RETURN(targets, StripViaOracle(spec.records, t, "venue_oracle", k));
  } else {
    for (const auto& [r, inner] : k.stripped_refs) {
      if (static_cast<int>(targets.size()) >= spec.count) break;
      if (!k.decrypted_refs.contains(r)) targets[r] = inner;
    }
    std::vector<RecordId> more;
    for (const CheckInRecord& r : sim_.server().checkins) {
      if (static_cast<int>(targets.size() + more.size()) >= spec.count) break;
      if (!k.stripped_refs.contains(r.id)) more.push_back(r.id);
    }
    if (!more.empty()) {
      LUCASIM_ASSIGN_OR_RETURN(auto extra, StripViaOracle(more, t, "venue_oracle", k));
      targets.insert(extra.begin(), extra.end());
    }
  }
  if (targets.empty()) {
    o.succeeded = spec.count == 0 && spec.records.empty();
    o.secrets_learned = "nothing requested";
    if (!o.succeeded) o.failure_reason = "no singly encrypted records available";
    return o;
  }
  LUCASIM_ASSIGN_OR_RETURN(auto resolved,
                           sim_.RequestHealthDeptDecryption(hd, targets, {}, t,
                                                            "oracle", true));
  std::int64_t verified = 0;
  for (const auto& [r, user] : resolved) {
    if (sim_.log().UserOfRecord(r) != user) {
      return Fail(o, absl::StrCat("record ", r, " resolved to the wrong user"));
    }
    k.decrypted_refs[r] = user;
    ++verified;
  }
  o.verified_items = verified;
  if (verified == 0) return Fail(o, "department resolved none of the records");
  o.succeeded = true;
  o.secrets_learned =
      absl::StrFormat("user ids of %d records from %s", verified, hd.value());
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::ModifyScanner(const AttackSpec& spec,
                                                             SimTime t,
                                                             AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  auto prep = prepared_.find(spec.index);
  if (prep == prepared_.end() || !prep->second.armed_at) {
    return Fail(o, "scanner was never modified");
  }
  std::vector<RecordId> targets;
  for (const CheckInRecord& r : sim_.server().checkins) {
    if (r.scanner_id == spec.scanner && r.checkin_time >= *prep->second.armed_at) {
      targets.push_back(r.id);
    }
  }
  if (targets.empty()) return Fail(o, "no check-ins at the modified scanner");
  LUCASIM_ASSIGN_OR_RETURN(auto stripped, StripViaOracle(targets, t, "venue_oracle", k));
  const std::int64_t opened =
      OpenInnerLayers(stripped, prep->second.keys.private_key, k);
  o.verified_items = opened;
  if (opened != static_cast<std::int64_t>(targets.size())) {
    return Fail(o, absl::StrFormat("%d of %d inner layers opened", opened,
                                   targets.size()));
  }
  o.succeeded = true;
  o.secrets_learned = absl::StrFormat("inner layer of %d check-ins at %s", opened,
                                      spec.scanner->value());
  return o;
}

absl::StatusOr<AttackOutcome> ActiveAdversary::ExfiltrateHdKey(const AttackSpec& spec,
                                                               AdversaryKnowledge& k) {
  AttackOutcome o = NewOutcome(spec, Detectability::kUndetectable);
  const HealthDeptId& hd = *spec.hd;
  const BackendServer& server = sim_.server();
  std::int64_t recovered = 0;

  if (spec.mode == ExfilMode::kSkipChecks) {
    // The frontend accepted the uncertified injected key while rotating.
    if (!server.vault.injected_hd_private) return Fail(o, "no injected key");
    for (const GroundTruthEvent& e : sim_.log().events()) {
      if (e.kind != EventKind::kKeyRotation || e.hd != hd || !e.day) continue;
      auto ct = server.vault.injected_hd_ciphertexts.find(*e.day);
      if (ct == server.vault.injected_hd_ciphertexts.end()) continue;
      auto sk = crypto::Decrypt(*server.vault.injected_hd_private, ct->second);
      if (sk.ok() && AcceptMasterKey(*e.day, {crypto::KeyRole::kDailyMaster,
                                              crypto::KeyUsage::kEncryption, *sk},
                                     k)) {
        ++recovered;
      }
    }
    o.verified_items = recovered;
    if (recovered == 0) return Fail(o, "target department never rotated a key");
    o.succeeded = true;
    o.secrets_learned = absl::StrFormat(
        "%d daily master keys rotated by %s with checks disabled", recovered,
        hd.value());
    return o;
  }

  std::optional<crypto::PrivateKey> key;
  if (spec.mode == ExfilMode::kBackdoorKeygen) {
    key = crypto::KeyPairFromSeed(
              crypto::KeyRole::kHealthDeptEncryption, crypto::KeyUsage::kEncryption,
              BackdoorSeed(server.behavior.backdoor_secret,
                           absl::StrCat(hd.value(), "/enc")))
              .private_key;
  } else if (auto it = server.vault.hd_enc_keys.find(hd);
             it != server.vault.hd_enc_keys.end()) {
    key = it->second;
  }
  if (!key) return Fail(o, "no key exfiltrated yet");
  if (HdKeyDigest(sim_.log(), hd) != Sha256Hex(key->bytes)) {
    return Fail(o, "recovered key does not match the department key");
  }
  k.recovered_keys[absl::StrCat("hd:", hd.value())] = *key;
  auto rec = server.health_depts.find(hd);
  if (rec != server.health_depts.end()) {
    for (const auto& [day, ct] : rec->second.encrypted_master_keys) {
      auto sk = crypto::Decrypt(*key, ct);
      if (sk.ok() && AcceptMasterKey(day, {crypto::KeyRole::kDailyMaster,
                                           crypto::KeyUsage::kEncryption, *sk},
                                     k)) {
        ++recovered;
      }
    }
  }
  o.verified_items = recovered + 1;
  if (recovered == 0) return Fail(o, "no stored key copy for the department");
  o.succeeded = true;
  o.secrets_learned = absl::StrFormat(
      "encryption key of %s (%s); %d daily master keys from stored copies",
      hd.value(), std::string(ExfilModeName(spec.mode)), recovered);
  return o;
}

}  // namespace lucasim
