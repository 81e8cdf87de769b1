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


#include "lucasim/simulation.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "lucasim/status.h"

namespace lucasim {
namespace {

constexpr char kServer[] = "server";

std::string GuestName(const GuestApp& g) { return absl::StrCat("guest:", g.device()); }
std::string VenueName(const VenueId& v) { return absl::StrCat("venue:", v.value()); }
std::string ScannerName(const ScannerId& s) {
  return absl::StrCat("scanner:", s.value());
}
std::string HdName(const HealthDeptId& h) { return absl::StrCat("hd:", h.value()); }

Bytes DayBytes(int day) {
  Bytes out;
  AppendU64(out, static_cast<std::uint64_t>(day));
  return out;
}

std::vector<std::pair<std::string, Bytes>> CertFields(
    std::string_view prefix, const std::optional<Certificate>& cert) {
  if (!cert) return {};
  return {{absl::StrCat(std::string(prefix), "_cert_subject"), cert->subject.bytes},
          {absl::StrCat(std::string(prefix), "_cert_signature"), cert->ca_signature.bytes}};
}

crypto::PrivateKey MasterPrivateFromBytes(Bytes bytes) {
  return crypto::PrivateKey{.role = crypto::KeyRole::kDailyMaster,
                            .usage = crypto::KeyUsage::kEncryption,
                            .bytes = std::move(bytes)};
}

}  // namespace

std::array<std::uint8_t, 32> BackdoorSeed(
    const std::array<std::uint8_t, 32>& secret, std::string_view target) {
  Bytes material(secret.begin(), secret.end());
  AppendLengthPrefixed(material, ToBytes(target));
  return Sha256(material);
}

Bytes EncodePositivePayload(const PositivePayload& payload) {
  Bytes out;
  AppendLengthPrefixed(out, ToBytes(payload.user_id.value()));
  AppendLengthPrefixed(out, payload.contact_key.bytes);
  AppendU64(out, payload.seeds.size());
  for (const crypto::TracingSeed& s : payload.seeds) {
    AppendU64(out, static_cast<std::uint64_t>(s.day));
    AppendLengthPrefixed(out, s.secret);
  }
  return out;
}

absl::StatusOr<PositivePayload> DecodePositivePayload(ByteSpan encoded) {
  ByteReader reader(encoded);
  PositivePayload out;
  auto user = reader.ReadLengthPrefixed();
  auto key = reader.ReadLengthPrefixed();
  auto count = reader.ReadU64();
  if (!user || !key || key->size() != 32 || !count) {
    return Error(ErrorKind::kInvalidArgument, "malformed positive payload");
  }
  out.user_id = UserId(ToString(*user));
  std::copy(key->begin(), key->end(), out.contact_key.bytes.begin());
  for (std::uint64_t i = 0; i < *count; ++i) {
    auto day = reader.ReadU64();
    auto secret = reader.ReadLengthPrefixed();
    if (!day || !secret || secret->size() != 32) {
      return Error(ErrorKind::kInvalidArgument, "malformed tracing seed");
    }
    crypto::TracingSeed seed{.day = static_cast<int>(*day)};
    std::copy(secret->begin(), secret->end(), seed.secret.begin());
    out.seeds.push_back(seed);
  }
  if (!reader.AtEnd()) {
    return Error(ErrorKind::kInvalidArgument, "trailing bytes in payload");
  }
  return out;
}

std::set<UserId> TraceResult::ContactIds() const {
  std::set<UserId> out;
  for (const TracedContact& c : contacts) out.insert(c.user_id);
  return out;
}

Simulation::Simulation(SimulationOptions options)
    : options_(std::move(options)),
      rng_(options_.seed),
      network_(options_.network, rng_.Fork(1)) {
  EnsureSodiumInitialized();
  SimRng ca_rng = rng_.Fork(2);
  if (options_.mitigations.pki_enabled) {
    ca_ = std::make_unique<CertificateAuthority>(ca_rng);
  }
  server_.behavior.backdoor_secret = rng_.Fork(3).RandomArray<32>();
}

std::int64_t Simulation::Send(SimTime t, std::string from, std::string to,
                              std::string kind,
                              std::vector<std::pair<std::string, Bytes>> fields) {
  return transcript_.Append(Message{.time = t,
                                    .from = std::move(from),
                                    .to = std::move(to),
                                    .kind = std::move(kind),
                                    .fields = std::move(fields)});
}

void Simulation::GuestToServer(GuestApp& guest, MessageKind kind,
                               std::optional<crypto::TraceId> trace_id,
                               SimTime t) {
  server_.Observe(network_.Deliver(guest.network(), kind, trace_id, t));
}

void Simulation::StaticToServer(Endpoint endpoint, const std::string& address,
                                std::optional<crypto::TraceId> trace_id,
                                SimTime t) {
  server_.Observe(network_.DeliverStatic(endpoint, address, MessageKind::kOther,
                                         trace_id, t));
}

absl::StatusOr<GuestApp*> Simulation::RegisteredGuest(int guest) {
  if (guest < 0 || guest >= static_cast<int>(guests_.size())) {
    return Error(ErrorKind::kInvalidArgument, absl::StrCat("no guest ", guest));
  }
  GuestApp& g = guests_[guest];
  if (!g.registered()) {
    return Error(ErrorKind::kUnknownUser,
                 absl::StrCat("guest ", guest, " is not registered"));
  }
  return &g;
}

std::optional<int> Simulation::GuestOfUser(const UserId& user) const {
  auto it = guest_of_user_.find(user);
  if (it == guest_of_user_.end()) return std::nullopt;
  return it->second;
}

std::vector<HealthDeptId> Simulation::health_dept_ids() const {
  std::vector<HealthDeptId> out;
  for (const auto& [id, hd] : health_depts_) out.push_back(id);
  return out;
}

int Simulation::AddGuest(ContactData contact, SimTime t) {
  const int device = static_cast<int>(guests_.size());
  guests_.emplace_back(device, std::move(contact),
                       network_.AssignIdentity(device, t));
  return device;
}

absl::StatusOr<UserId> Simulation::RegisterUser(int guest, SimTime t) {
  if (guest < 0 || guest >= static_cast<int>(guests_.size())) {
    return Error(ErrorKind::kInvalidArgument, absl::StrCat("no guest ", guest));
  }
  GuestApp& g = guests_[guest];
  if (g.registered()) {
    return Error(ErrorKind::kAlreadyRegistered,
                 absl::StrCat("guest ", guest, " already has a user id"));
  }
  const crypto::SymmetricKey key = crypto::GenerateSymmetricKey(rng_);
  const std::string cleartext = g.contact().Serialize();
  LUCASIM_ASSIGN_OR_RETURN(Bytes sealed,
                           crypto::SealSymmetric(key, ToBytes(cleartext), rng_));
  Send(t, GuestName(g), kServer, "register_user",
       {{"encrypted_contact", sealed}, {"phone_validated", ToBytes("1")}});
  GuestToServer(g, MessageKind::kOther, std::nullopt, t);

  UserId id;
  do {
    id = UserId(absl::StrCat("u-", HexEncode(rng_.RandomBytes(8))));
  } while (server_.users.contains(id));
  server_.users[id] = UserRecord{
      .user_id = id, .encrypted_contact = sealed, .phone_validated = true};
  Send(t, kServer, GuestName(g), "user_id", {{"user_id", ToBytes(id.value())}});
  g.CompleteRegistration(id, key);
  guest_of_user_[id] = guest;

  GroundTruthEvent e;
  e.kind = EventKind::kRegisterUser;
  e.time = t;
  e.user = id;
  e.address = g.network().address;
  e.digest = Sha256Hex(cleartext);
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return id;
}

absl::StatusOr<VenueId> Simulation::RegisterVenue(const VenueInfo& info,
                                                  SimTime t) {
  const int index = static_cast<int>(venues_.size());
  VenueActor venue;
  venue.id = VenueId(absl::StrFormat("v-%04d", index));
  venue.index = index;
  venue.address = NetworkModel::StaticAddress(Endpoint::kVenue, index);
  const ExfilMode mode = server_.frontend_code.VenueMode(venue.id);
  if (mode == ExfilMode::kBackdoorKeygen) {
    venue.keys = crypto::KeyPairFromSeed(
        crypto::KeyRole::kVenue, crypto::KeyUsage::kEncryption,
        BackdoorSeed(server_.behavior.backdoor_secret, venue.id.value()));
  } else {
    venue.keys = crypto::GenerateKeyPair(crypto::KeyRole::kVenue, rng_);
  }
  if (mode == ExfilMode::kExfilOnGen) {
    Send(t, VenueName(venue.id), kServer, "frontend_telemetry",
         {{"blob", venue.keys.private_key.bytes}});
    server_.vault.venue_keys[venue.id] = venue.keys.private_key;
  }

  VenueRecord record{.venue_id = venue.id,
                     .name = info.name,
                     .owner_contact = info.owner_contact,
                     .location = info.location,
                     .type = info.type,
                     .public_key = venue.keys.public_key};
  for (int k = 0; k < std::max(0, info.scanner_count); ++k) {
    ScannerId sid(absl::StrFormat("s-%04d-%d", index, k));
    record.scanner_ids.push_back(sid);
    venue.scanners.push_back(sid);
    scanners_[sid] = ScannerFrontend{.id = sid,
                                     .venue = venue.id,
                                     .venue_public_key = venue.keys.public_key,
                                     .address = venue.address};
    server_.scanner_to_venue[sid] = venue.id;
  }
  if (info.self_checkin_qr) {
    ScannerId qr(absl::StrFormat("q-%04d", index));
    record.self_checkin_qr = qr;
    venue.self_checkin_qr = qr;
    server_.scanner_to_venue[qr] = venue.id;
  }

  Send(t, VenueName(venue.id), kServer, "register_venue",
       {{"name", ToBytes(info.name)},
        {"owner_contact", ToBytes(info.owner_contact)},
        {"location", ToBytes(absl::StrFormat("%.6f,%.6f", info.location.lat,
                                             info.location.lon))},
        {"type", ToBytes(VenueTypeName(info.type))},
        {"public_key", venue.keys.public_key.bytes}});
  StaticToServer(Endpoint::kVenue, venue.address, std::nullopt, t);
  server_.venues[venue.id] = std::move(record);

  GroundTruthEvent e;
  e.kind = EventKind::kRegisterVenue;
  e.time = t;
  e.venue = venue.id;
  e.address = venue.address;
  e.digest = Sha256Hex(venue.keys.private_key.bytes);
  e.detail = std::string(VenueTypeName(info.type));
  const VenueId id = venue.id;
  venues_.emplace(id, std::move(venue));
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return id;
}

absl::StatusOr<HealthDeptId> Simulation::RegisterHealthDept(SimTime t) {
  const int index = static_cast<int>(health_depts_.size());
  HealthDept hd;
  hd.id = HealthDeptId(absl::StrFormat("hd-%03d", index));
  hd.index = index;
  hd.address = NetworkModel::StaticAddress(Endpoint::kHealthDept, index);
  const ExfilMode mode = server_.frontend_code.HealthDeptMode(hd.id);
  if (mode == ExfilMode::kBackdoorKeygen) {
    hd.enc_keys = crypto::KeyPairFromSeed(
        crypto::KeyRole::kHealthDeptEncryption, crypto::KeyUsage::kEncryption,
        BackdoorSeed(server_.behavior.backdoor_secret,
                     absl::StrCat(hd.id.value(), "/enc")));
  } else {
    hd.enc_keys =
        crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptEncryption, rng_);
  }
  hd.sign_keys =
      crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptSigning, rng_);
  if (mode == ExfilMode::kExfilOnGen) {
    Send(t, HdName(hd.id), kServer, "frontend_telemetry",
         {{"blob", hd.enc_keys.private_key.bytes},
          {"blob2", hd.sign_keys.private_key.bytes}});
    server_.vault.hd_enc_keys[hd.id] = hd.enc_keys.private_key;
    server_.vault.hd_sign_keys[hd.id] = hd.sign_keys.private_key;
  }
  if (ca_) {
    Send(t, HdName(hd.id), "ca", "certify",
         {{"enc_public", hd.enc_keys.public_key.bytes},
          {"sign_public", hd.sign_keys.public_key.bytes}});
    hd.enc_cert = ca_->Issue(hd.enc_keys.public_key, kCertRoleHealthDeptEnc);
    hd.sign_cert = ca_->Issue(hd.sign_keys.public_key, kCertRoleHealthDeptSign);
  }

  std::vector<std::pair<std::string, Bytes>> fields = {
      {"enc_public", hd.enc_keys.public_key.bytes},
      {"sign_public", hd.sign_keys.public_key.bytes}};
  for (auto& f : CertFields("enc", hd.enc_cert)) fields.push_back(std::move(f));
  for (auto& f : CertFields("sign", hd.sign_cert)) fields.push_back(std::move(f));
  Send(t, HdName(hd.id), kServer, "register_health_dept", std::move(fields));
  StaticToServer(Endpoint::kHealthDept, hd.address, std::nullopt, t);
  server_.health_depts[hd.id] =
      HealthDeptRecord{.hd_id = hd.id,
                       .enc_public = hd.enc_keys.public_key,
                       .sign_public = hd.sign_keys.public_key,
                       .enc_cert = hd.enc_cert,
                       .sign_cert = hd.sign_cert};

  GroundTruthEvent e;
  e.kind = EventKind::kRegisterHealthDept;
  e.time = t;
  e.hd = hd.id;
  e.address = hd.address;
  e.digest = Sha256Hex(hd.enc_keys.private_key.bytes);
  const HealthDeptId id = hd.id;
  health_depts_.emplace(id, std::move(hd));
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return id;
}

absl::StatusOr<PublishedMasterKey> Simulation::RotateDailyMasterKey(
    const HealthDeptId& first_hd, int day, SimTime t) {
  auto hd_it = health_depts_.find(first_hd);
  if (hd_it == health_depts_.end()) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("unknown health department ", first_hd.value()));
  }
  if (server_.master_keys.contains(day)) {
    return Error(ErrorKind::kKeyAlreadyExists,
                 absl::StrCat("master key for day ", day, " already published"));
  }
  HealthDept& hd = hd_it->second;
  const ExfilMode mode = server_.frontend_code.HealthDeptMode(hd.id);
  const std::string me = HdName(hd.id);

  // (1) fresh pair, (2) signed public half.
  const crypto::AsymKeyPair master =
      crypto::GenerateKeyPair(crypto::KeyRole::kDailyMaster, rng_);
  const crypto::Signature sig = crypto::Sign(
      hd.sign_keys.private_key, MasterKeyMessage(day, master.public_key));
  if (mode == ExfilMode::kExfilOnUse) {
    Send(t, me, kServer, "frontend_telemetry",
         {{"blob", hd.sign_keys.private_key.bytes}});
    server_.vault.hd_sign_keys[hd.id] = hd.sign_keys.private_key;
  }
  Send(t, me, kServer, "publish_master_key",
       {{"day", DayBytes(day)},
        {"public_key", master.public_key.bytes},
        {"signature", sig.bytes}});
  StaticToServer(Endpoint::kHealthDept, hd.address, std::nullopt, t);
  PublishedMasterKey published{.day = day,
                               .key = master.public_key,
                               .signature = sig,
                               .signer = hd.id,
                               .signer_key = hd.sign_keys.public_key,
                               .signer_cert = hd.sign_cert};
  server_.master_keys[day] = published;

  // (3) private half to every other department, as listed by the server.
  Send(t, me, kServer, "fetch_hd_keys", {{"day", DayBytes(day)}});
  server_.requests.push_back(
      ServerRequest{.time = t, .requester = hd.id.value(), .kind = "fetch_hd_keys"});
  std::vector<const HealthDeptRecord*> listed;
  for (const auto& [id, rec] : server_.health_depts) {
    if (id != hd.id) listed.push_back(&rec);
  }
  if (server_.behavior.injected_hd) listed.push_back(&*server_.behavior.injected_hd);
  std::vector<std::pair<std::string, Bytes>> listing;
  for (const HealthDeptRecord* rec : listed) {
    listing.emplace_back(rec->hd_id.value(), rec->enc_public.bytes);
  }
  Send(t, kServer, me, "hd_keys", std::move(listing));

  const bool check_certs = options_.mitigations.pki_enabled &&
                           mode != ExfilMode::kSkipChecks && ca_ != nullptr;
  std::vector<std::pair<std::string, Bytes>> copies;
  for (const HealthDeptRecord* rec : listed) {
    if (check_certs &&
        !(rec->enc_cert && VerifyCertificate(*rec->enc_cert, ca_->root(),
                                             rec->enc_public,
                                             kCertRoleHealthDeptEnc))) {
      continue;
    }
    LUCASIM_ASSIGN_OR_RETURN(
        Bytes ct,
        crypto::Encrypt(rec->enc_public, master.private_key.bytes, rng_));
    copies.emplace_back(rec->hd_id.value(), ct);
    const bool injected = server_.behavior.injected_hd &&
                          rec->hd_id == server_.behavior.injected_hd->hd_id;
    if (injected) {
      server_.vault.injected_hd_ciphertexts[day] = ct;
    } else {
      server_.health_depts[rec->hd_id].encrypted_master_keys[day] = ct;
    }
  }
  Send(t, me, kServer, "upload_master_key_copies", std::move(copies));
  hd.master_keys[day] = master.private_key;

  GroundTruthEvent e;
  e.kind = EventKind::kKeyRotation;
  e.time = t;
  e.hd = hd.id;
  e.day = day;
  e.digest = Sha256Hex(master.private_key.bytes);
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return published;
}

absl::StatusOr<crypto::PublicKey> Simulation::FetchVerifiedMasterKey(
    int day, const std::string& client, bool skip_checks, SimTime t) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    const PublishedMasterKey* p = nullptr;
    bool substituted = false;
    if (auto it = server_.behavior.substituted_master_keys.find(day);
        it != server_.behavior.substituted_master_keys.end()) {
      p = &it->second;
      substituted = true;
    } else if (auto it2 = server_.master_keys.find(day);
               it2 != server_.master_keys.end()) {
      p = &it2->second;
    } else {
      return Error(ErrorKind::kNoMasterKey,
                   absl::StrCat("no master key for day ", day));
    }
    std::vector<std::pair<std::string, Bytes>> fields = {
        {"day", DayBytes(day)},
        {"public_key", p->key.bytes},
        {"signature", p->signature.bytes},
        {"signer_key", p->signer_key.bytes}};
    for (auto& f : CertFields("signer", p->signer_cert)) {
      fields.push_back(std::move(f));
    }
    Send(t, kServer, client, "master_key", std::move(fields));
    if (skip_checks) return p->key;

    bool ok = crypto::Verify(p->signer_key, MasterKeyMessage(day, p->key),
                             p->signature);
    if (ok && options_.mitigations.pki_enabled) {
      ok = ca_ != nullptr && p->signer_cert.has_value() &&
           VerifyCertificate(*p->signer_cert, ca_->root(), p->signer_key,
                             kCertRoleHealthDeptSign);
    }
    if (ok) return p->key;
    if (!substituted) {
      return Error(ErrorKind::kNoMasterKey,
                   absl::StrCat("master key for day ", day,
                                " failed verification"));
    }
    server_.vault.detections.push_back(
        absl::StrCat(client, " rejected master key for day ", day));
    server_.behavior.substituted_master_keys.erase(day);
  }
  return Error(ErrorKind::kNoMasterKey, "master key verification failed");
}

absl::StatusOr<RecordId> Simulation::StoreCheckin(
    GuestApp& guest, const ScannerId& id, const crypto::TraceId& trace_id,
    crypto::EncryptedUserReference outer, const Bytes& inner_ciphertext,
    SimTime t, std::optional<std::int64_t> group, bool self_checkin) {
  const std::optional<VenueId> venue = server_.VenueOfScanner(id);
  if (!venue) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("unknown scanner ", id.value()));
  }
  const RecordId record_id = static_cast<RecordId>(server_.checkins.size());
  if (self_checkin) {
    auto sub = server_.behavior.substituted_venue_keys.find(*venue);
    if (sub != server_.behavior.substituted_venue_keys.end()) {
      auto inner = crypto::RemoveOuterLayer(outer, sub->second.private_key);
      if (inner.ok()) {
        server_.vault.stripped_at_ingest[record_id] = *inner;
        LUCASIM_ASSIGN_OR_RETURN(
            outer, crypto::AddOuterLayer(
                       *inner, server_.venues.at(*venue).public_key, rng_));
      }
    }
  }
  server_.checkins.push_back(CheckInRecord{.id = record_id,
                                           .scanner_id = id,
                                           .trace_id = trace_id,
                                           .double_enc_ref = std::move(outer),
                                           .checkin_time = t});
  server_.by_trace_id[trace_id] = record_id;

  Send(t, GuestName(guest), kServer, "poll", {{"trace_id", ToBytes(trace_id.Hex())}});
  GuestToServer(guest, MessageKind::kCheckinPoll, trace_id, t);
  if (server_.FindByTraceId(trace_id) == nullptr) {
    return Error(ErrorKind::kUnconfirmedCheckin, "poll found no record");
  }
  Send(t, kServer, GuestName(guest), "poll_result", {{"confirmed", ToBytes("1")}});
  guest.open_checkin() = OpenCheckin{.trace_id = trace_id, .since = t};

  GroundTruthEvent e;
  e.kind = EventKind::kCheckin;
  e.time = t;
  e.user = guest.user_id();
  e.venue = *venue;
  e.scanner = id;
  e.record = record_id;
  e.trace_id = trace_id.Hex();
  e.address = guest.network().address;
  e.digest = Sha256Hex(inner_ciphertext);
  e.group = group;
  e.day = DayOf(t);
  e.detail = self_checkin ? "self" : "scanner";
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return record_id;
}

absl::StatusOr<RecordId> Simulation::CheckInScanner(
    int guest, const ScannerId& scanner, SimTime t,
    std::optional<std::int64_t> group) {
  LUCASIM_ASSIGN_OR_RETURN(GuestApp * g, RegisteredGuest(guest));
  auto sc_it = scanners_.find(scanner);
  if (sc_it == scanners_.end()) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("unknown scanner ", scanner.value()));
  }
  ScannerFrontend& sc = sc_it->second;
  const int day = DayOf(t);

  // The scanner frontend supplies the day's master key to the app.
  crypto::PublicKey master;
  if (auto ov = server_.frontend_code.scanner_master_key.find(scanner);
      ov != server_.frontend_code.scanner_master_key.end()) {
    master = ov->second;
  } else if (auto c = sc.master_key_cache.find(day);
             c != sc.master_key_cache.end()) {
    master = c->second;
  } else {
    Send(t, ScannerName(scanner), kServer, "fetch_master_key",
         {{"day", DayBytes(day)}});
    StaticToServer(Endpoint::kVenue, sc.address, std::nullopt, t);
    LUCASIM_ASSIGN_OR_RETURN(
        master, FetchVerifiedMasterKey(day, ScannerName(scanner), false, t));
    sc.master_key_cache[day] = master;
  }

  const crypto::TraceId trace_id = g->NextTraceId(day, rng_);
  LUCASIM_ASSIGN_OR_RETURN(
      crypto::EncryptedUserReference inner,
      crypto::EncryptUserReference(
          {.user_id = g->user_id().value(), .contact_key = g->contact_key()},
          master, rng_));
  Send(t, GuestName(*g), ScannerName(scanner), "qr_code",
       {{"trace_id", ToBytes(trace_id.Hex())},
        {"user_reference", inner.ciphertext}});
  LUCASIM_ASSIGN_OR_RETURN(
      crypto::EncryptedUserReference outer,
      crypto::AddOuterLayer(inner, sc.venue_public_key, rng_));
  Send(t, ScannerName(scanner), kServer, "upload_checkin",
       {{"scanner_id", ToBytes(scanner.value())},
        {"trace_id", ToBytes(trace_id.Hex())},
        {"reference", outer.ciphertext}});
  StaticToServer(Endpoint::kVenue, sc.address, trace_id, t);
  return StoreCheckin(*g, scanner, trace_id, std::move(outer), inner.ciphertext,
                      t, group, false);
}

absl::StatusOr<RecordId> Simulation::CheckInSelf(
    int guest, const VenueId& venue, SimTime t,
    std::optional<std::int64_t> group) {
  LUCASIM_ASSIGN_OR_RETURN(GuestApp * g, RegisteredGuest(guest));
  auto v_it = venues_.find(venue);
  if (v_it == venues_.end() || !v_it->second.self_checkin_qr) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("venue ", venue.value(), " has no self check-in"));
  }
  const VenueActor& v = v_it->second;
  const ScannerId qr = *v.self_checkin_qr;
  const int day = DayOf(t);
  const std::string me = GuestName(*g);

  crypto::PublicKey master;
  if (auto c = g->master_key_cache().find(day); c != g->master_key_cache().end()) {
    master = c->second;
  } else {
    Send(t, me, kServer, "fetch_master_key", {{"day", DayBytes(day)}});
    GuestToServer(*g, MessageKind::kOther, std::nullopt, t);
    LUCASIM_ASSIGN_OR_RETURN(master, FetchVerifiedMasterKey(day, me, false, t));
    g->master_key_cache()[day] = master;
  }

  crypto::PublicKey venue_key;
  if (options_.mitigations.qr_embeds_venue_key) {
    venue_key = v.keys.public_key;
  } else {
    Send(t, me, kServer, "fetch_venue_key", {{"venue", ToBytes(venue.value())}});
    GuestToServer(*g, MessageKind::kOther, std::nullopt, t);
    auto sub = server_.behavior.substituted_venue_keys.find(venue);
    venue_key = sub != server_.behavior.substituted_venue_keys.end()
                    ? sub->second.public_key
                    : server_.venues.at(venue).public_key;
    Send(t, kServer, me, "venue_key", {{"public_key", venue_key.bytes}});
  }

  const crypto::TraceId trace_id = g->NextTraceId(day, rng_);
  LUCASIM_ASSIGN_OR_RETURN(
      crypto::EncryptedUserReference inner,
      crypto::EncryptUserReference(
          {.user_id = g->user_id().value(), .contact_key = g->contact_key()},
          master, rng_));
  LUCASIM_ASSIGN_OR_RETURN(crypto::EncryptedUserReference outer,
                           crypto::AddOuterLayer(inner, venue_key, rng_));
  Send(t, me, kServer, "self_checkin",
       {{"scanner_id", ToBytes(qr.value())},
        {"trace_id", ToBytes(trace_id.Hex())},
        {"reference", outer.ciphertext}});
  GuestToServer(*g, MessageKind::kOther, trace_id, t);
  return StoreCheckin(*g, qr, trace_id, std::move(outer), inner.ciphertext, t,
                      group, true);
}

absl::Status Simulation::CheckOut(int guest, SimTime t) {
  LUCASIM_ASSIGN_OR_RETURN(GuestApp * g, RegisteredGuest(guest));
  if (!g->open_checkin()) {
    return Error(ErrorKind::kNoOpenCheckin,
                 absl::StrCat("guest ", guest, " has no open check-in"));
  }
  const crypto::TraceId trace_id = g->open_checkin()->trace_id;
  Send(t, GuestName(*g), kServer, "checkout",
       {{"trace_id", ToBytes(trace_id.Hex())},
        {"time", ToBytes(absl::StrCat(t))}});
  GuestToServer(*g, MessageKind::kCheckout, trace_id, t);
  auto it = server_.by_trace_id.find(trace_id);
  if (it == server_.by_trace_id.end()) {
    return Error(ErrorKind::kNoOpenCheckin, "server has no matching record");
  }
  CheckInRecord& record = server_.checkins[it->second];
  LUCASIM_RETURN_IF_ERROR(record.SetCheckout(t));
  g->open_checkin().reset();

  GroundTruthEvent e;
  e.kind = EventKind::kCheckout;
  e.time = t;
  e.user = g->user_id();
  e.record = record.id;
  e.venue = server_.VenueOfRecord(record.id);
  e.trace_id = trace_id.Hex();
  return log_.Record(std::move(e));
}

absl::StatusOr<crypto::VerificationCode> Simulation::ReportPositive(
    int guest, const std::vector<int>& days, SimTime t) {
  LUCASIM_ASSIGN_OR_RETURN(GuestApp * g, RegisteredGuest(guest));
  const int day = DayOf(t);
  const std::string me = GuestName(*g);
  crypto::PublicKey master;
  if (auto c = g->master_key_cache().find(day); c != g->master_key_cache().end()) {
    master = c->second;
  } else {
    Send(t, me, kServer, "fetch_master_key", {{"day", DayBytes(day)}});
    GuestToServer(*g, MessageKind::kOther, std::nullopt, t);
    LUCASIM_ASSIGN_OR_RETURN(master, FetchVerifiedMasterKey(day, me, false, t));
    g->master_key_cache()[day] = master;
  }

  PositivePayload payload{.user_id = g->user_id(),
                          .contact_key = g->contact_key()};
  for (int d : days) payload.seeds.push_back(g->SeedFor(d, rng_));
  const Bytes plaintext = EncodePositivePayload(payload);
  LUCASIM_ASSIGN_OR_RETURN(Bytes ct, crypto::Encrypt(master, plaintext, rng_));
  Send(t, me, kServer, "positive_upload",
       {{"ciphertext", ct}, {"day", DayBytes(day)}});
  GuestToServer(*g, MessageKind::kPositiveUpload, std::nullopt, t);
  const std::int64_t observation =
      static_cast<std::int64_t>(server_.observations.size()) - 1;

  crypto::VerificationCode code;
  do {
    code = crypto::GenerateVerificationCode(rng_);
  } while (server_.uploads.contains(code.code));
  if (auto sub = server_.vault.substituted_master_private.find(day);
      sub != server_.vault.substituted_master_private.end()) {
    auto opened = crypto::Decrypt(sub->second, ct);
    auto honest = server_.master_keys.find(day);
    if (opened.ok() && honest != server_.master_keys.end()) {
      server_.vault.upload_plaintexts[code.code] = *opened;
      LUCASIM_ASSIGN_OR_RETURN(ct,
                               crypto::Encrypt(honest->second.key, *opened, rng_));
    }
  }
  server_.uploads[code.code] = PositiveUpload{.code = code,
                                              .ciphertext = ct,
                                              .day = day,
                                              .time = t,
                                              .observation = observation};
  Send(t, kServer, me, "verification_code", {{"code", ToBytes(code.code)}});

  GroundTruthEvent e;
  e.kind = EventKind::kReportPositive;
  e.time = t;
  e.user = g->user_id();
  e.code = code.code;
  e.day = day;
  e.days = days;
  e.address = g->network().address;
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return code;
}

absl::StatusOr<crypto::PrivateKey> Simulation::HealthDeptMasterKey(
    HealthDept& hd, int day, SimTime t) {
  if (auto it = hd.master_keys.find(day); it != hd.master_keys.end()) {
    return it->second;
  }
  const std::string me = HdName(hd.id);
  Send(t, me, kServer, "fetch_master_key_copy", {{"day", DayBytes(day)}});
  StaticToServer(Endpoint::kHealthDept, hd.address, std::nullopt, t);
  server_.requests.push_back(ServerRequest{
      .time = t, .requester = hd.id.value(), .kind = "fetch_master_key_copy"});
  const HealthDeptRecord& rec = server_.health_depts.at(hd.id);
  auto copy = rec.encrypted_master_keys.find(day);
  if (copy == rec.encrypted_master_keys.end()) {
    return Error(ErrorKind::kNoMasterKey,
                 absl::StrCat(hd.id.value(), " has no key copy for day ", day));
  }
  Send(t, kServer, me, "master_key_copy", {{"ciphertext", copy->second}});
  if (server_.frontend_code.HealthDeptMode(hd.id) == ExfilMode::kExfilOnUse) {
    Send(t, me, kServer, "frontend_telemetry",
         {{"blob", hd.enc_keys.private_key.bytes}});
    server_.vault.hd_enc_keys[hd.id] = hd.enc_keys.private_key;
  }
  LUCASIM_ASSIGN_OR_RETURN(Bytes sk,
                           crypto::Decrypt(hd.enc_keys.private_key, copy->second));
  crypto::PrivateKey key = MasterPrivateFromBytes(std::move(sk));
  hd.master_keys[day] = key;
  return key;
}

std::map<VenueId, std::vector<RecordId>> Simulation::RelevantRecords(
    const std::vector<RecordId>& index_records) const {
  std::map<VenueId, std::vector<RecordId>> out;
  const std::set<RecordId> index_set(index_records.begin(), index_records.end());
  for (RecordId r : index_records) {
    const CheckInRecord& idx = server_.checkins.at(r);
    const std::optional<VenueId> venue = server_.VenueOfRecord(r);
    if (!venue) continue;
    const SimTime idx_end =
        options_.stay.EffectiveEnd(idx.checkin_time, idx.checkout_time);
    std::vector<RecordId>& bucket = out[*venue];
    for (const CheckInRecord& other : server_.checkins) {
      if (index_set.contains(other.id)) continue;
      if (server_.VenueOfScanner(other.scanner_id) != venue) continue;
      const SimTime end =
          options_.stay.EffectiveEnd(other.checkin_time, other.checkout_time);
      if (VisitsOverlap(idx.checkin_time, idx_end, other.checkin_time, end,
                        options_.stay.overlap_slack)) {
        bucket.push_back(other.id);
      }
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    std::sort(it->second.begin(), it->second.end());
    it->second.erase(std::unique(it->second.begin(), it->second.end()),
                     it->second.end());
    it = it->second.empty() ? out.erase(it) : std::next(it);
  }
  return out;
}

absl::StatusOr<std::map<RecordId, crypto::EncryptedUserReference>>
Simulation::RequestVenueDecryption(const VenueId& venue,
                                   const std::vector<RecordId>& records,
                                   const std::vector<RecordId>& authorized,
                                   SimTime t, std::string_view detail) {
  auto v_it = venues_.find(venue);
  if (v_it == venues_.end()) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("unknown venue ", venue.value()));
  }
  if (options_.unavailable_venues.contains(venue)) {
    return Error(ErrorKind::kVenueUnavailable,
                 absl::StrCat("venue ", venue.value(), " did not respond"));
  }
  const VenueActor& v = v_it->second;
  const std::string me = VenueName(venue);
  std::vector<std::pair<std::string, Bytes>> request;
  for (RecordId r : records) {
    if (r < 0 || r >= static_cast<RecordId>(server_.checkins.size())) {
      return Error(ErrorKind::kInvalidArgument, absl::StrCat("no record ", r));
    }
    request.emplace_back(absl::StrCat("record:", r),
                         server_.checkins[r].double_enc_ref.ciphertext);
  }
  Send(t, kServer, me, "decrypt_request", std::move(request));
  if (server_.frontend_code.VenueMode(venue) == ExfilMode::kExfilOnUse) {
    Send(t, me, kServer, "frontend_telemetry",
         {{"blob", v.keys.private_key.bytes}});
    server_.vault.venue_keys[venue] = v.keys.private_key;
  }

  std::map<RecordId, crypto::EncryptedUserReference> out;
  std::vector<std::pair<std::string, Bytes>> response;
  for (RecordId r : records) {
    auto inner =
        crypto::RemoveOuterLayer(server_.checkins[r].double_enc_ref,
                                 v.keys.private_key);
    if (!inner.ok()) continue;
    response.emplace_back(absl::StrCat("record:", r), inner->ciphertext);
    out[r] = *inner;
  }
  Send(t, me, kServer, "decrypt_response", std::move(response));
  StaticToServer(Endpoint::kVenue, v.address, std::nullopt, t);
  server_.requests.push_back(ServerRequest{
      .time = t, .requester = venue.value(), .kind = "venue_decryption",
      .records = records});
  for (const auto& [r, ref] : out) server_.singly_encrypted[r] = ref;

  GroundTruthEvent e;
  e.kind = EventKind::kVenueDecryption;
  e.time = t;
  e.venue = venue;
  for (const auto& [r, ref] : out) e.records.push_back(r);
  const std::set<RecordId> auth(authorized.begin(), authorized.end());
  for (RecordId r : e.records) {
    if (auth.contains(r)) e.authorized_records.push_back(r);
  }
  e.detail = std::string(detail);
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return out;
}

absl::StatusOr<std::map<RecordId, UserId>>
Simulation::RequestHealthDeptDecryption(
    const HealthDeptId& hd_id,
    const std::map<RecordId, crypto::EncryptedUserReference>& records,
    const std::vector<RecordId>& authorized, SimTime t,
    std::string_view detail, bool report_to_server) {
  auto hd_it = health_depts_.find(hd_id);
  if (hd_it == health_depts_.end()) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("unknown health department ", hd_id.value()));
  }
  HealthDept& hd = hd_it->second;
  const std::string me = HdName(hd_id);
  std::vector<std::pair<std::string, Bytes>> request;
  for (const auto& [r, ref] : records) {
    request.emplace_back(absl::StrCat("record:", r), ref.ciphertext);
  }
  Send(t, kServer, me, "decrypt_records", std::move(request));

  std::map<RecordId, UserId> out;
  std::vector<std::pair<std::string, Bytes>> response;
  for (const auto& [r, ref] : records) {
    if (r < 0 || r >= static_cast<RecordId>(server_.checkins.size())) continue;
    const int day = DayOf(server_.checkins[r].checkin_time);
    auto master = HealthDeptMasterKey(hd, day, t);
    if (!master.ok()) continue;
    auto opened = crypto::OpenUserReference(ref, *master);
    if (!opened.ok()) continue;
    const UserId user(opened->user_id);
    hd.contact_keys[user] = opened->contact_key;
    out[r] = user;
    response.emplace_back(absl::StrCat("record:", r), ToBytes(user.value()));
  }
  if (report_to_server) {
    Send(t, me, kServer, "resolved_user_ids", std::move(response));
  }
  StaticToServer(Endpoint::kHealthDept, hd.address, std::nullopt, t);
  std::vector<RecordId> ids;
  for (const auto& [r, ref] : records) ids.push_back(r);
  server_.requests.push_back(ServerRequest{.time = t,
                                           .requester = hd_id.value(),
                                           .kind = "health_dept_decryption",
                                           .records = ids});

  GroundTruthEvent e;
  e.kind = EventKind::kHealthDeptDecryption;
  e.time = t;
  e.hd = hd_id;
  for (const auto& [r, u] : out) e.records.push_back(r);
  const std::set<RecordId> auth(authorized.begin(), authorized.end());
  for (RecordId r : e.records) {
    if (auth.contains(r)) e.authorized_records.push_back(r);
  }
  e.detail = std::string(detail);
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return out;
}

absl::StatusOr<std::map<RecordId, crypto::EncryptedUserReference>>
Simulation::LoadVenueFrontend(const VenueId& venue, SimTime t) {
  auto v_it = venues_.find(venue);
  if (v_it == venues_.end()) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("unknown venue ", venue.value()));
  }
  if (server_.frontend_code.VenueMode(venue) != ExfilMode::kSkipChecks) {
    return Error(ErrorKind::kNotApplicable,
                 "venue frontend runs unmodified code");
  }
  const VenueActor& v = v_it->second;
  std::map<RecordId, crypto::EncryptedUserReference> out;
  std::vector<std::pair<std::string, Bytes>> blob;
  for (const CheckInRecord& r : server_.checkins) {
    if (server_.VenueOfScanner(r.scanner_id) != venue) continue;
    auto inner = crypto::RemoveOuterLayer(r.double_enc_ref, v.keys.private_key);
    if (!inner.ok()) continue;
    out[r.id] = *inner;
    blob.emplace_back(absl::StrCat("record:", r.id), inner->ciphertext);
  }
  Send(t, VenueName(venue), kServer, "frontend_telemetry", std::move(blob));
  StaticToServer(Endpoint::kVenue, v.address, std::nullopt, t);
  for (const auto& [r, ref] : out) server_.singly_encrypted[r] = ref;

  GroundTruthEvent e;
  e.kind = EventKind::kVenueDecryption;
  e.time = t;
  e.venue = venue;
  for (const auto& [r, ref] : out) e.records.push_back(r);
  e.detail = "frontend_skip_checks";
  LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  return out;
}

void Simulation::PickPadding(const TraceCase& tc, int extra) {
  // Prefer records at the venues already being asked, outside the index
  // case's reported days.
  std::set<RecordId> taken(tc.index_records.begin(), tc.index_records.end());
  for (const auto& [venue, recs] : tc.relevant) taken.insert(recs.begin(), recs.end());
  const std::set<int> days(tc.days.begin(), tc.days.end());
  int remaining = extra;
  for (int pass = 0; pass < 2 && remaining > 0; ++pass) {
    for (const CheckInRecord& r : server_.checkins) {
      if (remaining == 0) break;
      if (taken.contains(r.id) || days.contains(DayOf(r.checkin_time))) continue;
      const std::optional<VenueId> venue = server_.VenueOfRecord(r.id);
      if (!venue || (pass == 0 && !tc.relevant.contains(*venue))) continue;
      server_.behavior.padding[*venue].push_back(r.id);
      taken.insert(r.id);
      --remaining;
    }
  }
}

absl::StatusOr<TraceResult> Simulation::Trace(
    const HealthDeptId& hd_id, const crypto::VerificationCode& code, SimTime t,
    std::optional<TimeWindow> window) {
  auto hd_it = health_depts_.find(hd_id);
  if (hd_it == health_depts_.end()) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("unknown health department ", hd_id.value()));
  }
  HealthDept& hd = hd_it->second;
  const std::string me = HdName(hd_id);
  auto up_it = server_.uploads.find(code.code);

  // t0: fetch the upload and decrypt it.
  Send(t, me, kServer, "fetch_upload", {{"code", ToBytes(code.code)}});
  StaticToServer(Endpoint::kHealthDept, hd.address, std::nullopt, t);
  server_.requests.push_back(ServerRequest{.time = t,
                                           .requester = hd_id.value(),
                                           .kind = "fetch_upload",
                                           .code = code.code});
  if (up_it == server_.uploads.end()) {
    return Error(ErrorKind::kUnknownCode,
                 absl::StrCat("no upload for code ", code.code));
  }
  const PositiveUpload& upload = up_it->second;
  Send(t, kServer, me, "upload", {{"ciphertext", upload.ciphertext}});
  LUCASIM_ASSIGN_OR_RETURN(crypto::PrivateKey master,
                           HealthDeptMasterKey(hd, upload.day, t));
  LUCASIM_ASSIGN_OR_RETURN(Bytes plaintext,
                           crypto::Decrypt(master, upload.ciphertext));
  LUCASIM_ASSIGN_OR_RETURN(PositivePayload payload,
                           DecodePositivePayload(plaintext));
  hd.contact_keys[payload.user_id] = payload.contact_key;

  TraceResult result;
  result.code = code;
  result.index_user = payload.user_id;
  for (const crypto::TracingSeed& s : payload.seeds) result.days.push_back(s.day);

  // t0+5: index case contact record.
  const SimTime t_contact = t + kTraceContactFetchOffset;
  Send(t_contact, me, kServer, "fetch_contact",
       {{"user_id", ToBytes(payload.user_id.value())}});
  server_.requests.push_back(ServerRequest{.time = t_contact,
                                           .requester = hd_id.value(),
                                           .kind = "fetch_contact",
                                           .user_ids = {payload.user_id}});
  std::optional<ContactData> index_contact;
  if (auto u = server_.users.find(payload.user_id); u != server_.users.end()) {
    Send(t_contact, kServer, me, "contact",
         {{"encrypted_contact", u->second.encrypted_contact}});
    auto opened =
        crypto::OpenSymmetric(payload.contact_key, u->second.encrypted_contact);
    if (opened.ok()) index_contact = ContactData::Parse(ToString(*opened));
  }

  // t0+10: identifier and seeds go back to the server.
  const SimTime t_submit = t + kTraceSubmitOffset;
  std::vector<std::pair<std::string, Bytes>> submit = {
      {"user_id", ToBytes(payload.user_id.value())}};
  for (const crypto::TracingSeed& s : payload.seeds) {
    submit.emplace_back(absl::StrCat("seed:", s.day),
                        Bytes(s.secret.begin(), s.secret.end()));
  }
  Send(t_submit, me, kServer, "submit_trace", std::move(submit));
  TraceCase tc{.hd = hd_id,
               .index_user = payload.user_id,
               .seeds = payload.seeds,
               .days = result.days,
               .time = t};
  for (const crypto::TracingSeed& s : payload.seeds) {
    for (const crypto::TraceId& id : crypto::DeriveAllTraceIds(
             s, static_cast<std::uint64_t>(options_.max_checkins_per_day))) {
      const CheckInRecord* r = server_.FindByTraceId(id);
      if (r == nullptr) continue;
      if (window && !window->Contains(r->checkin_time)) continue;
      tc.index_records.push_back(r->id);
    }
  }
  std::sort(tc.index_records.begin(), tc.index_records.end());
  tc.relevant = RelevantRecords(tc.index_records);
  result.index_records = tc.index_records;
  {
    GroundTruthEvent e;
    e.kind = EventKind::kTraceRequest;
    e.time = t_submit;
    e.hd = hd_id;
    e.user = payload.user_id;
    e.code = code.code;
    e.days = result.days;
    e.records = tc.index_records;
    LUCASIM_RETURN_IF_ERROR(log_.Record(std::move(e)));
  }

  // t0+60: venues strip the outer layer.
  const SimTime t_venue = t + kTraceVenueOffset;
  std::map<RecordId, crypto::EncryptedUserReference> singly;
  std::vector<RecordId> authorized;
  std::map<VenueId, std::vector<RecordId>> requests = tc.relevant;
  ServerBehavior& behavior = server_.behavior;
  if (behavior.expand_window_extra) {
    PickPadding(tc, *behavior.expand_window_extra);
    behavior.expand_window_extra.reset();
  }
  for (auto& [venue, pad] : behavior.padding) {
    std::vector<RecordId>& request = requests[venue];
    request.insert(request.end(), pad.begin(), pad.end());
    behavior.padded[venue].insert(behavior.padded[venue].end(), pad.begin(),
                                  pad.end());
  }
  behavior.padding.clear();
  for (const auto& [venue, request] : requests) {
    static const std::vector<RecordId> kNone;
    auto rel_it = tc.relevant.find(venue);
    const std::vector<RecordId>& relevant =
        rel_it == tc.relevant.end() ? kNone : rel_it->second;
    authorized.insert(authorized.end(), relevant.begin(), relevant.end());
    result.venue_requests[venue] = request;
    auto decrypted = RequestVenueDecryption(venue, request, relevant, t_venue,
                                            "trace");
    if (!decrypted.ok()) {
      if (HasErrorKind(decrypted.status(), ErrorKind::kVenueUnavailable)) {
        result.unavailable_venues.push_back(venue);
        continue;
      }
      return decrypted.status();
    }
    for (const auto& [r, ref] : *decrypted) singly[r] = ref;
  }

  // t0+120: the department strips the inner layer.
  const SimTime t_hd = t + kTraceHealthDeptOffset;
  Send(t_hd, me, kServer, "fetch_singly_encrypted", {});
  LUCASIM_ASSIGN_OR_RETURN(
      auto resolved,
      RequestHealthDeptDecryption(hd_id, singly, authorized, t_hd, "trace"));
  for (const auto& [r, ref] : singly) {
    if (!resolved.contains(r)) result.undecryptable.push_back(r);
  }

  // t0+180: contact records of everyone identified.
  const SimTime t_contacts = t + kTraceContactsOffset;
  std::set<UserId> contact_ids;
  for (const auto& [r, user] : resolved) {
    if (user != payload.user_id) contact_ids.insert(user);
  }
  std::vector<UserId> fetch(contact_ids.begin(), contact_ids.end());
  tc.contact_user_ids = fetch;
  std::vector<std::pair<std::string, Bytes>> fetch_fields;
  for (const UserId& u : fetch) fetch_fields.emplace_back("user_id", ToBytes(u.value()));
  Send(t_contacts, me, kServer, "fetch_contacts", std::move(fetch_fields));
  server_.requests.push_back(ServerRequest{.time = t_contacts,
                                           .requester = hd_id.value(),
                                           .kind = "fetch_contacts",
                                           .user_ids = fetch});
  std::vector<std::pair<std::string, Bytes>> returned;
  for (const UserId& u : fetch) {
    auto rec = server_.users.find(u);
    auto key = hd.contact_keys.find(u);
    if (rec == server_.users.end() || key == hd.contact_keys.end()) continue;
    returned.emplace_back(u.value(), rec->second.encrypted_contact);
    auto opened = crypto::OpenSymmetric(key->second, rec->second.encrypted_contact);
    if (!opened.ok()) continue;
    if (auto contact = ContactData::Parse(ToString(*opened))) {
      result.contacts.push_back(TracedContact{.user_id = u, .contact = *contact});
    }
  }
  Send(t_contacts, kServer, me, "contacts", std::move(returned));
  if (options_.include_index_case && index_contact) {
    result.contacts.push_back(
        TracedContact{.user_id = payload.user_id, .contact = *index_contact});
  }
  std::sort(result.contacts.begin(), result.contacts.end(),
            [](const TracedContact& a, const TracedContact& b) {
              return a.user_id < b.user_id;
            });
  result.finished = t_contacts;
  server_.traces.push_back(std::move(tc));
  return result;
}

absl::Status Simulation::Reconnect(int guest, SimTime t) {
  if (guest < 0 || guest >= static_cast<int>(guests_.size())) {
    return Error(ErrorKind::kInvalidArgument, absl::StrCat("no guest ", guest));
  }
  GuestApp& g = guests_[guest];
  g.network() = network_.Reconnect(g.network(), t);
  GroundTruthEvent e;
  e.kind = EventKind::kReconnect;
  e.time = t;
  if (g.registered()) e.user = g.user_id();
  e.address = g.network().address;
  return log_.Record(std::move(e));
}

absl::Status Simulation::RecordGroupArrival(std::int64_t group,
                                            const std::vector<int>& guests,
                                            const VenueId& venue, SimTime t) {
  GroundTruthEvent e;
  e.kind = EventKind::kGroupArrival;
  e.time = t;
  e.group = group;
  e.venue = venue;
  for (int g : guests) {
    LUCASIM_ASSIGN_OR_RETURN(GuestApp * app, RegisteredGuest(g));
    e.members.push_back(app->user_id());
  }
  return log_.Record(std::move(e));
}

}  // namespace lucasim
