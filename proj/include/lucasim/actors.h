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


#ifndef LUCASIM_ACTORS_H_
#define LUCASIM_ACTORS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lucasim/crypto.h"
#include "lucasim/domain.h"
#include "lucasim/ids.h"
#include "lucasim/netsim.h"
#include "lucasim/pki.h"
#include "lucasim/rng.h"

namespace lucasim {

// How a (possibly server-modified) web frontend handles its private keys.
enum class ExfilMode {
  kNone,
  kBackdoorKeygen,
  kExfilOnGen,
  kExfilOnUse,
  kSkipChecks,
};

std::string_view ExfilModeName(ExfilMode mode);
std::optional<ExfilMode> ParseExfilMode(std::string_view name);

struct PublishedMasterKey {
  int day = 0;
  crypto::PublicKey key;
  crypto::Signature signature;
  HealthDeptId signer;
  crypto::PublicKey signer_key;
  std::optional<Certificate> signer_cert;
};

// Bytes covered by the signature on a daily master public key.
Bytes MasterKeyMessage(int day, const crypto::PublicKey& key);

// ---------------------------------------------------------------------------
// Client-side actors
// ---------------------------------------------------------------------------

struct OpenCheckin {
  crypto::TraceId trace_id;
  SimTime since = 0;
};

class GuestApp {
 public:
  GuestApp(int device, ContactData contact, NetworkIdentity network)
      : device_(device), contact_(std::move(contact)), network_(std::move(network)) {}

  int device() const { return device_; }
  const ContactData& contact() const { return contact_; }
  NetworkIdentity& network() { return network_; }
  const NetworkIdentity& network() const { return network_; }

  bool registered() const { return user_id_.has_value(); }
  const UserId& user_id() const { return *user_id_; }
  const crypto::SymmetricKey& contact_key() const { return contact_key_; }
  void CompleteRegistration(UserId id, crypto::SymmetricKey key) {
    user_id_ = std::move(id);
    contact_key_ = key;
  }

  // The day's seed, generated on first use.
  const crypto::TracingSeed& SeedFor(int day, SimRng& rng);
  // Fresh trace id; the per-day counter restarts when the day changes.
  crypto::TraceId NextTraceId(int day, SimRng& rng);
  const std::map<int, std::vector<crypto::TraceId>>& issued_trace_ids() const {
    return issued_;
  }

  std::optional<OpenCheckin>& open_checkin() { return open_checkin_; }
  std::map<int, crypto::PublicKey>& master_key_cache() { return master_keys_; }

 private:
  int device_;
  ContactData contact_;
  NetworkIdentity network_;
  std::optional<UserId> user_id_;
  crypto::SymmetricKey contact_key_;
  std::map<int, crypto::TracingSeed> seeds_;
  int counter_day_ = -1;
  std::uint64_t counter_ = 0;
  std::map<int, std::vector<crypto::TraceId>> issued_;
  std::optional<OpenCheckin> open_checkin_;
  std::map<int, crypto::PublicKey> master_keys_;
};

struct VenueActor {
  VenueId id;
  int index = 0;
  crypto::AsymKeyPair keys;  // private half never leaves in honest mode
  std::vector<ScannerId> scanners;
  std::optional<ScannerId> self_checkin_qr;
  std::string address;
};

struct ScannerFrontend {
  ScannerId id;
  VenueId venue;
  crypto::PublicKey venue_public_key;
  std::string address;
  std::map<int, crypto::PublicKey> master_key_cache;
};

struct HealthDept {
  HealthDeptId id;
  int index = 0;
  crypto::AsymKeyPair enc_keys;
  crypto::AsymKeyPair sign_keys;
  std::optional<Certificate> enc_cert;
  std::optional<Certificate> sign_cert;
  std::map<int, crypto::PrivateKey> master_keys;
  std::map<UserId, crypto::SymmetricKey> contact_keys;
  std::string address;
};

// ---------------------------------------------------------------------------
// Backend server
// ---------------------------------------------------------------------------

// Frontend code the server hands out; code-modification attacks set per-target
// entries here instead of patching anything.
struct FrontendCodeProvider {
  std::map<VenueId, ExfilMode> venue_frontend;
  std::map<HealthDeptId, ExfilMode> hd_frontend;
  // Scanner code that swaps in an adversary daily key and skips checks.
  std::map<ScannerId, crypto::PublicKey> scanner_master_key;

  ExfilMode VenueMode(const VenueId& id) const;
  ExfilMode HealthDeptMode(const HealthDeptId& id) const;
};

// Deviations from the honest server code path. Empty means honest.
struct ServerBehavior {
  std::map<VenueId, crypto::AsymKeyPair> substituted_venue_keys;
  std::map<int, PublishedMasterKey> substituted_master_keys;
  std::optional<HealthDeptRecord> injected_hd;
  // Records appended to the next trace's venue decryption requests.
  std::map<VenueId, std::vector<RecordId>> padding;
  // When set, the next trace pads each venue request with this many
  // non-relevant records picked once the index case's visits are known.
  std::optional<int> expand_window_extra;
  // Padding actually sent, by venue.
  std::map<VenueId, std::vector<RecordId>> padded;
  std::array<std::uint8_t, 32> backdoor_secret{};

  bool IsHonest() const {
    return substituted_venue_keys.empty() && substituted_master_keys.empty() &&
           !injected_hd.has_value() && padding.empty() &&
           !expand_window_extra.has_value();
  }
};

// Material a deviating server has captured.
struct AdversaryVault {
  std::map<VenueId, crypto::PrivateKey> venue_keys;
  std::map<HealthDeptId, crypto::PrivateKey> hd_enc_keys;
  std::map<HealthDeptId, crypto::PrivateKey> hd_sign_keys;
  std::map<int, crypto::PrivateKey> substituted_master_private;
  std::optional<crypto::PrivateKey> injected_hd_private;
  std::map<int, Bytes> injected_hd_ciphertexts;
  std::map<RecordId, crypto::EncryptedUserReference> stripped_at_ingest;
  std::map<std::string, Bytes> upload_plaintexts;
  std::vector<std::string> detections;

  bool empty() const {
    return venue_keys.empty() && hd_enc_keys.empty() && hd_sign_keys.empty() &&
           substituted_master_private.empty() && !injected_hd_private &&
           injected_hd_ciphertexts.empty() && stripped_at_ingest.empty() &&
           upload_plaintexts.empty();
  }
};

struct PositiveUpload {
  crypto::VerificationCode code;
  Bytes ciphertext;
  int day = 0;
  SimTime time = 0;
  std::int64_t observation = -1;
};

// A request the server received from a health department or venue frontend.
struct ServerRequest {
  SimTime time = 0;
  std::string requester;
  std::string kind;
  std::optional<std::string> code;
  std::vector<UserId> user_ids;
  std::vector<RecordId> records;
};

// Everything the server learns while mediating one trace.
struct TraceCase {
  HealthDeptId hd;
  UserId index_user;
  std::vector<crypto::TracingSeed> seeds;
  std::vector<int> days;
  std::vector<RecordId> index_records;
  std::map<VenueId, std::vector<RecordId>> relevant;
  std::vector<UserId> contact_user_ids;
  SimTime time = 0;
};

struct BackendServer {
  std::map<UserId, UserRecord> users;
  std::map<VenueId, VenueRecord> venues;
  std::map<ScannerId, VenueId> scanner_to_venue;
  std::map<HealthDeptId, HealthDeptRecord> health_depts;
  std::map<int, PublishedMasterKey> master_keys;
  std::vector<CheckInRecord> checkins;
  std::unordered_map<crypto::TraceId, RecordId, crypto::TraceIdHash> by_trace_id;
  std::map<std::string, PositiveUpload> uploads;
  std::vector<NetworkObservation> observations;
  std::vector<ServerRequest> requests;
  std::vector<TraceCase> traces;
  std::map<RecordId, crypto::EncryptedUserReference> singly_encrypted;

  FrontendCodeProvider frontend_code;
  ServerBehavior behavior;
  AdversaryVault vault;

  std::int64_t Observe(NetworkObservation obs);
  const CheckInRecord* FindByTraceId(const crypto::TraceId& id) const;
  std::optional<VenueId> VenueOfRecord(RecordId id) const;
  std::optional<VenueId> VenueOfScanner(const ScannerId& id) const;

  // All stored byte material, flattened, for secrecy scans.
  Bytes SerializeState() const;
};

}  // namespace lucasim

#endif  // LUCASIM_ACTORS_H_
