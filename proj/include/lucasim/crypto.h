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


#ifndef LUCASIM_CRYPTO_H_
#define LUCASIM_CRYPTO_H_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "lucasim/bytes.h"
#include "lucasim/rng.h"

// Cryptographic building blocks for the protocol. Public-key encryption is an
// ECIES-style construction over X25519 + XSalsa20-Poly1305 whose ephemeral
// key is drawn from the caller's SimRng, so whole runs replay bit-exactly.
// Signatures are Ed25519. Nothing here is constant-time hardened.
namespace lucasim::crypto {

enum class KeyRole {
  kVenue,
  kHealthDeptEncryption,
  kHealthDeptSigning,
  kDailyMaster,
  kAdversary,
  kCertificateAuthority,
};

enum class KeyUsage { kEncryption, kSignature };

std::string_view KeyRoleName(KeyRole role);
KeyUsage DefaultUsage(KeyRole role);

inline constexpr std::size_t kMaxPlaintextSize = 4096;
inline constexpr std::size_t kCiphertextOverhead = 32 + 16;

struct PublicKey {
  KeyRole role = KeyRole::kVenue;
  KeyUsage usage = KeyUsage::kEncryption;
  Bytes bytes;

  bool operator==(const PublicKey&) const = default;
  std::string Fingerprint() const;
};

struct PrivateKey {
  KeyRole role = KeyRole::kVenue;
  KeyUsage usage = KeyUsage::kEncryption;
  Bytes bytes;

  bool operator==(const PrivateKey&) const = default;
};

struct AsymKeyPair {
  PublicKey public_key;
  PrivateKey private_key;
};

AsymKeyPair GenerateKeyPair(KeyRole role, SimRng& rng);
AsymKeyPair GenerateKeyPair(KeyRole role, KeyUsage usage, SimRng& rng);
AsymKeyPair KeyPairFromSeed(KeyRole role, KeyUsage usage,
                            const std::array<std::uint8_t, 32>& seed);

// Recomputes the public half of a private key.
PublicKey PublicKeyOf(const PrivateKey& sk);

// Errors: InvalidArgument for an empty or oversized plaintext or a
// signature-only key.
absl::StatusOr<Bytes> Encrypt(const PublicKey& pk, ByteSpan plaintext,
                              SimRng& rng);
// Errors: DecryptionFailure on key mismatch, tampering, or malformed input.
absl::StatusOr<Bytes> Decrypt(const PrivateKey& sk, ByteSpan ciphertext);

struct Signature {
  Bytes bytes;
  std::string signer_hint;

  bool operator==(const Signature&) const = default;
};

// Signing with a non-signature key yields an empty signature that never
// verifies.
Signature Sign(const PrivateKey& sk, ByteSpan message);
bool Verify(const PublicKey& pk, ByteSpan message, const Signature& sig);

// Contact-data key held by the guest app.
struct SymmetricKey {
  std::array<std::uint8_t, 32> bytes{};
  bool operator==(const SymmetricKey&) const = default;
};

SymmetricKey GenerateSymmetricKey(SimRng& rng);
absl::StatusOr<Bytes> SealSymmetric(const SymmetricKey& key,
                                    ByteSpan plaintext, SimRng& rng);
absl::StatusOr<Bytes> OpenSymmetric(const SymmetricKey& key,
                                    ByteSpan ciphertext);

struct TracingSeed {
  int day = 0;
  std::array<std::uint8_t, 32> secret{};
  bool operator==(const TracingSeed&) const = default;
};

struct TraceId {
  std::array<std::uint8_t, 16> bytes{};
  auto operator<=>(const TraceId&) const = default;
  std::string Hex() const { return HexEncode(bytes); }
};

struct TraceIdHash {
  std::size_t operator()(const TraceId& id) const;
};

// First 16 bytes of HMAC-SHA256(secret, counter as 8-byte big-endian).
TraceId DeriveTraceId(const TracingSeed& seed, std::uint64_t counter);
// Element i equals DeriveTraceId(seed, i) for i in [0, max_counter].
std::vector<TraceId> DeriveAllTraceIds(const TracingSeed& seed,
                                       std::uint64_t max_counter);

struct VerificationCode {
  std::string code;
  auto operator<=>(const VerificationCode&) const = default;
};

inline constexpr std::size_t kDefaultVerificationCodeLength = 8;
VerificationCode GenerateVerificationCode(
    SimRng& rng, std::size_t length = kDefaultVerificationCodeLength);

// What the inner layer protects: the pseudonym and the contact-data key.
struct UserReference {
  std::string user_id;
  SymmetricKey contact_key;
  bool operator==(const UserReference&) const = default;
};

Bytes EncodeUserReference(const UserReference& ref);
absl::StatusOr<UserReference> DecodeUserReference(ByteSpan encoded);

struct EncryptedUserReference {
  int layers = 1;
  Bytes ciphertext;
  bool operator==(const EncryptedUserReference&) const = default;
};

// Inner layer, under the daily master public key.
absl::StatusOr<EncryptedUserReference> EncryptUserReference(
    const UserReference& ref, const PublicKey& master_pk, SimRng& rng);
// Outer layer, under a venue public key.
absl::StatusOr<EncryptedUserReference> AddOuterLayer(
    const EncryptedUserReference& inner, const PublicKey& venue_pk,
    SimRng& rng);
absl::StatusOr<EncryptedUserReference> RemoveOuterLayer(
    const EncryptedUserReference& outer, const PrivateKey& venue_sk);
absl::StatusOr<UserReference> OpenUserReference(
    const EncryptedUserReference& inner, const PrivateKey& master_sk);

}  // namespace lucasim::crypto

#endif  // LUCASIM_CRYPTO_H_
