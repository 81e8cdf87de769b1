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


#include "lucasim/crypto.h"

#include <sodium.h>

#include <cstring>

#include "absl/strings/str_cat.h"
#include "lucasim/status.h"

namespace lucasim::crypto {
namespace {

constexpr std::string_view kCodeAlphabet = "ABCDEFGHJKLMNPQRSTUVWXYZ23456789";

std::array<std::uint8_t, crypto_box_NONCEBYTES> BoxNonce(
    const std::uint8_t* ephemeral_pk, const std::uint8_t* recipient_pk) {
  std::array<std::uint8_t, crypto_box_NONCEBYTES> nonce;
  crypto_generichash_state state;
  crypto_generichash_init(&state, nullptr, 0, nonce.size());
  crypto_generichash_update(&state, ephemeral_pk, crypto_box_PUBLICKEYBYTES);
  crypto_generichash_update(&state, recipient_pk, crypto_box_PUBLICKEYBYTES);
  crypto_generichash_final(&state, nonce.data(), nonce.size());
  return nonce;
}

}  // namespace

std::string_view KeyRoleName(KeyRole role) {
  switch (role) {
    case KeyRole::kVenue:
      return "venue";
    case KeyRole::kHealthDeptEncryption:
      return "health-dept-enc";
    case KeyRole::kHealthDeptSigning:
      return "health-dept-sign";
    case KeyRole::kDailyMaster:
      return "daily-master";
    case KeyRole::kAdversary:
      return "adversary";
    case KeyRole::kCertificateAuthority:
      return "certificate-authority";
  }
  return "unknown";
}

KeyUsage DefaultUsage(KeyRole role) {
  switch (role) {
    case KeyRole::kHealthDeptSigning:
    case KeyRole::kCertificateAuthority:
      return KeyUsage::kSignature;
    default:
      return KeyUsage::kEncryption;
  }
}

std::string PublicKey::Fingerprint() const {
  return HexEncode(ByteSpan(bytes).first(std::min<std::size_t>(8, bytes.size())));
}

AsymKeyPair GenerateKeyPair(KeyRole role, SimRng& rng) {
  return GenerateKeyPair(role, DefaultUsage(role), rng);
}

AsymKeyPair GenerateKeyPair(KeyRole role, KeyUsage usage, SimRng& rng) {
  return KeyPairFromSeed(role, usage, rng.RandomArray<32>());
}

AsymKeyPair KeyPairFromSeed(KeyRole role, KeyUsage usage,
                            const std::array<std::uint8_t, 32>& seed) {
  EnsureSodiumInitialized();
  AsymKeyPair pair;
  pair.public_key.role = pair.private_key.role = role;
  pair.public_key.usage = pair.private_key.usage = usage;
  if (usage == KeyUsage::kEncryption) {
    pair.public_key.bytes.resize(crypto_box_PUBLICKEYBYTES);
    pair.private_key.bytes.resize(crypto_box_SECRETKEYBYTES);
    crypto_box_seed_keypair(pair.public_key.bytes.data(),
                            pair.private_key.bytes.data(), seed.data());
  } else {
    pair.public_key.bytes.resize(crypto_sign_PUBLICKEYBYTES);
    pair.private_key.bytes.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(pair.public_key.bytes.data(),
                             pair.private_key.bytes.data(), seed.data());
  }
  return pair;
}

PublicKey PublicKeyOf(const PrivateKey& sk) {
  EnsureSodiumInitialized();
  PublicKey pk{.role = sk.role, .usage = sk.usage, .bytes = {}};
  if (sk.usage == KeyUsage::kEncryption) {
    pk.bytes.resize(crypto_box_PUBLICKEYBYTES);
    if (sk.bytes.size() == crypto_box_SECRETKEYBYTES) {
      crypto_scalarmult_base(pk.bytes.data(), sk.bytes.data());
    }
  } else {
    pk.bytes.resize(crypto_sign_PUBLICKEYBYTES);
    if (sk.bytes.size() == crypto_sign_SECRETKEYBYTES) {
      crypto_sign_ed25519_sk_to_pk(pk.bytes.data(), sk.bytes.data());
    }
  }
  return pk;
}

absl::StatusOr<Bytes> Encrypt(const PublicKey& pk, ByteSpan plaintext,
                              SimRng& rng) {
  EnsureSodiumInitialized();
  if (pk.usage != KeyUsage::kEncryption ||
      pk.bytes.size() != crypto_box_PUBLICKEYBYTES) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("not an encryption key (role ",
                              std::string(KeyRoleName(pk.role)), ")"));
  }
  if (plaintext.empty() || plaintext.size() > kMaxPlaintextSize) {
    return Error(ErrorKind::kInvalidArgument,
                 absl::StrCat("plaintext size ", plaintext.size(),
                              " outside [1, ", kMaxPlaintextSize, "]"));
  }
  const auto seed = rng.RandomArray<crypto_box_SEEDBYTES>();
  std::array<std::uint8_t, crypto_box_PUBLICKEYBYTES> eph_pk;
  std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> eph_sk;
  crypto_box_seed_keypair(eph_pk.data(), eph_sk.data(), seed.data());
  const auto nonce = BoxNonce(eph_pk.data(), pk.bytes.data());

  Bytes out(eph_pk.size() + crypto_box_MACBYTES + plaintext.size());
  std::memcpy(out.data(), eph_pk.data(), eph_pk.size());
  if (crypto_box_easy(out.data() + eph_pk.size(), plaintext.data(),
                      plaintext.size(), nonce.data(), pk.bytes.data(),
                      eph_sk.data()) != 0) {
    return Error(ErrorKind::kInvalidArgument, "invalid recipient key");
  }
  sodium_memzero(eph_sk.data(), eph_sk.size());
  return out;
}

absl::StatusOr<Bytes> Decrypt(const PrivateKey& sk, ByteSpan ciphertext) {
  EnsureSodiumInitialized();
  if (sk.usage != KeyUsage::kEncryption ||
      sk.bytes.size() != crypto_box_SECRETKEYBYTES) {
    return Error(ErrorKind::kDecryptionFailure, "not a decryption key");
  }
  if (ciphertext.size() <= kCiphertextOverhead) {
    return Error(ErrorKind::kDecryptionFailure, "ciphertext too short");
  }
  const PublicKey own = PublicKeyOf(sk);
  const std::uint8_t* eph_pk = ciphertext.data();
  const auto nonce = BoxNonce(eph_pk, own.bytes.data());
  const std::size_t body = ciphertext.size() - crypto_box_PUBLICKEYBYTES;
  Bytes out(body - crypto_box_MACBYTES);
  if (crypto_box_open_easy(out.data(),
                           ciphertext.data() + crypto_box_PUBLICKEYBYTES, body,
                           nonce.data(), eph_pk, sk.bytes.data()) != 0) {
    return Error(ErrorKind::kDecryptionFailure, "authentication failed");
  }
  return out;
}

Signature Sign(const PrivateKey& sk, ByteSpan message) {
  EnsureSodiumInitialized();
  Signature sig;
  if (sk.usage != KeyUsage::kSignature ||
      sk.bytes.size() != crypto_sign_SECRETKEYBYTES) {
    return sig;
  }
  sig.bytes.resize(crypto_sign_BYTES);
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(),
                       message.size(), sk.bytes.data());
  sig.signer_hint = PublicKeyOf(sk).Fingerprint();
  return sig;
}

bool Verify(const PublicKey& pk, ByteSpan message, const Signature& sig) {
  EnsureSodiumInitialized();
  if (pk.usage != KeyUsage::kSignature ||
      pk.bytes.size() != crypto_sign_PUBLICKEYBYTES ||
      sig.bytes.size() != crypto_sign_BYTES) {
    return false;
  }
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(),
                                     message.size(), pk.bytes.data()) == 0;
}

SymmetricKey GenerateSymmetricKey(SimRng& rng) {
  return SymmetricKey{.bytes = rng.RandomArray<32>()};
}

absl::StatusOr<Bytes> SealSymmetric(const SymmetricKey& key,
                                    ByteSpan plaintext, SimRng& rng) {
  EnsureSodiumInitialized();
  if (plaintext.empty() || plaintext.size() > kMaxPlaintextSize) {
    return Error(ErrorKind::kInvalidArgument, "plaintext size out of range");
  }
  const auto nonce = rng.RandomArray<crypto_secretbox_NONCEBYTES>();
  Bytes out(nonce.size() + crypto_secretbox_MACBYTES + plaintext.size());
  std::memcpy(out.data(), nonce.data(), nonce.size());
  crypto_secretbox_easy(out.data() + nonce.size(), plaintext.data(),
                        plaintext.size(), nonce.data(), key.bytes.data());
  return out;
}

absl::StatusOr<Bytes> OpenSymmetric(const SymmetricKey& key,
                                    ByteSpan ciphertext) {
  EnsureSodiumInitialized();
  constexpr std::size_t kOverhead =
      crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES;
  if (ciphertext.size() <= kOverhead) {
    return Error(ErrorKind::kDecryptionFailure, "ciphertext too short");
  }
  Bytes out(ciphertext.size() - kOverhead);
  if (crypto_secretbox_open_easy(
          out.data(), ciphertext.data() + crypto_secretbox_NONCEBYTES,
          ciphertext.size() - crypto_secretbox_NONCEBYTES, ciphertext.data(),
          key.bytes.data()) != 0) {
    return Error(ErrorKind::kDecryptionFailure, "authentication failed");
  }
  return out;
}

std::size_t TraceIdHash::operator()(const TraceId& id) const {
  std::size_t h = 0;
  std::memcpy(&h, id.bytes.data(), sizeof(h));
  return h;
}

TraceId DeriveTraceId(const TracingSeed& seed, std::uint64_t counter) {
  EnsureSodiumInitialized();
  Bytes message;
  AppendU64(message, counter);
  std::array<std::uint8_t, crypto_auth_hmacsha256_BYTES> mac;
  crypto_auth_hmacsha256_state state;
  crypto_auth_hmacsha256_init(&state, seed.secret.data(), seed.secret.size());
  crypto_auth_hmacsha256_update(&state, message.data(), message.size());
  crypto_auth_hmacsha256_final(&state, mac.data());
  TraceId id;
  std::memcpy(id.bytes.data(), mac.data(), id.bytes.size());
  return id;
}

std::vector<TraceId> DeriveAllTraceIds(const TracingSeed& seed,
                                       std::uint64_t max_counter) {
  std::vector<TraceId> ids;
  ids.reserve(max_counter + 1);
  for (std::uint64_t i = 0; i <= max_counter; ++i) {
    ids.push_back(DeriveTraceId(seed, i));
  }
  return ids;
}

VerificationCode GenerateVerificationCode(SimRng& rng, std::size_t length) {
  VerificationCode code;
  code.code.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    code.code.push_back(kCodeAlphabet[rng.Uniform(kCodeAlphabet.size())]);
  }
  return code;
}

Bytes EncodeUserReference(const UserReference& ref) {
  Bytes out;
  AppendLengthPrefixed(out, ToBytes(ref.user_id));
  AppendLengthPrefixed(out, ref.contact_key.bytes);
  return out;
}

absl::StatusOr<UserReference> DecodeUserReference(ByteSpan encoded) {
  ByteReader reader(encoded);
  auto user_id = reader.ReadLengthPrefixed();
  auto key = reader.ReadLengthPrefixed();
  if (!user_id || !key || key->size() != 32 || !reader.AtEnd()) {
    return Error(ErrorKind::kDecryptionFailure, "malformed user reference");
  }
  UserReference ref;
  ref.user_id = ToString(*user_id);
  std::memcpy(ref.contact_key.bytes.data(), key->data(), 32);
  return ref;
}

absl::StatusOr<EncryptedUserReference> EncryptUserReference(
    const UserReference& ref, const PublicKey& master_pk, SimRng& rng) {
  LUCASIM_ASSIGN_OR_RETURN(Bytes ct,
                           Encrypt(master_pk, EncodeUserReference(ref), rng));
  return EncryptedUserReference{.layers = 1, .ciphertext = std::move(ct)};
}

absl::StatusOr<EncryptedUserReference> AddOuterLayer(
    const EncryptedUserReference& inner, const PublicKey& venue_pk,
    SimRng& rng) {
  if (inner.layers != 1) {
    return Error(ErrorKind::kInvalidArgument, "expected a 1-layer reference");
  }
  LUCASIM_ASSIGN_OR_RETURN(Bytes ct, Encrypt(venue_pk, inner.ciphertext, rng));
  return EncryptedUserReference{.layers = 2, .ciphertext = std::move(ct)};
}

absl::StatusOr<EncryptedUserReference> RemoveOuterLayer(
    const EncryptedUserReference& outer, const PrivateKey& venue_sk) {
  if (outer.layers != 2) {
    return Error(ErrorKind::kDecryptionFailure, "expected a 2-layer reference");
  }
  LUCASIM_ASSIGN_OR_RETURN(Bytes inner, Decrypt(venue_sk, outer.ciphertext));
  return EncryptedUserReference{.layers = 1, .ciphertext = std::move(inner)};
}

absl::StatusOr<UserReference> OpenUserReference(
    const EncryptedUserReference& inner, const PrivateKey& master_sk) {
  if (inner.layers != 1) {
    return Error(ErrorKind::kDecryptionFailure, "expected a 1-layer reference");
  }
  LUCASIM_ASSIGN_OR_RETURN(Bytes plain, Decrypt(master_sk, inner.ciphertext));
  return DecodeUserReference(plain);
}

}  // namespace lucasim::crypto
