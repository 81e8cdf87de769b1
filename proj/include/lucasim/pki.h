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


#ifndef LUCASIM_PKI_H_
#define LUCASIM_PKI_H_

#include <string>
#include <string_view>

#include "lucasim/crypto.h"
#include "lucasim/rng.h"

namespace lucasim {

// Mitigations enabled for a run; fixed for the lifetime of a scenario.
struct MitigationConfig {
  bool pki_enabled = false;
  bool qr_embeds_venue_key = false;

  bool operator==(const MitigationConfig&) const = default;
};

inline constexpr std::string_view kCertRoleHealthDeptEnc = "health-dept-enc";
inline constexpr std::string_view kCertRoleHealthDeptSign = "health-dept-sign";

struct Certificate {
  crypto::PublicKey subject;
  std::string subject_role;
  crypto::Signature ca_signature;
};

// Canonical bytes covered by the CA signature.
Bytes CertificateBody(const crypto::PublicKey& subject, std::string_view role);

// Third-party certificate authority. Its signing key lives only here; the
// backend server is never handed a reference to this object.
class CertificateAuthority {
 public:
  explicit CertificateAuthority(SimRng& rng);

  Certificate Issue(const crypto::PublicKey& subject,
                    std::string_view role) const;
  const crypto::PublicKey& root() const { return keys_.public_key; }

 private:
  crypto::AsymKeyPair keys_;
};

// True iff `cert` is signed by `root`, names `role`, and binds exactly
// `expected_subject`.
bool VerifyCertificate(const Certificate& cert, const crypto::PublicKey& root,
                       const crypto::PublicKey& expected_subject,
                       std::string_view role);

}  // namespace lucasim

#endif  // LUCASIM_PKI_H_
