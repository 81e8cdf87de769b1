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


#include "lucasim/pki.h"

namespace lucasim {

Bytes CertificateBody(const crypto::PublicKey& subject, std::string_view role) {
  Bytes body = ToBytes("lucasim-cert-v1");
  AppendLengthPrefixed(body, ToBytes(role));
  AppendLengthPrefixed(body, ToBytes(crypto::KeyRoleName(subject.role)));
  AppendLengthPrefixed(body, subject.bytes);
  return body;
}

CertificateAuthority::CertificateAuthority(SimRng& rng)
    : keys_(crypto::GenerateKeyPair(crypto::KeyRole::kCertificateAuthority,
                                    rng)) {}

Certificate CertificateAuthority::Issue(const crypto::PublicKey& subject,
                                        std::string_view role) const {
  return Certificate{
      .subject = subject,
      .subject_role = std::string(role),
      .ca_signature =
          crypto::Sign(keys_.private_key, CertificateBody(subject, role)),
  };
}

bool VerifyCertificate(const Certificate& cert, const crypto::PublicKey& root,
                       const crypto::PublicKey& expected_subject,
                       std::string_view role) {
  if (cert.subject_role != role) return false;
  if (cert.subject.bytes != expected_subject.bytes) return false;
  return crypto::Verify(root, CertificateBody(cert.subject, role),
                        cert.ca_signature);
}

}  // namespace lucasim
