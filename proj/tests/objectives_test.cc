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


#include "gtest/gtest.h"
#include "lucasim/objectives.h"
#include "lucasim/simulation.h"

namespace lucasim {
namespace {

constexpr SimTime kHour = 3600;

// Guest 0 reports day 0; guests 1 and 2 never report. Each guest visits the
// venue twice on day 0; guest 0 also visits on day 1.
struct Fixture {
  Fixture() : sim(SimulationOptions{}) {
    hd = *sim.RegisterHealthDept(0);
    venue = *sim.RegisterVenue(VenueInfo{.name = "V"}, 0);
    for (int i = 0; i < 3; ++i) {
      const int g = sim.AddGuest(ContactData{"N" + std::to_string(i), "A", "P"});
      users.push_back(*sim.RegisterUser(g, 0));
    }
    EXPECT_TRUE(sim.RotateDailyMasterKey(hd, 0, 1).ok());
    const ScannerId s = sim.venue(venue).scanners.front();
    for (int round = 0; round < 2; ++round) {
      for (int g = 0; g < 3; ++g) {
        records[g].push_back(*sim.CheckInScanner(g, s, (9 + 3 * round) * kHour + g));
      }
      for (int g = 0; g < 3; ++g) {
        EXPECT_TRUE(sim.CheckOut(g, (10 + 3 * round) * kHour + g).ok());
      }
    }
    EXPECT_TRUE(sim.RotateDailyMasterKey(hd, 1, kSecondsPerDay + 1).ok());
    late_record = *sim.CheckInScanner(0, s, kSecondsPerDay + 9 * kHour);
    EXPECT_TRUE(sim.CheckOut(0, kSecondsPerDay + 10 * kHour).ok());
    code = sim.ReportPositive(0, {0}, kSecondsPerDay + 20 * kHour)->code;
  }

  Simulation sim;
  HealthDeptId hd;
  VenueId venue;
  std::vector<UserId> users;
  std::map<int, std::vector<RecordId>> records;
  RecordId late_record = -1;
  std::string code;
};

TEST(ObjectivesTest, EmptyKnowledgeHoldsEverything) {
  Fixture f;
  const auto verdicts = CheckAllObjectives(AdversaryKnowledge{}, f.sim.log(), StayModel{});
  ASSERT_EQ(verdicts.size(), 6u);
  for (const ObjectiveVerdict& v : verdicts) {
    EXPECT_TRUE(v.holds) << ObjectiveName(v.objective);
    EXPECT_TRUE(v.witness.empty());
  }
}

TEST(ObjectivesTest, O1RequiresMatchingContactOfUninfectedUser) {
  Fixture f;
  AdversaryKnowledge k;
  k.decrypted_contacts[f.users[1]] = ContactData{"wrong", "A", "P"};
  EXPECT_TRUE(CheckO1(k, f.sim.log()).holds);
  k.decrypted_contacts.clear();
  k.decrypted_contacts[f.users[0]] = f.sim.guest(0).contact();
  EXPECT_TRUE(CheckO1(k, f.sim.log()).holds);
  k.decrypted_contacts[f.users[1]] = f.sim.guest(1).contact();
  const ObjectiveVerdict v = CheckO1(k, f.sim.log());
  EXPECT_FALSE(v.holds);
  EXPECT_NE(v.witness.find(f.users[1].value()), std::string::npos);
}

TEST(ObjectivesTest, O2AndO4CountOnlyCorrectAttributions) {
  Fixture f;
  AdversaryKnowledge k;
  k.decrypted_refs[f.records[1][0]] = f.users[2];  // wrong owner
  EXPECT_TRUE(CheckO2(k, f.sim.log()).holds);
  k.decrypted_refs[f.records[1][0]] = f.users[1];
  EXPECT_FALSE(CheckO2(k, f.sim.log()).holds);
  EXPECT_TRUE(CheckO4(k, f.sim.log()).holds);
  k.decrypted_refs[f.records[1][1]] = f.users[1];
  EXPECT_FALSE(CheckO4(k, f.sim.log()).holds);
}

TEST(ObjectivesTest, O3FlagsLinkedRecordsOfUninfectedUser) {
  Fixture f;
  AdversaryKnowledge k;
  k.linked_clusters.push_back(Cluster{.records = f.records[0], .basis = "ipv6"});
  EXPECT_TRUE(CheckO3(k, f.sim.log()).holds);
  k.linked_clusters.push_back(Cluster{.records = {f.records[1][0], f.records[2][0]},
                                      .basis = "nat"});
  EXPECT_TRUE(CheckO3(k, f.sim.log()).holds);
  k.linked_clusters.push_back(Cluster{.records = f.records[2], .basis = "nat"});
  const ObjectiveVerdict v = CheckO3(k, f.sim.log());
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(v.metrics.has_value());
}

TEST(ObjectivesTest, O5FlagsUnreportedDayAttribution) {
  Fixture f;
  AdversaryKnowledge k;
  k.decrypted_refs[f.records[0][0]] = f.users[0];
  EXPECT_TRUE(CheckO5(k, f.sim.log(), StayModel{}).holds);
  k.decrypted_refs[f.late_record] = f.users[0];
  EXPECT_FALSE(CheckO5(k, f.sim.log(), StayModel{}).holds);
}

TEST(ObjectivesTest, HonestTraceLeavesObjectivesIntact) {
  Fixture f;
  auto result = f.sim.Trace(f.hd, crypto::VerificationCode{f.code},
                            kSecondsPerDay + 21 * kHour);
  ASSERT_TRUE(result.ok()) << result.status();
  AdversaryKnowledge k = RunPassiveAnalysis(
      f.sim.server(), LinkageConfig{.use_ipv6 = false, .use_nat = false},
      AnalysisToggles{});
  EXPECT_TRUE(CheckO1(k, f.sim.log()).holds);
  EXPECT_TRUE(CheckO4(k, f.sim.log()).holds);
  EXPECT_TRUE(CheckO5(k, f.sim.log(), StayModel{}).holds);
  EXPECT_TRUE(CheckO6(k, f.sim.log()).holds);
}

TEST(ObjectivesTest, O6RequiresVerifiedUnauthorizedStrip) {
  Fixture f;
  AdversaryKnowledge k;
  const CheckInRecord& rec = f.sim.server().checkins.at(f.records[1][0]);
  auto inner = crypto::RemoveOuterLayer(rec.double_enc_ref,
                                        f.sim.venue(f.venue).keys.private_key);
  ASSERT_TRUE(inner.ok());
  k.stripped_refs[rec.id] = crypto::EncryptedUserReference{.layers = 1,
                                                           .ciphertext = ToBytes("junk")};
  k.stripped_via[rec.id] = "test";
  EXPECT_TRUE(CheckO6(k, f.sim.log()).holds);
  k.stripped_refs[rec.id] = *inner;
  const ObjectiveVerdict v = CheckO6(k, f.sim.log());
  EXPECT_FALSE(v.holds);
  EXPECT_NE(v.witness.find("test"), std::string::npos);
}

TEST(CertificateTest, IssuedCertificatesVerifyAndForgeriesDoNot) {
  SimRng rng(3);
  CertificateAuthority ca(rng);
  CertificateAuthority rogue(rng);
  const crypto::AsymKeyPair subject =
      crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptEncryption, rng);
  const crypto::AsymKeyPair other =
      crypto::GenerateKeyPair(crypto::KeyRole::kHealthDeptEncryption, rng);
  const Certificate cert = IssueCertificate(ca, subject.public_key, kCertRoleHealthDeptEnc);
  EXPECT_TRUE(VerifyCertificate(cert, ca.root(), subject.public_key, kCertRoleHealthDeptEnc));
  EXPECT_FALSE(VerifyCertificate(cert, ca.root(), subject.public_key, kCertRoleHealthDeptSign));
  EXPECT_FALSE(VerifyCertificate(cert, ca.root(), other.public_key, kCertRoleHealthDeptEnc));
  EXPECT_FALSE(VerifyCertificate(cert, rogue.root(), subject.public_key, kCertRoleHealthDeptEnc));
  const Certificate forged =
      IssueCertificate(rogue, other.public_key, kCertRoleHealthDeptEnc);
  EXPECT_FALSE(VerifyCertificate(forged, ca.root(), other.public_key, kCertRoleHealthDeptEnc));
  Certificate swapped = cert;
  swapped.subject = other.public_key;
  EXPECT_FALSE(VerifyCertificate(swapped, ca.root(), other.public_key, kCertRoleHealthDeptEnc));
}

}  // namespace
}  // namespace lucasim
