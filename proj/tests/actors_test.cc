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


#include <set>

#include "gtest/gtest.h"
#include "lucasim/simulation.h"
#include "lucasim/status.h"

namespace lucasim {
namespace {

constexpr SimTime kHour = 3600;

// Three departments, two venues with one scanner each, `guests` registered
// guests and day 0 keyed.
struct Fixture {
  explicit Fixture(int guests, SimulationOptions options = {})
      : sim(std::move(options)) {
    for (int i = 0; i < 3; ++i) hds.push_back(*sim.RegisterHealthDept(0));
    for (int i = 0; i < 2; ++i) {
      VenueInfo info{.name = "Venue " + std::to_string(i),
                     .owner_contact = "owner" + std::to_string(i),
                     .location = {52.5, 13.4 + 0.01 * i},
                     .scanner_count = 1,
                     .self_checkin_qr = true};
      venues.push_back(*sim.RegisterVenue(info, 0));
    }
    for (int i = 0; i < guests; ++i) {
      const int g = sim.AddGuest(ContactData{"Guest " + std::to_string(i),
                                             "Street " + std::to_string(i),
                                             "+49 " + std::to_string(1000 + i)});
      users.push_back(*sim.RegisterUser(g, 0));
    }
    EXPECT_TRUE(sim.RotateDailyMasterKey(hds[0], 0, 1).ok());
  }

  ScannerId Scanner(int venue) const {
    return sim.venue(venues[venue]).scanners.front();
  }

  Simulation sim;
  std::vector<HealthDeptId> hds;
  std::vector<VenueId> venues;
  std::vector<UserId> users;
};

TEST(RegistrationTest, SecondRegistrationFails) {
  Fixture f(1);
  EXPECT_TRUE(HasErrorKind(f.sim.RegisterUser(0, 2).status(),
                           ErrorKind::kAlreadyRegistered));
  const UserRecord& rec = f.sim.server().users.at(f.users[0]);
  const std::string serialized = f.sim.guest(0).contact().Serialize();
  EXPECT_EQ(ToString(*crypto::OpenSymmetric(f.sim.guest(0).contact_key(),
                                            rec.encrypted_contact)),
            serialized);
  EXPECT_TRUE(f.sim.server().health_depts.size() == 3);
  EXPECT_TRUE(f.sim.server().venues.at(f.venues[0]).self_checkin_qr.has_value());
}

TEST(RotationTest, EveryOtherDepartmentGetsACopy) {
  Fixture f(0);
  int copies = 0;
  for (const auto& [id, rec] : f.sim.server().health_depts) {
    if (rec.encrypted_master_keys.contains(0)) ++copies;
  }
  EXPECT_EQ(copies, 2);
  EXPECT_FALSE(f.sim.server().health_depts.at(f.hds[0]).encrypted_master_keys.contains(0));
  EXPECT_TRUE(HasErrorKind(f.sim.RotateDailyMasterKey(f.hds[1], 0, 2).status(),
                           ErrorKind::kKeyAlreadyExists));
  const PublishedMasterKey& pub = f.sim.server().master_keys.at(0);
  EXPECT_TRUE(crypto::Verify(pub.signer_key, MasterKeyMessage(0, pub.key),
                             pub.signature));
}

TEST(CheckinTest, BothLayersDecryptToTheGuest) {
  Fixture f(1);
  auto rid = f.sim.CheckInScanner(0, f.Scanner(0), 10 * kHour);
  ASSERT_TRUE(rid.ok()) << rid.status();
  const CheckInRecord& rec = f.sim.server().checkins.at(*rid);
  EXPECT_EQ(rec.double_enc_ref.layers, 2);
  auto inner = crypto::RemoveOuterLayer(
      rec.double_enc_ref, f.sim.venue(f.venues[0]).keys.private_key);
  ASSERT_TRUE(inner.ok());
  // Any department decrypts the inner layer with the day's key.
  const HealthDept& other = f.sim.health_dept(f.hds[2]);
  auto master_bytes = crypto::Decrypt(
      other.enc_keys.private_key,
      f.sim.server().health_depts.at(f.hds[2]).encrypted_master_keys.at(0));
  ASSERT_TRUE(master_bytes.ok());
  crypto::PrivateKey master{.role = crypto::KeyRole::kDailyMaster,
                            .bytes = *master_bytes};
  auto ref = crypto::OpenUserReference(*inner, master);
  ASSERT_TRUE(ref.ok());
  EXPECT_EQ(ref->user_id, f.users[0].value());
  EXPECT_EQ(ref->contact_key, f.sim.guest(0).contact_key());
  // The wrong venue key fails.
  EXPECT_FALSE(crypto::RemoveOuterLayer(rec.double_enc_ref,
                                        f.sim.venue(f.venues[1]).keys.private_key)
                   .ok());
}

TEST(CheckinTest, ErrorConditions) {
  Fixture f(1);
  const int unregistered = f.sim.AddGuest(ContactData{"x", "y", "z"});
  EXPECT_TRUE(HasErrorKind(f.sim.CheckInScanner(unregistered, f.Scanner(0), 100).status(),
                           ErrorKind::kUnknownUser));
  EXPECT_TRUE(HasErrorKind(f.sim.CheckOut(0, 200), ErrorKind::kNoOpenCheckin));
  EXPECT_TRUE(HasErrorKind(
      f.sim.CheckInScanner(0, f.Scanner(0), kSecondsPerDay + 100).status(),
      ErrorKind::kNoMasterKey));
  EXPECT_TRUE(HasErrorKind(
      f.sim.CheckInScanner(0, ScannerId("s-none"), 300).status(),
      ErrorKind::kInvalidArgument));
  ASSERT_TRUE(f.sim.CheckInSelf(0, f.venues[1], 400).ok());
  ASSERT_TRUE(f.sim.CheckOut(0, 500).ok());
  EXPECT_TRUE(HasErrorKind(f.sim.CheckOut(0, 600), ErrorKind::kNoOpenCheckin));
}

TEST(CheckinTest, EveryCheckinIsObservedOnce) {
  Fixture f(4);
  std::vector<RecordId> records;
  for (int g = 0; g < 4; ++g) {
    records.push_back(*f.sim.CheckInScanner(g, f.Scanner(g % 2), 9 * kHour + g));
  }
  for (int g = 0; g < 4; ++g) ASSERT_TRUE(f.sim.CheckOut(g, 10 * kHour + g).ok());
  for (RecordId r : records) {
    const crypto::TraceId& id = f.sim.server().checkins.at(r).trace_id;
    int polls = 0;
    int checkouts = 0;
    for (const NetworkObservation& o : f.sim.server().observations) {
      if (o.endpoint != Endpoint::kGuestApp || o.trace_id != id) continue;
      polls += o.message_kind == MessageKind::kCheckinPoll;
      checkouts += o.message_kind == MessageKind::kCheckout;
    }
    EXPECT_EQ(polls, 1);
    EXPECT_EQ(checkouts, 1);
  }
  for (std::size_t i = 0; i < f.sim.server().observations.size(); ++i) {
    EXPECT_EQ(f.sim.server().observations[i].index, static_cast<std::int64_t>(i));
  }
}

TEST(ReportTest, CodesAreDistinct) {
  Fixture f(20);
  std::set<std::string> codes;
  for (int g = 0; g < 20; ++g) {
    auto code = f.sim.ReportPositive(g, {0}, 20 * kHour);
    ASSERT_TRUE(code.ok());
    codes.insert(code->code);
  }
  EXPECT_EQ(codes.size(), 20u);
  EXPECT_TRUE(HasErrorKind(
      f.sim.Trace(f.hds[0], crypto::VerificationCode{"NOPE"}, 21 * kHour).status(),
      ErrorKind::kUnknownCode));
}

TEST(TraceTest, ContactsEqualTrueCotenants) {
  Fixture f(5);
  // Guests 0..2 overlap at venue 0, guest 3 comes after guest 0 has left,
  // guest 4 overlaps in time but at venue 1.
  ASSERT_TRUE(f.sim.CheckInScanner(0, f.Scanner(0), 10 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(1, f.Scanner(0), 10 * kHour + 600).ok());
  ASSERT_TRUE(f.sim.CheckInSelf(2, f.venues[0], 10 * kHour + 900).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(4, f.Scanner(1), 10 * kHour + 900).ok());
  ASSERT_TRUE(f.sim.CheckOut(0, 11 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckOut(1, 11 * kHour + 60).ok());
  ASSERT_TRUE(f.sim.CheckOut(2, 11 * kHour + 120).ok());
  ASSERT_TRUE(f.sim.CheckOut(4, 11 * kHour + 120).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(3, f.Scanner(0), 12 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckOut(3, 13 * kHour).ok());

  auto code = f.sim.ReportPositive(0, {0}, 20 * kHour);
  ASSERT_TRUE(code.ok());
  auto result = f.sim.Trace(f.hds[1], *code, 21 * kHour);
  ASSERT_TRUE(result.ok()) << result.status();
  const auto truth = TrueCotenants(f.sim.log(), f.users[0], TimeWindow::Days(0, 0),
                                   f.sim.options().stay);
  ASSERT_TRUE(truth.ok());
  EXPECT_EQ(result->ContactIds(), *truth);
  EXPECT_EQ(result->ContactIds(), (std::set<UserId>{f.users[1], f.users[2]}));
  for (const TracedContact& c : result->contacts) {
    EXPECT_EQ(c.contact, f.sim.guest(*f.sim.GuestOfUser(c.user_id)).contact());
  }
}

TEST(TraceTest, NoOverlapGivesNoContacts) {
  Fixture f(2);
  ASSERT_TRUE(f.sim.CheckInScanner(0, f.Scanner(0), 9 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckOut(0, 10 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(1, f.Scanner(0), 10 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckOut(1, 11 * kHour).ok());
  auto code = f.sim.ReportPositive(0, {0}, 20 * kHour);
  auto result = f.sim.Trace(f.hds[0], *code, 21 * kHour);
  ASSERT_TRUE(result.ok());
  EXPECT_TRUE(result->contacts.empty());
  EXPECT_EQ(result->index_records.size(), 1u);
}

TEST(TraceTest, UnavailableVenueContributesNothing) {
  SimulationOptions options;
  options.unavailable_venues = {VenueId("v-0000")};
  Fixture f(3, options);
  ASSERT_TRUE(f.sim.CheckInScanner(0, f.Scanner(0), 9 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(1, f.Scanner(0), 9 * kHour + 60).ok());
  ASSERT_TRUE(f.sim.CheckOut(0, 10 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(0, f.Scanner(1), 11 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(2, f.Scanner(1), 11 * kHour + 60).ok());
  auto code = f.sim.ReportPositive(0, {0}, 20 * kHour);
  auto result = f.sim.Trace(f.hds[0], *code, 21 * kHour);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_EQ(result->ContactIds(), std::set<UserId>{f.users[2]});
  EXPECT_EQ(result->unavailable_venues, std::vector<VenueId>{f.venues[0]});
}

TEST(TraceTest, IndexCaseIncludedOnRequest) {
  SimulationOptions options;
  options.include_index_case = true;
  Fixture f(2, options);
  ASSERT_TRUE(f.sim.CheckInScanner(0, f.Scanner(0), 9 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckOut(0, 10 * kHour).ok());
  auto code = f.sim.ReportPositive(0, {0}, 20 * kHour);
  auto result = f.sim.Trace(f.hds[0], *code, 21 * kHour);
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result->ContactIds(), std::set<UserId>{f.users[0]});
}

TEST(TraceTest, HonestTraceKeepsServerIgnorantOfRecordOwners) {
  Fixture f(3);
  ASSERT_TRUE(f.sim.CheckInScanner(0, f.Scanner(0), 9 * kHour).ok());
  ASSERT_TRUE(f.sim.CheckInScanner(1, f.Scanner(0), 9 * kHour + 60).ok());
  auto code = f.sim.ReportPositive(0, {0}, 20 * kHour);
  ASSERT_TRUE(f.sim.Trace(f.hds[0], *code, 21 * kHour).ok());
  EXPECT_TRUE(f.sim.server().vault.empty());
  EXPECT_TRUE(f.sim.server().behavior.IsHonest());
}

}  // namespace
}  // namespace lucasim
