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


#include "lucasim/status.h"

#include <array>
#include <string>

#include "absl/strings/cord.h"
#include "absl/strings/str_cat.h"

namespace lucasim {
namespace {

constexpr char kPayloadUrl[] = "lucasim/error-kind";

struct KindInfo {
  ErrorKind kind;
  std::string_view name;
  absl::StatusCode code;
};

constexpr std::array<KindInfo, 14> kKinds = {{
    {ErrorKind::kDecryptionFailure, "DecryptionFailure",
     absl::StatusCode::kDataLoss},
    {ErrorKind::kInvalidArgument, "InvalidArgument",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kOutOfOrderEvent, "OutOfOrderEvent",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kUnknownUser, "UnknownUser", absl::StatusCode::kNotFound},
    {ErrorKind::kNotApplicable, "NotApplicable",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kAlreadyRegistered, "AlreadyRegistered",
     absl::StatusCode::kAlreadyExists},
    {ErrorKind::kKeyAlreadyExists, "KeyAlreadyExists",
     absl::StatusCode::kAlreadyExists},
    {ErrorKind::kNoMasterKey, "NoMasterKey",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kUnconfirmedCheckin, "UnconfirmedCheckin",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kNoOpenCheckin, "NoOpenCheckin",
     absl::StatusCode::kFailedPrecondition},
    {ErrorKind::kUnknownCode, "UnknownCode", absl::StatusCode::kNotFound},
    {ErrorKind::kVenueUnavailable, "VenueUnavailable",
     absl::StatusCode::kUnavailable},
    {ErrorKind::kConfigError, "ConfigError",
     absl::StatusCode::kInvalidArgument},
    {ErrorKind::kSimulationError, "SimulationError",
     absl::StatusCode::kInternal},
}};

const KindInfo& Info(ErrorKind kind) {
  for (const KindInfo& info : kKinds) {
    if (info.kind == kind) return info;
  }
  return kKinds.back();
}

}  // namespace

std::string_view ErrorKindName(ErrorKind kind) { return Info(kind).name; }

absl::Status Error(ErrorKind kind, std::string_view message) {
  const KindInfo& info = Info(kind);
  absl::Status status(info.code, absl::StrCat(std::string(info.name), ": ", std::string(message)));
  status.SetPayload(kPayloadUrl, absl::Cord(std::string(info.name)));
  return status;
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  auto payload = status.GetPayload(kPayloadUrl);
  if (!payload.has_value()) return std::nullopt;
  const std::string name(*payload);
  for (const KindInfo& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

}  // namespace lucasim
