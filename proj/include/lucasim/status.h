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


#ifndef LUCASIM_STATUS_H_
#define LUCASIM_STATUS_H_

#include <optional>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace lucasim {

// Protocol-level error conditions. Each maps onto a canonical absl code and
// is carried as a status payload so callers can match on the exact kind.
enum class ErrorKind {
  kDecryptionFailure,
  kInvalidArgument,
  kOutOfOrderEvent,
  kUnknownUser,
  kNotApplicable,
  kAlreadyRegistered,
  kKeyAlreadyExists,
  kNoMasterKey,
  kUnconfirmedCheckin,
  kNoOpenCheckin,
  kUnknownCode,
  kVenueUnavailable,
  kConfigError,
  kSimulationError,
};

std::string_view ErrorKindName(ErrorKind kind);

absl::Status Error(ErrorKind kind, std::string_view message);

std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

inline bool HasErrorKind(const absl::Status& status, ErrorKind kind) {
  return GetErrorKind(status) == kind;
}

}  // namespace lucasim

#define LUCASIM_STATUS_CONCAT_INNER_(a, b) a##b
#define LUCASIM_STATUS_CONCAT_(a, b) LUCASIM_STATUS_CONCAT_INNER_(a, b)

#define LUCASIM_RETURN_IF_ERROR(expr)              \
  do {                                             \
    if (absl::Status _st = (expr); !_st.ok()) {    \
      return _st;                                  \
    }                                              \
  } while (0)

#define LUCASIM_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                   \
  if (!tmp.ok()) return tmp.status();                  \
  lhs = std::move(tmp).value()

#define LUCASIM_ASSIGN_OR_RETURN(lhs, expr) \
  LUCASIM_ASSIGN_OR_RETURN_IMPL_(           \
      LUCASIM_STATUS_CONCAT_(_statusor_, __LINE__), lhs, expr)

#endif  // LUCASIM_STATUS_H_
