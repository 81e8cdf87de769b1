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


#ifndef LUCASIM_BYTES_H_
#define LUCASIM_BYTES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lucasim {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

// Simulation time in whole seconds since scenario start.
using SimTime = std::int64_t;
inline constexpr SimTime kSecondsPerDay = 86400;

inline int DayOf(SimTime t) { return static_cast<int>(t / kSecondsPerDay); }

// Must be called before any libsodium primitive; idempotent.
void EnsureSodiumInitialized();

Bytes ToBytes(std::string_view s);
std::string ToString(ByteSpan bytes);

std::string HexEncode(ByteSpan bytes);
std::optional<Bytes> HexDecode(std::string_view hex);

std::array<std::uint8_t, 32> Sha256(ByteSpan data);
std::string Sha256Hex(ByteSpan data);
inline std::string Sha256Hex(std::string_view s) {
  return Sha256Hex(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()),
                            s.size()));
}

// Appends a u32 big-endian length prefix followed by the bytes.
void AppendLengthPrefixed(Bytes& out, ByteSpan field);
void AppendU64(Bytes& out, std::uint64_t value);

// Sequential reader for length-prefixed encodings.
class ByteReader {
 public:
  explicit ByteReader(ByteSpan data) : data_(data) {}

  std::optional<Bytes> ReadLengthPrefixed();
  std::optional<std::uint64_t> ReadU64();
  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  ByteSpan data_;
  std::size_t pos_ = 0;
};

}  // namespace lucasim

#endif  // LUCASIM_BYTES_H_
