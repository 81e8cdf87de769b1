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


#include "lucasim/rng.h"

namespace lucasim {

std::uint64_t SimRng::Uniform(std::uint64_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::int64_t SimRng::UniformInt(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<std::int64_t>(
                  Uniform(static_cast<std::uint64_t>(hi - lo) + 1));
}

double SimRng::UniformDouble() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Bytes SimRng::RandomBytes(std::size_t n) {
  Bytes out(n);
  Fill(out.data(), n);
  return out;
}

SimRng SimRng::Fork(std::uint64_t stream) {
  return SimRng(engine_() ^ (stream * 0x9e3779b97f4a7c15ULL));
}

void SimRng::Fill(std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t word = engine_();
    for (int b = 0; b < 8 && i < n; ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(word);
      word >>= 8;
    }
  }
}

}  // namespace lucasim
