// Copyright 2026 The hgrape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HGRAPE_INSTRUMENT_HPP_
#define HGRAPE_INSTRUMENT_HPP_

#include <cstddef>
#include <cstdint>

namespace hgrape::instrument {

// Per-thread census of StateVector objects that currently own storage.
// Every StateVector constructor/destructor updates it, so the peak seen
// inside a LiveVectorProbe is an exact count of simultaneously live vectors.
struct VectorCensus {
  std::int64_t live = 0;
  std::int64_t peak = 0;
};

VectorCensus& census() noexcept;

void on_vector_acquired() noexcept;
void on_vector_released() noexcept;

// Counts vectors created inside its lifetime; vectors alive before the probe
// was opened form the baseline and are not counted.
class LiveVectorProbe {
 public:
  LiveVectorProbe() noexcept;
  ~LiveVectorProbe();
  LiveVectorProbe(const LiveVectorProbe&) = delete;
  LiveVectorProbe& operator=(const LiveVectorProbe&) = delete;

  std::size_t peak() const noexcept;

 private:
  std::int64_t baseline_;
  std::int64_t outer_peak_;
};

// Matrix-vector products issued by the expm engine on this thread.
std::uint64_t matvec_count() noexcept;
void count_matvec() noexcept;

}  // namespace hgrape::instrument

#endif  // HGRAPE_INSTRUMENT_HPP_
