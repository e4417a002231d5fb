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

#include "hgrape/instrument.hpp"

#include <algorithm>

namespace hgrape::instrument {
namespace {
thread_local VectorCensus tl_census;
thread_local std::uint64_t tl_matvecs = 0;
}  // namespace

VectorCensus& census() noexcept { return tl_census; }

void on_vector_acquired() noexcept {
  ++tl_census.live;
  tl_census.peak = std::max(tl_census.peak, tl_census.live);
}

void on_vector_released() noexcept { --tl_census.live; }

LiveVectorProbe::LiveVectorProbe() noexcept
    : baseline_(tl_census.live), outer_peak_(tl_census.peak) {
  tl_census.peak = tl_census.live;
}

LiveVectorProbe::~LiveVectorProbe() {
  tl_census.peak = std::max(outer_peak_, tl_census.peak);
}

std::size_t LiveVectorProbe::peak() const noexcept {
  return static_cast<std::size_t>(std::max<std::int64_t>(0, tl_census.peak - baseline_));
}

std::uint64_t matvec_count() noexcept { return tl_matvecs; }
void count_matvec() noexcept { ++tl_matvecs; }

}  // namespace hgrape::instrument
