// Copyright 2026 The latclimb Authors
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

#ifndef LATCLIMB_CORE_SUBSET_H_
#define LATCLIMB_CORE_SUBSET_H_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace latclimb {

// Largest mixture whose subsets fit in a SubsetId.
inline constexpr int kMaxMixtureSize = 64;

// A set of classifier indices of one mixture, stored as a bitmask.
class SubsetId {
 public:
  constexpr SubsetId() = default;
  constexpr explicit SubsetId(uint64_t bits) : bits_(bits) {}

  static SubsetId Of(const std::vector<size_t>& indices) {
    SubsetId s;
    for (size_t i : indices) s = s.With(i);
    return s;
  }
  static constexpr SubsetId Full(int m) {
    return SubsetId(m >= 64 ? ~uint64_t{0} : (uint64_t{1} << m) - 1);
  }

  constexpr uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool Contains(size_t i) const { return (bits_ >> i) & 1u; }
  constexpr SubsetId With(size_t i) const { return SubsetId(bits_ | (uint64_t{1} << i)); }
  constexpr SubsetId Without(size_t i) const {
    return SubsetId(bits_ & ~(uint64_t{1} << i));
  }
  constexpr bool IsSubsetOf(SubsetId other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool IsStrictSubsetOf(SubsetId other) const {
    return IsSubsetOf(other) && bits_ != other.bits_;
  }

  std::vector<size_t> Indices() const {
    std::vector<size_t> out;
    for (uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  friend constexpr bool operator==(SubsetId, SubsetId) = default;
  friend constexpr bool operator<(SubsetId a, SubsetId b) { return a.bits_ < b.bits_; }

 private:
  uint64_t bits_ = 0;
};

}  // namespace latclimb

#endif  // LATCLIMB_CORE_SUBSET_H_
