// Copyright 2026 The deteqt Authors
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

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace deteqt {

/// Fixed-width set of node indices in [0, 128).
struct NodeMask {
    std::array<uint64_t, 2> words{};

    static constexpr uint32_t kCapacity = 128;

    constexpr void set(uint32_t i) { words[i >> 6] |= uint64_t{1} << (i & 63); }
    constexpr bool test(uint32_t i) const { return (words[i >> 6] >> (i & 63)) & 1; }
    constexpr int count() const { return std::popcount(words[0]) + std::popcount(words[1]); }
    constexpr bool empty() const { return (words[0] | words[1]) == 0; }

    static NodeMask of(const std::vector<uint32_t> &indices) {
        NodeMask m;
        for (uint32_t i : indices) {
            if (i >= kCapacity) {
                throw std::out_of_range("node index exceeds NodeMask capacity");
            }
            m.set(i);
        }
        return m;
    }

    std::vector<uint32_t> indices() const {
        std::vector<uint32_t> out;
        for (uint32_t w = 0; w < 2; w++) {
            uint64_t bits = words[w];
            while (bits) {
                out.push_back(w * 64 + std::countr_zero(bits));
                bits &= bits - 1;
            }
        }
        return out;
    }

    friend constexpr NodeMask operator&(NodeMask a, const NodeMask &b) {
        a.words[0] &= b.words[0];
        a.words[1] &= b.words[1];
        return a;
    }
    friend constexpr bool operator==(const NodeMask &, const NodeMask &) = default;
};

inline int intersection_size(const NodeMask &a, const NodeMask &b) {
    return std::popcount(a.words[0] & b.words[0]) + std::popcount(a.words[1] & b.words[1]);
}

}  // namespace deteqt
