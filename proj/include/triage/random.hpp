/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <random>

namespace triage {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; mixes a (seed, stream) pair into an independent seed
/// so that per-tree and per-record generators do not overlap.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    return Rng(derive_seed(seed, stream));
}

/// Uniform integer in [0, bound). Rejection sampling keeps the result
/// independent of the standard library's distribution implementation.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = Rng::max() - (Rng::max() % bound + 1) % bound;
    std::uint64_t draw = rng();
    while (draw > limit) draw = rng();
    return draw % bound;
}

/// Fisher-Yates with uniform_below, so shuffles are reproducible across
/// standard library vendors.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = uniform_below(rng, i);
        std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1),
                       first + static_cast<std::ptrdiff_t>(j));
    }
}

} // namespace triage
