// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace cloudcap {

using Rng = std::mt19937_64;

/// What a substream feeds. Workload streams ignore the policy so every
/// policy sees the same arrivals (common random numbers).
enum class StreamTag : std::uint64_t
{
    workload = 0,
    pooled = 1,
    benchmark = 2,
    diffusion = 3,
    weights = 4,
    diagnostic = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// hash(master, tag, class, replication) folded through splitmix64.
inline std::uint64_t substream_seed(std::uint64_t master,
                                    StreamTag tag,
                                    std::uint64_t class_id,
                                    std::uint64_t replication)
{
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    h = splitmix64(h ^ class_id);
    h = splitmix64(h ^ replication);
    return h;
}

inline Rng make_rng(std::uint64_t master, StreamTag tag, std::uint64_t class_id, std::uint64_t replication)
{
    return Rng(substream_seed(master, tag, class_id, replication));
}

}  // namespace cloudcap
