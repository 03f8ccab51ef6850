// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace minmod {

using Engine = std::mt19937_64;

/// One step of the SplitMix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Counter-based seed derivation: seed_i = split(master, i).
///
/// The result depends only on (master, index), so replicate i always draws
/// from the same stream no matter which worker thread runs it or in which
/// order replicates complete.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

Engine make_engine(std::uint64_t seed);

}  // namespace minmod
