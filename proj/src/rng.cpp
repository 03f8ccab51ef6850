// SPDX-License-Identifier: Apache-2.0
#include "minmod/rng.hpp"

namespace minmod {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index)
{
    std::uint64_t s = master;
    std::uint64_t base = splitmix64(s);
    std::uint64_t t = base ^ (index * 0xd1b54a32d192ed03ULL);
    splitmix64(t);
    return splitmix64(t);
}

Engine make_engine(std::uint64_t seed)
{
    std::uint64_t s = seed;
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s)),
                      static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s))};
    return Engine(seq);
}

}  // namespace minmod
