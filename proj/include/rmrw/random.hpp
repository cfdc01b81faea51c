#pragma once

#include <cstdint>
#include <random>

namespace rmrw {

/// Engine used for every random draw in the library.
using Rng = std::mt19937_64;

/// Purpose tags that keep data generation, chains and check sweeps on
/// non-overlapping streams even when they share a user seed.
enum class Stream : std::uint64_t {
  data = 0x64617461u,
  chain = 0x636861696eu,
  theory = 0x7468656f7279u,
  probe = 0x70726f6265u,
};

/// Seeds an engine from (seed, purpose, index) through std::seed_seq, so
/// stream k of purpose p never depends on how many draws other streams made.
Rng make_rng(std::uint64_t seed, Stream purpose, std::uint64_t index = 0);

}  // namespace rmrw
