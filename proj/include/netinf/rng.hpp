#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace netinf {

using Rng = std::mt19937_64;

/// Derives an independent generator from a master seed, a purpose string and
/// a list of indices (trial, simulation, column, ...).
///
/// The derivation hashes the purpose string with 64-bit FNV-1a and feeds the
/// seed, the hash and every index, split into 32-bit words, through
/// std::seed_seq. Streams for distinct (purpose, indices) tuples are
/// therefore unrelated, and a stream never depends on which thread asks for
/// it.
Rng derive_stream(std::uint64_t master_seed, std::string_view purpose,
                  std::initializer_list<std::uint64_t> indices = {});
Rng derive_stream(std::uint64_t master_seed, std::string_view purpose,
                  std::span<const std::uint64_t> indices);

/// Draws a 64-bit seed from an existing generator, for handing work to
/// derive_stream-based code.
inline std::uint64_t draw_seed(Rng& rng) { return rng(); }

}  // namespace netinf
