#include "netinf/rng.hpp"

#include <vector>

namespace netinf {
namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void push_words(std::vector<std::uint32_t>& words, std::uint64_t value) {
  words.push_back(static_cast<std::uint32_t>(value & 0xffffffffULL));
  words.push_back(static_cast<std::uint32_t>(value >> 32));
}

}  // namespace

Rng derive_stream(std::uint64_t master_seed, std::string_view purpose,
                  std::span<const std::uint64_t> indices) {
  std::vector<std::uint32_t> words;
  words.reserve(4 + 2 * indices.size());
  push_words(words, master_seed);
  push_words(words, fnv1a(purpose));
  for (std::uint64_t index : indices) push_words(words, index);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

Rng derive_stream(std::uint64_t master_seed, std::string_view purpose,
                  std::initializer_list<std::uint64_t> indices) {
  return derive_stream(master_seed, purpose,
                       std::span<const std::uint64_t>(indices.begin(), indices.size()));
}

}  // namespace netinf
