#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pcve {

std::string sha256_hex(std::string_view data);

// Stable across platforms and builds; used wherever a hash feeds persisted
// output or a seed.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ull);
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a run seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace pcve
