#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace forgan {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named substream of a root seed
/// (e.g. "dataset", "init", "training", "eval").
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);

/// Derives the seed for the `index`-th member of a family of streams.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index);

inline Rng make_rng(std::uint64_t root, std::string_view stream) {
    return Rng(derive_seed(root, stream));
}

}  // namespace forgan
