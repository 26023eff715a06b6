#pragma once

#include <string_view>

#include "geoknit/diffusion/graph.hpp"

namespace geoknit {

inline constexpr std::size_t kTextTokens = 8;
inline constexpr std::size_t kTextDim = 64;

/// Bag of hashed character bigrams: each bigram adds +-1 to one (token,
/// coordinate) cell chosen by its FNV-1a hash. "" gives all zeros.
Mat embed_text(std::string_view prompt);

}  // namespace geoknit
