#include "geoknit/diffusion/text_embed.hpp"

#include <cstdint>

namespace geoknit {

Mat embed_text(std::string_view prompt) {
  Mat out(kTextTokens, kTextDim);
  for (std::size_t i = 0; i + 1 < prompt.size(); ++i) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t k = i; k < i + 2; ++k) {
      h ^= static_cast<unsigned char>(prompt[k]);
      h *= 0x100000001b3ull;
    }
    const std::size_t token = h % kTextTokens;
    const std::size_t dim = (h >> 8) % kTextDim;
    out(token, dim) += ((h >> 20) & 1u) ? 1.0 : -1.0;
  }
  return out;
}

}  // namespace geoknit
