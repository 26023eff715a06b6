#pragma once

#include <stdexcept>
#include <string>

namespace geoknit {

/// Failure raised by every geoknit operation. `code()` is a short stable
/// identifier ("degenerate-box", "empty-mesh", ...) that callers and tests
/// match on; `what()` adds human-readable detail.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string code, const std::string& detail = {});

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace geoknit
