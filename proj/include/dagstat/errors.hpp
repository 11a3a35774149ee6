#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dagstat {

// Raised when an exhaustive or quadratic computation is asked to run past
// its configured size limit.
class CapExceeded : public std::length_error {
 public:
  CapExceeded(const std::string& what, std::uint64_t requested, std::uint64_t cap)
      : std::length_error(what + ": n=" + std::to_string(requested) +
                          " exceeds cap " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::uint64_t requested() const noexcept { return requested_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t requested_;
  std::uint64_t cap_;
};

}  // namespace dagstat
