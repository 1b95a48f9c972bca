#pragma once

#include <stdexcept>
#include <string>

namespace spdcshape {

enum class ErrorKind {
  domain,            // argument outside a model's validity window
  evanescent,        // transverse wavevector outside the propagation cone
  no_phase_matching, // requested angle does not exist for the dispersion
  total_internal_reflection,
  non_finite,        // integrand or result produced NaN/inf
  config,            // scenario file / preset problems
  scan,              // profile unusable for width extraction
  invalid_argument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace spdcshape
