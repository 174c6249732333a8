#pragma once

#include <stdexcept>
#include <string>

namespace gcms {

// Malformed user input: files, configs, unknown ids. The CLI maps this to
// exit code 1; every other exception lands on exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gcms
