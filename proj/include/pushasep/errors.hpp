#pragma once

#include <stdexcept>
#include <string>

namespace pushasep {

// Invalid parameters or inputs. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure missed its tolerance or hit a singular configuration.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pushasep
