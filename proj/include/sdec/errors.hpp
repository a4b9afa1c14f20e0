#ifndef SDEC_ERRORS_HPP_
#define SDEC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sdec {

/// Invalid configuration or incompatible shapes/grids. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (singular system, non-PD pivot). CLI maps this to exit code 3.
class SingularError : public std::runtime_error {
 public:
  explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated a documented precondition (e.g. non-symmetric input to sym_eig).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sdec

#endif  // SDEC_ERRORS_HPP_
