#pragma once

#include <stdexcept>
#include <string>

namespace iclab {

// Base of every error the library throws. `code()` is the stable,
// machine-readable tag the CLI puts into its stderr JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define ICLAB_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

ICLAB_DEFINE_ERROR(DomainError)
ICLAB_DEFINE_ERROR(DivergenceError)
ICLAB_DEFINE_ERROR(ConvergenceError)
ICLAB_DEFINE_ERROR(NumericalError)
ICLAB_DEFINE_ERROR(IntegrationError)
ICLAB_DEFINE_ERROR(ConfigError)

#undef ICLAB_DEFINE_ERROR

}  // namespace iclab
