#pragma once

#include <stdexcept>
#include <string>

namespace mmwave {

/// Base class of every error thrown by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define MMWAVE_DEFINE_ERROR(Name, tag)                                     \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message) : Error(tag, message) {}     \
  };

MMWAVE_DEFINE_ERROR(DomainError, "domain_error")
MMWAVE_DEFINE_ERROR(FeasibilityError, "feasibility_error")
MMWAVE_DEFINE_ERROR(InstanceError, "instance_error")
MMWAVE_DEFINE_ERROR(SizeError, "size_error")
MMWAVE_DEFINE_ERROR(IterationLimitError, "iteration_limit")
MMWAVE_DEFINE_ERROR(ScenarioError, "scenario_error")
MMWAVE_DEFINE_ERROR(SpecError, "spec_error")
MMWAVE_DEFINE_ERROR(DimensionError, "dimension_error")
MMWAVE_DEFINE_ERROR(FormatError, "format_error")

#undef MMWAVE_DEFINE_ERROR

}  // namespace mmwave
