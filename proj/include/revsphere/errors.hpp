#pragma once

#include <stdexcept>
#include <string>

namespace revsphere {

// Input data that fails a structural requirement (bad samples, asymmetric
// profile, non-finite parameters).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Model outside the supported class, e.g. radial curvature not monotone
// where an operation requires it.
class unsupported_model : public std::runtime_error {
 public:
  explicit unsupported_model(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to converge within its budget.
class solver_failure : public std::runtime_error {
 public:
  explicit solver_failure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace revsphere
