#pragma once

#include <stdexcept>
#include <string>

namespace treeglm {

/// Thrown when an optimiser diverges or fails to converge within its caps.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace treeglm
