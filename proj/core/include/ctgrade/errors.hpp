#pragma once

#include <stdexcept>
#include <string>

namespace ctgrade {

// Bad invocation or configuration. CLI exit code 1.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad input data: manifests, volumes, masks, checkpoints, predictions.
// CLI exit code 2.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Failure while running an otherwise valid job (diverged training,
// unwritable output, ...). CLI exit code 3.
class PipelineError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ctgrade
