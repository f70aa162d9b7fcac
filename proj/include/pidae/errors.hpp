#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pidae {

// Malformed input files, missing columns, inconsistent datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-domain arguments (corruption rates, split fractions, thresholds).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid architecture / model-kind combinations, shape mismatches.
class SpecError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Calling operations in the wrong order (e.g. backward before forward).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndefinedCorrelationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

// Raised when the loss or a gradient turns non-finite. Carries the history
// recorded up to the failing epoch.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::vector<EpochRecord> history)
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<EpochRecord>& history() const noexcept { return history_; }

 private:
  std::vector<EpochRecord> history_;
};

}  // namespace pidae
