#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace palearn {

// Requested more samples than the pool (or embedding set) can supply.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sample id was selected that is unknown or already labeled.
struct InvalidSelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed numeric input (non-finite feature, empty evaluation set, ...).
struct InvalidInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training cannot proceed (empty labeled set, non-finite loss).
struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cohort spec is invalid or infeasible.
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fewer patients than required and refill is disabled.
struct InsufficientPatientsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ragged per-seed curves or mismatched shapes during aggregation.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad experiment/cohort configuration (unknown key, bad value, missing field).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Data file parse failure; line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line = 0)
        : std::runtime_error(line ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace palearn
