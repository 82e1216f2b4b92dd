#pragma once

#include <stdexcept>
#include <string>

namespace risklab {

// Error taxonomy mapped to CLI exit codes: validation -> 1, runtime -> 2,
// remote agent -> 3. std::invalid_argument also counts as validation.

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EstimationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedStatisticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IncompleteComparisonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Transport failure or unparseable replies from a remote agent after retries.
class RemoteAgentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Agent failure during a session, with the trial it happened on attached.
class SessionError : public std::runtime_error {
public:
    SessionError(int trial_index, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial_index) + ": " + what),
          trial_index(trial_index) {}

    int trial_index;
};

}  // namespace risklab
