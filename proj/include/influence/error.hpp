#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace influence {

/// Bad input data or a violated precondition. Maps to exit status 2 in the CLI.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input was well-formed but the computation cannot proceed (degenerate data).
/// Maps to exit status 3 in the CLI.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One problem found while reading an input file. `row` is the 1-based line
/// number in the file (the header is line 1); 0 means the file as a whole.
struct RowIssue {
    std::size_t row = 0;
    std::string message;
};

/// Raised by the corpus loader after every row has been checked, so callers
/// can report all problems at once.
class CorpusError : public ValidationError {
public:
    explicit CorpusError(std::vector<RowIssue> issues)
        : ValidationError(summarize(issues)), issues_(std::move(issues)) {}

    const std::vector<RowIssue>& issues() const noexcept { return issues_; }

private:
    static std::string summarize(const std::vector<RowIssue>& issues) {
        if (issues.empty()) return "corpus validation failed";
        std::string out = "corpus validation failed with " + std::to_string(issues.size()) +
                          " error(s); first: row " + std::to_string(issues.front().row) + ": " +
                          issues.front().message;
        return out;
    }

    std::vector<RowIssue> issues_;
};

}  // namespace influence
