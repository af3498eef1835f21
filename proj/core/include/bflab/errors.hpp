#pragma once

#include <stdexcept>
#include <string>

namespace bflab {

// Root of every error the library raises. Callers that only care about
// "did this fail" catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// No observations where at least one is required.
class EmptyData : public Error {
public:
    using Error::Error;
};

// Data for which the requested quantity is 0/0 (e.g. all-zero samples).
class DegenerateData : public Error {
public:
    using Error::Error;
};

// The evidence integral diverges (e.g. a perfect regression fit).
class DivergentEvidence : public Error {
public:
    using Error::Error;
};

// Quadrature did not reach its tolerance within the refinement budget.
class NumericFailure : public Error {
public:
    NumericFailure(const std::string& what, double achieved_rel_error);

    double achieved_rel_error() const noexcept { return achieved_rel_error_; }

private:
    double achieved_rel_error_;
};

// Request to sample a parameter whose prior does not normalize.
class ImproperPrior : public Error {
public:
    explicit ImproperPrior(std::string component);

    const std::string& component() const noexcept { return component_; }

private:
    std::string component_;
};

// Aggregation produced nothing to report (e.g. no bin passes min_count).
class EmptyResult : public Error {
public:
    using Error::Error;
};

// More replicates failed than a run tolerates.
class FailureThresholdExceeded : public Error {
public:
    using Error::Error;
};

// Configuration rejected; `path` names the offending field ("stopping.B").
class ValidationError : public Error {
public:
    ValidationError(std::string path, const std::string& message);

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace bflab
