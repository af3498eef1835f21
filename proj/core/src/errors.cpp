#include "bflab/errors.hpp"

namespace bflab {

NumericFailure::NumericFailure(const std::string& what, double achieved_rel_error)
    : Error(what + " (achieved relative error " + std::to_string(achieved_rel_error) + ")"),
      achieved_rel_error_(achieved_rel_error) {}

ImproperPrior::ImproperPrior(std::string component)
    : Error("cannot sample from improper prior on '" + component +
            "'; supply it as a fixed value instead"),
      component_(std::move(component)) {}

ValidationError::ValidationError(std::string path, const std::string& message)
    : Error(path + ": " + message), path_(std::move(path)) {}

}  // namespace bflab
