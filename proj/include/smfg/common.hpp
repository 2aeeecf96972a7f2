#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace smfg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowVec = Eigen::RowVectorXd;

// Default absolute tolerance for monotonicity / plateau detection.
inline constexpr double kMonotoneTol = 1e-12;

struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace smfg
