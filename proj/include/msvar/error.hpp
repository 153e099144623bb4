#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msvar {

/// Failure categories raised by the toolkit. Every thrown msvar::Error
/// carries exactly one of these so callers can branch without parsing text.
enum class ErrorKind {
    InvalidArgument,
    // data_model
    MissingColumn,
    UnparseablePeriod,
    UnparseableValue,
    DuplicateObservation,
    MixedFrequency,
    OrderTooLarge,
    EmptyIntersection,
    MissingData,
    MissingVariable,
    NoVariables,
    // consumption kernel
    RateOutOfDomain,
    NonPositiveConsumption,
    TooShort,
    // statistical tests
    ZeroVariance,
    InvalidP,
    TooFewEntities,
    CollinearRegressors,
    DimensionOutOfRange,
    // ms-var engine
    SingularCovariance,
    NumericalUnderflow,
    DegenerateRegime,
    InsufficientObservations,
    Unsupported,
    // dynamics
    ShapeMismatch,
    UnstableSystem,
    BadOrdering,
    // pipeline
    Configuration,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    /// Message without the "Kind: " prefix that what() carries.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

}  // namespace msvar
