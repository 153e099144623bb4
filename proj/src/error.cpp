#include "msvar/error.hpp"

namespace msvar {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::UnparseablePeriod: return "UnparseablePeriod";
        case ErrorKind::UnparseableValue: return "UnparseableValue";
        case ErrorKind::DuplicateObservation: return "DuplicateObservation";
        case ErrorKind::MixedFrequency: return "MixedFrequency";
        case ErrorKind::OrderTooLarge: return "OrderTooLarge";
        case ErrorKind::EmptyIntersection: return "EmptyIntersection";
        case ErrorKind::MissingData: return "MissingData";
        case ErrorKind::MissingVariable: return "MissingVariable";
        case ErrorKind::NoVariables: return "NoVariables";
        case ErrorKind::RateOutOfDomain: return "RateOutOfDomain";
        case ErrorKind::NonPositiveConsumption: return "NonPositiveConsumption";
        case ErrorKind::TooShort: return "TooShort";
        case ErrorKind::ZeroVariance: return "ZeroVariance";
        case ErrorKind::InvalidP: return "InvalidP";
        case ErrorKind::TooFewEntities: return "TooFewEntities";
        case ErrorKind::CollinearRegressors: return "CollinearRegressors";
        case ErrorKind::DimensionOutOfRange: return "DimensionOutOfRange";
        case ErrorKind::SingularCovariance: return "SingularCovariance";
        case ErrorKind::NumericalUnderflow: return "NumericalUnderflow";
        case ErrorKind::DegenerateRegime: return "DegenerateRegime";
        case ErrorKind::InsufficientObservations: return "InsufficientObservations";
        case ErrorKind::Unsupported: return "Unsupported";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::UnstableSystem: return "UnstableSystem";
        case ErrorKind::BadOrdering: return "BadOrdering";
        case ErrorKind::Configuration: return "Configuration";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

}  // namespace msvar
