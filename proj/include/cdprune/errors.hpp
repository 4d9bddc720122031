#pragma once

#include <stdexcept>
#include <string>

namespace cdprune {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArchitecture : public Error { using Error::Error; };
/// Shape or precondition violation by the caller.
class ContractError : public Error { using Error::Error; };
/// NaN/Inf reached the optimizer; the current round is aborted.
class NumericFault : public Error { using Error::Error; };
/// A prune event cannot remove any further weights.
class ExhaustedNetwork : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class UndefinedMetric : public Error { using Error::Error; };
class ParseError : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class StratificationError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };
class ReportError : public Error { using Error::Error; };
class FilesystemError : public Error { using Error::Error; };

}  // namespace cdprune
