#pragma once

#include <stdexcept>
#include <string>

namespace nclearn {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct NotColumnStochastic : Error {
  using Error::Error;
};

struct InvalidSigma : Error {
  using Error::Error;
};

struct EmptySample : Error {
  using Error::Error;
};

struct DegenerateLabels : Error {
  using Error::Error;
};

struct NonPositiveDenominator : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

struct MissingLabelColumn : Error {
  using Error::Error;
};

struct EmptyResults : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace nclearn
