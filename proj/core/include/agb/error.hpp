#pragma once

#include <stdexcept>
#include <string>

namespace agb {

/// Base class for all library errors. Subtypes map onto the CLI exit
/// codes: ConfigError -> 2, data errors -> 3, numeric errors -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// -- configuration ----------------------------------------------------------

class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidParams : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// -- data -------------------------------------------------------------------

class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

/// Two grids that must share georeferencing do not.
class GridMismatch : public DataError {
public:
    using DataError::DataError;
};

/// A polygon lies entirely outside a grid's extent.
class EmptyIntersection : public DataError {
public:
    using DataError::DataError;
};

/// Every cell covered by a polygon carries the nodata class.
class AllNodata : public DataError {
public:
    using DataError::DataError;
};

/// A record references a year with no predictor stack on disk.
class MissingYearStack : public DataError {
public:
    using DataError::DataError;
};

/// An assessment plot references a year with no prediction surface.
class MissingYearSurface : public DataError {
public:
    using DataError::DataError;
};

/// A model is applied to rows whose feature schema differs from the one
/// it was fit on.
class SchemaMismatch : public DataError {
public:
    using DataError::DataError;
};

// -- numerics ---------------------------------------------------------------

class NumericError : public Error {
public:
    using Error::Error;
};

/// Design matrix columns are (numerically) collinear. `column` is the
/// index of the first column rejected by the pivoted factorization.
class RankDeficient : public NumericError {
public:
    RankDeficient(const std::string& what, int column)
        : NumericError(what), column(column) {}
    int column;
};

class NotConverged : public NumericError {
public:
    using NumericError::NumericError;
};

class TooManyRows : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateInput : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace agb
