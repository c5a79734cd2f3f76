#pragma once

#include <stdexcept>
#include <string>

namespace mdx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied malformed input (wrong sizes, out-of-range parameters).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not complete (singular system, iteration cap).
class NumericalError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DimensionTooLarge : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DimensionCap : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class ZeroWeight : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InvalidCorrelation : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class OutsideTable : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Covariance matrix is singular at a domain point.
class DegenerateCovariance : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// u does not exceed the drift threshold u0.
class BelowThreshold : public InvalidArgument {
public:
    BelowThreshold(double u, double u0)
        : InvalidArgument("u = " + std::to_string(u) + " must exceed u0 = " + std::to_string(u0)),
          u_(u), u0_(u0) {}
    double u() const noexcept { return u_; }
    double u0() const noexcept { return u0_; }

private:
    double u_;
    double u0_;
};

}  // namespace mdx
