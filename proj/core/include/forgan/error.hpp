#pragma once

#include <stdexcept>
#include <string>

namespace forgan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a precondition: shape mismatch, out-of-domain value, bad argument.
class ContractError : public Error {
public:
    using Error::Error;
};

/// Input data could not be read or does not have the expected form.
class DataError : public Error {
public:
    using Error::Error;
};

/// A computation produced a non-finite value (diverged integration, NaN loss).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A serialized artifact is truncated, corrupt, or from an unsupported version.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace forgan
