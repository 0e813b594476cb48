#pragma once

#include <stdexcept>
#include <string>

namespace dhc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid feeder description (topology, impedance, limits).
class NetworkError : public Error {
public:
    using Error::Error;
};

/// Load flow failed to converge or was fed an invalid operating point.
class LoadFlowError : public Error {
public:
    using Error::Error;
};

/// Malformed conic problem (unregistered variables, bad dimensions, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Hosting-capacity solve failed (infeasible P1, non-optimal status).
class HostingCapacityError : public Error {
public:
    using Error::Error;
};

/// Bad user input: files, CSV content, configuration values.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace dhc
