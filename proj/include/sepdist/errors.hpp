#pragma once

#include <stdexcept>
#include <string>

namespace sepdist {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};
struct NotSymmetric : Error {
    using Error::Error;
};
struct NotSymplectic : Error {
    using Error::Error;
};
struct NotPositiveDefinite : Error {
    using Error::Error;
};
struct PairingFailure : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct TransmittanceOutOfRange : Error {
    using Error::Error;
};
struct LossOutOfRange : Error {
    using Error::Error;
};
struct UnphysicalSpec : Error {
    using Error::Error;
};
struct ZeroEfficiency : Error {
    using Error::Error;
};
struct DegenerateSpectrum : Error {
    using Error::Error;
};
struct InvalidSetting : Error {
    using Error::Error;
};
struct MissingSetting : Error {
    using Error::Error;
};
struct InsufficientSamples : Error {
    using Error::Error;
};
struct NoCrossing : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

} // namespace sepdist
