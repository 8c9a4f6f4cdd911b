#pragma once

#include <stdexcept>
#include <string>

namespace fbmvar {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter is outside its mathematical domain (e.g. H not in (0,1)).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested (kappa, H, form) combination is not covered by a limit theorem.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// Circulant embedding produced a significantly negative eigenvalue.
class EmbeddingError : public Error {
public:
    using Error::Error;
};

/// Problem size exceeds a cost guard.
class SizeError : public Error {
public:
    using Error::Error;
};

class UnknownWeight : public Error {
public:
    using Error::Error;
};

/// A derivative order was requested beyond what a weight provides.
class OrderError : public Error {
public:
    using Error::Error;
};

/// kappa is incompatible with the requested statistic.
class KappaError : public Error {
public:
    using Error::Error;
};

/// Log-log regression input is degenerate (non-positive errors, too few points).
class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// Experiment config is malformed. Message carries "line N: field 'x': ..." addressing.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace fbmvar
