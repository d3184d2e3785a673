#pragma once

#include <stdexcept>
#include <string>

namespace gvolt {

/// Bad input: malformed spec, out-of-domain argument, inconsistent shapes.
/// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A well-formed request the numerics cannot honor (ill-posed system,
/// non-convergence, size cap). The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class EmptySourceError : public ValidationError {
public:
    EmptySourceError() : ValidationError("empty source: no sample lies inside the source region") {}
};

class IllPosedError : public NumericalError {
public:
    explicit IllPosedError(const std::string& what) : NumericalError(what) {}
};

}  // namespace gvolt
