#pragma once

#include <stdexcept>
#include <string>

namespace tripwell {

// Base of every error the library throws. `code()` is a short stable label
// used by the CLI when it reports failures as JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class SpecificationError : public Error {
public:
    explicit SpecificationError(const std::string& w) : Error("specification", w) {}
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& w) : Error("parameter", w) {}
};

class NumericError : public Error {
public:
    NumericError(const std::string& w, double achieved = 0.0)
        : Error("numeric", w), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

class ConstructionError : public Error {
public:
    explicit ConstructionError(const std::string& w) : Error("construction", w) {}
};

class GridError : public Error {
public:
    explicit GridError(const std::string& w) : Error("grid", w) {}
};

class CoercivityFailure : public Error {
public:
    explicit CoercivityFailure(const std::string& w) : Error("coercivity", w) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& w) : Error("precondition", w) {}
};

class InvalidRatioError : public Error {
public:
    explicit InvalidRatioError(const std::string& w) : Error("invalid-ratio", w) {}
};

class MinimizationError : public Error {
public:
    explicit MinimizationError(const std::string& w) : Error("minimization", w) {}
};

}  // namespace tripwell
