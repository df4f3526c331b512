#pragma once

#include <stdexcept>
#include <string>

namespace pflow {

// Base class for all recoverable failures raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyDomain : public Error {
public:
    explicit EmptyDomain(const std::string& msg) : Error(msg) {}
};

class OutsideDomain : public Error {
public:
    explicit OutsideDomain(const std::string& msg) : Error(msg) {}
};

class MeshMismatch : public Error {
public:
    explicit MeshMismatch(const std::string& msg) : Error(msg) {}
};

class BadRange : public Error {
public:
    explicit BadRange(const std::string& msg) : Error(msg) {}
};

class Degenerate : public Error {
public:
    explicit Degenerate(const std::string& msg) : Error(msg) {}
};

// Nonlinear iteration stalled; carries the iteration count and the last
// max-norm update so callers can report how close it got.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& msg, int iterations, double residual)
        : Error(msg), iterations(iterations), residual(residual) {}
    int iterations;
    double residual;
};

class OutOfBranch : public Error {
public:
    explicit OutOfBranch(const std::string& msg) : Error(msg) {}
};

class BadExponent : public Error {
public:
    explicit BadExponent(const std::string& msg) : Error(msg) {}
};

class EmptyShape : public Error {
public:
    explicit EmptyShape(const std::string& msg) : Error(msg) {}
};

class InsufficientData : public Error {
public:
    explicit InsufficientData(const std::string& msg) : Error(msg) {}
};

class BadSupport : public Error {
public:
    explicit BadSupport(const std::string& msg) : Error(msg) {}
};

} // namespace pflow
