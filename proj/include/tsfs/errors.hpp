#pragma once

#include <stdexcept>
#include <string>

namespace tsfs {

/// Caller passed arguments that violate an operation's preconditions.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed input file. Carries the 1-based row/column when known (0 otherwise).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t col = 0)
        : std::runtime_error(format(what, row, col)), row_(row), col_(col) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    static std::string format(const std::string& what, std::size_t row, std::size_t col) {
        if (row == 0) return what;
        std::string s = what + " (row " + std::to_string(row);
        if (col != 0) s += ", column " + std::to_string(col);
        return s + ")";
    }

    std::size_t row_;
    std::size_t col_;
};

/// Non-finite values, singular systems and similar failures inside a computation.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual)
        : NumericalError(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A neighbour graph that must be connected is not.
class ConnectivityError : public std::runtime_error {
public:
    explicit ConnectivityError(std::size_t components)
        : std::runtime_error("neighbour graph is disconnected (" + std::to_string(components) +
                             " components); increase the number of neighbours"),
          components_(components) {}

    std::size_t components() const noexcept { return components_; }

private:
    std::size_t components_;
};

}  // namespace tsfs
