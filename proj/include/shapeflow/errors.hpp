#ifndef SHAPEFLOW_ERRORS_HPP
#define SHAPEFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shapeflow {

/** Invalid or inconsistent problem configuration (CLI exit code 2). */
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/** A shape whose thickness is non-positive somewhere on the evaluation grid. */
class DegenerateShapeError : public std::domain_error {
public:
    DegenerateShapeError(const std::string& what, int column, double thickness)
        : std::domain_error(what), column_(column), thickness_(thickness) {}

    int column() const { return column_; }
    double thickness() const { return thickness_; }

private:
    int column_;
    double thickness_;
};

/** Linear-algebra failure (singular system, factorization breakdown; CLI exit code 3). */
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/** Filesystem failure while reading or writing an artifact. */
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/** API misuse: a precondition that calling code is responsible for. */
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

} // namespace shapeflow

#endif
