#pragma once

#include <stdexcept>
#include <string>

namespace plap {

/// Argument outside the mathematical domain of an operation (p <= 1, rho <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// T_p evaluated inside the guard band of one of its poles.
class PoleError : public DomainError {
public:
    PoleError(const std::string& what, double pole)
        : DomainError(what), pole_(pole) {}
    double pole() const noexcept { return pole_; }

private:
    double pole_;
};

/// Non-finite or otherwise unusable sampled data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed potential document; `where` is a JSON-pointer style location.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::string where)
        : std::runtime_error(where.empty() ? what : where + ": " + what),
          where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// Step size underflow or step budget exhausted.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_x)
        : std::runtime_error(what), last_x_(last_x) {}
    double last_good_x() const noexcept { return last_x_; }

private:
    double last_x_;
};

/// Eigenvalue search ran out of bracket or iterations.
class SearchError : public std::runtime_error {
public:
    SearchError(const std::string& what, int index, double phi_lo, double phi_hi)
        : std::runtime_error(what), index_(index), phi_lo_(phi_lo), phi_hi_(phi_hi) {}
    int index() const noexcept { return index_; }
    double phi_lo() const noexcept { return phi_lo_; }
    double phi_hi() const noexcept { return phi_hi_; }

private:
    int index_;
    double phi_lo_;
    double phi_hi_;
};

/// The requested eigenvalue is not positive, so the Prüfer route cannot reach it.
class UnsupportedRegimeError : public std::runtime_error {
public:
    UnsupportedRegimeError(const std::string& what, int index)
        : std::runtime_error(what), index_(index) {}
    int index() const noexcept { return index_; }

private:
    int index_;
};

/// Operation needs data the object does not carry.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace plap
