#pragma once

#include <stdexcept>
#include <string>

namespace ivfsmc {

// Base for every error the library raises. `code()` is a stable
// machine-readable identifier used by the CLI's error line.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

// A cluster's fuzzy covariance collapsed (all weighted mass on one point).
class SingularCovariance : public Error {
public:
    SingularCovariance(int cluster, const std::string& what)
        : Error("singular_covariance", what), cluster_(cluster) {}

    int cluster() const noexcept { return cluster_; }

private:
    int cluster_;
};

class DegenerateFit : public Error {
public:
    explicit DegenerateFit(const std::string& what) : Error("degenerate_fit", what) {}
};

class NoRuleFires : public Error {
public:
    explicit NoRuleFires(const std::string& what) : Error("no_rule_fires", what) {}
};

class NonFiniteState : public Error {
public:
    explicit NonFiniteState(const std::string& what) : Error("non_finite_state", what) {}
};

// Controller asked to operate outside the region where its model is valid
// (thrust authority lost, projection violated upstream, ...).
class ValidityError : public Error {
public:
    explicit ValidityError(const std::string& what) : Error("validity_region", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io_error", what) {}
};

}  // namespace ivfsmc
