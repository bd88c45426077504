#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace medlist {

/// Base for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A stream or file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Compiled table files are missing, inconsistent or unreadable.
class DataError : public Error {
public:
    using Error::Error;
};

class UnparseableStrength : public Error {
public:
    explicit UnparseableStrength(std::string atv)
        : Error("unparseable strength: '" + atv + "'"), atv_(std::move(atv)) {}

    const std::string& atv() const noexcept { return atv_; }

private:
    std::string atv_;
};

class UnknownMedication : public Error {
public:
    explicit UnknownMedication(long long med_list_id)
        : Error("unknown medication id " + std::to_string(med_list_id)), med_list_id_(med_list_id) {}

    long long med_list_id() const noexcept { return med_list_id_; }

private:
    long long med_list_id_;
};

/// A compile stage failed. Carries the stage name so operators can see where.
class CompileError : public Error {
public:
    CompileError(std::string stage, const std::string& detail)
        : Error("compile stage '" + stage + "' failed: " + detail), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class EmptyTerminology : public Error {
public:
    EmptyTerminology() : Error("terminology has no medications or no common forms") {}
};

class InvalidDistribution : public Error {
public:
    using Error::Error;
};

}  // namespace medlist
