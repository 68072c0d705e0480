#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sheetaudit {

class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed interchange document, or a cell that fails to load.
class LoadError : public AuditError {
public:
    LoadError(std::string message, std::string sheet = {}, std::string cell = {})
        : AuditError(std::move(message)), sheet_(std::move(sheet)), cell_(std::move(cell)) {}

    const std::string& sheet() const { return sheet_; }
    const std::string& cell() const { return cell_; }

private:
    std::string sheet_;
    std::string cell_;
};

// Positioned parser diagnostic. position is the 0-based offset into the formula text.
class FormulaError : public AuditError {
public:
    enum class Kind { Syntax, Range };

    FormulaError(Kind kind, std::size_t position, std::string message, std::string expected = {})
        : AuditError(std::move(message)),
          kind_(kind),
          position_(position),
          expected_(std::move(expected)) {}

    Kind kind() const { return kind_; }
    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    Kind kind_;
    std::size_t position_;
    std::string expected_;
};

// A relative reference resolves outside the grid while rendering or translating.
class RenderError : public AuditError {
public:
    using AuditError::AuditError;
};

class StateError : public AuditError {
public:
    using AuditError::AuditError;
};

class NotFoundError : public AuditError {
public:
    using AuditError::AuditError;
};

// Caller broke a documented precondition (e.g. a visible set that does not cover the formulas).
class ContractError : public AuditError {
public:
    ContractError(std::string message, std::string cell = {})
        : AuditError(std::move(message)), cell_(std::move(cell)) {}

    const std::string& cell() const { return cell_; }

private:
    std::string cell_;
};

class UsageError : public AuditError {
public:
    using AuditError::AuditError;
};

}  // namespace sheetaudit
