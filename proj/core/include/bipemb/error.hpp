#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bipemb {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation was called with inputs outside its documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A pipeline stage failed; `stage()` names it ("partition", "hamilton", ...).
class StageError : public Error {
public:
    StageError(std::string stage, const std::string & what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

    const std::string & stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string & what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace bipemb
