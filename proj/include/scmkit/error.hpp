#ifndef SCMKIT_ERROR_HPP
#define SCMKIT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scmkit
{

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string &what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Input that makes a kernel undefined (zero vector under normalization, single-class labels, ...).
class DegenerateInput : public Error
{
public:
    using Error::Error;
};

// A vector that should be present in an embedding table is not.
class MissingEmbedding : public Error
{
public:
    MissingEmbedding(const std::string &kind, const std::string &id)
        : Error("missing " + kind + " embedding for id '" + id + "'"), id_(id)
    {
    }

    const std::string &id() const noexcept { return id_; }

private:
    std::string id_;
};

} // namespace scmkit

#endif
