#pragma once

#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

namespace hl {

enum class ErrorKind {
    Validation,
    Parse,
    Transport,
    Protocol,
    MalformedResponse,
    Config,
    State,
    Numerical,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

// Carries the raw text that failed to parse so callers can log or re-prompt.
struct ParseError : Error {
    ParseError(const std::string& what, std::string raw_text)
        : Error(ErrorKind::Parse, what), raw(std::move(raw_text)) {}
    std::string raw;
};

struct TransportError : Error {
    explicit TransportError(const std::string& what) : Error(ErrorKind::Transport, what) {}
};

struct ProtocolError : Error {
    ProtocolError(const std::string& what, int http_status)
        : Error(ErrorKind::Protocol, what), status(http_status) {}
    int status;
};

struct MalformedResponseError : Error {
    explicit MalformedResponseError(const std::string& what)
        : Error(ErrorKind::MalformedResponse, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

struct StateError : Error {
    explicit StateError(const std::string& what) : Error(ErrorKind::State, what) {}
};

struct NumericalError : Error {
    NumericalError(const std::string& what, long iter) : Error(ErrorKind::Numerical, what), iteration(iter) {}
    long iteration;
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// Rethrows e with `context` prepended to the message, keeping its concrete
// error type. Non-hl exceptions are rethrown unchanged.
[[noreturn]] void rethrow_with_context(std::exception_ptr e, const std::string& context);

// Rethrows the first failure in a fan-out result with the label of its slot.
template <typename Label>
void rethrow_first_labeled(const std::vector<std::exception_ptr>& errors, Label&& label) {
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (errors[i]) rethrow_with_context(errors[i], label(i));
}

}  // namespace hl
