#include "hl/error.hpp"

namespace hl {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Transport: return "transport";
        case ErrorKind::Protocol: return "protocol";
        case ErrorKind::MalformedResponse: return "malformed-response";
        case ErrorKind::Config: return "config";
        case ErrorKind::State: return "state";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

void rethrow_with_context(std::exception_ptr e, const std::string& context) {
    try {
        std::rethrow_exception(e);
    } catch (const ParseError& err) {
        throw ParseError(context + ": " + err.what(), err.raw);
    } catch (const ProtocolError& err) {
        throw ProtocolError(context + ": " + err.what(), err.status);
    } catch (const NumericalError& err) {
        throw NumericalError(context + ": " + err.what(), err.iteration);
    } catch (const Error& err) {
        const std::string msg = context + ": " + err.what();
        switch (err.kind()) {
            case ErrorKind::Validation: throw ValidationError(msg);
            case ErrorKind::Transport: throw TransportError(msg);
            case ErrorKind::MalformedResponse: throw MalformedResponseError(msg);
            case ErrorKind::Config: throw ConfigError(msg);
            case ErrorKind::State: throw StateError(msg);
            case ErrorKind::Io: throw IoError(msg);
            default: throw Error(err.kind(), msg);
        }
    }
}

}  // namespace hl
