// errors.hpp - Exception types shared by every ncdelay module.
//
// Each exception carries a category so the command-line front end can map
// failures to exit codes without string matching.

#ifndef NCDELAY_ERRORS_HPP
#define NCDELAY_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ncdelay {

enum class ErrorCategory {
    domain,             // argument outside a function's domain
    unsupported,        // operation not defined for the given curve shapes
    unbounded_delay,    // arrival long-run rate exceeds service rate
    precondition,       // formula-specific parameter condition violated
    infeasible_source,  // source timing cannot meet the requested load
    horizon_exceeded,   // exactness needed beyond a finite curve unrolling
    estimation_failed,  // no service rate passes the measurement test
    parse,              // malformed data file
    config,             // malformed or incomplete configuration
    io,                 // filesystem failure
};

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message),
          category_(category)
    {}

    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

#define NCDELAY_DEFINE_ERROR(Name, Category)                   \
    class Name : public Error {                                \
    public:                                                    \
        explicit Name(const std::string& message)              \
            : Error(ErrorCategory::Category, message)           \
        {}                                                     \
    }

NCDELAY_DEFINE_ERROR(DomainError, domain);
NCDELAY_DEFINE_ERROR(UnsupportedOperation, unsupported);
NCDELAY_DEFINE_ERROR(UnboundedDelay, unbounded_delay);
NCDELAY_DEFINE_ERROR(PreconditionError, precondition);
NCDELAY_DEFINE_ERROR(InfeasibleSource, infeasible_source);
NCDELAY_DEFINE_ERROR(HorizonExceeded, horizon_exceeded);
NCDELAY_DEFINE_ERROR(EstimationFailed, estimation_failed);
NCDELAY_DEFINE_ERROR(ConfigError, config);
NCDELAY_DEFINE_ERROR(IoError, io);

#undef NCDELAY_DEFINE_ERROR

// Parse errors keep the 1-based line number of the offending row (0 when the
// problem is not tied to a line).
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : Error(ErrorCategory::parse, format(source, line, message)),
          line_(line)
    {}

    std::size_t line() const { return line_; }

private:
    static std::string format(const std::string& source, std::size_t line, const std::string& message)
    {
        if (line == 0) {
            return source + ": " + message;
        }
        return source + ":" + std::to_string(line) + ": " + message;
    }

    std::size_t line_;
};

} // namespace ncdelay

#endif
