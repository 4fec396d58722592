#ifndef CMIN_ERRORS_HPP
#define CMIN_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cmin {

// Raised for malformed input files. Carries a 1-based position when known.
class parse_error : public std::runtime_error {
public:
    parse_error(std::string msg, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(format(msg, line, column)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& msg, std::size_t line, std::size_t col) {
        if (line == 0)
            return msg;
        std::string s = "line " + std::to_string(line);
        if (col != 0)
            s += ", column " + std::to_string(col);
        return s + ": " + msg;
    }

    std::size_t line_;
    std::size_t column_;
};

// Raised when an internal invariant is violated. Seeing this is a bug in the
// tool, never a property of the input; results are discarded rather than
// emitted wrong.
class internal_error : public std::logic_error {
public:
    explicit internal_error(const std::string& msg)
        : std::logic_error("internal invariant violated: " + msg) {}
};

#define CMIN_REQUIRE(cond, msg)                    \
    do {                                           \
        if (!(cond))                               \
            throw ::cmin::internal_error(msg);     \
    } while (0)

} // namespace cmin

#endif
