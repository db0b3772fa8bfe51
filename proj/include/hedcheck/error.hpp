#pragma once

#include <stdexcept>
#include <string>

namespace hedcheck {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the DFL front end. line/column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(format(msg, line, column)), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& msg, int line, int column) {
        if (line <= 0) return msg;
        return std::to_string(line) + ":" + std::to_string(column) + ": " + msg;
    }
    int line_;
    int column_;
};

} // namespace hedcheck
