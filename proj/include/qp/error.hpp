#pragma once
#include <stdexcept>
#include <string>
#include <utility>

namespace qp {

// Library errors carry a stable machine-readable code next to the human
// message. The CLI maps the code straight into its JSON error envelope, so
// codes are part of the public contract and must not drift.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Parse failures additionally report a 1-based source position.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int col)
        : Error("parse_error", message), line_(line), col_(col) {}
    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }

private:
    int line_;
    int col_;
};

} // namespace qp
