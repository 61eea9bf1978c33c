#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msk {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MSK_ERROR(Name)                                                        \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}        \
    }

MSK_ERROR(CycleError);
MSK_ERROR(UnknownElement);
MSK_ERROR(UnknownName);
MSK_ERROR(NotComparable);
MSK_ERROR(BaseMismatch);
MSK_ERROR(NotSubterminal);
MSK_ERROR(NotFunctorial);
MSK_ERROR(NotNatural);
MSK_ERROR(EnumerationBudgetExceeded);
MSK_ERROR(AxiomViolation);
MSK_ERROR(InvalidLatticeMorphism);
MSK_ERROR(PreconditionFailed);
MSK_ERROR(NotLex);
MSK_ERROR(TypeError);
MSK_ERROR(UnsupportedConstruct);
MSK_ERROR(OracleUnsupported);
MSK_ERROR(SchemaError);

#undef MSK_ERROR

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t col)
        : Error("ParseError", std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line_(line), col_(col) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return col_; }

private:
    std::size_t line_, col_;
};

// Guard for exhaustive searches. Every candidate examined is charged.
class Budget {
public:
    static constexpr std::size_t kDefault = 1'000'000;

    explicit Budget(std::size_t limit = kDefault) : limit_(limit) {}

    void charge(std::size_t n = 1) {
        used_ += n;
        if (used_ > limit_)
            throw EnumerationBudgetExceeded("enumeration exceeded budget of " +
                                            std::to_string(limit_) + " candidates");
    }
    std::size_t used() const { return used_; }
    std::size_t limit() const { return limit_; }

private:
    std::size_t limit_;
    std::size_t used_ = 0;
};

} // namespace msk
