#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace reebfol {

class ExprError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed-form scalar expression over the chart coordinates (x, y, z).
///
/// Grammar: numbers, the variables x y z, the constants pi and e, binary
/// + - * / ^ (right associative), unary minus, parentheses, and the functions
/// exp log sqrt sin cos tan abs tanh cosh sinh pow(a, b) min(a, b) max(a, b).
class Expression {
public:
    Expression() = default;
    explicit Expression(std::string source);

    double operator()(double x, double y, double z) const;
    const std::string& source() const { return source_; }
    bool empty() const { return program_.empty(); }

private:
    struct Instr {
        enum class Op : unsigned char {
            Const, VarX, VarY, VarZ, Add, Sub, Mul, Div, Pow, Neg,
            Exp, Log, Sqrt, Sin, Cos, Tan, Abs, Tanh, Cosh, Sinh, Min, Max
        };
        Op op;
        double value = 0.0;
    };

    friend class ExprParser;
    std::string source_;
    std::vector<Instr> program_;  // postfix
};

}  // namespace reebfol
