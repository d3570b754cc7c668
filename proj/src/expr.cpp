#include "reebfol/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

namespace reebfol {

class ExprParser {
public:
    using Op = Expression::Instr::Op;

    ExprParser(const std::string& src, std::vector<Expression::Instr>& out) : s_(src), out_(out) {}

    void parse() {
        expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
    }

private:
    void fail(const std::string& what) const {
        throw ExprError("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
    }
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void emit(Op op, double v = 0.0) { out_.push_back({op, v}); }

    void expr() {
        term();
        for (;;) {
            if (accept('+')) {
                term();
                emit(Op::Add);
            } else if (accept('-')) {
                term();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }
    void term() {
        unary();
        for (;;) {
            if (accept('*')) {
                unary();
                emit(Op::Mul);
            } else if (accept('/')) {
                unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }
    void unary() {
        if (accept('-')) {
            unary();
            emit(Op::Neg);
        } else if (accept('+')) {
            unary();
        } else {
            power();
        }
    }
    void power() {
        primary();
        if (accept('^')) {
            unary();  // right associative, allows 2^-x
            emit(Op::Pow);
        }
    }
    void primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            expr();
            if (!accept(')')) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            emit(Op::Const, v);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return emit(Op::VarX);
            if (name == "y") return emit(Op::VarY);
            if (name == "z") return emit(Op::VarZ);
            if (name == "pi") return emit(Op::Const, std::numbers::pi);
            if (name == "e") return emit(Op::Const, std::numbers::e);
            function(name);
            return;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
    void function(const std::string& name) {
        struct Unary {
            const char* name;
            Op op;
        };
        static constexpr Unary unary_fns[] = {
            {"exp", Op::Exp}, {"log", Op::Log}, {"ln", Op::Log}, {"sqrt", Op::Sqrt}, {"sin", Op::Sin},
            {"cos", Op::Cos}, {"tan", Op::Tan}, {"abs", Op::Abs}, {"tanh", Op::Tanh}, {"cosh", Op::Cosh},
            {"sinh", Op::Sinh}};
        if (!accept('(')) fail("expected '(' after " + name);
        for (const auto& u : unary_fns) {
            if (name == u.name) {
                expr();
                if (!accept(')')) fail("expected ')'");
                emit(u.op);
                return;
            }
        }
        Op binop;
        if (name == "pow") binop = Op::Pow;
        else if (name == "min") binop = Op::Min;
        else if (name == "max") binop = Op::Max;
        else fail("unknown function '" + name + "'");
        expr();
        if (!accept(',')) fail("expected ','");
        expr();
        if (!accept(')')) fail("expected ')'");
        emit(binop);
    }

    const std::string& s_;
    std::vector<Expression::Instr>& out_;
    std::size_t pos_ = 0;
};

Expression::Expression(std::string source) : source_(std::move(source)) {
    ExprParser(source_, program_).parse();
}

double Expression::operator()(double x, double y, double z) const {
    double stack[64];
    int sp = 0;
    for (const Instr& in : program_) {
        using Op = Instr::Op;
        switch (in.op) {
            case Op::Const: stack[sp++] = in.value; break;
            case Op::VarX: stack[sp++] = x; break;
            case Op::VarY: stack[sp++] = y; break;
            case Op::VarZ: stack[sp++] = z; break;
            case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
            case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
            case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
            case Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
            case Op::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
            case Op::Min: --sp; stack[sp - 1] = std::fmin(stack[sp - 1], stack[sp]); break;
            case Op::Max: --sp; stack[sp - 1] = std::fmax(stack[sp - 1], stack[sp]); break;
            case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
            case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
            case Op::Log: stack[sp - 1] = std::log(stack[sp - 1]); break;
            case Op::Sqrt: stack[sp - 1] = std::sqrt(stack[sp - 1]); break;
            case Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
            case Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
            case Op::Tan: stack[sp - 1] = std::tan(stack[sp - 1]); break;
            case Op::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
            case Op::Tanh: stack[sp - 1] = std::tanh(stack[sp - 1]); break;
            case Op::Cosh: stack[sp - 1] = std::cosh(stack[sp - 1]); break;
            case Op::Sinh: stack[sp - 1] = std::sinh(stack[sp - 1]); break;
        }
        if (sp >= 63) throw ExprError("expression '" + source_ + "' too deeply nested");
    }
    return stack[0];
}

}  // namespace reebfol
