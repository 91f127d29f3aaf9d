// Arithmetic expressions in x and y, used for exact solutions in scenario files.
//
// Grammar: + - * / ^ (right associative), parentheses, numbers, the variables
// x, y and r = sqrt(x^2 + y^2), the constant pi, and the functions sqrt, exp,
// log, sin, cos, tan, abs, atan2(a, b), pow(a, b).
#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "dec2d/error.hpp"
#include "dec2d/geometry.hpp"

namespace dec2d {

class Expression {
public:
    using Fn = std::function<double(double, double)>;

    static Expression parse(std::string_view source)
    {
        Parser p{source, 0};
        auto fn = p.expr();
        p.skip();
        if (p.pos != source.size()) p.fail("unexpected '" + std::string(1, source[p.pos]) + "'");
        return Expression(std::string(source), std::move(fn));
    }

    double operator()(double x, double y) const { return fn_(x, y); }
    double operator()(const Point2& p) const { return fn_(p.x, p.y); }
    [[nodiscard]] const std::string& source() const noexcept { return source_; }

private:
    Expression(std::string source, Fn fn) : source_(std::move(source)), fn_(std::move(fn)) {}

    struct Parser {
        std::string_view s;
        std::size_t pos;

        [[noreturn]] void fail(const std::string& msg) const
        {
            throw ValidationError("expression '" + std::string(s) + "' at " + std::to_string(pos) + ": " + msg);
        }
        void skip()
        {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool eat(char c)
        {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        Fn expr()
        {
            Fn lhs = term();
            while (true) {
                if (eat('+')) {
                    lhs = [a = lhs, b = term()](double x, double y) { return a(x, y) + b(x, y); };
                } else if (eat('-')) {
                    lhs = [a = lhs, b = term()](double x, double y) { return a(x, y) - b(x, y); };
                } else {
                    return lhs;
                }
            }
        }

        Fn term()
        {
            Fn lhs = unary();
            while (true) {
                if (eat('*')) {
                    lhs = [a = lhs, b = unary()](double x, double y) { return a(x, y) * b(x, y); };
                } else if (eat('/')) {
                    lhs = [a = lhs, b = unary()](double x, double y) { return a(x, y) / b(x, y); };
                } else {
                    return lhs;
                }
            }
        }

        Fn unary()
        {
            if (eat('-')) return [a = unary()](double x, double y) { return -a(x, y); };
            if (eat('+')) return unary();
            return power();
        }

        Fn power()
        {
            Fn base = primary();
            if (eat('^')) return [a = base, b = unary()](double x, double y) { return std::pow(a(x, y), b(x, y)); };
            return base;
        }

        Fn primary()
        {
            skip();
            if (pos >= s.size()) fail("unexpected end of expression");
            if (eat('(')) {
                Fn inner = expr();
                if (!eat(')')) fail("expected ')'");
                return inner;
            }
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
            if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
            fail("unexpected '" + std::string(1, c) + "'");
        }

        Fn number()
        {
            const auto start = pos;
            while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
            if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
                ++pos;
                if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            }
            const auto v = text_to_double(s.substr(start, pos - start));
            return [v](double, double) { return v; };
        }

        double text_to_double(std::string_view t) const
        {
            try {
                std::size_t used = 0;
                const double v = std::stod(std::string(t), &used);
                if (used != t.size()) fail("bad number '" + std::string(t) + "'");
                return v;
            } catch (const std::logic_error&) {
                fail("bad number '" + std::string(t) + "'");
            }
        }

        Fn identifier()
        {
            const auto start = pos;
            while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
            const auto name = s.substr(start, pos - start);
            if (name == "x") return [](double x, double) { return x; };
            if (name == "y") return [](double, double y) { return y; };
            if (name == "r") return [](double x, double y) { return std::hypot(x, y); };
            if (name == "pi") return [](double, double) { return std::numbers::pi; };

            if (!eat('(')) fail("unknown identifier '" + std::string(name) + "'");
            Fn a = expr();
            if (name == "atan2" || name == "pow") {
                if (!eat(',')) fail("expected ',' in " + std::string(name));
                Fn b = expr();
                if (!eat(')')) fail("expected ')'");
                if (name == "atan2") return [a, b](double x, double y) { return std::atan2(a(x, y), b(x, y)); };
                return [a, b](double x, double y) { return std::pow(a(x, y), b(x, y)); };
            }
            if (!eat(')')) fail("expected ')'");
            using F1 = double (*)(double);
            F1 f = nullptr;
            if (name == "sqrt") f = [](double v) { return std::sqrt(v); };
            else if (name == "exp") f = [](double v) { return std::exp(v); };
            else if (name == "log") f = [](double v) { return std::log(v); };
            else if (name == "sin") f = [](double v) { return std::sin(v); };
            else if (name == "cos") f = [](double v) { return std::cos(v); };
            else if (name == "tan") f = [](double v) { return std::tan(v); };
            else if (name == "abs") f = [](double v) { return std::abs(v); };
            else fail("unknown function '" + std::string(name) + "'");
            return [f, a](double x, double y) { return f(a(x, y)); };
        }
    };

    std::string source_;
    Fn fn_;
};

} // namespace dec2d
