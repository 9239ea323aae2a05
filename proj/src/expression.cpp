#include "subvarlap/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "subvarlap/error.hpp"

namespace subvarlap {

namespace {

using Fn = std::function<double(const Point&)>;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Fn parse() {
        Fn out = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ExpressionError{pos_ + 1, msg}; }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Fn expr() {
        Fn lhs = term();
        while (true) {
            if (accept('+')) {
                Fn rhs = term();
                lhs = [lhs, rhs](const Point& x) { return lhs(x) + rhs(x); };
            } else if (accept('-')) {
                Fn rhs = term();
                lhs = [lhs, rhs](const Point& x) { return lhs(x) - rhs(x); };
            } else {
                return lhs;
            }
        }
    }

    Fn term() {
        Fn lhs = unary();
        while (true) {
            if (accept('*')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](const Point& x) { return lhs(x) * rhs(x); };
            } else if (accept('/')) {
                Fn rhs = unary();
                lhs = [lhs, rhs](const Point& x) { return lhs(x) / rhs(x); };
            } else {
                return lhs;
            }
        }
    }

    Fn unary() {
        if (accept('-')) {
            Fn arg = unary();
            return [arg](const Point& x) { return -arg(x); };
        }
        if (accept('+')) return unary();
        return power();
    }

    Fn power() {
        Fn base = primary();
        if (accept('^')) {
            Fn exponent = unary();
            return [base, exponent](const Point& x) { return std::pow(base(x), exponent(x)); };
        }
        return base;
    }

    Fn primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            Fn inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Fn number() {
        const char* begin = s_.data() + pos_;
        double v = 0.0;
        const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return [v](const Point&) { return v; };
    }

    Fn identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(') return call(name, start);

        auto axis = [](int k) { return [k](const Point& x) { return k < x.dim() ? x[k] : 0.0; }; };
        if (name == "x" || name == "x1") return axis(0);
        if (name == "y" || name == "x2") return axis(1);
        if (name == "z" || name == "t" || name == "x3") return axis(2);
        if (name == "pi") return [](const Point&) { return std::numbers::pi; };
        if (name == "e") return [](const Point&) { return std::numbers::e; };
        pos_ = start;
        fail("unknown name '" + name + "'");
    }

    Fn call(const std::string& name, std::size_t start) {
        expect('(');
        std::vector<Fn> args;
        if (!accept(')')) {
            do {
                args.push_back(expr());
            } while (accept(','));
            expect(')');
        }
        auto arity = [&](std::size_t lo, std::size_t hi) {
            if (args.size() < lo || args.size() > hi) {
                pos_ = start;
                fail(name + " takes " + (lo == hi ? std::to_string(lo) : "at least " + std::to_string(lo)) +
                     " argument(s)");
            }
        };
        auto unary_fn = [&](double (*f)(double)) -> Fn {
            arity(1, 1);
            Fn a = args[0];
            return [a, f](const Point& x) { return f(a(x)); };
        };
        if (name == "abs") return unary_fn([](double v) { return std::abs(v); });
        if (name == "sin") return unary_fn([](double v) { return std::sin(v); });
        if (name == "cos") return unary_fn([](double v) { return std::cos(v); });
        if (name == "exp") return unary_fn([](double v) { return std::exp(v); });
        if (name == "sqrt") return unary_fn([](double v) { return std::sqrt(v); });
        if (name == "log") return unary_fn([](double v) { return std::log(v); });
        if (name == "step") return unary_fn([](double v) { return v >= 0.0 ? 1.0 : 0.0; });
        if (name == "pow") {
            arity(2, 2);
            Fn a = args[0], b = args[1];
            return [a, b](const Point& x) { return std::pow(a(x), b(x)); };
        }
        if (name == "min" || name == "max") {
            arity(2, 64);
            const bool take_max = name == "max";
            return [args, take_max](const Point& x) {
                double v = args[0](x);
                for (std::size_t i = 1; i < args.size(); ++i) {
                    const double a = args[i](x);
                    v = take_max ? std::max(v, a) : std::min(v, a);
                }
                return v;
            };
        }
        pos_ = start;
        fail("unknown function '" + name + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& source) {
    Expression out;
    out.source_ = source;
    out.eval_ = Parser(source).parse();
    return out;
}

}  // namespace subvarlap
