#include "kemeny/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

constexpr std::array<std::pair<std::string_view, Expr::Function>, 6> kFunctions{{
    {"exp", Expr::Function::Exp},
    {"log", Expr::Function::Log},
    {"sqrt", Expr::Function::Sqrt},
    {"abs", Expr::Function::Abs},
    {"sin", Expr::Function::Sin},
    {"cos", Expr::Function::Cos},
}};

constexpr int kMaxNesting = 200;

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ < src_.size()) fail("expected end of input");
    return e;
  }

 private:
  Expr expr() {
    Expr lhs = term();
    for (;;) {
      skip_space();
      if (accept('+'))
        lhs = Expr::binary(Expr::BinaryOp::Add, lhs, term());
      else if (accept('-'))
        lhs = Expr::binary(Expr::BinaryOp::Sub, lhs, term());
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      skip_space();
      if (accept('*'))
        lhs = Expr::binary(Expr::BinaryOp::Mul, lhs, factor());
      else if (accept('/'))
        lhs = Expr::binary(Expr::BinaryOp::Div, lhs, factor());
      else
        return lhs;
    }
  }

  Expr factor() {
    skip_space();
    if (accept('-')) return Expr::negate(power());
    return power();
  }

  Expr power() {
    Expr base = atom();
    skip_space();
    if (accept('^')) {
      Nesting guard(*this);
      return Expr::binary(Expr::BinaryOp::Pow, base, factor());
    }
    return base;
  }

  Expr atom() {
    skip_space();
    if (pos_ >= src_.size()) fail("expected expression");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      Nesting guard(*this);
      Expr inner = expr();
      expect(')');
      return inner;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || end != src_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::number(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    const std::size_t after_name = pos_;
    skip_space();
    const bool is_call = pos_ < src_.size() && src_[pos_] == '(';
    if (!is_call) {
      pos_ = after_name;
      if (name == "x") return Expr::variable();
      throw ParseError(ErrorCode::UnknownIdentifier, start + 1,
                       "unknown identifier '" + std::string(name) + "'");
    }
    for (const auto& [fname, fn] : kFunctions) {
      if (fname != name) continue;
      ++pos_;
      Nesting guard(*this);
      Expr arg = expr();
      expect(')');
      return Expr::call(fn, arg);
    }
    throw ParseError(ErrorCode::UnknownFunction, start + 1,
                     "unknown function '" + std::string(name) + "'");
  }

  struct Nesting {
    explicit Nesting(Parser& p) : parser(p) {
      if (++parser.depth_ > kMaxNesting) parser.fail("expression nested too deeply");
    }
    ~Nesting() { --parser.depth_; }
    Parser& parser;
  };

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(ErrorCode::ParseError, pos_ + 1, message);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

double checked(double value, double x, const char* what) {
  if (!std::isfinite(value)) throw DomainError(x, what);
  return value;
}

struct Evaluator {
  double x;

  double operator()(const Expr::Number& n) const { return n.value; }
  double operator()(const Expr::Variable&) const { return x; }
  double operator()(const Expr::Negate& n) const { return -eval(*n.child); }

  double operator()(const Expr::Binary& b) const {
    const double l = eval(*b.lhs);
    const double r = eval(*b.rhs);
    switch (b.op) {
      case Expr::BinaryOp::Add: return checked(l + r, x, "overflow in '+'");
      case Expr::BinaryOp::Sub: return checked(l - r, x, "overflow in '-'");
      case Expr::BinaryOp::Mul: return checked(l * r, x, "overflow in '*'");
      case Expr::BinaryOp::Div:
        if (r == 0.0) throw DomainError(x, "division by zero");
        return checked(l / r, x, "overflow in '/'");
      case Expr::BinaryOp::Pow:
        if (l < 0.0 && r != std::trunc(r))
          throw DomainError(x, "negative base with fractional exponent");
        if (l == 0.0 && r < 0.0) throw DomainError(x, "zero base with negative exponent");
        return checked(std::pow(l, r), x, "overflow in '^'");
    }
    return 0.0;
  }

  double operator()(const Expr::Call& c) const {
    const double a = eval(*c.arg);
    switch (c.fn) {
      case Expr::Function::Exp: return checked(std::exp(a), x, "overflow in exp");
      case Expr::Function::Log:
        if (!(a > 0.0)) throw DomainError(x, "log of a non-positive value");
        return std::log(a);
      case Expr::Function::Sqrt:
        if (a < 0.0) throw DomainError(x, "sqrt of a negative value");
        return std::sqrt(a);
      case Expr::Function::Abs: return std::abs(a);
      case Expr::Function::Sin: return std::sin(a);
      case Expr::Function::Cos: return std::cos(a);
    }
    return 0.0;
  }

  double eval(const Expr& e) const { return std::visit(*this, e.node()); }
};

char op_symbol(Expr::BinaryOp op) {
  switch (op) {
    case Expr::BinaryOp::Add: return '+';
    case Expr::BinaryOp::Sub: return '-';
    case Expr::BinaryOp::Mul: return '*';
    case Expr::BinaryOp::Div: return '/';
    case Expr::BinaryOp::Pow: return '^';
  }
  return '?';
}

struct Printer {
  std::string operator()(const Expr::Number& n) const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", n.value);
    return buf;
  }
  std::string operator()(const Expr::Variable&) const { return "x"; }
  std::string operator()(const Expr::Negate& n) const { return "(-" + n.child->to_string() + ")"; }
  std::string operator()(const Expr::Binary& b) const {
    return "(" + b.lhs->to_string() + " " + op_symbol(b.op) + " " + b.rhs->to_string() + ")";
  }
  std::string operator()(const Expr::Call& c) const {
    return std::string(function_name(c.fn)) + "(" + c.arg->to_string() + ")";
  }
};

struct Equal {
  bool operator()(const Expr::Number& a, const Expr::Number& b) const {
    return a.value == b.value;
  }
  bool operator()(const Expr::Variable&, const Expr::Variable&) const { return true; }
  bool operator()(const Expr::Negate& a, const Expr::Negate& b) const {
    return *a.child == *b.child;
  }
  bool operator()(const Expr::Binary& a, const Expr::Binary& b) const {
    return a.op == b.op && *a.lhs == *b.lhs && *a.rhs == *b.rhs;
  }
  bool operator()(const Expr::Call& a, const Expr::Call& b) const {
    return a.fn == b.fn && *a.arg == *b.arg;
  }
  template <typename A, typename B>
  bool operator()(const A&, const B&) const {
    return false;
  }
};

}  // namespace

Expr Expr::number(double value) { return Expr(Number{value}); }
Expr Expr::variable() { return Expr(Variable{}); }
Expr Expr::negate(Expr child) {
  return Expr(Negate{std::make_shared<const Expr>(std::move(child))});
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(Binary{op, std::make_shared<const Expr>(std::move(lhs)),
                     std::make_shared<const Expr>(std::move(rhs))});
}
Expr Expr::call(Function fn, Expr arg) {
  return Expr(Call{fn, std::make_shared<const Expr>(std::move(arg))});
}

double Expr::operator()(double x) const { return Evaluator{x}.eval(*this); }

std::string Expr::to_string() const { return std::visit(Printer{}, *node_); }

bool operator==(const Expr& a, const Expr& b) { return std::visit(Equal{}, *a.node_, *b.node_); }

Expr parse_expression(std::string_view source) { return Parser(source).parse(); }

std::string_view function_name(Expr::Function fn) noexcept {
  for (const auto& [name, f] : kFunctions)
    if (f == fn) return name;
  return "?";
}

}  // namespace kemeny
