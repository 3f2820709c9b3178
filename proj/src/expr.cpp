#include "pathind/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>

#include "pathind/error.hpp"

namespace pathind {

namespace {

struct FunctionInfo {
  std::string_view name;
  Function fn;
  int arity;
};

constexpr std::array<FunctionInfo, 10> kFunctions{{
    {"sin", Function::Sin, 1},
    {"cos", Function::Cos, 1},
    {"exp", Function::Exp, 1},
    {"log", Function::Log, 1},
    {"sqrt", Function::Sqrt, 1},
    {"tanh", Function::Tanh, 1},
    {"abs", Function::Abs, 1},
    {"min", Function::Min, 2},
    {"max", Function::Max, 2},
    {"pow", Function::Pow, 2},
}};

std::optional<FunctionInfo> lookup_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f;
  return std::nullopt;
}

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen,
                 RParen, Comma, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case Tok::End: return "end of input";
    case Tok::Number: return "number '" + std::string(tok.text) + "'";
    case Tok::Ident: return "identifier '" + std::string(tok.text) + "'";
    default: return "'" + std::string(tok.text) + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
      if (pos_ == src_.size()) {
        out.push_back({Tok::End, pos_, {}});
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back(lex_number());
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '_'))
          ++pos_;
        out.push_back({Tok::Ident, start, src_.substr(start, pos_ - start)});
      } else {
        Tok kind;
        switch (c) {
          case '+': kind = Tok::Plus; break;
          case '-': kind = Tok::Minus; break;
          case '*': kind = Tok::Star; break;
          case '/': kind = Tok::Slash; break;
          case '^': kind = Tok::Caret; break;
          case '(': kind = Tok::LParen; break;
          case ')': kind = Tok::RParen; break;
          case ',': kind = Tok::Comma; break;
          default:
            throw SyntaxError(pos_, {"number", "identifier", "'('", "'-'"},
                              "unexpected character '" + std::string(1, c) +
                                  "'");
        }
        out.push_back({kind, pos_, src_.substr(pos_, 1)});
        ++pos_;
      }
    }
  }

 private:
  Token lex_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      throw SyntaxError(start, {"digit"}, "malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
        ++pos_;
      if (digits() == 0) {
        throw SyntaxError(pos_, {"digit"}, "malformed exponent");
      }
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double value = 0.0;
    const auto res =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() ||
        !std::isfinite(value)) {
      throw SyntaxError(start, {"finite number"}, "number out of range");
    }
    return {Tok::Number, start, text, value};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, int max_dimension)
      : toks_(std::move(tokens)), max_dim_(max_dimension) {}

  Expr parse_all() {
    Expr e = parse_additive();
    if (peek().kind != Tok::End) {
      fail({"operator", "end of input"});
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& tok = peek();
    throw SyntaxError(tok.offset, std::move(expected),
                      "unexpected " + describe(tok));
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const char op = advance().kind == Tok::Plus ? '+' : '-';
      lhs = Expr::binary(op, lhs, parse_multiplicative());
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const char op = advance().kind == Tok::Star ? '*' : '/';
      lhs = Expr::binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek().kind == Tok::Minus) {
      advance();
      return Expr::negate(parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek().kind == Tok::Caret) {
      advance();
      // Exponent is a unary operand, which makes ^ right-associative.
      return Expr::binary('^', base, parse_unary());
    }
    return base;
  }

  Expr parse_primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Number:
        advance();
        return Expr::number(tok.number);
      case Tok::LParen: {
        advance();
        Expr inner = parse_additive();
        if (peek().kind != Tok::RParen) fail({"')'", "operator"});
        advance();
        return inner;
      }
      case Tok::Ident:
        return parse_identifier();
      default:
        fail({"number", "identifier", "'('", "'-'"});
    }
  }

  Expr parse_identifier() {
    const Token tok = advance();
    if (peek().kind == Tok::LParen) {
      const auto info = lookup_function(tok.text);
      if (!info) {
        throw Error(ErrorKind::UnknownIdentifier,
                    "unknown function '" + std::string(tok.text) +
                        "' at offset " + std::to_string(tok.offset));
      }
      advance();
      std::vector<Expr> args;
      if (peek().kind != Tok::RParen) {
        args.push_back(parse_additive());
        while (peek().kind == Tok::Comma) {
          advance();
          args.push_back(parse_additive());
        }
      }
      if (peek().kind != Tok::RParen) fail({"')'", "','", "operator"});
      advance();
      if (static_cast<int>(args.size()) != info->arity) {
        throw Error(ErrorKind::ArityError,
                    std::string(info->name) + " expects " +
                        std::to_string(info->arity) + " argument(s), got " +
                        std::to_string(args.size()) + " at offset " +
                        std::to_string(tok.offset));
      }
      return Expr::call(info->fn, std::move(args));
    }
    if (tok.text == "t") return Expr::time();
    if (tok.text.size() >= 2 && tok.text[0] == 'x') {
      int index = 0;
      const auto digits = tok.text.substr(1);
      const auto res =
          std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (res.ec == std::errc() && res.ptr == digits.data() + digits.size() &&
          digits[0] != '0') {
        if (index >= 1 && index <= max_dim_) return Expr::variable(index);
        throw Error(ErrorKind::UnknownIdentifier,
                    "variable '" + std::string(tok.text) +
                        "' exceeds dimension " + std::to_string(max_dim_) +
                        " at offset " + std::to_string(tok.offset));
      }
    }
    throw Error(ErrorKind::UnknownIdentifier,
                "unknown identifier '" + std::string(tok.text) +
                    "' at offset " + std::to_string(tok.offset));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int max_dim_;
};

std::shared_ptr<ExprNode> make(ExprNode::Kind kind) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  return n;
}

[[noreturn]] void domain(const std::string& what) {
  throw Error(ErrorKind::DomainError, what);
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) domain(std::string("non-finite result in ") + what);
  return v;
}

double eval_node(const ExprNode& n, double t, const Vec& x) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number: return n.value;
    case K::Time: return t;
    case K::Variable:
      if (n.variable > x.size()) {
        throw Error(ErrorKind::UnboundVariable,
                    "x" + std::to_string(n.variable) + " not bound (state has " +
                        std::to_string(x.size()) + " components)");
      }
      return x[n.variable - 1];
    case K::Negate: return -eval_node(n.args[0].root(), t, x);
    case K::Binary: {
      const double a = eval_node(n.args[0].root(), t, x);
      const double b = eval_node(n.args[1].root(), t, x);
      switch (n.op) {
        case '+': return finite_or_throw(a + b, "+");
        case '-': return finite_or_throw(a - b, "-");
        case '*': return finite_or_throw(a * b, "*");
        case '/':
          if (b == 0.0) domain("division by zero");
          return finite_or_throw(a / b, "/");
        default: return finite_or_throw(std::pow(a, b), "^");
      }
    }
    case K::Call: {
      const double a = eval_node(n.args[0].root(), t, x);
      switch (n.fn) {
        case Function::Sin: return std::sin(a);
        case Function::Cos: return std::cos(a);
        case Function::Exp: return finite_or_throw(std::exp(a), "exp");
        case Function::Log:
          if (a <= 0.0) domain("log of non-positive argument");
          return std::log(a);
        case Function::Sqrt:
          if (a < 0.0) domain("sqrt of negative argument");
          return std::sqrt(a);
        case Function::Tanh: return std::tanh(a);
        case Function::Abs: return std::abs(a);
        case Function::Min:
          return std::min(a, eval_node(n.args[1].root(), t, x));
        case Function::Max:
          return std::max(a, eval_node(n.args[1].root(), t, x));
        case Function::Pow:
          return finite_or_throw(
              std::pow(a, eval_node(n.args[1].root(), t, x)), "pow");
      }
    }
  }
  return 0.0;
}

void print_node(const ExprNode& n, std::string& out) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case K::Time: out += 't'; return;
    case K::Variable: out += "x" + std::to_string(n.variable); return;
    case K::Negate:
      out += "(-";
      print_node(n.args[0].root(), out);
      out += ')';
      return;
    case K::Binary:
      out += '(';
      print_node(n.args[0].root(), out);
      out += ' ';
      out += n.op;
      out += ' ';
      print_node(n.args[1].root(), out);
      out += ')';
      return;
    case K::Call:
      out += function_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(n.args[i].root(), out);
      }
      out += ')';
      return;
  }
}

int max_index(const ExprNode& n) {
  int m = n.kind == ExprNode::Kind::Variable ? n.variable : 0;
  for (const auto& a : n.args) m = std::max(m, max_index(a.root()));
  return m;
}

bool has_time(const ExprNode& n) {
  if (n.kind == ExprNode::Kind::Time) return true;
  return std::any_of(n.args.begin(), n.args.end(),
                     [](const Expr& a) { return has_time(a.root()); });
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  using K = ExprNode::Kind;
  switch (a.kind) {
    case K::Number:
      if (a.value != b.value) return false;
      break;
    case K::Variable:
      if (a.variable != b.variable) return false;
      break;
    case K::Binary:
      if (a.op != b.op) return false;
      break;
    case K::Call:
      if (a.fn != b.fn) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!equal_nodes(a.args[i].root(), b.args[i].root())) return false;
  return true;
}

}  // namespace

std::string_view function_name(Function fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f.name;
  return "?";
}

int function_arity(Function fn) {
  for (const auto& f : kFunctions)
    if (f.fn == fn) return f.arity;
  return 0;
}

Expr Expr::parse(std::string_view text, int max_dimension) {
  Parser parser(Lexer(text).run(), max_dimension);
  return parser.parse_all();
}

Expr Expr::number(double value) {
  auto n = make(ExprNode::Kind::Number);
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::time() { return Expr(make(ExprNode::Kind::Time)); }

Expr Expr::variable(int index) {
  auto n = make(ExprNode::Kind::Variable);
  n->variable = index;
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  auto n = make(ExprNode::Kind::Negate);
  n->args.push_back(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::binary(char op, Expr lhs, Expr rhs) {
  auto n = make(ExprNode::Kind::Binary);
  n->op = op;
  n->args.push_back(std::move(lhs));
  n->args.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr Expr::call(Function fn, std::vector<Expr> args) {
  if (static_cast<int>(args.size()) != function_arity(fn)) {
    throw Error(ErrorKind::ArityError,
                std::string(function_name(fn)) + " arity mismatch");
  }
  auto n = make(ExprNode::Kind::Call);
  n->fn = fn;
  n->args = std::move(args);
  return Expr(std::move(n));
}

double Expr::eval(double t, const Vec& x) const {
  return eval_node(*root_, t, x);
}

std::string Expr::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

int Expr::max_variable_index() const { return max_index(*root_); }

bool Expr::uses_time() const { return has_time(*root_); }

bool operator==(const Expr& a, const Expr& b) {
  return equal_nodes(*a.root_, *b.root_);
}

}  // namespace pathind
