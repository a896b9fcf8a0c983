#include "pbem/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

#include "pbem/calculus.hpp"

namespace pbem {

ParseError::ParseError(std::size_t position, std::string message, std::string token)
    : std::runtime_error("parse error at " + std::to_string(position) + ": " + message +
                         (token.empty() ? "" : " ('" + token + "')")),
      position_(position),
      message_(std::move(message)),
      token_(std::move(token)) {}

namespace {

constexpr int kMaxExponent = 32;

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::size_t offset) : text_(text), offset_(offset) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text_.size()) {
      const char ch = text_[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        while (i < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i])) || text_[i] == '.')) ++i;
        out.push_back({Tok::Number, std::string(text_.substr(start, i - start)), offset_ + start});
      } else if (std::isalpha(static_cast<unsigned char>(ch))) {
        while (i < text_.size() && std::isalnum(static_cast<unsigned char>(text_[i]))) ++i;
        if (i < text_.size() && text_[i] == '_') {
          ++i;
          while (i < text_.size() && std::isalnum(static_cast<unsigned char>(text_[i]))) ++i;
        }
        out.push_back({Tok::Ident, std::string(text_.substr(start, i - start)), offset_ + start});
      } else if (std::string_view("+-*/^(),").find(ch) != std::string_view::npos) {
        ++i;
        out.push_back({Tok::Op, std::string(1, ch), offset_ + start});
      } else {
        throw ParseError(offset_ + start, "unexpected character", std::string(1, ch));
      }
    }
    out.push_back({Tok::End, "", offset_ + text_.size()});
    return out;
  }

 private:
  std::string_view text_;
  std::size_t offset_;
};

Rational parse_number(const Token& tok) {
  const auto dot = tok.text.find('.');
  if (std::count(tok.text.begin(), tok.text.end(), '.') > 1) throw ParseError(tok.pos, "malformed number", tok.text);
  if (dot == std::string::npos) return Rational(tok.text);
  std::string digits = tok.text.substr(0, dot) + tok.text.substr(dot + 1);
  if (digits.empty()) throw ParseError(tok.pos, "malformed number", tok.text);
  Rational r(digits);
  Rational scale(1);
  for (std::size_t k = dot + 1; k < tok.text.size(); ++k) scale *= 10;
  r /= scale;
  r.canonicalize();
  return r;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, ParseOptions options) : toks_(std::move(toks)), options_(options) {}

  Expr run() {
    if (peek().kind == Tok::End) throw ParseError(peek().pos, "empty expression", "");
    Expr out = expr();
    if (peek().kind != Tok::End) throw ParseError(peek().pos, "unexpected token", peek().text);
    return out;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }

  void expect(const char* op) {
    if (!is_op(op)) throw ParseError(peek().pos, std::string("expected '") + op + "'", peek().text);
    ++pos_;
  }

  template <typename Fn>
  Expr guarded(const Token& at, Fn&& fn) {
    try {
      return fn();
    } catch (const IndexError& err) {
      throw ParseError(at.pos, err.what(), at.text);
    }
  }

  Expr expr() {
    Expr acc = term();
    while (is_op("+") || is_op("-")) {
      const Token op = next();
      Expr rhs = term();
      acc = guarded(op, [&] { return op.text == "+" ? acc + rhs : acc - rhs; });
    }
    return acc;
  }

  Expr term() {
    Expr acc = factor();
    while (is_op("*") || is_op("/")) {
      const Token op = next();
      Expr rhs = factor();
      if (op.text == "/") {
        if (rhs.is_zero()) throw ParseError(op.pos, "division by zero", op.text);
        if (!rhs.is_constant()) throw ParseError(op.pos, "division by non-constant expression", op.text);
        rhs = rhs.inverse();
      }
      acc = guarded(op, [&] { return acc * rhs; });
    }
    return acc;
  }

  Expr factor() {
    if (is_op("-")) {
      next();
      return -factor();
    }
    if (is_op("+")) {
      next();
      return factor();
    }
    const Token start = peek();
    Expr base = primary();
    if (!is_op("^")) return base;
    const Token caret = next();
    bool negative = false;
    if (is_op("-")) {
      negative = true;
      next();
    }
    const Token exp = next();
    if (exp.kind != Tok::Number || exp.text.find('.') != std::string::npos)
      throw ParseError(exp.pos, "non-integer exponent", exp.text);
    if (exp.text.size() > 3 || std::stoi(exp.text) > kMaxExponent)
      throw ParseError(exp.pos, "exponent too large", exp.text);
    const int n = std::stoi(exp.text) * (negative ? -1 : 1);
    if (n < 0 && !base.is_constant())
      throw ParseError(caret.pos, "negative exponent of non-constant expression", start.text);
    return guarded(caret, [&] { return base.pow(n); });
  }

  Expr primary() {
    const Token tok = next();
    switch (tok.kind) {
      case Tok::Number: return Expr(parse_number(tok));
      case Tok::Op:
        if (tok.text == "(") {
          Expr inner = expr();
          expect(")");
          return inner;
        }
        throw ParseError(tok.pos, "unexpected operator", tok.text);
      case Tok::End: throw ParseError(tok.pos, "unexpected end of input", "");
      case Tok::Ident: return symbol(tok);
    }
    throw ParseError(tok.pos, "unexpected token", tok.text);
  }

  Index index_arg() {
    const Token tok = next();
    if (tok.kind == Tok::Number) {
      if (tok.text.size() != 1 || tok.text[0] < '1' || tok.text[0] > '3')
        throw ParseError(tok.pos, "index out of range 1..3", tok.text);
      return Index::concrete(tok.text[0] - '0');
    }
    if (tok.kind == Tok::Ident && valid_index_name(tok.text)) return Index::free(tok.text);
    throw ParseError(tok.pos, "invalid index", tok.text);
  }

  static bool valid_index_name(const std::string& s) {
    if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
    for (char ch : s)
      if (!std::isalnum(static_cast<unsigned char>(ch))) return false;
    return true;
  }

  // Index suffix of an identifier: "1" or "_i".
  Index index_suffix(const Token& tok, std::size_t base_len) {
    std::string suffix = tok.text.substr(base_len);
    if (suffix.empty()) throw ParseError(tok.pos, "missing index", tok.text);
    if (suffix[0] == '_') {
      suffix = suffix.substr(1);
      if (suffix.size() == 1 && std::isdigit(static_cast<unsigned char>(suffix[0]))) {
        if (suffix[0] < '1' || suffix[0] > '3') throw ParseError(tok.pos, "index out of range 1..3", tok.text);
        return Index::concrete(suffix[0] - '0');
      }
      if (!valid_index_name(suffix)) throw ParseError(tok.pos, "invalid index", tok.text);
      return Index::free(suffix);
    }
    for (char ch : suffix)
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw ParseError(tok.pos, "unknown symbol", tok.text);
    if (suffix.size() != 1 || suffix[0] < '1' || suffix[0] > '3')
      throw ParseError(tok.pos, "index out of range 1..3", tok.text);
    return Index::concrete(suffix[0] - '0');
  }

  std::optional<Variable> variable(const Token& tok) {
    if (tok.text == "t") return Variable::time();
    if (tok.text.empty()) return std::nullopt;
    const char head = tok.text[0];
    if (std::string_view("qvxa").find(head) == std::string_view::npos) return std::nullopt;
    if (tok.text.size() == 1) throw ParseError(tok.pos, "missing index", tok.text);
    if (!std::isdigit(static_cast<unsigned char>(tok.text[1])) && tok.text[1] != '_') return std::nullopt;
    Index i = index_suffix(tok, 1);
    switch (head) {
      case 'q':
        check_context(tok, Context::PhaseSpace);
        return Variable::q(std::move(i));
      case 'v':
        check_context(tok, Context::PhaseSpace);
        return Variable::v(std::move(i));
      case 'x':
        check_context(tok, Context::FieldSpace);
        return Variable::x(std::move(i));
      default:
        if (!options_.allow_acceleration)
          throw ParseError(tok.pos, "acceleration symbols are not accepted in input", tok.text);
        return Variable::a(std::move(i));
    }
  }

  void check_context(const Token& tok, Context required) const {
    if (options_.context == required) return;
    throw ParseError(tok.pos,
                     required == Context::PhaseSpace ? "phase-space variable in field-space context"
                                                     : "field-space variable in phase-space context",
                     tok.text);
  }

  Expr symbol(const Token& tok) {
    const std::string& s = tok.text;
    if (s == "e") return Expr::charge();
    if (s == "m") return Expr::mass();
    if (s == "c") return Expr::light_speed();
    if (s == "t") return Expr::time();
    if (s == "A0") return Expr::scalar_field(FieldFamily::A0);
    if (s == "U") return Expr::scalar_field(FieldFamily::U);
    if (s == "f") return Expr::scalar_field(FieldFamily::F);
    if (s == "eps") {
      expect("(");
      Index i = index_arg();
      expect(",");
      Index j = index_arg();
      expect(",");
      Index k = index_arg();
      expect(")");
      return guarded(tok, [&] { return Expr::epsilon(i, j, k); });
    }
    if (s == "delta") {
      expect("(");
      Index i = index_arg();
      expect(",");
      Index j = index_arg();
      expect(")");
      return guarded(tok, [&] { return Expr::delta(i, j); });
    }
    if (s == "diff") {
      expect("(");
      Expr body = expr();
      bool any = false;
      while (is_op(",")) {
        next();
        const Token vt = next();
        auto var = vt.kind == Tok::Ident ? variable(vt) : std::nullopt;
        if (!var) throw ParseError(vt.pos, "expected a differentiation variable", vt.text);
        body = guarded(vt, [&] { return partial(body, *var); });
        any = true;
      }
      if (!any) throw ParseError(peek().pos, "diff needs at least one variable", peek().text);
      expect(")");
      return body;
    }
    if (s[0] == 'E' || s[0] == 'B' || s[0] == 'A') {
      const FieldFamily fam = s[0] == 'E' ? FieldFamily::E : s[0] == 'B' ? FieldFamily::B : FieldFamily::A;
      if (s.size() == 1) throw ParseError(tok.pos, "field component needs an index", s);
      if (!std::isdigit(static_cast<unsigned char>(s[1])) && s[1] != '_')
        throw ParseError(tok.pos, "unknown symbol", s);
      return Expr::field(fam, index_suffix(tok, 1));
    }
    if (auto var = variable(tok)) {
      switch (var->kind) {
        case VarKind::Coordinate: return Expr::q(var->index);
        case VarKind::Velocity: return Expr::v(var->index);
        case VarKind::SpatialVar: return Expr::x(var->index);
        case VarKind::Acceleration: return Expr::accel(var->index);
        case VarKind::Time: return Expr::time();
      }
    }
    throw ParseError(tok.pos, "unknown symbol", s);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions options_;
};

Expr parse_at(std::string_view text, std::size_t offset, const ParseOptions& options) {
  return Parser(Lexer(text, offset).run(), options).run();
}

}  // namespace

Expr parse(std::string_view text, const ParseOptions& options) { return parse_at(text, 0, options); }

Expr parse(std::string_view text, Context context) { return parse(text, ParseOptions{context, false}); }

VectorField parse_vector(std::string_view text, Context context) {
  VectorField out;
  std::size_t start = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t end = text.find(';', start);
    if (k < 2 && end == std::string_view::npos)
      throw ParseError(text.empty() ? 0 : text.size() - 1, "vector field needs three components separated by ';'",
                       std::string(text));
    if (k == 2 && end != std::string_view::npos)
      throw ParseError(end, "vector field has more than three components", ";");
    const std::size_t stop = k == 2 ? text.size() : end;
    out[k] = parse_at(text.substr(start, stop - start), start, ParseOptions{context, false});
    start = stop + 1;
  }
  return out;
}

}  // namespace pbem
