#ifndef PBEM_PARSER_HPP
#define PBEM_PARSER_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pbem/expr.hpp"

namespace pbem {

/// Phase space admits q_i, v_i, t; field space admits x_i, t.
enum class Context { PhaseSpace, FieldSpace };

struct ParseOptions {
  Context context = Context::PhaseSpace;
  /// Acceleration symbols a_i only appear in printed free-mode time derivatives.
  bool allow_acceleration = false;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::string message, std::string token);

  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t position_;
  std::string message_;
  std::string token_;
};

/// Grammar (whitespace insignificant):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := ('-'|'+') factor | base ('^' integer)?
///   base   := number | e | m | c | t | var | field | '(' expr ')'
///           | eps(i,j,k) | delta(i,j) | diff(expr, var, ...)
///   var    := (q|v|x|a)(1|2|3) | (q|v|x|a)_name
///   field  := (E|B|A)(1|2|3) | (E|B|A)_name | A0 | U | f
/// Division is only by constant monomials.
Expr parse(std::string_view text, const ParseOptions& options);
Expr parse(std::string_view text, Context context = Context::PhaseSpace);

/// Three expressions separated by ';'.
VectorField parse_vector(std::string_view text, Context context);

}  // namespace pbem

#endif  // PBEM_PARSER_HPP
