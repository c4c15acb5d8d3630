#pragma once

#include <string_view>

#include "diffred/expr.hpp"

namespace diffred {

/// Parse an expression over `vars`.
///
/// Grammar (whitespace insignificant):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?        right-associative
///   primary := integer | identifier | '(' expr ')'
/// Exponents must evaluate to integer constants; ratio literals such as
/// 3/4 are ordinary divisions of integer literals.
///
/// Throws SyntaxError, UnknownVariableError or DivisionByZeroError.
Expr parse_expr(std::string_view src, const VarSet& vars);

/// Parse an exact rational literal: "3", "-3/4", "0.25".
mpq_class parse_rational(std::string_view src);

}  // namespace diffred
