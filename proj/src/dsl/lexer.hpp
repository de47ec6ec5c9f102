#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "addt/dsl.hpp"

namespace addt::dsl::detail {

enum class TokenKind {
  identifier,
  string,
  number,
  variable,
  lbrace,
  rbrace,
  lbracket,
  rbracket,
  colon,
  comma,
  end,
  invalid,
};

std::string_view describe(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // identifier/variable name, decoded string, or raw lexeme
  double number = 0.0;
  SourcePos pos;
};

/// Tokenise the whole input. Lexical errors become `invalid` tokens carrying a
/// message in `text`; the parser reports them.
std::vector<Token> tokenize(std::string_view src);

}  // namespace addt::dsl::detail
