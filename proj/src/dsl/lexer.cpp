#include "lexer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace addt::dsl::detail {

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::string: return "string";
    case TokenKind::number: return "number";
    case TokenKind::variable: return "$variable";
    case TokenKind::lbrace: return "'{'";
    case TokenKind::rbrace: return "'}'";
    case TokenKind::lbracket: return "'['";
    case TokenKind::rbracket: return "']'";
    case TokenKind::colon: return "':'";
    case TokenKind::comma: return "','";
    case TokenKind::end: return "end of input";
    case TokenKind::invalid: return "invalid token";
  }
  return "token";
}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (at_end()) {
        t.kind = TokenKind::end;
        out.push_back(std::move(t));
        return out;
      }
      const char c = peek();
      switch (c) {
        case '{': single(t, TokenKind::lbrace); break;
        case '}': single(t, TokenKind::rbrace); break;
        case '[': single(t, TokenKind::lbracket); break;
        case ']': single(t, TokenKind::rbracket); break;
        case ':': single(t, TokenKind::colon); break;
        case ',': single(t, TokenKind::comma); break;
        case '"': string(t); break;
        case '$': variable(t); break;
        default:
          if (is_digit(c) || c == '-' || c == '+' || c == '.') {
            number(t);
          } else if (is_ident_start(c)) {
            identifier(t);
          } else {
            t.kind = TokenKind::invalid;
            t.text = std::string("unexpected character '") + c + "'";
            advance();
          }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
  }
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void single(Token& t, TokenKind kind) {
    t.kind = kind;
    t.text = std::string(1, peek());
    advance();
  }

  void identifier(Token& t) {
    t.kind = TokenKind::identifier;
    while (!at_end() && is_ident_char(peek())) {
      t.text += peek();
      advance();
    }
  }

  void variable(Token& t) {
    advance();  // '$'
    if (at_end() || !is_ident_start(peek())) {
      t.kind = TokenKind::invalid;
      t.text = "expected variable name after '$'";
      return;
    }
    t.kind = TokenKind::variable;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
      t.text += peek();
      advance();
    }
  }

  void string(Token& t) {
    advance();  // opening quote
    t.kind = TokenKind::string;
    while (!at_end() && peek() != '"') {
      if (peek() == '\n') break;
      if (peek() == '\\') {
        advance();
        if (at_end()) break;
        const char e = peek();
        if (e == 'n') {
          t.text += '\n';
        } else {
          t.text += e;
        }
        advance();
        continue;
      }
      t.text += peek();
      advance();
    }
    if (at_end() || peek() != '"') {
      t.kind = TokenKind::invalid;
      t.text = "unterminated string";
      return;
    }
    advance();
  }

  void number(Token& t) {
    std::string lexeme;
    if (peek() == '-' || peek() == '+') {
      lexeme += peek();
      advance();
    }
    bool digits = false;
    while (is_digit(peek())) {
      lexeme += peek();
      advance();
      digits = true;
    }
    if (peek() == '.') {
      lexeme += peek();
      advance();
      while (is_digit(peek())) {
        lexeme += peek();
        advance();
        digits = true;
      }
    }
    if (!digits) {
      t.kind = TokenKind::invalid;
      t.text = "malformed number '" + lexeme + "'";
      return;
    }
    // Exponent only when followed by digits; otherwise 'e' starts a unit suffix.
    if ((peek() == 'e' || peek() == 'E') &&
        (is_digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && is_digit(peek(2))))) {
      lexeme += peek();
      advance();
      if (peek() == '-' || peek() == '+') {
        lexeme += peek();
        advance();
      }
      while (is_digit(peek())) {
        lexeme += peek();
        advance();
      }
    }
    // Unit suffix (m, m/s, s, rad, ...) is accepted and ignored.
    while (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '/') advance();

    const char* first = lexeme.data();
    if (*first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, lexeme.data() + lexeme.size(), value);
    if (ec != std::errc() || ptr != lexeme.data() + lexeme.size() || !std::isfinite(value)) {
      t.kind = TokenKind::invalid;
      t.text = "number out of range '" + lexeme + "'";
      return;
    }
    t.kind = TokenKind::number;
    t.number = value;
    t.text = lexeme;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src) { return Lexer(src).run(); }

}  // namespace addt::dsl::detail
