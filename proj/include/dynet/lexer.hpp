// Copyright 2026 The dynet-causes authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Tokenizer shared by the specification, hazard and label parsers.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dynet/diagnostic.hpp"

namespace dynet {

enum class TokenKind {
  kWord,  // identifiers, value tokens and keywords
  kChoice,  // (+)
  kPar,     // ||
  kArrow,   // <-
  kEq,
  kDot,
  kPlus,
  kStar,
  kTilde,
  kSemi,
  kQuestion,
  kBang,
  kLParen,
  kRParen,
  kLBrace,
  kRBrace,
  kLBracket,
  kRBracket,
  kComma,
  kColon,
  kEnd,
};

inline std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kWord:
      return "identifier";
    case TokenKind::kChoice:
      return "'(+)'";
    case TokenKind::kPar:
      return "'||'";
    case TokenKind::kArrow:
      return "'<-'";
    case TokenKind::kEq:
      return "'='";
    case TokenKind::kDot:
      return "'.'";
    case TokenKind::kPlus:
      return "'+'";
    case TokenKind::kStar:
      return "'*'";
    case TokenKind::kTilde:
      return "'~'";
    case TokenKind::kSemi:
      return "';'";
    case TokenKind::kQuestion:
      return "'?'";
    case TokenKind::kBang:
      return "'!'";
    case TokenKind::kLParen:
      return "'('";
    case TokenKind::kRParen:
      return "')'";
    case TokenKind::kLBrace:
      return "'{'";
    case TokenKind::kRBrace:
      return "'}'";
    case TokenKind::kLBracket:
      return "'['";
    case TokenKind::kRBracket:
      return "']'";
    case TokenKind::kComma:
      return "','";
    case TokenKind::kColon:
      return "':'";
    case TokenKind::kEnd:
      return "end of input";
  }
  return "token";
}

struct Token {
  TokenKind kind;
  std::string text;
  SourceLocation location;
};

namespace internal {

inline bool IsWordStart(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

inline bool IsWordChar(char c) { return IsWordStart(c) || c == '\''; }

}  // namespace internal

// Throws Error(kParse) on characters outside the token set.
inline std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  SourceLocation loc;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++loc.line;
        loc.column = 1;
      } else {
        ++loc.column;
      }
    }
  };
  auto emit = [&](TokenKind kind, std::size_t length) {
    tokens.push_back(Token{kind, std::string(text.substr(i, length)), loc});
    advance(length);
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (internal::IsWordStart(c)) {
      std::size_t n = 1;
      while (i + n < text.size() && internal::IsWordChar(text[i + n])) ++n;
      emit(TokenKind::kWord, n);
      continue;
    }
    const std::string_view rest = text.substr(i);
    if (rest.starts_with("(+)")) {
      emit(TokenKind::kChoice, 3);
    } else if (rest.starts_with("||")) {
      emit(TokenKind::kPar, 2);
    } else if (rest.starts_with("<-")) {
      emit(TokenKind::kArrow, 2);
    } else {
      TokenKind kind;
      switch (c) {
        case '=': kind = TokenKind::kEq; break;
        case '.': kind = TokenKind::kDot; break;
        case '+': kind = TokenKind::kPlus; break;
        case '*': kind = TokenKind::kStar; break;
        case '~': kind = TokenKind::kTilde; break;
        case ';': kind = TokenKind::kSemi; break;
        case '?': kind = TokenKind::kQuestion; break;
        case '!': kind = TokenKind::kBang; break;
        case '(': kind = TokenKind::kLParen; break;
        case ')': kind = TokenKind::kRParen; break;
        case '{': kind = TokenKind::kLBrace; break;
        case '}': kind = TokenKind::kRBrace; break;
        case '[': kind = TokenKind::kLBracket; break;
        case ']': kind = TokenKind::kRBracket; break;
        case ',': kind = TokenKind::kComma; break;
        case ':': kind = TokenKind::kColon; break;
        default:
          throw Error(Stage::kParse,
                      "unexpected character '" + std::string(1, c) + "'",
                      loc);
      }
      emit(kind, 1);
    }
  }
  tokens.push_back(Token{TokenKind::kEnd, "", loc});
  return tokens;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
  explicit TokenStream(std::string_view text) : tokens_(Tokenize(text)) {}

  const Token& Peek(std::size_t ahead = 0) const {
    const std::size_t index = pos_ + ahead;
    return index < tokens_.size() ? tokens_[index] : tokens_.back();
  }
  bool At(TokenKind kind, std::size_t ahead = 0) const {
    return Peek(ahead).kind == kind;
  }
  bool AtWord(std::string_view word, std::size_t ahead = 0) const {
    return At(TokenKind::kWord, ahead) && Peek(ahead).text == word;
  }

  const Token& Next() {
    const Token& token = Peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return token;
  }

  bool Accept(TokenKind kind) {
    if (!At(kind)) return false;
    Next();
    return true;
  }

  const Token& Expect(TokenKind kind, std::string_view what = {}) {
    if (!At(kind)) {
      Fail("expected " +
           std::string(what.empty() ? TokenKindName(kind) : what));
    }
    return Next();
  }

  void ExpectWord(std::string_view word) {
    if (!AtWord(word)) Fail("expected '" + std::string(word) + "'");
    Next();
  }

  // Throws a parse error at the current token, describing what was found.
  [[noreturn]] void Fail(const std::string& message) const {
    FailAt(Peek(), message);
  }

  [[noreturn]] static void FailAt(const Token& token,
                                  const std::string& message) {
    std::string found = token.kind == TokenKind::kWord
                            ? "'" + token.text + "'"
                            : std::string(TokenKindName(token.kind));
    throw Error(Stage::kParse, message + ", found " + found, token.location);
  }

  std::size_t position() const { return pos_; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace dynet
