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

// DyNetKAT process terms and the textual specification format.
//
//   fields { port: {1,2,3,4} }
//   packets { s1 = {port:1}  s3 = {port:3} }
//   queue [ s1, s3 ]
//   def S2 = NoVirtualCircuit ? one ; S2'
//   def S2' = port=3.port<-4 ; S2
//   init = S2
//
// Terms: `bot`, `policy ; term`, `Chan ? policy ; term`, `Chan ! policy ; term`,
// `term (+) term`, `term || term` and definition names. A prefix binds tighter
// than `(+)`, which binds tighter than `||`; both binary operators associate
// to the left. Policies use `zero`, `one`, `f = v`, `f <- v`, `~b`, `p + q`,
// `p . q` and `p*`, with `*` binding tightest and `+` loosest.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynet/diagnostic.hpp"
#include "dynet/lexer.hpp"
#include "dynet/netkat.hpp"

namespace dynet {

class Term {
 public:
  enum class Kind { kBot, kPolicy, kRecv, kSend, kChoice, kPar, kVar };

  // Bot.
  Term() : Term(Kind::kBot, {}, {}, {}) {}

  static Term Bot() { return Term(); }
  static Term PolicyPrefix(Policy policy, Term continuation) {
    return Term(Kind::kPolicy, std::move(policy), {},
                {std::move(continuation)});
  }
  static Term Recv(std::string channel, Policy policy, Term continuation) {
    return Term(Kind::kRecv, std::move(policy), std::move(channel),
                {std::move(continuation)});
  }
  static Term Send(std::string channel, Policy policy, Term continuation) {
    return Term(Kind::kSend, std::move(policy), std::move(channel),
                {std::move(continuation)});
  }
  static Term Choice(Term left, Term right) {
    return Term(Kind::kChoice, {}, {}, {std::move(left), std::move(right)});
  }
  static Term Par(Term left, Term right) {
    return Term(Kind::kPar, {}, {}, {std::move(left), std::move(right)});
  }
  static Term Var(std::string name) {
    return Term(Kind::kVar, {}, std::move(name), {});
  }

  Kind kind() const { return node_->kind; }
  bool IsPrefix() const {
    return kind() == Kind::kPolicy || kind() == Kind::kRecv ||
           kind() == Kind::kSend;
  }
  const Policy& policy() const { return node_->policy; }
  // Channel of a Recv/Send; definition name of a Var.
  const std::string& channel() const { return node_->name; }
  const std::string& name() const { return node_->name; }
  const Term& continuation() const { return node_->children.at(0); }
  const Term& left() const { return node_->children.at(0); }
  const Term& right() const { return node_->children.at(1); }

  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
    if (auto c = a.policy() <=> b.policy(); c != 0) return c;
    return a.node_->children <=> b.node_->children;
  }
  friend bool operator==(const Term& a, const Term& b) {
    return (a <=> b) == 0;
  }

 private:
  struct Node {
    Kind kind;
    Policy policy;
    std::string name;
    std::vector<Term> children;
  };

  Term(Kind kind, Policy policy, std::string name, std::vector<Term> children)
      : node_(std::make_shared<const Node>(Node{
            kind, std::move(policy), std::move(name), std::move(children)})) {}

  std::shared_ptr<const Node> node_;
};

struct Definition {
  std::string name;
  Term body;

  friend bool operator==(const Definition&, const Definition&) = default;
};

struct NamedPacket {
  std::string name;
  Packet packet;

  friend bool operator==(const NamedPacket&, const NamedPacket&) = default;
};

// A parsed specification. Definitions and packets keep declaration order.
class NetworkSpec {
 public:
  FieldSchema schema;
  std::vector<NamedPacket> named_packets;
  std::vector<std::string> initial_queue;
  std::vector<Definition> definitions;
  Term init;

  const Term* FindDefinition(std::string_view name) const {
    for (const Definition& d : definitions) {
      if (d.name == name) return &d.body;
    }
    return nullptr;
  }

  std::optional<Packet> FindPacket(std::string_view name) const {
    for (const NamedPacket& p : named_packets) {
      if (p.name == name) return p.packet;
    }
    return std::nullopt;
  }

  // First declared name bound to `packet`, if any.
  const std::string* PacketName(const Packet& packet) const {
    for (const NamedPacket& p : named_packets) {
      if (p.packet == packet) return &p.name;
    }
    return nullptr;
  }

  // Named packet if one matches, else the inline `{f:v,...}` form.
  std::string RenderPacket(const Packet& packet) const {
    if (const std::string* name = PacketName(packet)) return *name;
    return PacketToString(schema, packet);
  }

  std::vector<Packet> InitialQueuePackets() const {
    std::vector<Packet> out;
    for (const std::string& name : initial_queue) {
      std::optional<Packet> p = FindPacket(name);
      if (!p.has_value()) {
        throw Error(Stage::kValidation, "queue references unknown packet '" +
                                            name + "'");
      }
      out.push_back(*p);
    }
    return out;
  }

  // Channels used anywhere in the definitions or the initial term.
  std::set<std::string> Channels() const {
    std::set<std::string> out;
    for (const Definition& d : definitions) CollectChannels(d.body, out);
    CollectChannels(init, out);
    return out;
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

 private:
  static void CollectChannels(const Term& term, std::set<std::string>& out) {
    switch (term.kind()) {
      case Term::Kind::kRecv:
      case Term::Kind::kSend:
        out.insert(term.channel());
        CollectChannels(term.continuation(), out);
        return;
      case Term::Kind::kPolicy:
        CollectChannels(term.continuation(), out);
        return;
      case Term::Kind::kChoice:
      case Term::Kind::kPar:
        CollectChannels(term.left(), out);
        CollectChannels(term.right(), out);
        return;
      default:
        return;
    }
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace internal {

inline bool IsReservedWord(std::string_view word) {
  static constexpr std::string_view kReserved[] = {
      "bot", "zero", "one", "def", "init", "fields", "packets", "queue"};
  return std::find(std::begin(kReserved), std::end(kReserved), word) !=
         std::end(kReserved);
}

inline bool IsIdentifier(std::string_view word) {
  return !word.empty() && !(word[0] >= '0' && word[0] <= '9') &&
         !IsReservedWord(word);
}

class PolicyParser {
 public:
  PolicyParser(TokenStream& tokens, const FieldSchema& schema)
      : tokens_(tokens), schema_(schema) {}

  Policy ParseUnion() {
    Policy left = ParseSeq();
    while (tokens_.Accept(TokenKind::kPlus)) {
      Policy right = ParseSeq();
      if (IsFilter(left) && IsFilter(right)) {
        left = Policy::Filter(
            Predicate::Or(left.predicate(), right.predicate()));
      } else {
        left = Policy::Union(std::move(left), std::move(right));
      }
    }
    return left;
  }

 private:
  static bool IsFilter(const Policy& p) {
    return p.kind() == Policy::Kind::kFilter;
  }

  Policy ParseSeq() {
    Policy left = ParseStar();
    while (tokens_.Accept(TokenKind::kDot)) {
      Policy right = ParseStar();
      if (IsFilter(left) && IsFilter(right)) {
        left = Policy::Filter(
            Predicate::And(left.predicate(), right.predicate()));
      } else {
        left = Policy::Seq(std::move(left), std::move(right));
      }
    }
    return left;
  }

  Policy ParseStar() {
    Policy operand = ParseNot();
    while (tokens_.Accept(TokenKind::kStar)) {
      operand = Policy::Star(std::move(operand));
    }
    return operand;
  }

  Policy ParseNot() {
    if (At(TokenKind::kTilde)) {
      const Token tilde = tokens_.Next();
      Policy operand = ParseNot();
      if (!IsFilter(operand)) {
        throw Error(Stage::kParse,
                    "negation applies only to predicates, not to policies "
                    "with assignments or iteration",
                    tilde.location);
      }
      return Policy::Filter(Predicate::Not(operand.predicate()));
    }
    return ParseAtom();
  }

  Policy ParseAtom() {
    if (tokens_.Accept(TokenKind::kLParen)) {
      Policy inner = ParseUnion();
      tokens_.Expect(TokenKind::kRParen);
      return inner;
    }
    if (tokens_.AtWord("zero")) {
      tokens_.Next();
      return Policy::Drop();
    }
    if (tokens_.AtWord("one")) {
      tokens_.Next();
      return Policy::Skip();
    }
    if (!At(TokenKind::kWord)) tokens_.Fail("expected a policy");
    const Token field_token = tokens_.Next();
    const std::optional<std::size_t> field = schema_.FindField(field_token.text);
    if (!field.has_value()) {
      throw Error(Stage::kParse, "unknown field '" + field_token.text + "'",
                  field_token.location);
    }
    const bool is_test = At(TokenKind::kEq);
    if (!is_test && !At(TokenKind::kArrow)) {
      tokens_.Fail("expected '=' or '<-' after field '" + field_token.text +
                   "'");
    }
    tokens_.Next();
    const Token& value_token = tokens_.Expect(TokenKind::kWord, "a value");
    const std::optional<std::uint32_t> value =
        schema_.FindValue(*field, value_token.text);
    if (!value.has_value()) {
      throw Error(Stage::kParse,
                  "value '" + value_token.text + "' is not in the domain of '" +
                      field_token.text + "'",
                  value_token.location);
    }
    return is_test ? Policy::Filter(Predicate::Test(*field, *value))
                   : Policy::Assign(*field, *value);
  }

  bool At(TokenKind kind) const { return tokens_.At(kind); }

  TokenStream& tokens_;
  const FieldSchema& schema_;
};

// `{f:v, ...}` naming every schema field exactly once.
inline Packet ParsePacketLiteral(TokenStream& tokens,
                                 const FieldSchema& schema) {
  const Token open = tokens.Expect(TokenKind::kLBrace);
  Packet packet{std::vector<std::uint32_t>(schema.size(), 0)};
  std::vector<bool> seen(schema.size(), false);
  if (!tokens.At(TokenKind::kRBrace)) {
    do {
      const Token field_token = tokens.Expect(TokenKind::kWord, "a field name");
      const std::optional<std::size_t> field =
          schema.FindField(field_token.text);
      if (!field.has_value()) {
        throw Error(Stage::kParse, "unknown field '" + field_token.text + "'",
                    field_token.location);
      }
      if (seen[*field]) {
        throw Error(Stage::kParse,
                    "field '" + field_token.text + "' given twice",
                    field_token.location);
      }
      tokens.Expect(TokenKind::kColon);
      const Token value_token = tokens.Expect(TokenKind::kWord, "a value");
      const std::optional<std::uint32_t> value =
          schema.FindValue(*field, value_token.text);
      if (!value.has_value()) {
        throw Error(Stage::kParse,
                    "value '" + value_token.text +
                        "' is not in the domain of '" + field_token.text + "'",
                    value_token.location);
      }
      seen[*field] = true;
      packet.values[*field] = *value;
    } while (tokens.Accept(TokenKind::kComma));
  }
  tokens.Expect(TokenKind::kRBrace);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!seen[i]) {
      throw Error(Stage::kParse,
                  "packet literal is missing field '" +
                      schema.field(i).name + "'",
                  open.location);
    }
  }
  return packet;
}

struct VarReference {
  std::string name;
  SourceLocation location;
};

class TermParser {
 public:
  TermParser(TokenStream& tokens, const FieldSchema& schema,
             std::vector<VarReference>& references)
      : tokens_(tokens), schema_(schema), references_(references) {}

  Term ParsePar() {
    Term left = ParseChoice();
    while (tokens_.Accept(TokenKind::kPar)) {
      left = Term::Par(std::move(left), ParseChoice());
    }
    return left;
  }

 private:
  Term ParseChoice() {
    Term left = ParsePrefix();
    while (tokens_.Accept(TokenKind::kChoice)) {
      left = Term::Choice(std::move(left), ParsePrefix());
    }
    return left;
  }

  // Whether the tokens at the cursor start a policy rather than a term. A
  // parenthesised group is a policy iff it is followed by a policy operator
  // or the prefix `;`.
  bool AtPolicy() const {
    const Token& t = tokens_.Peek();
    if (t.kind == TokenKind::kTilde) return true;
    if (t.kind == TokenKind::kWord) {
      if (t.text == "zero" || t.text == "one") return true;
      return tokens_.At(TokenKind::kEq, 1) || tokens_.At(TokenKind::kArrow, 1);
    }
    if (t.kind != TokenKind::kLParen) return false;
    int depth = 0;
    for (std::size_t ahead = 0;; ++ahead) {
      const TokenKind kind = tokens_.Peek(ahead).kind;
      if (kind == TokenKind::kEnd) return false;
      if (kind == TokenKind::kLParen) ++depth;
      if (kind == TokenKind::kRParen && --depth == 0) {
        const TokenKind after = tokens_.Peek(ahead + 1).kind;
        return after == TokenKind::kSemi || after == TokenKind::kDot ||
               after == TokenKind::kPlus || after == TokenKind::kStar;
      }
    }
  }

  Term ParsePrefix() {
    if (tokens_.AtWord("bot")) {
      tokens_.Next();
      return Term::Bot();
    }
    if (tokens_.At(TokenKind::kWord) &&
        (tokens_.At(TokenKind::kQuestion, 1) ||
         tokens_.At(TokenKind::kBang, 1))) {
      const Token channel = tokens_.Next();
      if (!IsIdentifier(channel.text)) {
        TokenStream::FailAt(channel, "expected a channel name");
      }
      const bool is_recv = tokens_.Next().kind == TokenKind::kQuestion;
      Policy policy = PolicyParser(tokens_, schema_).ParseUnion();
      tokens_.Expect(TokenKind::kSemi);
      Term continuation = ParsePrefix();
      return is_recv ? Term::Recv(channel.text, std::move(policy),
                                  std::move(continuation))
                     : Term::Send(channel.text, std::move(policy),
                                  std::move(continuation));
    }
    if (AtPolicy()) {
      Policy policy = PolicyParser(tokens_, schema_).ParseUnion();
      tokens_.Expect(TokenKind::kSemi);
      return Term::PolicyPrefix(std::move(policy), ParsePrefix());
    }
    if (tokens_.Accept(TokenKind::kLParen)) {
      Term inner = ParsePar();
      tokens_.Expect(TokenKind::kRParen);
      return inner;
    }
    if (tokens_.At(TokenKind::kWord) && IsIdentifier(tokens_.Peek().text)) {
      const Token name = tokens_.Next();
      references_.push_back(VarReference{name.text, name.location});
      return Term::Var(name.text);
    }
    tokens_.Fail("expected a process term");
  }

  TokenStream& tokens_;
  const FieldSchema& schema_;
  std::vector<VarReference>& references_;
};

inline void ResolveReferences(const NetworkSpec& spec,
                              const std::vector<VarReference>& references) {
  for (const VarReference& ref : references) {
    if (spec.FindDefinition(ref.name) == nullptr) {
      throw Error(Stage::kParse, "unknown variable '" + ref.name + "'",
                  ref.location);
    }
  }
}

inline FieldSchema ParseFieldsSection(TokenStream& tokens) {
  tokens.ExpectWord("fields");
  tokens.Expect(TokenKind::kLBrace);
  std::vector<FieldSchema::Field> fields;
  while (!tokens.At(TokenKind::kRBrace)) {
    const Token name = tokens.Expect(TokenKind::kWord, "a field name");
    if (!IsIdentifier(name.text)) {
      TokenStream::FailAt(name, "expected a field name");
    }
    for (const auto& f : fields) {
      if (f.name == name.text) {
        throw Error(Stage::kParse, "duplicate field '" + name.text + "'",
                    name.location);
      }
    }
    tokens.Expect(TokenKind::kColon);
    tokens.Expect(TokenKind::kLBrace);
    FieldSchema::Field field{name.text, {}};
    do {
      const Token value = tokens.Expect(TokenKind::kWord, "a value");
      if (std::find(field.domain.begin(), field.domain.end(), value.text) !=
          field.domain.end()) {
        throw Error(Stage::kParse, "duplicate value '" + value.text + "'",
                    value.location);
      }
      field.domain.push_back(value.text);
    } while (tokens.Accept(TokenKind::kComma));
    tokens.Expect(TokenKind::kRBrace);
    fields.push_back(std::move(field));
    tokens.Accept(TokenKind::kComma);
  }
  tokens.Expect(TokenKind::kRBrace);
  return FieldSchema::Create(std::move(fields));
}

}  // namespace internal

// Parses a complete specification. Names are resolved, guardedness is not
// checked (see ValidateGuardedness). Throws Error(kParse) with a 1-based
// location on any failure; a partial spec is never returned.
inline NetworkSpec ParseSpec(std::string_view text) {
  TokenStream tokens(text);
  NetworkSpec spec;
  spec.schema = internal::ParseFieldsSection(tokens);

  std::vector<internal::VarReference> references;
  std::vector<Token> queue_tokens;
  bool have_init = false;
  bool have_packets = false;
  bool have_queue = false;
  while (!tokens.At(TokenKind::kEnd)) {
    const Token keyword = tokens.Peek();
    if (tokens.AtWord("packets")) {
      tokens.Next();
      if (have_packets) {
        TokenStream::FailAt(keyword, "duplicate 'packets' section");
      }
      have_packets = true;
      tokens.Expect(TokenKind::kLBrace);
      while (!tokens.At(TokenKind::kRBrace)) {
        const Token name = tokens.Expect(TokenKind::kWord, "a packet name");
        if (!internal::IsIdentifier(name.text)) {
          TokenStream::FailAt(name, "expected a packet name");
        }
        if (spec.FindPacket(name.text).has_value()) {
          throw Error(Stage::kParse,
                      "duplicate packet '" + name.text + "'", name.location);
        }
        tokens.Expect(TokenKind::kEq);
        Packet packet = internal::ParsePacketLiteral(tokens, spec.schema);
        spec.named_packets.push_back(NamedPacket{name.text, std::move(packet)});
        tokens.Accept(TokenKind::kComma);
      }
      tokens.Expect(TokenKind::kRBrace);
    } else if (tokens.AtWord("queue")) {
      tokens.Next();
      if (have_queue) TokenStream::FailAt(keyword, "duplicate 'queue' section");
      have_queue = true;
      tokens.Expect(TokenKind::kLBracket);
      if (!tokens.At(TokenKind::kRBracket)) {
        do {
          queue_tokens.push_back(
              tokens.Expect(TokenKind::kWord, "a packet name"));
        } while (tokens.Accept(TokenKind::kComma));
      }
      tokens.Expect(TokenKind::kRBracket);
    } else if (tokens.AtWord("def")) {
      tokens.Next();
      const Token name = tokens.Expect(TokenKind::kWord, "a definition name");
      if (!internal::IsIdentifier(name.text)) {
        TokenStream::FailAt(name, "expected a definition name");
      }
      for (const Definition& d : spec.definitions) {
        if (d.name == name.text) {
          throw Error(Stage::kParse,
                      "duplicate definition '" + name.text + "'",
                      name.location);
        }
      }
      tokens.Expect(TokenKind::kEq);
      Term body =
          internal::TermParser(tokens, spec.schema, references).ParsePar();
      spec.definitions.push_back(Definition{name.text, std::move(body)});
    } else if (tokens.AtWord("init")) {
      tokens.Next();
      if (have_init) TokenStream::FailAt(keyword, "duplicate 'init'");
      have_init = true;
      tokens.Expect(TokenKind::kEq);
      spec.init =
          internal::TermParser(tokens, spec.schema, references).ParsePar();
    } else {
      tokens.Fail("expected 'packets', 'queue', 'def' or 'init'");
    }
  }
  if (!have_init) {
    throw Error(Stage::kParse, "missing 'init = <term>'",
                tokens.Peek().location);
  }
  for (const Token& t : queue_tokens) {
    if (!spec.FindPacket(t.text).has_value()) {
      throw Error(Stage::kParse, "unknown packet '" + t.text + "'", t.location);
    }
    spec.initial_queue.push_back(t.text);
  }
  internal::ResolveReferences(spec, references);
  return spec;
}

// Parses a single process term against the names of `spec`.
inline Term ParseTerm(std::string_view text, const NetworkSpec& spec) {
  TokenStream tokens(text);
  std::vector<internal::VarReference> references;
  Term term = internal::TermParser(tokens, spec.schema, references).ParsePar();
  tokens.Expect(TokenKind::kEnd);
  internal::ResolveReferences(spec, references);
  return term;
}

inline Policy ParsePolicy(std::string_view text, const FieldSchema& schema) {
  TokenStream tokens(text);
  Policy policy = internal::PolicyParser(tokens, schema).ParseUnion();
  tokens.Expect(TokenKind::kEnd);
  return policy;
}

inline Packet ParsePacket(std::string_view text, const FieldSchema& schema) {
  TokenStream tokens(text);
  Packet packet = internal::ParsePacketLiteral(tokens, schema);
  tokens.Expect(TokenKind::kEnd);
  return packet;
}

// ---------------------------------------------------------------------------
// Guardedness

namespace internal {

inline void CollectUnguardedVars(const Term& term,
                                 std::vector<std::string>& out) {
  switch (term.kind()) {
    case Term::Kind::kVar:
      if (std::find(out.begin(), out.end(), term.name()) == out.end()) {
        out.push_back(term.name());
      }
      return;
    case Term::Kind::kChoice:
    case Term::Kind::kPar:
      CollectUnguardedVars(term.left(), out);
      CollectUnguardedVars(term.right(), out);
      return;
    default:
      return;
  }
}

}  // namespace internal

// A cycle of definitions reachable through Var, Choice and Par alone, in
// discovery order (`X = Y (+) ...`, `Y = X` yields [X, Y]); nullopt when the
// specification is guarded.
inline std::optional<std::vector<std::string>> FindUnguardedCycle(
    const NetworkSpec& spec) {
  std::map<std::string, std::vector<std::string>, std::less<>> edges;
  for (const Definition& d : spec.definitions) {
    internal::CollectUnguardedVars(d.body, edges[d.name]);
  }
  enum class Color { kWhite, kGray, kBlack };
  std::map<std::string, Color, std::less<>> color;
  std::vector<std::string> stack;
  std::optional<std::vector<std::string>> cycle;

  auto visit = [&](auto&& self, const std::string& name) -> void {
    color[name] = Color::kGray;
    stack.push_back(name);
    for (const std::string& next : edges[name]) {
      if (cycle.has_value()) return;
      const Color c = color[next];
      if (c == Color::kGray) {
        auto start = std::find(stack.begin(), stack.end(), next);
        cycle = std::vector<std::string>(start, stack.end());
        return;
      }
      if (c == Color::kWhite) self(self, next);
    }
    stack.pop_back();
    color[name] = Color::kBlack;
  };
  for (const Definition& d : spec.definitions) {
    if (cycle.has_value()) break;
    if (color[d.name] == Color::kWhite) visit(visit, d.name);
  }
  return cycle;
}

// Throws Error(kValidation) naming the offending cycle.
inline void ValidateGuardedness(const NetworkSpec& spec) {
  std::optional<std::vector<std::string>> cycle = FindUnguardedCycle(spec);
  if (!cycle.has_value()) return;
  std::string path;
  for (const std::string& name : *cycle) path += name + " -> ";
  path += cycle->front();
  throw Error(Stage::kValidation, "unguarded recursion: " + path);
}

// ---------------------------------------------------------------------------
// Printing

namespace internal {

enum TermPrecedence : int { kPrecPar = 0, kPrecChoice = 1, kPrecPrefix = 2 };

inline int PrecedenceOf(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kPar:
      return kPrecPar;
    case Term::Kind::kChoice:
      return kPrecChoice;
    default:
      return kPrecPrefix;
  }
}

inline void PrintTerm(std::string& out, const FieldSchema& schema,
                      const Term& t, int min_precedence) {
  const bool wrap = PrecedenceOf(t) < min_precedence;
  if (wrap) out += "(";
  switch (t.kind()) {
    case Term::Kind::kBot:
      out += "bot";
      break;
    case Term::Kind::kVar:
      out += t.name();
      break;
    case Term::Kind::kPolicy:
      out += PolicyToString(schema, t.policy());
      out += " ; ";
      PrintTerm(out, schema, t.continuation(), kPrecPrefix);
      break;
    case Term::Kind::kRecv:
    case Term::Kind::kSend:
      out += t.channel();
      out += t.kind() == Term::Kind::kRecv ? " ? " : " ! ";
      out += PolicyToString(schema, t.policy());
      out += " ; ";
      PrintTerm(out, schema, t.continuation(), kPrecPrefix);
      break;
    case Term::Kind::kChoice:
      PrintTerm(out, schema, t.left(), kPrecChoice);
      out += " (+) ";
      PrintTerm(out, schema, t.right(), kPrecChoice + 1);
      break;
    case Term::Kind::kPar:
      PrintTerm(out, schema, t.left(), kPrecPar);
      out += " || ";
      PrintTerm(out, schema, t.right(), kPrecPar + 1);
      break;
  }
  if (wrap) out += ")";
}

}  // namespace internal

inline std::string TermToString(const FieldSchema& schema, const Term& term) {
  std::string out;
  internal::PrintTerm(out, schema, term, internal::kPrecPar);
  return out;
}

// Canonical text of a specification; ParseSpec(PrettyPrint(s)) == s.
inline std::string PrettyPrint(const NetworkSpec& spec) {
  std::string out = "fields {";
  for (std::size_t i = 0; i < spec.schema.size(); ++i) {
    const auto& field = spec.schema.field(i);
    out += i == 0 ? " " : ", ";
    out += field.name + ": {";
    for (std::size_t v = 0; v < field.domain.size(); ++v) {
      if (v > 0) out += ",";
      out += field.domain[v];
    }
    out += "}";
  }
  out += " }\n";
  out += "packets {";
  for (const NamedPacket& p : spec.named_packets) {
    out += " " + p.name + " = " + PacketToString(spec.schema, p.packet);
  }
  out += " }\n";
  out += "queue [";
  for (std::size_t i = 0; i < spec.initial_queue.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += spec.initial_queue[i];
  }
  out += " ]\n";
  for (const Definition& d : spec.definitions) {
    out += "def " + d.name + " = " + TermToString(spec.schema, d.body) + "\n";
  }
  out += "init = " + TermToString(spec.schema, spec.init) + "\n";
  return out;
}

}  // namespace dynet
