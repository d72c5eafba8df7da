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

// Hazards: regular expressions over transition labels.
//
//   e ::= 0 | 1 | atom | !atom | any | e ; e | e + e | e* | (e)
//   atom ::= proc(p,q) | send(X,policy) | recv(X,policy) | sync(X,policy)
//
// `!atom` matches any single label other than `atom` and `any` matches any
// single label; neither is a language complement. `;` binds tighter than `+`,
// postfix `*` tightest. Packets are written by name or as `{f:v,...}`.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynet/diagnostic.hpp"
#include "dynet/lexer.hpp"
#include "dynet/lts.hpp"
#include "dynet/spec_language.hpp"
#include "json.hpp"

namespace dynet {

// Single-symbol pattern.
struct LabelPattern {
  enum class Kind { kExact, kNot, kAny };

  Kind kind = Kind::kAny;
  Label label;

  bool Matches(const Label& candidate) const {
    switch (kind) {
      case Kind::kExact:
        return candidate == label;
      case Kind::kNot:
        return candidate != label;
      case Kind::kAny:
        return true;
    }
    return false;
  }

  friend auto operator<=>(const LabelPattern&, const LabelPattern&) = default;
  friend bool operator==(const LabelPattern&, const LabelPattern&) = default;
};

class HazardExpr {
 public:
  enum class Kind { kEmpty, kEpsilon, kAtom, kSeq, kAlt, kStar };

  // The empty language.
  HazardExpr() : HazardExpr(Kind::kEmpty, {}, {}) {}

  static HazardExpr Empty() { return HazardExpr(); }
  static HazardExpr Epsilon() { return HazardExpr(Kind::kEpsilon, {}, {}); }
  static HazardExpr Atom(LabelPattern pattern) {
    return HazardExpr(Kind::kAtom, std::move(pattern), {});
  }
  static HazardExpr Exact(Label label) {
    return Atom(LabelPattern{LabelPattern::Kind::kExact, std::move(label)});
  }
  static HazardExpr NotLabel(Label label) {
    return Atom(LabelPattern{LabelPattern::Kind::kNot, std::move(label)});
  }
  static HazardExpr Any() { return Atom(LabelPattern{}); }
  static HazardExpr Seq(HazardExpr left, HazardExpr right) {
    return HazardExpr(Kind::kSeq, {}, {std::move(left), std::move(right)});
  }
  static HazardExpr Alt(HazardExpr left, HazardExpr right) {
    return HazardExpr(Kind::kAlt, {}, {std::move(left), std::move(right)});
  }
  static HazardExpr Star(HazardExpr operand) {
    return HazardExpr(Kind::kStar, {}, {std::move(operand)});
  }

  Kind kind() const { return node_->kind; }
  const LabelPattern& pattern() const { return node_->pattern; }
  const HazardExpr& left() const { return node_->children.at(0); }
  const HazardExpr& right() const { return node_->children.at(1); }
  const HazardExpr& operand() const { return node_->children.at(0); }

  friend std::strong_ordering operator<=>(const HazardExpr& a,
                                          const HazardExpr& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.pattern() <=> b.pattern(); c != 0) return c;
    return a.node_->children <=> b.node_->children;
  }
  friend bool operator==(const HazardExpr& a, const HazardExpr& b) {
    return (a <=> b) == 0;
  }

 private:
  struct Node {
    Kind kind;
    LabelPattern pattern;
    std::vector<HazardExpr> children;
  };

  HazardExpr(Kind kind, LabelPattern pattern, std::vector<HazardExpr> children)
      : node_(std::make_shared<const Node>(
            Node{kind, std::move(pattern), std::move(children)})) {}

  std::shared_ptr<const Node> node_;
};

enum class Anchor { kStart, kAnywhere };

inline std::string_view AnchorName(Anchor anchor) {
  return anchor == Anchor::kStart ? "start" : "anywhere";
}

// `anywhere` lets the hazard begin after an arbitrary prefix: any* ; e.
inline HazardExpr Anchored(const HazardExpr& e, Anchor anchor) {
  if (anchor == Anchor::kStart) return e;
  return HazardExpr::Seq(HazardExpr::Star(HazardExpr::Any()), e);
}

// ---------------------------------------------------------------------------
// Parsing

namespace internal {

inline Packet ParsePacketRef(TokenStream& tokens, const NetworkSpec& spec) {
  if (tokens.At(TokenKind::kLBrace)) {
    return ParsePacketLiteral(tokens, spec.schema);
  }
  const Token name = tokens.Expect(TokenKind::kWord, "a packet name");
  std::optional<Packet> packet = spec.FindPacket(name.text);
  if (!packet.has_value()) {
    throw Error(Stage::kParse, "unknown packet '" + name.text + "'",
                name.location);
  }
  return *packet;
}

inline bool AtLabelAtom(const TokenStream& tokens) {
  return (tokens.AtWord("proc") || tokens.AtWord("send") ||
          tokens.AtWord("recv") || tokens.AtWord("sync")) &&
         tokens.At(TokenKind::kLParen, 1);
}

inline Label ParseLabelAtom(TokenStream& tokens, const NetworkSpec& spec,
                            const std::set<std::string>& channels) {
  if (!AtLabelAtom(tokens)) {
    tokens.Fail("expected proc(..), send(..), recv(..) or sync(..)");
  }
  const std::string kind = tokens.Next().text;
  tokens.Expect(TokenKind::kLParen);
  Label label;
  if (kind == "proc") {
    Packet in = ParsePacketRef(tokens, spec);
    tokens.Expect(TokenKind::kComma);
    Packet out = ParsePacketRef(tokens, spec);
    label = Label::Proc(std::move(in), std::move(out));
  } else {
    const Token channel = tokens.Expect(TokenKind::kWord, "a channel name");
    if (!channels.contains(channel.text)) {
      throw Error(Stage::kParse, "unknown channel '" + channel.text + "'",
                  channel.location);
    }
    tokens.Expect(TokenKind::kComma);
    Policy policy = PolicyParser(tokens, spec.schema).ParseUnion();
    if (kind == "send") {
      label = Label::Send(channel.text, std::move(policy));
    } else if (kind == "recv") {
      label = Label::Recv(channel.text, std::move(policy));
    } else {
      label = Label::Sync(channel.text, std::move(policy));
    }
  }
  tokens.Expect(TokenKind::kRParen);
  return label;
}

class HazardParser {
 public:
  HazardParser(TokenStream& tokens, const NetworkSpec& spec)
      : tokens_(tokens), spec_(spec), channels_(spec.Channels()) {}

  HazardExpr ParseAlt() {
    HazardExpr left = ParseSeq();
    while (tokens_.Accept(TokenKind::kPlus)) {
      left = HazardExpr::Alt(std::move(left), ParseSeq());
    }
    return left;
  }

 private:
  HazardExpr ParseSeq() {
    HazardExpr left = ParseStar();
    while (tokens_.Accept(TokenKind::kSemi)) {
      left = HazardExpr::Seq(std::move(left), ParseStar());
    }
    return left;
  }

  HazardExpr ParseStar() {
    HazardExpr operand = ParsePrimary();
    while (tokens_.Accept(TokenKind::kStar)) {
      operand = HazardExpr::Star(std::move(operand));
    }
    return operand;
  }

  HazardExpr ParsePrimary() {
    if (tokens_.Accept(TokenKind::kLParen)) {
      HazardExpr inner = ParseAlt();
      tokens_.Expect(TokenKind::kRParen);
      return inner;
    }
    if (tokens_.AtWord("0")) {
      tokens_.Next();
      return HazardExpr::Empty();
    }
    if (tokens_.AtWord("1")) {
      tokens_.Next();
      return HazardExpr::Epsilon();
    }
    if (tokens_.AtWord("any")) {
      tokens_.Next();
      return HazardExpr::Any();
    }
    if (tokens_.Accept(TokenKind::kBang)) {
      return HazardExpr::NotLabel(ParseLabelAtom(tokens_, spec_, channels_));
    }
    if (AtLabelAtom(tokens_)) {
      return HazardExpr::Exact(ParseLabelAtom(tokens_, spec_, channels_));
    }
    tokens_.Fail("expected a hazard expression");
  }

  TokenStream& tokens_;
  const NetworkSpec& spec_;
  std::set<std::string> channels_;
};

template <typename F>
auto AsHazardError(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.stage() != Stage::kParse) throw;
    throw Error(Stage::kHazard, e.message(), e.location());
  }
}

}  // namespace internal

// Throws Error(kHazard) on syntax errors and unknown packets or channels.
inline HazardExpr ParseHazard(std::string_view text, const NetworkSpec& spec) {
  return internal::AsHazardError([&] {
    TokenStream tokens(text);
    HazardExpr e = internal::HazardParser(tokens, spec).ParseAlt();
    tokens.Expect(TokenKind::kEnd);
    return e;
  });
}

// A single label in hazard-atom syntax.
inline Label ParseLabel(std::string_view text, const NetworkSpec& spec) {
  return internal::AsHazardError([&] {
    TokenStream tokens(text);
    Label label = internal::ParseLabelAtom(tokens, spec, spec.Channels());
    tokens.Expect(TokenKind::kEnd);
    return label;
  });
}

// Whitespace- or comma-separated labels.
inline std::vector<Label> ParseWord(std::string_view text,
                                    const NetworkSpec& spec) {
  return internal::AsHazardError([&] {
    TokenStream tokens(text);
    const std::set<std::string> channels = spec.Channels();
    std::vector<Label> word;
    while (!tokens.At(TokenKind::kEnd)) {
      word.push_back(internal::ParseLabelAtom(tokens, spec, channels));
      tokens.Accept(TokenKind::kComma);
    }
    return word;
  });
}

namespace internal {

inline void PrintHazard(std::string& out, const NetworkSpec& spec,
                        const HazardExpr& e, int min_precedence) {
  auto precedence = [](const HazardExpr& x) {
    switch (x.kind()) {
      case HazardExpr::Kind::kAlt:
        return 0;
      case HazardExpr::Kind::kSeq:
        return 1;
      default:
        return 2;
    }
  };
  const bool wrap = precedence(e) < min_precedence;
  if (wrap) out += "(";
  switch (e.kind()) {
    case HazardExpr::Kind::kEmpty:
      out += "0";
      break;
    case HazardExpr::Kind::kEpsilon:
      out += "1";
      break;
    case HazardExpr::Kind::kAtom:
      switch (e.pattern().kind) {
        case LabelPattern::Kind::kAny:
          out += "any";
          break;
        case LabelPattern::Kind::kNot:
          out += "!" + RenderLabel(spec, e.pattern().label);
          break;
        case LabelPattern::Kind::kExact:
          out += RenderLabel(spec, e.pattern().label);
          break;
      }
      break;
    case HazardExpr::Kind::kAlt:
      PrintHazard(out, spec, e.left(), 0);
      out += " + ";
      PrintHazard(out, spec, e.right(), 1);
      break;
    case HazardExpr::Kind::kSeq:
      PrintHazard(out, spec, e.left(), 1);
      out += " ; ";
      PrintHazard(out, spec, e.right(), 2);
      break;
    case HazardExpr::Kind::kStar: {
      // `**` and `(e*)*` parse alike; wrap nested stars for readability.
      const bool nested = e.operand().kind() == HazardExpr::Kind::kStar;
      if (nested) out += "(";
      PrintHazard(out, spec, e.operand(), 2);
      if (nested) out += ")";
      out += "*";
      break;
    }
  }
  if (wrap) out += ")";
}

}  // namespace internal

inline std::string HazardToString(const NetworkSpec& spec,
                                  const HazardExpr& e) {
  std::string out;
  internal::PrintHazard(out, spec, e, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Derivative matcher

namespace internal {

inline HazardExpr MakeSeq(HazardExpr a, HazardExpr b) {
  using K = HazardExpr::Kind;
  if (a.kind() == K::kEmpty || b.kind() == K::kEmpty) return HazardExpr::Empty();
  if (a.kind() == K::kEpsilon) return b;
  if (b.kind() == K::kEpsilon) return a;
  return HazardExpr::Seq(std::move(a), std::move(b));
}

inline HazardExpr MakeAlt(HazardExpr a, HazardExpr b) {
  using K = HazardExpr::Kind;
  if (a.kind() == K::kEmpty) return b;
  if (b.kind() == K::kEmpty) return a;
  if (a == b) return a;
  return HazardExpr::Alt(std::move(a), std::move(b));
}

}  // namespace internal

inline bool Nullable(const HazardExpr& e) {
  switch (e.kind()) {
    case HazardExpr::Kind::kEmpty:
    case HazardExpr::Kind::kAtom:
      return false;
    case HazardExpr::Kind::kEpsilon:
    case HazardExpr::Kind::kStar:
      return true;
    case HazardExpr::Kind::kSeq:
      return Nullable(e.left()) && Nullable(e.right());
    case HazardExpr::Kind::kAlt:
      return Nullable(e.left()) || Nullable(e.right());
  }
  return false;
}

// Brzozowski derivative with respect to one label.
inline HazardExpr Derivative(const HazardExpr& e, const Label& a) {
  switch (e.kind()) {
    case HazardExpr::Kind::kEmpty:
    case HazardExpr::Kind::kEpsilon:
      return HazardExpr::Empty();
    case HazardExpr::Kind::kAtom:
      return e.pattern().Matches(a) ? HazardExpr::Epsilon()
                                    : HazardExpr::Empty();
    case HazardExpr::Kind::kSeq: {
      HazardExpr first = internal::MakeSeq(Derivative(e.left(), a), e.right());
      if (!Nullable(e.left())) return first;
      return internal::MakeAlt(std::move(first), Derivative(e.right(), a));
    }
    case HazardExpr::Kind::kAlt:
      return internal::MakeAlt(Derivative(e.left(), a),
                               Derivative(e.right(), a));
    case HazardExpr::Kind::kStar:
      return internal::MakeSeq(Derivative(e.operand(), a), e);
  }
  return HazardExpr::Empty();
}

inline bool MatchWord(const HazardExpr& e, const std::vector<Label>& word) {
  HazardExpr current = e;
  for (const Label& a : word) {
    current = Derivative(current, a);
    if (current.kind() == HazardExpr::Kind::kEmpty) return false;
  }
  return Nullable(current);
}

// ---------------------------------------------------------------------------
// DFA compilation

// Complete DFA over a fixed label alphabet; symbol i is alphabet[i].
struct HazardDfa {
  std::vector<Label> alphabet;
  std::size_t initial = 0;
  std::vector<bool> accepting;
  std::vector<std::vector<std::size_t>> delta;  // [state][symbol]

  std::size_t size() const { return accepting.size(); }

  bool Accepts(const std::vector<std::size_t>& symbols) const {
    std::size_t state = initial;
    for (std::size_t s : symbols) state = delta[state][s];
    return accepting[state];
  }
};

namespace internal {

// Thompson automaton: one start and one final state per fragment.
class ThompsonNfa {
 public:
  struct Fragment {
    std::size_t start;
    std::size_t accept;
  };

  explicit ThompsonNfa(const std::vector<Label>& alphabet)
      : alphabet_(alphabet) {}

  Fragment Build(const HazardExpr& e) {
    switch (e.kind()) {
      case HazardExpr::Kind::kEmpty:
        return Fragment{NewState(), NewState()};
      case HazardExpr::Kind::kEpsilon: {
        Fragment f{NewState(), NewState()};
        epsilon_[f.start].push_back(f.accept);
        return f;
      }
      case HazardExpr::Kind::kAtom: {
        Fragment f{NewState(), NewState()};
        for (std::size_t s = 0; s < alphabet_.size(); ++s) {
          if (e.pattern().Matches(alphabet_[s])) {
            symbol_edges_[f.start].emplace_back(s, f.accept);
          }
        }
        return f;
      }
      case HazardExpr::Kind::kSeq: {
        const Fragment a = Build(e.left());
        const Fragment b = Build(e.right());
        epsilon_[a.accept].push_back(b.start);
        return Fragment{a.start, b.accept};
      }
      case HazardExpr::Kind::kAlt: {
        const Fragment a = Build(e.left());
        const Fragment b = Build(e.right());
        Fragment f{NewState(), NewState()};
        epsilon_[f.start].push_back(a.start);
        epsilon_[f.start].push_back(b.start);
        epsilon_[a.accept].push_back(f.accept);
        epsilon_[b.accept].push_back(f.accept);
        return f;
      }
      case HazardExpr::Kind::kStar: {
        const Fragment a = Build(e.operand());
        Fragment f{NewState(), NewState()};
        epsilon_[f.start].push_back(a.start);
        epsilon_[f.start].push_back(f.accept);
        epsilon_[a.accept].push_back(a.start);
        epsilon_[a.accept].push_back(f.accept);
        return f;
      }
    }
    return Fragment{NewState(), NewState()};
  }

  std::set<std::size_t> Closure(std::set<std::size_t> states) const {
    std::vector<std::size_t> work(states.begin(), states.end());
    while (!work.empty()) {
      const std::size_t s = work.back();
      work.pop_back();
      for (std::size_t t : epsilon_[s]) {
        if (states.insert(t).second) work.push_back(t);
      }
    }
    return states;
  }

  std::set<std::size_t> Move(const std::set<std::size_t>& states,
                             std::size_t symbol) const {
    std::set<std::size_t> out;
    for (std::size_t s : states) {
      for (const auto& [sym, to] : symbol_edges_[s]) {
        if (sym == symbol) out.insert(to);
      }
    }
    return out;
  }

 private:
  std::size_t NewState() {
    epsilon_.emplace_back();
    symbol_edges_.emplace_back();
    return epsilon_.size() - 1;
  }

  const std::vector<Label>& alphabet_;
  std::vector<std::vector<std::size_t>> epsilon_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> symbol_edges_;
};

inline bool MentionsLabels(const HazardExpr& e) {
  switch (e.kind()) {
    case HazardExpr::Kind::kAtom:
      return e.pattern().kind != LabelPattern::Kind::kAny;
    case HazardExpr::Kind::kSeq:
    case HazardExpr::Kind::kAlt:
      return MentionsLabels(e.left()) || MentionsLabels(e.right());
    case HazardExpr::Kind::kStar:
      return MentionsLabels(e.operand());
    default:
      return false;
  }
}

// Moore partition refinement. States are renumbered by first appearance in a
// breadth-first walk from the initial state, so the result is deterministic.
inline HazardDfa Minimize(const HazardDfa& dfa) {
  std::vector<std::size_t> block(dfa.size());
  for (std::size_t s = 0; s < dfa.size(); ++s) block[s] = dfa.accepting[s] ? 1 : 0;
  for (std::size_t blocks = 0;;) {
    std::map<std::vector<std::size_t>, std::size_t> signature_ids;
    std::vector<std::size_t> next(dfa.size());
    for (std::size_t s = 0; s < dfa.size(); ++s) {
      std::vector<std::size_t> signature{block[s]};
      for (std::size_t target : dfa.delta[s]) signature.push_back(block[target]);
      next[s] = signature_ids.emplace(signature, signature_ids.size()).first->second;
    }
    block = std::move(next);
    if (signature_ids.size() == blocks) break;
    blocks = signature_ids.size();
  }

  HazardDfa out;
  out.alphabet = dfa.alphabet;
  std::map<std::size_t, std::size_t> renumber;
  std::vector<std::size_t> representative;
  auto intern = [&](std::size_t state) {
    auto [it, inserted] = renumber.emplace(block[state], representative.size());
    if (inserted) representative.push_back(state);
    return it->second;
  };
  out.initial = intern(dfa.initial);
  for (std::size_t i = 0; i < representative.size(); ++i) {
    const std::size_t s = representative[i];
    out.accepting.push_back(dfa.accepting[s]);
    std::vector<std::size_t> row;
    for (std::size_t target : dfa.delta[s]) row.push_back(intern(target));
    out.delta.push_back(std::move(row));
  }
  return out;
}

}  // namespace internal

// Patterns are expanded to the alphabet labels they match, then Thompson
// construction, subset construction and minimisation. States from which
// nothing is accepted collapse into one dead state. Throws Error(kHazard) if
// the alphabet is empty but the expression names labels.
inline HazardDfa CompileDfa(const HazardExpr& e,
                            const std::vector<Label>& alphabet) {
  if (alphabet.empty() && internal::MentionsLabels(e)) {
    throw Error(Stage::kHazard,
                "the hazard names labels but the label alphabet is empty");
  }
  internal::ThompsonNfa nfa(alphabet);
  const internal::ThompsonNfa::Fragment root = nfa.Build(e);

  HazardDfa dfa;
  dfa.alphabet = alphabet;
  std::map<std::set<std::size_t>, std::size_t> ids;
  std::vector<std::set<std::size_t>> subsets;
  auto intern = [&](std::set<std::size_t> subset) {
    auto [it, inserted] = ids.emplace(subset, subsets.size());
    if (inserted) {
      dfa.accepting.push_back(subset.contains(root.accept));
      dfa.delta.emplace_back(alphabet.size(), 0);
      subsets.push_back(std::move(subset));
    }
    return it->second;
  };
  dfa.initial = intern(nfa.Closure({root.start}));
  for (std::size_t state = 0; state < subsets.size(); ++state) {
    for (std::size_t symbol = 0; symbol < alphabet.size(); ++symbol) {
      const std::size_t target =
          intern(nfa.Closure(nfa.Move(subsets[state], symbol)));
      dfa.delta[state][symbol] = target;
    }
  }
  return internal::Minimize(dfa);
}

// Debug view: {"states", "initial", "accepting", "delta": [[from,label,to]]}.
inline std::string DfaToJson(const NetworkSpec& spec, const HazardDfa& dfa) {
  nlohmann::ordered_json out;
  out["states"] = dfa.size();
  out["initial"] = dfa.initial;
  out["accepting"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < dfa.size(); ++s) {
    if (dfa.accepting[s]) out["accepting"].push_back(s);
  }
  out["delta"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < dfa.size(); ++s) {
    for (std::size_t a = 0; a < dfa.alphabet.size(); ++a) {
      out["delta"].push_back(nlohmann::ordered_json::array(
          {s, RenderLabel(spec, dfa.alphabet[a]), dfa.delta[s][a]}));
    }
  }
  return out.dump(2) + "\n";
}

}  // namespace dynet
