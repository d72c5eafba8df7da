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

// Packets over finite field domains and the dup-free NetKAT fragment:
// predicates are boolean tests on a packet, policies map a packet to a set of
// packets.

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynet/diagnostic.hpp"

namespace dynet {

// A packet stores, per schema field, the index of its value in the field's
// domain. Ordering is lexicographic in schema field order, which is the
// iteration order of every packet set in this library.
struct Packet {
  std::vector<std::uint32_t> values;

  friend auto operator<=>(const Packet&, const Packet&) = default;
  friend bool operator==(const Packet&, const Packet&) = default;
};

using PacketSet = std::set<Packet>;

class FieldSchema {
 public:
  struct Field {
    std::string name;
    std::vector<std::string> domain;

    friend bool operator==(const Field&, const Field&) = default;
  };

  FieldSchema() = default;

  // Throws Error(kValidation) on duplicate field names, empty domains or
  // duplicate values within a domain.
  static FieldSchema Create(std::vector<Field> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].domain.empty()) {
        throw Error(Stage::kValidation,
                    "field '" + fields[i].name + "' has an empty domain");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (fields[j].name == fields[i].name) {
          throw Error(Stage::kValidation,
                      "duplicate field '" + fields[i].name + "'");
        }
      }
      const auto& domain = fields[i].domain;
      for (std::size_t a = 0; a < domain.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) {
          if (domain[a] == domain[b]) {
            throw Error(Stage::kValidation, "duplicate value '" + domain[a] +
                                                "' in domain of field '" +
                                                fields[i].name + "'");
          }
        }
      }
    }
    FieldSchema schema;
    schema.fields_ = std::move(fields);
    return schema;
  }

  std::size_t size() const { return fields_.size(); }
  const Field& field(std::size_t index) const { return fields_.at(index); }
  const std::vector<Field>& fields() const { return fields_; }

  std::optional<std::size_t> FindField(std::string_view name) const {
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (fields_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::optional<std::uint32_t> FindValue(std::size_t field,
                                         std::string_view token) const {
    const auto& domain = fields_.at(field).domain;
    for (std::size_t i = 0; i < domain.size(); ++i) {
      if (domain[i] == token) return static_cast<std::uint32_t>(i);
    }
    return std::nullopt;
  }

  const std::string& ValueToken(std::size_t field, std::uint32_t value) const {
    return fields_.at(field).domain.at(value);
  }

  // Product of the domain sizes; nullopt if it does not fit in 64 bits.
  std::optional<std::uint64_t> PacketSpaceSize() const {
    std::uint64_t total = 1;
    for (const Field& f : fields_) {
      const std::uint64_t n = f.domain.size();
      if (total > UINT64_MAX / n) return std::nullopt;
      total *= n;
    }
    return total;
  }

  bool Conforms(const Packet& packet) const {
    if (packet.values.size() != fields_.size()) return false;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (packet.values[i] >= fields_[i].domain.size()) return false;
    }
    return true;
  }

  // Every packet of the space, in packet order. Callers check the size first.
  std::vector<Packet> AllPackets() const {
    std::vector<Packet> out;
    Packet current{std::vector<std::uint32_t>(fields_.size(), 0)};
    for (;;) {
      out.push_back(current);
      std::size_t i = fields_.size();
      for (;;) {
        if (i == 0) return out;
        --i;
        if (++current.values[i] < fields_[i].domain.size()) break;
        current.values[i] = 0;
      }
    }
  }

  friend bool operator==(const FieldSchema&, const FieldSchema&) = default;

 private:
  std::vector<Field> fields_;
};

// `{port:1,vlan:a}` with fields in schema order.
inline std::string PacketToString(const FieldSchema& schema,
                                  const Packet& packet) {
  std::string out = "{";
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i > 0) out += ",";
    out += schema.field(i).name;
    out += ":";
    out += schema.ValueToken(i, packet.values.at(i));
  }
  out += "}";
  return out;
}

class Predicate {
 public:
  enum class Kind { kZero, kOne, kTest, kNot, kOr, kAnd };

  // Zero.
  Predicate() : Predicate(Kind::kZero, 0, 0, {}) {}

  static Predicate Zero() { return Predicate(); }
  static Predicate One() { return Predicate(Kind::kOne, 0, 0, {}); }
  static Predicate Test(std::size_t field, std::uint32_t value) {
    return Predicate(Kind::kTest, field, value, {});
  }
  static Predicate Not(Predicate operand) {
    return Predicate(Kind::kNot, 0, 0, {std::move(operand)});
  }
  static Predicate Or(Predicate left, Predicate right) {
    return Predicate(Kind::kOr, 0, 0, {std::move(left), std::move(right)});
  }
  static Predicate And(Predicate left, Predicate right) {
    return Predicate(Kind::kAnd, 0, 0, {std::move(left), std::move(right)});
  }

  Kind kind() const { return node_->kind; }
  std::size_t field() const { return node_->field; }
  std::uint32_t value() const { return node_->value; }
  const Predicate& operand() const { return node_->children.at(0); }
  const Predicate& left() const { return node_->children.at(0); }
  const Predicate& right() const { return node_->children.at(1); }

  friend std::strong_ordering operator<=>(const Predicate& a,
                                          const Predicate& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.field() <=> b.field(); c != 0) return c;
    if (auto c = a.value() <=> b.value(); c != 0) return c;
    return a.node_->children <=> b.node_->children;
  }
  friend bool operator==(const Predicate& a, const Predicate& b) {
    return (a <=> b) == 0;
  }

 private:
  struct Node {
    Kind kind;
    std::size_t field;
    std::uint32_t value;
    std::vector<Predicate> children;
  };

  Predicate(Kind kind, std::size_t field, std::uint32_t value,
            std::vector<Predicate> children)
      : node_(std::make_shared<const Node>(
            Node{kind, field, value, std::move(children)})) {}

  std::shared_ptr<const Node> node_;
};

class Policy {
 public:
  enum class Kind { kFilter, kAssign, kUnion, kSeq, kStar };

  // Drop, i.e. Filter(Zero).
  Policy() : Policy(Kind::kFilter, Predicate::Zero(), 0, 0, {}) {}

  static Policy Filter(Predicate predicate) {
    return Policy(Kind::kFilter, std::move(predicate), 0, 0, {});
  }
  static Policy Drop() { return Filter(Predicate::Zero()); }
  static Policy Skip() { return Filter(Predicate::One()); }
  static Policy Assign(std::size_t field, std::uint32_t value) {
    return Policy(Kind::kAssign, Predicate(), field, value, {});
  }
  static Policy Union(Policy left, Policy right) {
    return Policy(Kind::kUnion, Predicate(), 0, 0,
                  {std::move(left), std::move(right)});
  }
  static Policy Seq(Policy left, Policy right) {
    return Policy(Kind::kSeq, Predicate(), 0, 0,
                  {std::move(left), std::move(right)});
  }
  static Policy Star(Policy operand) {
    return Policy(Kind::kStar, Predicate(), 0, 0, {std::move(operand)});
  }

  Kind kind() const { return node_->kind; }
  const Predicate& predicate() const { return node_->predicate; }
  std::size_t field() const { return node_->field; }
  std::uint32_t value() const { return node_->value; }
  const Policy& operand() const { return node_->children.at(0); }
  const Policy& left() const { return node_->children.at(0); }
  const Policy& right() const { return node_->children.at(1); }

  friend std::strong_ordering operator<=>(const Policy& a, const Policy& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.predicate() <=> b.predicate(); c != 0) return c;
    if (auto c = a.field() <=> b.field(); c != 0) return c;
    if (auto c = a.value() <=> b.value(); c != 0) return c;
    return a.node_->children <=> b.node_->children;
  }
  friend bool operator==(const Policy& a, const Policy& b) {
    return (a <=> b) == 0;
  }

 private:
  struct Node {
    Kind kind;
    Predicate predicate;
    std::size_t field;
    std::uint32_t value;
    std::vector<Policy> children;
  };

  Policy(Kind kind, Predicate predicate, std::size_t field,
         std::uint32_t value, std::vector<Policy> children)
      : node_(std::make_shared<const Node>(Node{kind, std::move(predicate),
                                                field, value,
                                                std::move(children)})) {}

  std::shared_ptr<const Node> node_;
};

namespace internal {

inline void CheckField(const FieldSchema& schema, std::size_t field,
                       std::uint32_t value) {
  if (field >= schema.size() || value >= schema.field(field).domain.size()) {
    throw Error(Stage::kValidation, "field/value outside the packet schema");
  }
}

inline void CheckPacket(const FieldSchema& schema, const Packet& packet) {
  if (!schema.Conforms(packet)) {
    throw Error(Stage::kValidation, "packet does not conform to the schema");
  }
}

inline bool EvaluatePredicateUnchecked(const FieldSchema& schema,
                                       const Predicate& predicate,
                                       const Packet& packet) {
  switch (predicate.kind()) {
    case Predicate::Kind::kZero:
      return false;
    case Predicate::Kind::kOne:
      return true;
    case Predicate::Kind::kTest:
      CheckField(schema, predicate.field(), predicate.value());
      return packet.values[predicate.field()] == predicate.value();
    case Predicate::Kind::kNot:
      return !EvaluatePredicateUnchecked(schema, predicate.operand(), packet);
    case Predicate::Kind::kOr:
      return EvaluatePredicateUnchecked(schema, predicate.left(), packet) ||
             EvaluatePredicateUnchecked(schema, predicate.right(), packet);
    case Predicate::Kind::kAnd:
      return EvaluatePredicateUnchecked(schema, predicate.left(), packet) &&
             EvaluatePredicateUnchecked(schema, predicate.right(), packet);
  }
  return false;
}

inline void EvaluatePolicyInto(const FieldSchema& schema, const Policy& policy,
                               const Packet& packet, PacketSet& out) {
  switch (policy.kind()) {
    case Policy::Kind::kFilter:
      if (EvaluatePredicateUnchecked(schema, policy.predicate(), packet)) {
        out.insert(packet);
      }
      return;
    case Policy::Kind::kAssign: {
      CheckField(schema, policy.field(), policy.value());
      Packet modified = packet;
      modified.values[policy.field()] = policy.value();
      out.insert(std::move(modified));
      return;
    }
    case Policy::Kind::kUnion:
      EvaluatePolicyInto(schema, policy.left(), packet, out);
      EvaluatePolicyInto(schema, policy.right(), packet, out);
      return;
    case Policy::Kind::kSeq: {
      PacketSet intermediate;
      EvaluatePolicyInto(schema, policy.left(), packet, intermediate);
      for (const Packet& p : intermediate) {
        EvaluatePolicyInto(schema, policy.right(), p, out);
      }
      return;
    }
    case Policy::Kind::kStar: {
      // Saturation: the reachable set only grows and the packet space is
      // finite, so this stops after at most |packet space| rounds.
      PacketSet reached{packet};
      std::vector<Packet> frontier{packet};
      while (!frontier.empty()) {
        std::vector<Packet> next;
        for (const Packet& p : frontier) {
          PacketSet image;
          EvaluatePolicyInto(schema, policy.operand(), p, image);
          for (const Packet& q : image) {
            if (reached.insert(q).second) next.push_back(q);
          }
        }
        frontier = std::move(next);
      }
      out.insert(reached.begin(), reached.end());
      return;
    }
  }
}

}  // namespace internal

inline bool EvaluatePredicate(const FieldSchema& schema,
                              const Predicate& predicate,
                              const Packet& packet) {
  internal::CheckPacket(schema, packet);
  return internal::EvaluatePredicateUnchecked(schema, predicate, packet);
}

inline PacketSet EvaluatePolicy(const FieldSchema& schema,
                                const Policy& policy, const Packet& packet) {
  internal::CheckPacket(schema, packet);
  PacketSet out;
  internal::EvaluatePolicyInto(schema, policy, packet, out);
  return out;
}

inline constexpr std::uint64_t kDefaultPacketSpaceCap = 1'000'000;

// Pointwise comparison over the whole packet space. Throws Error(kCapacity)
// when the space exceeds `cap`.
inline bool PoliciesEquivalent(const FieldSchema& schema, const Policy& left,
                               const Policy& right,
                               std::uint64_t cap = kDefaultPacketSpaceCap) {
  const std::optional<std::uint64_t> size = schema.PacketSpaceSize();
  if (!size.has_value() || *size > cap) {
    throw Error(Stage::kCapacity, "packet space exceeds the cap of " +
                                      std::to_string(cap) + " packets");
  }
  for (const Packet& packet : schema.AllPackets()) {
    if (EvaluatePolicy(schema, left, packet) !=
        EvaluatePolicy(schema, right, packet)) {
      return false;
    }
  }
  return true;
}

// Printing. Binding strength, loosest first: `+`, `.`, postfix `*`, prefix
// `~`. Both binary operators associate to the left.

namespace internal {

enum PolicyPrecedence : int {
  kPrecUnion = 1,
  kPrecSeq = 2,
  kPrecStar = 3,
  kPrecNot = 4,
  kPrecAtom = 5,
};

inline int PrecedenceOf(const Predicate& p) {
  switch (p.kind()) {
    case Predicate::Kind::kOr:
      return kPrecUnion;
    case Predicate::Kind::kAnd:
      return kPrecSeq;
    case Predicate::Kind::kNot:
      return kPrecNot;
    default:
      return kPrecAtom;
  }
}

inline int PrecedenceOf(const Policy& p) {
  switch (p.kind()) {
    case Policy::Kind::kFilter:
      return PrecedenceOf(p.predicate());
    case Policy::Kind::kUnion:
      return kPrecUnion;
    case Policy::Kind::kSeq:
      return kPrecSeq;
    case Policy::Kind::kStar:
      return kPrecStar;
    case Policy::Kind::kAssign:
      return kPrecAtom;
  }
  return kPrecAtom;
}

template <typename Node, typename Print>
void PrintWrapped(std::string& out, const Node& node, int min_precedence,
                  Print&& print) {
  const bool wrap = PrecedenceOf(node) < min_precedence;
  if (wrap) out += "(";
  print(out, node);
  if (wrap) out += ")";
}

inline void PrintPredicate(std::string& out, const FieldSchema& schema,
                           const Predicate& p) {
  auto recurse = [&schema](std::string& o, const Predicate& q) {
    PrintPredicate(o, schema, q);
  };
  switch (p.kind()) {
    case Predicate::Kind::kZero:
      out += "zero";
      return;
    case Predicate::Kind::kOne:
      out += "one";
      return;
    case Predicate::Kind::kTest:
      out += schema.field(p.field()).name;
      out += "=";
      out += schema.ValueToken(p.field(), p.value());
      return;
    case Predicate::Kind::kNot:
      out += "~";
      PrintWrapped(out, p.operand(), kPrecNot, recurse);
      return;
    case Predicate::Kind::kOr:
    case Predicate::Kind::kAnd: {
      const int prec = PrecedenceOf(p);
      PrintWrapped(out, p.left(), prec, recurse);
      out += p.kind() == Predicate::Kind::kOr ? "+" : ".";
      PrintWrapped(out, p.right(), prec + 1, recurse);
      return;
    }
  }
}

inline void PrintPolicy(std::string& out, const FieldSchema& schema,
                        const Policy& p) {
  auto recurse = [&schema](std::string& o, const Policy& q) {
    PrintPolicy(o, schema, q);
  };
  switch (p.kind()) {
    case Policy::Kind::kFilter:
      PrintPredicate(out, schema, p.predicate());
      return;
    case Policy::Kind::kAssign:
      out += schema.field(p.field()).name;
      out += "<-";
      out += schema.ValueToken(p.field(), p.value());
      return;
    case Policy::Kind::kUnion:
    case Policy::Kind::kSeq: {
      const int prec = PrecedenceOf(p);
      PrintWrapped(out, p.left(), prec, recurse);
      out += p.kind() == Policy::Kind::kUnion ? "+" : ".";
      PrintWrapped(out, p.right(), prec + 1, recurse);
      return;
    }
    case Policy::Kind::kStar:
      PrintWrapped(out, p.operand(), kPrecStar, recurse);
      out += "*";
      return;
  }
}

}  // namespace internal

// Compact canonical rendering, e.g. `port=1.port<-2` or `(a=1+a=2)*`. Used in
// specification files, canonical state keys and transition labels alike.
inline std::string PredicateToString(const FieldSchema& schema,
                                     const Predicate& predicate) {
  std::string out;
  internal::PrintPredicate(out, schema, predicate);
  return out;
}

inline std::string PolicyToString(const FieldSchema& schema,
                                  const Policy& policy) {
  std::string out;
  internal::PrintPolicy(out, schema, policy);
  return out;
}

}  // namespace dynet
