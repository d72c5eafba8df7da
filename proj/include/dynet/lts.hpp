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

// Operational semantics of DyNetKAT terms over a pair of global packet queues,
// and breadth-first construction of the reachable labelled transition system.
//
// A configuration is (term, input queue, output queue). The rules:
//
//   process      N ; D with input head s: for each s' in N(s), label (s,s'),
//                the head is consumed and s' is pushed on the output queue.
//   receive      x?N ; D  --x?N-->  D
//   send         x!N ; D  --x!N-->  D
//   choice       D1 (+) D2 moves as D1 or as D2; the other branch is dropped.
//   interleave   D1 || D2 moves as D1 (or D2) with the other side unchanged.
//   communicate  a send x!N of one side and a receive x?N' of the other with
//                matching N, N' yield <x,N> and both sides advance.
//   unfold       a definition name moves as its body.
//   bot          no moves.
//
// Free sends and receives stay observable next to the synchronisations.
// Synchronisation is binary.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dynet/diagnostic.hpp"
#include "dynet/netkat.hpp"
#include "dynet/spec_language.hpp"
#include "json.hpp"

namespace dynet {

struct Label {
  enum class Kind { kProc, kSend, kRecv, kSync };

  Kind kind = Kind::kProc;
  Packet in;
  Packet out;
  std::string channel;
  Policy policy;

  static Label Proc(Packet in, Packet out) {
    return Label{Kind::kProc, std::move(in), std::move(out), {}, {}};
  }
  static Label Send(std::string channel, Policy policy) {
    return Label{Kind::kSend, {}, {}, std::move(channel), std::move(policy)};
  }
  static Label Recv(std::string channel, Policy policy) {
    return Label{Kind::kRecv, {}, {}, std::move(channel), std::move(policy)};
  }
  static Label Sync(std::string channel, Policy policy) {
    return Label{Kind::kSync, {}, {}, std::move(channel), std::move(policy)};
  }

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;
};

inline std::string_view LabelKindName(Label::Kind kind) {
  switch (kind) {
    case Label::Kind::kProc:
      return "proc";
    case Label::Kind::kSend:
      return "send";
    case Label::Kind::kRecv:
      return "recv";
    case Label::Kind::kSync:
      return "sync";
  }
  return "proc";
}

// Hazard-atom syntax: `proc(s1,s2)`, `send(X,one)`, `recv(X,one)`,
// `sync(X,one)`.
inline std::string RenderLabel(const NetworkSpec& spec, const Label& label) {
  std::string out(LabelKindName(label.kind));
  out += "(";
  if (label.kind == Label::Kind::kProc) {
    out += spec.RenderPacket(label.in) + "," + spec.RenderPacket(label.out);
  } else {
    out += label.channel + "," + PolicyToString(spec.schema, label.policy);
  }
  out += ")";
  return out;
}

struct Configuration {
  Term term;
  std::vector<Packet> input;   // front is processed next
  std::vector<Packet> output;  // front is the most recent packet

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline std::string RenderQueue(const NetworkSpec& spec,
                               const std::vector<Packet>& queue) {
  std::string out = "[";
  for (std::size_t i = 0; i < queue.size(); ++i) {
    if (i > 0) out += ",";
    out += spec.RenderPacket(queue[i]);
  }
  out += "]";
  return out;
}

// `(C1 || S1) | in:[s1,s3] | out:[]`. Operand order is kept as written and
// definition names are not expanded, so equal keys mean equal configurations.
inline std::string CanonicalKey(const NetworkSpec& spec,
                                const Configuration& config) {
  return "(" + TermToString(spec.schema, config.term) +
         ") | in:" + RenderQueue(spec, config.input) +
         " | out:" + RenderQueue(spec, config.output);
}

enum class SyncMatch { kSyntactic, kSemantic };

struct Successor {
  Label label;
  Configuration next;
};

namespace internal {

struct Move {
  Label label;
  Term next;
  std::optional<Packet> produced;  // set iff the move consumes the input head
};

class Stepper {
 public:
  Stepper(const NetworkSpec& spec, SyncMatch sync_match)
      : spec_(spec), sync_match_(sync_match) {}

  std::vector<Move> Moves(const Term& term, const Packet* head) {
    std::vector<Move> out;
    Collect(term, head, out);
    return out;
  }

 private:
  bool PoliciesMatch(const Policy& a, const Policy& b) {
    if (a == b) return true;
    if (sync_match_ == SyncMatch::kSyntactic) return false;
    return PoliciesEquivalent(spec_.schema, a, b);
  }

  void Collect(const Term& term, const Packet* head, std::vector<Move>& out) {
    switch (term.kind()) {
      case Term::Kind::kBot:
        return;
      case Term::Kind::kPolicy:
        if (head == nullptr) return;
        for (const Packet& result :
             EvaluatePolicy(spec_.schema, term.policy(), *head)) {
          out.push_back(
              Move{Label::Proc(*head, result), term.continuation(), result});
        }
        return;
      case Term::Kind::kRecv:
        out.push_back(Move{Label::Recv(term.channel(), term.policy()),
                           term.continuation(), std::nullopt});
        return;
      case Term::Kind::kSend:
        out.push_back(Move{Label::Send(term.channel(), term.policy()),
                           term.continuation(), std::nullopt});
        return;
      case Term::Kind::kChoice:
        Collect(term.left(), head, out);
        Collect(term.right(), head, out);
        return;
      case Term::Kind::kVar: {
        const Term* body = spec_.FindDefinition(term.name());
        if (body == nullptr) {
          throw Error(Stage::kInternal,
                      "unbound variable '" + term.name() + "'");
        }
        Collect(*body, head, out);
        return;
      }
      case Term::Kind::kPar: {
        std::vector<Move> left;
        std::vector<Move> right;
        Collect(term.left(), head, left);
        Collect(term.right(), head, right);
        for (const Move& m : left) {
          out.push_back(Move{m.label, Term::Par(m.next, term.right()),
                             m.produced});
        }
        for (const Move& m : right) {
          out.push_back(Move{m.label, Term::Par(term.left(), m.next),
                             m.produced});
        }
        for (const Move& l : left) {
          for (const Move& r : right) {
            const Move* send = nullptr;
            const Move* recv = nullptr;
            if (l.label.kind == Label::Kind::kSend &&
                r.label.kind == Label::Kind::kRecv) {
              send = &l;
              recv = &r;
            } else if (l.label.kind == Label::Kind::kRecv &&
                       r.label.kind == Label::Kind::kSend) {
              send = &r;
              recv = &l;
            } else {
              continue;
            }
            if (send->label.channel != recv->label.channel ||
                !PoliciesMatch(send->label.policy, recv->label.policy)) {
              continue;
            }
            out.push_back(
                Move{Label::Sync(send->label.channel, send->label.policy),
                     Term::Par(l.next, r.next), std::nullopt});
          }
        }
        return;
      }
    }
  }

  const NetworkSpec& spec_;
  SyncMatch sync_match_;
};

}  // namespace internal

// All successors of `config`, duplicate-free, in rule order (interleavings
// of the left operand, of the right operand, then synchronisations) with
// processed packets in packet order.
inline std::vector<Successor> Step(const NetworkSpec& spec,
                                   const Configuration& config,
                                   SyncMatch sync_match = SyncMatch::kSyntactic) {
  internal::Stepper stepper(spec, sync_match);
  const Packet* head = config.input.empty() ? nullptr : &config.input.front();
  std::vector<Successor> out;
  std::set<std::pair<Label, Configuration>> seen;
  for (internal::Move& move : stepper.Moves(config.term, head)) {
    Configuration next{std::move(move.next), config.input, config.output};
    if (move.produced.has_value()) {
      next.input.erase(next.input.begin());
      next.output.insert(next.output.begin(), *move.produced);
    }
    if (seen.emplace(move.label, next).second) {
      out.push_back(Successor{std::move(move.label), std::move(next)});
    }
  }
  return out;
}

struct Transition {
  std::size_t from;
  std::size_t label;  // index into Lts::labels
  std::size_t to;

  friend auto operator<=>(const Transition&, const Transition&) = default;
};

// States are numbered in breadth-first discovery order; labels in order of
// first use.
struct Lts {
  std::vector<Configuration> states;
  std::vector<std::string> keys;
  std::size_t initial = 0;
  std::vector<Label> labels;
  std::vector<Transition> transitions;
  // Transition indices leaving each state.
  std::vector<std::vector<std::size_t>> outgoing;

  std::optional<std::size_t> FindLabel(const Label& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return i;
    }
    return std::nullopt;
  }
};

inline constexpr std::size_t kDefaultMaxStates = 100'000;

struct LtsOptions {
  std::size_t max_states = kDefaultMaxStates;
  SyncMatch sync_match = SyncMatch::kSyntactic;
};

inline Configuration InitialConfiguration(const NetworkSpec& spec) {
  return Configuration{spec.init, spec.InitialQueuePackets(), {}};
}

// Validates guardedness, then explores from (init, queue, []). Throws
// Error(kBudget) once more than `max_states` states are discovered.
inline Lts BuildLts(const NetworkSpec& spec, const LtsOptions& options = {}) {
  ValidateGuardedness(spec);
  Lts lts;
  std::unordered_map<std::string, std::size_t> index;
  std::map<Label, std::size_t> label_index;

  auto intern = [&](Configuration config) -> std::size_t {
    std::string key = CanonicalKey(spec, config);
    auto [it, inserted] = index.emplace(key, lts.states.size());
    if (inserted) {
      lts.states.push_back(std::move(config));
      lts.keys.push_back(std::move(key));
      lts.outgoing.emplace_back();
    }
    return it->second;
  };

  lts.initial = intern(InitialConfiguration(spec));
  for (std::size_t current = 0; current < lts.states.size(); ++current) {
    for (Successor& s : Step(spec, lts.states[current], options.sync_match)) {
      const std::size_t to = intern(std::move(s.next));
      if (lts.states.size() > options.max_states) {
        throw Error(Stage::kBudget,
                    "state budget of " + std::to_string(options.max_states) +
                        " exceeded (frontier: " +
                        std::to_string(lts.states.size() - current) +
                        " states)");
      }
      auto [it, inserted] =
          label_index.emplace(s.label, lts.labels.size());
      if (inserted) lts.labels.push_back(s.label);
      lts.outgoing[current].push_back(lts.transitions.size());
      lts.transitions.push_back(Transition{current, it->second, to});
    }
  }
  return lts;
}

// Violations of queue conservation: a process step moves exactly the input
// head to the front of the output queue (possibly rewritten), every other
// step leaves both queues untouched. Empty when the LTS is consistent.
inline std::vector<std::string> AuditQueueConservation(const Lts& lts) {
  std::vector<std::string> problems;
  for (const Transition& t : lts.transitions) {
    const Configuration& from = lts.states[t.from];
    const Configuration& to = lts.states[t.to];
    const Label& label = lts.labels[t.label];
    bool ok;
    if (label.kind == Label::Kind::kProc) {
      ok = !from.input.empty() && to.input.size() + 1 == from.input.size() &&
           to.output.size() == from.output.size() + 1 &&
           from.input.front() == label.in &&
           to.output.front() == label.out &&
           std::equal(to.input.begin(), to.input.end(),
                      from.input.begin() + 1) &&
           std::equal(from.output.begin(), from.output.end(),
                      to.output.begin() + 1);
    } else {
      ok = from.input == to.input && from.output == to.output;
    }
    if (!ok) {
      problems.push_back("n" + std::to_string(t.from) + " -> n" +
                         std::to_string(t.to));
    }
  }
  return problems;
}

// States reachable from the initial state by reading `word`.
inline std::set<std::size_t> ReplayWord(const Lts& lts,
                                        const std::vector<Label>& word) {
  std::set<std::size_t> current{lts.initial};
  for (const Label& label : word) {
    const std::optional<std::size_t> id = lts.FindLabel(label);
    if (!id.has_value()) return {};
    std::set<std::size_t> next;
    for (std::size_t s : current) {
      for (std::size_t t : lts.outgoing[s]) {
        if (lts.transitions[t].label == *id) next.insert(lts.transitions[t].to);
      }
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

// ---------------------------------------------------------------------------
// Export

namespace internal {

inline std::string DotEscape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Integers print as JSON numbers, every other token as a string.
inline nlohmann::ordered_json ValueToJson(const std::string& token) {
  const bool canonical_integer =
      !token.empty() && token.size() <= 9 &&
      std::all_of(token.begin(), token.end(),
                  [](char c) { return c >= '0' && c <= '9'; }) &&
      (token == "0" || token[0] != '0');
  if (canonical_integer) return std::stoi(token);
  return token;
}

inline nlohmann::ordered_json PacketToJson(const FieldSchema& schema,
                                           const Packet& packet) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out[schema.field(i).name] =
        ValueToJson(schema.ValueToken(i, packet.values.at(i)));
  }
  return out;
}

inline Packet PacketFromJson(const FieldSchema& schema,
                             const nlohmann::ordered_json& j) {
  if (!j.is_object() || j.size() != schema.size()) {
    throw Error(Stage::kParse, "malformed packet object");
  }
  Packet packet{std::vector<std::uint32_t>(schema.size(), 0)};
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const std::string& name = schema.field(i).name;
    if (!j.contains(name)) {
      throw Error(Stage::kParse, "packet object is missing field '" + name +
                                     "'");
    }
    const auto& v = j.at(name);
    const std::string token =
        v.is_string() ? v.get<std::string>() : v.dump();
    const std::optional<std::uint32_t> value = schema.FindValue(i, token);
    if (!value.has_value()) {
      throw Error(Stage::kParse, "value '" + token +
                                     "' is not in the domain of '" + name +
                                     "'");
    }
    packet.values[i] = *value;
  }
  return packet;
}

}  // namespace internal

inline nlohmann::ordered_json LabelToJson(const NetworkSpec& spec,
                                          const Label& label) {
  nlohmann::ordered_json out;
  out["kind"] = std::string(LabelKindName(label.kind));
  if (label.kind == Label::Kind::kProc) {
    out["in"] = internal::PacketToJson(spec.schema, label.in);
    out["out"] = internal::PacketToJson(spec.schema, label.out);
  } else {
    out["channel"] = label.channel;
    out["policy"] = PolicyToString(spec.schema, label.policy);
  }
  out["text"] = RenderLabel(spec, label);
  return out;
}

inline Label LabelFromJson(const NetworkSpec& spec,
                           const nlohmann::ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "proc") {
    return Label::Proc(internal::PacketFromJson(spec.schema, j.at("in")),
                       internal::PacketFromJson(spec.schema, j.at("out")));
  }
  std::string channel = j.at("channel").get<std::string>();
  Policy policy = ParsePolicy(j.at("policy").get<std::string>(), spec.schema);
  if (kind == "send") return Label::Send(std::move(channel), std::move(policy));
  if (kind == "recv") return Label::Recv(std::move(channel), std::move(policy));
  if (kind == "sync") return Label::Sync(std::move(channel), std::move(policy));
  throw Error(Stage::kParse, "unknown label kind '" + kind + "'");
}

inline nlohmann::ordered_json LtsToJson(const NetworkSpec& spec,
                                        const Lts& lts) {
  nlohmann::ordered_json out;
  out["states"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    const Configuration& c = lts.states[i];
    nlohmann::ordered_json state;
    state["id"] = i;
    state["term"] = TermToString(spec.schema, c.term);
    state["in"] = nlohmann::ordered_json::array();
    for (const Packet& p : c.input) {
      state["in"].push_back(internal::PacketToJson(spec.schema, p));
    }
    state["out"] = nlohmann::ordered_json::array();
    for (const Packet& p : c.output) {
      state["out"].push_back(internal::PacketToJson(spec.schema, p));
    }
    out["states"].push_back(std::move(state));
  }
  out["initial"] = lts.initial;
  out["transitions"] = nlohmann::ordered_json::array();
  for (const Transition& t : lts.transitions) {
    nlohmann::ordered_json edge;
    edge["from"] = t.from;
    edge["label"] = LabelToJson(spec, lts.labels[t.label]);
    edge["to"] = t.to;
    out["transitions"].push_back(std::move(edge));
  }
  return out;
}

inline std::string ExportJson(const NetworkSpec& spec, const Lts& lts) {
  return LtsToJson(spec, lts).dump(2) + "\n";
}

// Rebuilds an LTS from its JSON export; terms and policies are re-parsed
// against `spec`.
inline Lts ImportJson(const NetworkSpec& spec, std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Stage::kParse, std::string("invalid JSON: ") + e.what());
  }
  Lts lts;
  try {
    for (const auto& state : j.at("states")) {
      Configuration c;
      c.term = ParseTerm(state.at("term").get<std::string>(), spec);
      for (const auto& p : state.at("in")) {
        c.input.push_back(internal::PacketFromJson(spec.schema, p));
      }
      for (const auto& p : state.at("out")) {
        c.output.push_back(internal::PacketFromJson(spec.schema, p));
      }
      lts.keys.push_back(CanonicalKey(spec, c));
      lts.states.push_back(std::move(c));
      lts.outgoing.emplace_back();
    }
    lts.initial = j.at("initial").get<std::size_t>();
    std::map<Label, std::size_t> label_index;
    for (const auto& edge : j.at("transitions")) {
      Label label = LabelFromJson(spec, edge.at("label"));
      auto [it, inserted] = label_index.emplace(label, lts.labels.size());
      if (inserted) lts.labels.push_back(std::move(label));
      const std::size_t from = edge.at("from").get<std::size_t>();
      const std::size_t to = edge.at("to").get<std::size_t>();
      if (from >= lts.states.size() || to >= lts.states.size()) {
        throw Error(Stage::kParse, "transition refers to an unknown state");
      }
      lts.outgoing[from].push_back(lts.transitions.size());
      lts.transitions.push_back(Transition{from, it->second, to});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Stage::kParse, std::string("malformed LTS JSON: ") + e.what());
  }
  return lts;
}

inline std::string ExportDot(const NetworkSpec& spec, const Lts& lts) {
  std::string out = "digraph lts {\n";
  out += "  init [shape=point];\n";
  out += "  init -> n" + std::to_string(lts.initial) + ";\n";
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=\"" +
           internal::DotEscape(lts.keys[i]) + "\"];\n";
  }
  for (const Transition& t : lts.transitions) {
    out += "  n" + std::to_string(t.from) + " -> n" + std::to_string(t.to) +
           " [label=\"" +
           internal::DotEscape(RenderLabel(spec, lts.labels[t.label])) +
           "\"];\n";
  }
  out += "}\n";
  return out;
}

// One line per state and transition; for terminals.
inline std::string ExportText(const NetworkSpec& spec, const Lts& lts) {
  std::string out = "states: " + std::to_string(lts.states.size()) +
                    ", transitions: " +
                    std::to_string(lts.transitions.size()) + ", initial: n" +
                    std::to_string(lts.initial) + "\n";
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    out += "n" + std::to_string(i) + ": " + lts.keys[i] + "\n";
  }
  for (const Transition& t : lts.transitions) {
    out += "n" + std::to_string(t.from) + " --" +
           RenderLabel(spec, lts.labels[t.label]) + "--> n" +
           std::to_string(t.to) + "\n";
  }
  return out;
}

}  // namespace dynet
