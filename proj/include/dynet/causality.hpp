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

// Counterfactual causes of hazards.
//
// The LTS is read as a finite automaton in which every state accepts and is
// multiplied with the hazard DFA. A cause is a shortest hazard witness whose
// every event is necessary (no proper subsequence is an executable, accepted
// word), decorated per position with contingencies: alternative enabled
// steps after which the hazard can no longer be reached at all.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynet/diagnostic.hpp"
#include "dynet/hazard.hpp"
#include "dynet/lts.hpp"
#include "dynet/spec_language.hpp"
#include "json.hpp"

namespace dynet {

struct ProductState {
  std::size_t lts_state;
  std::size_t dfa_state;

  friend auto operator<=>(const ProductState&, const ProductState&) = default;
};

struct ProductAutomaton {
  std::vector<ProductState> states;
  std::size_t initial = 0;
  std::vector<bool> accepting;
  // `label` indexes the LTS label alphabet (equal to the DFA alphabet).
  std::vector<Transition> transitions;
  std::vector<std::vector<std::size_t>> outgoing;

  std::size_t size() const { return states.size(); }
};

// Reachable part of LTS x DFA. Throws Error(kProduct) when the DFA was not
// compiled over exactly the LTS label alphabet.
inline ProductAutomaton BuildProduct(const NetworkSpec& spec, const Lts& lts,
                                     const HazardDfa& dfa) {
  if (dfa.alphabet != lts.labels) {
    std::string missing;
    for (const Label& l : lts.labels) {
      if (std::find(dfa.alphabet.begin(), dfa.alphabet.end(), l) ==
          dfa.alphabet.end()) {
        missing += " " + RenderLabel(spec, l);
      }
    }
    throw Error(Stage::kProduct,
                missing.empty()
                    ? "DFA alphabet differs from the LTS label alphabet"
                    : "DFA alphabet is missing LTS labels:" + missing);
  }
  ProductAutomaton product;
  std::map<ProductState, std::size_t> index;
  auto intern = [&](ProductState s) {
    auto [it, inserted] = index.emplace(s, product.states.size());
    if (inserted) {
      product.states.push_back(s);
      product.accepting.push_back(dfa.accepting[s.dfa_state]);
      product.outgoing.emplace_back();
    }
    return it->second;
  };
  product.initial = intern(ProductState{lts.initial, dfa.initial});
  for (std::size_t current = 0; current < product.states.size(); ++current) {
    const ProductState s = product.states[current];
    for (std::size_t t : lts.outgoing[s.lts_state]) {
      const Transition& edge = lts.transitions[t];
      const std::size_t to = intern(
          ProductState{edge.to, dfa.delta[s.dfa_state][edge.label]});
      product.outgoing[current].push_back(product.transitions.size());
      product.transitions.push_back(Transition{current, edge.label, to});
    }
  }
  return product;
}

inline constexpr std::size_t kUnreached =
    std::numeric_limits<std::size_t>::max();

// Shortest number of steps from the initial state.
inline std::vector<std::size_t> ForwardDistances(
    const ProductAutomaton& product) {
  std::vector<std::size_t> dist(product.size(), kUnreached);
  std::deque<std::size_t> queue{product.initial};
  dist[product.initial] = 0;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t t : product.outgoing[s]) {
      const std::size_t to = product.transitions[t].to;
      if (dist[to] == kUnreached) {
        dist[to] = dist[s] + 1;
        queue.push_back(to);
      }
    }
  }
  return dist;
}

// Shortest number of steps to an accepting state (kUnreached if none).
inline std::vector<std::size_t> DistancesToAccepting(
    const ProductAutomaton& product) {
  std::vector<std::vector<std::size_t>> incoming(product.size());
  for (const Transition& t : product.transitions) {
    incoming[t.to].push_back(t.from);
  }
  std::vector<std::size_t> dist(product.size(), kUnreached);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < product.size(); ++s) {
    if (product.accepting[s]) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    for (std::size_t from : incoming[s]) {
      if (dist[from] == kUnreached) {
        dist[from] = dist[s] + 1;
        queue.push_back(from);
      }
    }
  }
  return dist;
}

struct Witness {
  std::vector<std::size_t> states;  // product states, one more than `word`
  std::vector<std::size_t> word;    // LTS label ids
};

enum class Verdict { kHazardUnreachable, kCausesFound, kWitnessBoundExceeded };

inline std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kHazardUnreachable:
      return "hazard-unreachable";
    case Verdict::kCausesFound:
      return "causes-found";
    case Verdict::kWitnessBoundExceeded:
      return "witness-bound-exceeded";
  }
  return "hazard-unreachable";
}

struct WitnessSearch {
  Verdict verdict = Verdict::kHazardUnreachable;
  std::size_t shortest_length = 0;  // meaningful unless unreachable
  std::vector<Witness> witnesses;
};

// All paths of the shortest accepted length L*. Such paths never revisit a
// product state (cutting the loop would give a shorter accepted word), and
// the state at step i lies exactly i steps from the start and L* - i steps
// from acceptance, which is what the search follows.
inline WitnessSearch EnumerateWitnesses(const ProductAutomaton& product,
                                        std::size_t max_len) {
  WitnessSearch result;
  const std::vector<std::size_t> to_accept = DistancesToAccepting(product);
  const std::size_t shortest = to_accept[product.initial];
  if (shortest == kUnreached) return result;
  result.shortest_length = shortest;
  if (shortest > max_len) {
    result.verdict = Verdict::kWitnessBoundExceeded;
    return result;
  }
  result.verdict = Verdict::kCausesFound;

  Witness path;
  path.states.push_back(product.initial);
  auto extend = [&](auto&& self) -> void {
    const std::size_t depth = path.word.size();
    const std::size_t s = path.states.back();
    if (depth == shortest) {
      result.witnesses.push_back(path);
      return;
    }
    for (std::size_t t : product.outgoing[s]) {
      const Transition& edge = product.transitions[t];
      if (to_accept[edge.to] != shortest - depth - 1) continue;
      path.states.push_back(edge.to);
      path.word.push_back(edge.label);
      self(self);
      path.states.pop_back();
      path.word.pop_back();
    }
  };
  extend(extend);
  return result;
}

// Whether some run of the product reads `word` from the initial state and
// ends in an accepting state.
inline bool AcceptsWord(const ProductAutomaton& product,
                        const std::vector<std::size_t>& word) {
  std::set<std::size_t> current{product.initial};
  for (std::size_t label : word) {
    std::set<std::size_t> next;
    for (std::size_t s : current) {
      for (std::size_t t : product.outgoing[s]) {
        if (product.transitions[t].label == label) {
          next.insert(product.transitions[t].to);
        }
      }
    }
    if (next.empty()) return false;
    current = std::move(next);
  }
  return std::any_of(current.begin(), current.end(),
                     [&](std::size_t s) { return product.accepting[s]; });
}

// True iff no proper subsequence of the witness word is executable and
// accepted. Explores single deletions recursively; subsequences shorter than
// the shortest accepted word are skipped since they cannot be accepted.
inline bool CounterfactualCheck(const Witness& witness,
                                const ProductAutomaton& product) {
  const std::size_t shortest =
      DistancesToAccepting(product)[product.initial];
  if (shortest == kUnreached) return true;
  std::set<std::vector<std::size_t>> visited;
  std::vector<std::vector<std::size_t>> work{witness.word};
  while (!work.empty()) {
    const std::vector<std::size_t> word = std::move(work.back());
    work.pop_back();
    if (word.empty() || word.size() - 1 < shortest) continue;
    for (std::size_t i = 0; i < word.size(); ++i) {
      std::vector<std::size_t> shorter = word;
      shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(i));
      if (!visited.insert(shorter).second) continue;
      if (AcceptsWord(product, shorter)) return false;
      work.push_back(std::move(shorter));
    }
  }
  return true;
}

struct Contingency {
  std::size_t label;   // LTS label id
  std::size_t target;  // product state after taking it

  friend auto operator<=>(const Contingency&, const Contingency&) = default;
};

// Per position i (state before word[i]) the enabled alternatives whose target
// cannot reach acceptance; position n (after the last label) lists every
// such successor of the final state.
inline std::vector<std::vector<Contingency>> ComputeContingencies(
    const Witness& witness, const ProductAutomaton& product,
    const std::vector<std::size_t>& to_accept) {
  std::vector<std::vector<Contingency>> out(witness.word.size() + 1);
  for (std::size_t i = 0; i < witness.states.size(); ++i) {
    const std::size_t s = witness.states[i];
    for (std::size_t t : product.outgoing[s]) {
      const Transition& edge = product.transitions[t];
      if (i < witness.word.size() && edge.label == witness.word[i] &&
          edge.to == witness.states[i + 1]) {
        continue;
      }
      if (to_accept[edge.to] == kUnreached) {
        out[i].push_back(Contingency{edge.label, edge.to});
      }
    }
  }
  return out;
}

inline std::vector<std::vector<Contingency>> ComputeContingencies(
    const Witness& witness, const ProductAutomaton& product) {
  return ComputeContingencies(witness, product, DistancesToAccepting(product));
}

struct Cause {
  std::vector<std::string> word;
  // One set per position, the last one after the final label. Each set holds
  // distinct rendered labels in sorted order.
  std::vector<std::vector<std::string>> contingencies;

  friend auto operator<=>(const Cause&, const Cause&) = default;
};

struct CauseReport {
  std::string hazard;
  Anchor anchor = Anchor::kAnywhere;
  std::size_t lts_states = 0;
  std::size_t lts_transitions = 0;
  std::size_t witnesses = 0;
  std::size_t shortest_length = 0;
  Verdict verdict = Verdict::kHazardUnreachable;
  std::vector<Cause> causes;
};

struct CauseOptions {
  Anchor anchor = Anchor::kAnywhere;
  SyncMatch sync_match = SyncMatch::kSyntactic;
  std::size_t max_states = kDefaultMaxStates;
  // Defaults to the number of product states.
  std::optional<std::size_t> max_len;
};

// Every intermediate artefact of one run, for inspection and testing.
struct Analysis {
  Lts lts;
  HazardExpr hazard;    // as written
  HazardExpr anchored;  // as matched against whole traces
  HazardDfa dfa;
  ProductAutomaton product;
  WitnessSearch search;
  std::vector<Witness> causal_witnesses;
  CauseReport report;
};

inline std::vector<std::string> RenderWord(const NetworkSpec& spec,
                                           const Lts& lts,
                                           const std::vector<std::size_t>& word) {
  std::vector<std::string> out;
  for (std::size_t label : word) {
    out.push_back(RenderLabel(spec, lts.labels[label]));
  }
  return out;
}

// parse hazard -> build LTS -> compile DFA -> product -> shortest witnesses
// -> counterfactual filter -> contingencies. Errors propagate with their
// stage. Causes are distinct decorated traces sorted by word.
inline Analysis Analyze(const NetworkSpec& spec, std::string_view hazard_text,
                        const CauseOptions& options = {}) {
  Analysis a;
  a.lts = BuildLts(spec, LtsOptions{options.max_states, options.sync_match});
  a.hazard = ParseHazard(hazard_text, spec);
  a.anchored = Anchored(a.hazard, options.anchor);
  a.dfa = CompileDfa(a.anchored, a.lts.labels);
  a.product = BuildProduct(spec, a.lts, a.dfa);
  a.search =
      EnumerateWitnesses(a.product, options.max_len.value_or(a.product.size()));

  CauseReport& report = a.report;
  std::string_view trimmed = hazard_text;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
    trimmed.remove_prefix(1);
  }
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
    trimmed.remove_suffix(1);
  }
  report.hazard = std::string(trimmed);
  report.anchor = options.anchor;
  report.lts_states = a.lts.states.size();
  report.lts_transitions = a.lts.transitions.size();
  report.witnesses = a.search.witnesses.size();
  report.shortest_length = a.search.shortest_length;
  report.verdict = a.search.verdict;

  const std::vector<std::size_t> to_accept = DistancesToAccepting(a.product);
  std::set<Cause> causes;
  for (const Witness& w : a.search.witnesses) {
    if (!CounterfactualCheck(w, a.product)) continue;
    a.causal_witnesses.push_back(w);
    Cause cause;
    cause.word = RenderWord(spec, a.lts, w.word);
    for (const auto& position : ComputeContingencies(w, a.product, to_accept)) {
      std::set<std::string> labels;
      for (const Contingency& c : position) {
        labels.insert(RenderLabel(spec, a.lts.labels[c.label]));
      }
      cause.contingencies.emplace_back(labels.begin(), labels.end());
    }
    causes.insert(std::move(cause));
  }
  report.causes.assign(causes.begin(), causes.end());
  return a;
}

inline CauseReport ComputeCauses(const NetworkSpec& spec,
                                 std::string_view hazard_text,
                                 const CauseOptions& options = {}) {
  return Analyze(spec, hazard_text, options).report;
}

inline std::string CauseReportToJson(const CauseReport& report) {
  nlohmann::ordered_json out;
  out["verdict"] = std::string(VerdictName(report.verdict));
  out["hazard"] = report.hazard;
  out["anchor"] = std::string(AnchorName(report.anchor));
  out["lts"] = {{"states", report.lts_states},
                {"transitions", report.lts_transitions}};
  out["witnesses"] = report.witnesses;
  out["causes"] = nlohmann::ordered_json::array();
  for (const Cause& c : report.causes) {
    nlohmann::ordered_json cause;
    cause["word"] = c.word;
    cause["contingencies"] = c.contingencies;
    out["causes"].push_back(std::move(cause));
  }
  return out.dump(2) + "\n";
}

// `{w0} a0 {w1} a1 ... an {wn}` with empty sets shown as `·`.
inline std::string DecoratedTrace(const Cause& cause) {
  auto render_set = [](const std::vector<std::string>& set) {
    if (set.empty()) return std::string("·");
    std::string out = "{";
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i > 0) out += ",";
      out += set[i];
    }
    return out + "}";
  };
  std::string out;
  for (std::size_t i = 0; i < cause.word.size(); ++i) {
    out += render_set(cause.contingencies.at(i)) + " " + cause.word[i] + " ";
  }
  out += render_set(cause.contingencies.back());
  return out;
}

inline std::string CauseReportToText(const CauseReport& report) {
  std::string out;
  out += "verdict: " + std::string(VerdictName(report.verdict)) + "\n";
  out += "hazard: " + report.hazard + "\n";
  out += "anchor: " + std::string(AnchorName(report.anchor)) + "\n";
  out += "lts: " + std::to_string(report.lts_states) + " states, " +
         std::to_string(report.lts_transitions) + " transitions\n";
  if (report.verdict != Verdict::kHazardUnreachable) {
    out += "shortest witness: " + std::to_string(report.shortest_length) +
           " labels\n";
  }
  out += "witnesses: " + std::to_string(report.witnesses) + "\n";
  out += "causes: " + std::to_string(report.causes.size()) + "\n";
  for (std::size_t i = 0; i < report.causes.size(); ++i) {
    out += "  " + std::to_string(i + 1) + ". " +
           DecoratedTrace(report.causes[i]) + "\n";
  }
  return out;
}

}  // namespace dynet
