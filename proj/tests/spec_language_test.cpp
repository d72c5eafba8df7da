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


#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "dynet/spec_language.hpp"
#include "oracles.hpp"

namespace dynet {
namespace {

constexpr const char* kMinimal = "fields { port: {1,2} }\ndef X = bot\ninit = X\n";

Stage StageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.stage();
  }
  ADD_FAILURE() << "no error raised";
  return Stage::kInternal;
}

std::string MessageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error raised";
  return "";
}

TEST(ParseSpecTest, RunningExample) {
  const NetworkSpec spec = testing::RunningExample();
  EXPECT_EQ(spec.definitions.size(), 9u);
  EXPECT_EQ(spec.named_packets.size(), 4u);
  EXPECT_EQ(spec.initial_queue, (std::vector<std::string>{"s1", "s3"}));
  EXPECT_EQ(spec.init, Term::Var("Init"));
  EXPECT_EQ(testing::ParallelComponents(spec, spec.init),
            (std::vector<std::string>{"C1", "C2", "S1", "S2"}));
  EXPECT_EQ(spec.Channels(),
            (std::set<std::string>{"NoVirtualCircuit", "VirtualCircuitEnd",
                                   "VirtualCircuitReq"}));
  EXPECT_FALSE(FindUnguardedCycle(spec).has_value());
}

TEST(ParseSpecTest, PrefixBindsTighterThanChoiceAndPar) {
  const NetworkSpec spec = testing::RunningExample();
  const Term* s1p = spec.FindDefinition("S1'");
  ASSERT_NE(s1p, nullptr);
  ASSERT_EQ(s1p->kind(), Term::Kind::kChoice);
  EXPECT_EQ(s1p->left().kind(), Term::Kind::kPolicy);
  EXPECT_EQ(PolicyToString(spec.schema, s1p->left().policy()), "port=1.port<-2");
  EXPECT_EQ(s1p->right().kind(), Term::Kind::kRecv);
}

TEST(ParseSpecTest, MinimalSpec) {
  const NetworkSpec spec = ParseSpec(kMinimal);
  ASSERT_EQ(spec.definitions.size(), 1u);
  EXPECT_EQ(spec.definitions[0].body, Term::Bot());
  EXPECT_TRUE(spec.initial_queue.empty());
}

TEST(ParseSpecTest, ReportsLocations) {
  EXPECT_EQ(MessageOf([] {
              ParseSpec("fields { port: {1,2} }\ndef X = Y\ninit = X\n");
            }),
            "parse: 2:9: unknown variable 'Y'");
  EXPECT_EQ(StageOf([] { ParseSpec("fields { port: {1,2} }\ninit = $\n"); }),
            Stage::kParse);
}

TEST(ParseSpecTest, RejectsMalformedInput) {
  const std::vector<std::string> bad = {
      "",
      "def X = bot init = X",
      "fields { port: {1,2} } def X = bot",
      "fields { port: {1,2} } def X = bot def X = bot init = X",
      "fields { port: {1,1} } def X = bot init = X",
      "fields { port: {1,2} } packets { a = {port:3} } def X = bot init = X",
      "fields { port: {1,2} } packets { a = {vlan:1} } def X = bot init = X",
      "fields { port: {1,2} } queue [ b ] def X = bot init = X",
      "fields { port: {1,2} } def X = (port = 5) ; X init = X",
      "fields { port: {1,2} } def X = A ! ; X init = X",
      "fields { port: {1,2} } def X = bot init = X init = X",
  };
  for (const std::string& text : bad) {
    EXPECT_THROW(ParseSpec(text), Error) << text;
  }
}

TEST(ParseSpecTest, UnguardedSpecParsesButFailsValidation) {
  const NetworkSpec spec =
      ParseSpec("fields { port: {1} }\ndef X = X (+) bot\ninit = X\n");
  EXPECT_EQ(FindUnguardedCycle(spec), (std::vector<std::string>{"X"}));
  EXPECT_EQ(StageOf([&] { ValidateGuardedness(spec); }), Stage::kValidation);
}

TEST(GuardednessTest, SelfLoop) {
  const NetworkSpec spec =
      ParseSpec("fields { port: {1} }\ndef X = X\ninit = X\n");
  EXPECT_EQ(FindUnguardedCycle(spec), (std::vector<std::string>{"X"}));
}

TEST(GuardednessTest, MutualCycle) {
  const NetworkSpec spec = ParseSpec(
      "fields { port: {1} }\ndef X = Y (+) N ! one ; X\ndef Y = X\ninit = X\n");
  EXPECT_EQ(FindUnguardedCycle(spec), (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(MessageOf([&] { ValidateGuardedness(spec); }),
            "validation: unguarded recursion: X -> Y -> X");
}

TEST(GuardednessTest, GuardedCycleAccepted) {
  const NetworkSpec spec = ParseSpec(
      "fields { port: {1} }\ndef X = N ! one ; Y\ndef Y = X\ninit = X\n");
  EXPECT_FALSE(FindUnguardedCycle(spec).has_value());
}

// Replaces the index-th prefix (pre-order) by its continuation.
Term DropPrefix(const Term& t, int& index) {
  switch (t.kind()) {
    case Term::Kind::kPolicy:
    case Term::Kind::kRecv:
    case Term::Kind::kSend:
      if (index-- == 0) return t.continuation();
      {
        Term rest = DropPrefix(t.continuation(), index);
        if (t.kind() == Term::Kind::kPolicy) return Term::PolicyPrefix(t.policy(), rest);
        if (t.kind() == Term::Kind::kRecv) return Term::Recv(t.channel(), t.policy(), rest);
        return Term::Send(t.channel(), t.policy(), rest);
      }
    case Term::Kind::kChoice: {
      Term l = DropPrefix(t.left(), index);
      return Term::Choice(l, DropPrefix(t.right(), index));
    }
    case Term::Kind::kPar: {
      Term l = DropPrefix(t.left(), index);
      return Term::Par(l, DropPrefix(t.right(), index));
    }
    default:
      return t;
  }
}

// Transitive closure of the "unguarded occurrence" relation.
bool HasUnguardedCycleOracle(const NetworkSpec& spec) {
  std::map<std::string, std::set<std::string>> reach;
  std::function<void(const Term&, std::set<std::string>&)> heads =
      [&](const Term& t, std::set<std::string>& out) {
        if (t.kind() == Term::Kind::kVar) out.insert(t.name());
        if (t.kind() == Term::Kind::kChoice || t.kind() == Term::Kind::kPar) {
          heads(t.left(), out);
          heads(t.right(), out);
        }
      };
  for (const Definition& d : spec.definitions) heads(d.body, reach[d.name]);
  for (const Definition& k : spec.definitions) {
    for (auto& [from, to] : reach) {
      if (to.count(k.name)) {
        const std::set<std::string> via = reach[k.name];
        to.insert(via.begin(), via.end());
      }
    }
  }
  for (const auto& [name, to] : reach) {
    if (to.count(name)) return true;
  }
  return false;
}

TEST(GuardednessTest, SinglePrefixMutationsOfRunningExample) {
  const NetworkSpec base = testing::RunningExample();
  int flagged = 0;
  for (std::size_t d = 0; d < base.definitions.size(); ++d) {
    for (int k = 0;; ++k) {
      int index = k;
      const Term mutated = DropPrefix(base.definitions[d].body, index);
      if (index >= 0) break;  // fewer than k+1 prefixes
      NetworkSpec spec = base;
      spec.definitions[d].body = mutated;
      const bool expected = HasUnguardedCycleOracle(spec);
      EXPECT_EQ(FindUnguardedCycle(spec).has_value(), expected)
          << base.definitions[d].name << " prefix " << k;
      flagged += expected ? 1 : 0;
    }
  }
  // C1's first branch and S1''s first branch are self-loops.
  EXPECT_GE(flagged, 2);
}

TEST(GuardednessTest, RandomSpecsAgreeWithOracle) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    NetworkSpec spec = testing::RandomSpec(rng);
    int index = static_cast<int>(rng() % 4);
    const std::size_t d = rng() % spec.definitions.size();
    spec.definitions[d].body = DropPrefix(spec.definitions[d].body, index);
    EXPECT_EQ(FindUnguardedCycle(spec).has_value(), HasUnguardedCycleOracle(spec))
        << PrettyPrint(spec);
  }
}

TEST(PrettyPrintTest, RoundTripsRunningExample) {
  const NetworkSpec spec = testing::RunningExample();
  const std::string printed = PrettyPrint(spec);
  const NetworkSpec reparsed = ParseSpec(printed);
  EXPECT_EQ(reparsed, spec);
  EXPECT_EQ(PrettyPrint(reparsed), printed);
}

TEST(PrettyPrintTest, RoundTripsRandomSpecs) {
  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) {
    const NetworkSpec spec = testing::RandomSpec(rng);
    const std::string printed = PrettyPrint(spec);
    EXPECT_EQ(ParseSpec(printed), spec) << printed;
  }
}

TEST(PrettyPrintTest, Terms) {
  const NetworkSpec spec = testing::RunningExample();
  EXPECT_EQ(TermToString(spec.schema, Term::Bot()), "bot");
  EXPECT_EQ(TermToString(spec.schema, *spec.FindDefinition("S1'")),
            "port=1.port<-2 ; S1' (+) VirtualCircuitEnd ? one ; S1");
  const Term nested = Term::Par(Term::Var("C1"), Term::Par(Term::Var("S1"), Term::Var("S2")));
  EXPECT_EQ(TermToString(spec.schema, nested), "C1 || (S1 || S2)");
  EXPECT_EQ(ParseTerm(TermToString(spec.schema, nested), spec), nested);
}

TEST(ParseTermTest, ChoiceIsNotFlattened) {
  const NetworkSpec spec = testing::RunningExample();
  const Term left = ParseTerm("(C1 (+) C2) (+) S1", spec);
  const Term right = ParseTerm("C1 (+) (C2 (+) S1)", spec);
  EXPECT_NE(left, right);
}

TEST(ParsePolicyTest, PredicatesAndPolicies) {
  const FieldSchema schema = testing::TwoFieldSchema();
  EXPECT_EQ(ParsePolicy("port = 1 . vlan <- b", schema),
            Policy::Seq(Policy::Filter(Predicate::Test(0, 0)), Policy::Assign(1, 1)));
  EXPECT_EQ(ParsePolicy("~(port = 1 + port = 2)", schema),
            Policy::Filter(Predicate::Not(
                Predicate::Or(Predicate::Test(0, 0), Predicate::Test(0, 1)))));
  EXPECT_THROW(ParsePolicy("~ port <- 1", schema), Error);
  EXPECT_THROW(ParsePolicy("port = 9", schema), Error);
}

TEST(ParsePolicyTest, RandomPoliciesRoundTripSemantically) {
  std::mt19937 rng(9);
  const FieldSchema schema = testing::TwoFieldSchema();
  for (int i = 0; i < 300; ++i) {
    const Policy p = testing::RandomPolicy(rng, schema, 3);
    const std::string text = PolicyToString(schema, p);
    const Policy q = ParsePolicy(text, schema);
    EXPECT_TRUE(PoliciesEquivalent(schema, p, q)) << text;
    EXPECT_EQ(PolicyToString(schema, q), PolicyToString(schema, ParsePolicy(
                                                             PolicyToString(schema, q),
                                                             schema)));
  }
}

TEST(ParseSpecTest, TruncatedInputsFailCleanly) {
  const std::string text = testing::RunningExampleText();
  for (std::size_t n = 0; n < text.size(); n += 3) {
    try {
      ParseSpec(text.substr(0, n));
    } catch (const Error&) {
    }
  }
  SUCCEED();
}

}  // namespace
}  // namespace dynet
