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


#include <random>
#include <set>

#include <gtest/gtest.h>

#include "dynet/netkat.hpp"
#include "oracles.hpp"

namespace dynet {
namespace {

FieldSchema PortSchema() {
  return FieldSchema::Create({{"port", {"1", "2", "3", "4"}}});
}

Packet Port(std::uint32_t index) { return Packet{{index}}; }

TEST(FieldSchemaTest, RejectsMalformedSchemas) {
  EXPECT_THROW(FieldSchema::Create({{"port", {}}}), Error);
  EXPECT_THROW(FieldSchema::Create({{"port", {"1"}}, {"port", {"2"}}}), Error);
  EXPECT_THROW(FieldSchema::Create({{"port", {"1", "1"}}}), Error);
}

TEST(FieldSchemaTest, EnumeratesPacketSpace) {
  const FieldSchema schema = testing::TwoFieldSchema();
  EXPECT_EQ(schema.PacketSpaceSize(), 6u);
  const std::vector<Packet> all = schema.AllPackets();
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(std::set<Packet>(all.begin(), all.end()).size(), 6u);
  EXPECT_EQ(PacketToString(schema, all.front()), "{port:1,vlan:a}");
}

TEST(PredicateTest, EvaluatesTests) {
  const FieldSchema schema = PortSchema();
  EXPECT_TRUE(EvaluatePredicate(schema, Predicate::Test(0, 0), Port(0)));
  EXPECT_FALSE(EvaluatePredicate(schema, Predicate::Test(0, 0), Port(1)));
  EXPECT_TRUE(EvaluatePredicate(
      schema, Predicate::Not(Predicate::Test(0, 0)), Port(1)));
  EXPECT_FALSE(EvaluatePredicate(schema, Predicate::Zero(), Port(1)));
  EXPECT_TRUE(EvaluatePredicate(schema, Predicate::One(), Port(1)));
}

TEST(PredicateTest, RejectsNonConformingPacket) {
  const FieldSchema schema = PortSchema();
  EXPECT_THROW(EvaluatePredicate(schema, Predicate::One(), Packet{{7}}), Error);
  EXPECT_THROW(EvaluatePredicate(schema, Predicate::One(), Packet{{0, 0}}), Error);
  EXPECT_THROW(EvaluatePredicate(schema, Predicate::Test(0, 9), Port(0)), Error);
}

TEST(PolicyTest, FilterThenAssign) {
  const FieldSchema schema = PortSchema();
  const Policy p = Policy::Seq(Policy::Filter(Predicate::Test(0, 0)),
                               Policy::Assign(0, 1));
  EXPECT_EQ(EvaluatePolicy(schema, p, Port(0)), PacketSet{Port(1)});
  EXPECT_EQ(EvaluatePolicy(schema, p, Port(2)), PacketSet{});
}

TEST(PolicyTest, DropAndSkip) {
  const FieldSchema schema = PortSchema();
  EXPECT_TRUE(EvaluatePolicy(schema, Policy::Drop(), Port(0)).empty());
  EXPECT_EQ(EvaluatePolicy(schema, Policy::Skip(), Port(3)), PacketSet{Port(3)});
}

TEST(PolicyTest, StarCollectsAllIterations) {
  const FieldSchema schema = PortSchema();
  const Policy star = Policy::Star(Policy::Assign(0, 1));
  EXPECT_EQ(EvaluatePolicy(schema, star, Port(0)),
            (PacketSet{Port(0), Port(1)}));
}

TEST(PolicyTest, UnionOfTwoAssignments) {
  const FieldSchema schema = PortSchema();
  const Policy p = Policy::Union(Policy::Assign(0, 1), Policy::Assign(0, 2));
  EXPECT_EQ(EvaluatePolicy(schema, p, Port(0)), (PacketSet{Port(1), Port(2)}));
}

// Star agrees with the union of the first |packet space| powers.
TEST(PolicyTest, StarReachesFixpointWithinPacketSpace) {
  std::mt19937 rng(7);
  const FieldSchema schema = testing::TwoFieldSchema();
  const std::size_t space = *schema.PacketSpaceSize();
  for (int i = 0; i < 200; ++i) {
    const Policy p = testing::RandomPolicy(rng, schema, 2);
    const Packet start = testing::RandomPacket(rng, schema);
    PacketSet frontier{start};
    PacketSet all{start};
    for (std::size_t k = 0; k < space; ++k) {
      PacketSet next;
      for (const Packet& packet : frontier) {
        for (const Packet& out : EvaluatePolicy(schema, p, packet)) next.insert(out);
      }
      all.insert(next.begin(), next.end());
      frontier = std::move(next);
    }
    EXPECT_EQ(EvaluatePolicy(schema, Policy::Star(p), start), all)
        << PolicyToString(schema, p);
  }
}

TEST(EquivalenceTest, BasicLaws) {
  const FieldSchema schema = PortSchema();
  const Policy p = Policy::Assign(0, 2);
  EXPECT_TRUE(PoliciesEquivalent(schema, Policy::Union(p, p), p));
  EXPECT_TRUE(PoliciesEquivalent(schema, Policy::Seq(p, Policy::Drop()),
                                 Policy::Drop()));
  EXPECT_FALSE(PoliciesEquivalent(schema, p, Policy::Skip()));
}

TEST(EquivalenceTest, RespectsCapacity) {
  const FieldSchema schema = PortSchema();
  EXPECT_THROW(PoliciesEquivalent(schema, Policy::Skip(), Policy::Skip(), 3),
               Error);
  try {
    PoliciesEquivalent(schema, Policy::Skip(), Policy::Skip(), 3);
  } catch (const Error& e) {
    EXPECT_EQ(e.stage(), Stage::kCapacity);
  }
}

TEST(EquivalenceTest, RandomLawInstances) {
  std::mt19937 rng(11);
  const FieldSchema schema = testing::TwoFieldSchema();
  for (int i = 0; i < 100; ++i) {
    const Policy p = testing::RandomPolicy(rng, schema, 2);
    const Policy q = testing::RandomPolicy(rng, schema, 2);
    const Policy r = testing::RandomPolicy(rng, schema, 2);
    EXPECT_TRUE(PoliciesEquivalent(schema, Policy::Union(p, q), Policy::Union(q, p)));
    EXPECT_TRUE(PoliciesEquivalent(schema, Policy::Seq(Policy::Seq(p, q), r),
                                   Policy::Seq(p, Policy::Seq(q, r))));
    EXPECT_TRUE(PoliciesEquivalent(
        schema, Policy::Star(p),
        Policy::Union(Policy::Skip(), Policy::Seq(p, Policy::Star(p)))));
  }
}

TEST(PrintTest, CompactSyntax) {
  const FieldSchema schema = PortSchema();
  EXPECT_EQ(PolicyToString(schema, Policy::Seq(Policy::Filter(Predicate::Test(0, 0)),
                                               Policy::Assign(0, 1))),
            "port=1.port<-2");
  EXPECT_EQ(PolicyToString(schema, Policy::Skip()), "one");
  EXPECT_EQ(PolicyToString(schema, Policy::Drop()), "zero");
  EXPECT_EQ(PolicyToString(schema, Policy::Star(Policy::Union(
                                       Policy::Assign(0, 0), Policy::Assign(0, 1)))),
            "(port<-1+port<-2)*");
}

}  // namespace
}  // namespace dynet
