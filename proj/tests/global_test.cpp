#include <gtest/gtest.h>

#include "generators.hpp"
#include "mpst/errors.hpp"
#include "mpst/global.hpp"
#include "mpst/subtype.hpp"
#include "mpst/text.hpp"

using namespace mpst;

namespace {

GlobalPtr G(const char* text) { return parse_global_type(text); }
TypePtr T(const char* text) { return parse_session_type(text); }

}  // namespace

TEST(Project, ThirdPartyMerge) {
  GlobalPtr g = G("p -> q : { l1(nat). q -> r : l3(int). end, l2(bool). q -> r : l5(nat). end }");
  EXPECT_TRUE(regular_tree_equal(project(g, "r"), T("q?l3(int).end & q?l5(nat).end")));
  EXPECT_TRUE(regular_tree_equal(project(g, "p"), T("q!l1(nat).end \\/ q!l2(bool).end")));
  EXPECT_TRUE(regular_tree_equal(project(g, "q"),
                                 T("p?l1(nat).r!l3(int).end & p?l2(bool).r!l5(nat).end")));
  EXPECT_TRUE(same(project(g, "z"), T("end")));
}

TEST(Project, Recursion) {
  GlobalPtr g = G("mu t. a -> b : { ping(nat). b -> a : pong(nat). t, stop(bool). end }");
  EXPECT_TRUE(regular_tree_equal(project(g, "a"), T("mu t. b!ping(nat).b?pong(nat).t \\/ b!stop(bool).end")));
  // A participant not in the loop projects to end.
  EXPECT_TRUE(same(project(g, "c"), T("end")));
}

TEST(Project, MergeFailureCarriesPath) {
  GlobalPtr g = G("p -> q : { l1(nat). q -> r : a(int). end, l2(nat). q -> r : a(nat). end }");
  try {
    project(g, "r");
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.kind(), ProjectionError::Kind::MergeUndefined);
    EXPECT_EQ(e.participant(), "r");
  }
  EXPECT_FALSE(projectable(g));
}

TEST(Project, LoopWithoutParticipant) {
  EXPECT_TRUE(same(project(G("mu t. p -> q : l(nat). t"), "r"), T("end")));
  GlobalPtr h = G("r -> p : a(nat). mu t. p -> q : l(nat). t");
  EXPECT_TRUE(same(project(h, "r"), T("p!a(nat).end")));
}

TEST(Project, ParticipantMismatch) {
  GlobalPtr g = G("p -> q : { a(nat). q -> r : x(nat). end, b(nat). end }");
  try {
    check_branch_participants(g);
    FAIL();
  } catch (const ProjectionError& e) {
    EXPECT_EQ(e.kind(), ProjectionError::Kind::ParticipantMismatch);
    EXPECT_EQ(e.participant(), "r");
  }
  EXPECT_THROW(project_all(g), ProjectionError);
}

TEST(Merge, Examples) {
  EXPECT_TRUE(same(*merge(T("p?a(nat).end"), T("p?b(int).end")), T("p?a(nat).end & p?b(int).end")));
  EXPECT_FALSE(merge(T("p?a(nat).end"), T("p?a(int).end")));
  EXPECT_FALSE(merge(T("p?a(nat).end"), T("q?b(int).end")));
  EXPECT_FALSE(merge(T("p!l2(int).end"), T("end")));
  EXPECT_TRUE(merge(T("mu t. p!a(nat).t"), T("p!a(nat). mu t. p!a(nat).t")));
}

TEST(Merge, IdempotentAndCommutative) {
  testgen::Gen gen(41);
  testgen::Shape shape;
  shape.depth = 3;
  int defined = 0;
  for (int i = 0; i < 3000; ++i) {
    TypePtr a = gen.type(shape);
    auto aa = merge(a, a);
    ASSERT_TRUE(aa);
    EXPECT_TRUE(regular_tree_equal(*aa, a));
    TypePtr b = gen.chance(0.5) ? gen.type(shape) : gen.mutate(a, shape);
    auto ab = merge(a, b), ba = merge(b, a);
    ASSERT_EQ(bool(ab), bool(ba)) << print(a) << " / " << print(b);
    if (ab) {
      ++defined;
      EXPECT_TRUE(regular_tree_equal(*ab, *ba));
    }
  }
  EXPECT_GT(defined, 100);
}

TEST(Consume, Examples) {
  GlobalPtr g = G("p -> q : { l1(nat). q -> r : l3(int). end, l2(bool). q -> r : l5(nat). end }");
  EXPECT_TRUE(same(*consume(g, {"p", "l1", "q"}), G("q -> r : l3(int). end")));
  EXPECT_FALSE(consume(g, {"p", "l9", "q"}));
  EXPECT_FALSE(consume(G("end"), {"p", "l", "q"}));
  // Consumption under an independent prefix.
  GlobalPtr h = G("a -> b : x(nat). c -> d : y(nat). end");
  EXPECT_TRUE(same(*consume(h, {"c", "y", "d"}), G("a -> b : x(nat). end")));
}

TEST(GlobalStep, Frontier) {
  EXPECT_TRUE(global_step(G("end")).empty());
  auto steps = global_step(G("p -> q : l1(nat). end"));
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_EQ(steps[0].first, (CommAction{"p", "l1", "q"}));
  EXPECT_TRUE(same(steps[0].second, G("end")));
  auto two = global_step(G("a -> b : x(nat). c -> d : y(nat). end"));
  EXPECT_EQ(two.size(), 2u);
}

TEST(Consume, PreservesProjectability) {
  testgen::Gen gen(42);
  testgen::Shape shape;
  shape.depth = 4;
  int checked = 0;
  for (int i = 0; i < 600; ++i) {
    GlobalPtr g = gen.projectable_global(shape);
    if (!g) continue;
    for (const auto& [a, next] : global_step(g)) {
      ++checked;
      auto direct = consume(g, a);
      ASSERT_TRUE(direct) << print(g) << " \\ " << to_string(a);
      EXPECT_TRUE(regular_tree_equal(*direct, next));
      EXPECT_TRUE(projectable(next)) << print(g) << " \\ " << to_string(a);
    }
  }
  EXPECT_GT(checked, 300);
}

// If the sender's and receiver's projections offer the action, consuming it
// leaves continuations that refine theirs. Third parties keep their view up
// to the branches the merge had added: the old projection is a subtype.
TEST(Consume, ProjectionsAfterAction) {
  testgen::Gen gen(43);
  testgen::Shape shape;
  shape.depth = 4;
  int checked = 0;
  for (int i = 0; i < 600; ++i) {
    GlobalPtr g = gen.projectable_global(shape);
    if (!g) continue;
    for (const auto& [a, next] : global_step(g)) {
      TypePtr tp = unfold_head(project(g, a.sender));
      TypePtr tq = unfold_head(project(g, a.receiver));
      const TypeBranch* out = tp->find(a.label);
      const TypeBranch* in = tq->find(a.label);
      ASSERT_TRUE(out && in);
      ++checked;
      EXPECT_TRUE(sub(out->cont, project(next, a.sender)));
      EXPECT_TRUE(sub(in->cont, project(next, a.receiver)));
      for (const auto& r : participants(g)) {
        if (r == a.sender || r == a.receiver) continue;
        EXPECT_TRUE(sub(project(g, r), project(next, r)))
            << print(g) << " \\ " << to_string(a) << " at " << r;
      }
    }
  }
  EXPECT_GT(checked, 300);
}
