#include <gtest/gtest.h>

#include "generators.hpp"
#include "mpst/errors.hpp"
#include "mpst/subtype.hpp"
#include "mpst/text.hpp"

using namespace mpst;

namespace {

TypePtr T(const char* text) { return parse_session_type(text); }

std::string root_rule(const char* a, const char* b) {
  auto d = nsub(T(a), T(b));
  return d ? d->rule : "";
}

}  // namespace

TEST(Sub, Examples) {
  EXPECT_TRUE(sub(T("add!l1(nat).add!l2(nat).add?l3(int).end"), T("add!l1(int).add!l2(int).add?l3(int).end")));
  EXPECT_TRUE(sub(T("p?l(int).end"), T("p?l(nat).end")));
  EXPECT_FALSE(sub(T("p?l(nat).end"), T("p?l(int).end")));
  EXPECT_TRUE(sub(T("p?a(nat).end & p?b(nat).end"), T("p?a(nat).end")));
  EXPECT_FALSE(sub(T("p?a(nat).end"), T("p?a(nat).end & p?b(nat).end")));
  EXPECT_TRUE(sub(T("p!a(nat).end"), T("p!a(nat).end \\/ p!b(nat).end")));
  EXPECT_FALSE(sub(T("p!a(nat).end \\/ p!b(nat).end"), T("p!a(nat).end")));
  EXPECT_TRUE(sub(T("mu t. p!l(nat).t"), T("mu t. p!l(int).p!l(int).t")));
  EXPECT_FALSE(sub(T("end"), T("mu t. p?l(nat).t")));
}

TEST(Sub, MixedConnectives) {
  // An intersection below a prefix: some component must fit.
  EXPECT_TRUE(sub(T("p?a(nat).q!x(nat).end & p?b(nat).end"), T("p?a(nat).q!x(int).end")));
  // A union above a prefix: some component must fit.
  EXPECT_TRUE(sub(T("q!x(nat).end"), T("q!x(int).end \\/ q!y(bool).end")));
}

TEST(Nsub, RootRules) {
  EXPECT_EQ(root_rule("end", "mu t. p?l(nat).t"), "nsub-endR");
  EXPECT_EQ(root_rule("p?l(nat).end", "end"), "nsub-endL");
  EXPECT_EQ(root_rule("q!l(nat).end", "p?l(nat).end"), "nsub-diff-part");
  EXPECT_EQ(root_rule("p!l(nat).end", "p?l(nat).end"), "nsub-out-in");
  EXPECT_EQ(root_rule("p?l(nat).end", "p!l(nat).end"), "nsub-in-out");
  EXPECT_EQ(root_rule("p?l(nat).end", "p?l(int).end"), "nsub-in-in");
  EXPECT_EQ(root_rule("p!l(int).end", "p!l(nat).end"), "nsub-out-out");
  EXPECT_EQ(root_rule("p!a(int).end", "p!b(int).end"), "nsub-out-out");
  EXPECT_EQ(root_rule("p?a(nat).end", "p?a(nat).end & p?b(nat).end"), "nsub-intR");
  EXPECT_EQ(root_rule("p!a(nat).end \\/ p!b(nat).end", "p!a(nat).end"), "nsub-uniL");
  EXPECT_EQ(root_rule("p!a(nat).end", "p?a(nat).end"), "nsub-out-in");
  EXPECT_EQ(root_rule("p?a(nat).end", "p!a(nat).end"), "nsub-in-out");
}

TEST(Nsub, ContinuationReason) {
  auto d = nsub(T("p!l(nat).q?m(nat).end"), T("p!l(nat).q?m(int).end"));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->rule, "nsub-out-out");
  EXPECT_EQ(d->reason, "continuations");
  ASSERT_EQ(d->children.size(), 1u);
  EXPECT_EQ(d->children[0].rule, "nsub-in-in");
  EXPECT_TRUE(valid_derivation(*d));
  EXPECT_NE(print(*d).find("⋬"), std::string::npos);
}

TEST(Nsub, NoSelfRefutation) {
  // Two-branch intersections and unions are related to themselves.
  for (const char* t : {"q?l1(bool).q!l1(bool).end & q?l3(bool).end", "q!a(nat).end \\/ q!b(int).end",
                        "mu t. p?a(nat).t & p?b(int).end"}) {
    EXPECT_FALSE(nsub(T(t), T(t))) << t;
  }
}

TEST(Decide, ExactlyOne) {
  Decision d = decide(T("p1!l1(nat).p2!l2(nat).end"), T("p2!l2(nat).p1!l1(nat).end"));
  EXPECT_FALSE(d.leq);
  ASSERT_TRUE(d.witness);
  EXPECT_EQ(d.witness->rule, "nsub-diff-part");
  Decision e = decide(T("p!l(nat).end"), T("p!l(nat).end"));
  EXPECT_TRUE(e.leq);
  EXPECT_FALSE(e.witness);
}

TEST(Properties, Reflexive) {
  testgen::Gen gen(51);
  testgen::Shape shape;
  for (int i = 0; i < 2000; ++i) {
    TypePtr t = gen.type(shape);
    EXPECT_TRUE(sub(t, t)) << print(t);
    EXPECT_TRUE(sub(t, unfold(t))) << print(t);
    EXPECT_TRUE(sub(unfold(t), t)) << print(t);
  }
}

TEST(Properties, SupertypeGenerator) {
  testgen::Gen gen(52);
  testgen::Shape shape;
  for (int i = 0; i < 2000; ++i) {
    TypePtr t = gen.type(shape);
    TypePtr u = gen.supertype(t, shape);
    EXPECT_TRUE(sub(t, u)) << print(t) << "  <=  " << print(u);
  }
}

TEST(Properties, Transitive) {
  testgen::Gen gen(53);
  testgen::Shape shape;
  shape.depth = 4;
  int chains = 0;
  for (int i = 0; i < 3000; ++i) {
    TypePtr a = gen.type(shape);
    TypePtr b = gen.chance(0.7) ? gen.supertype(a, shape) : gen.mutate(a, shape);
    TypePtr c = gen.chance(0.7) ? gen.supertype(b, shape) : gen.mutate(b, shape);
    if (!sub(a, b) || !sub(b, c)) continue;
    ++chains;
    EXPECT_TRUE(sub(a, c)) << print(a) << " / " << print(b) << " / " << print(c);
  }
  EXPECT_GT(chains, 1000);
}

TEST(Properties, UnfoldingInvariance) {
  testgen::Gen gen(54);
  testgen::Shape shape;
  for (int i = 0; i < 3000; ++i) {
    auto [a, b] = gen.type_pair(shape);
    bool base = sub(a, b);
    EXPECT_EQ(base, sub(unfold(a), b));
    EXPECT_EQ(base, sub(a, unfold(b)));
  }
}

TEST(Properties, ComplementarityAndWitnesses) {
  testgen::Gen gen(55);
  testgen::Shape shape;
  int nleq = 0;
  for (int i = 0; i < 5000; ++i) {
    auto [a, b] = gen.type_pair(shape);
    bool leq = sub(a, b);
    auto d = nsub(a, b);
    ASSERT_NE(leq, bool(d)) << print(a) << "  vs  " << print(b);
    if (d) {
      ++nleq;
      EXPECT_TRUE(valid_derivation(*d)) << print(*d);
    }
  }
  EXPECT_GT(nleq, 500);
  EXPECT_LT(nleq, 4900);
}

TEST(Properties, MemoBounded) {
  testgen::Gen gen(56);
  testgen::Shape shape;
  for (int i = 0; i < 2000; ++i) {
    auto [a, b] = gen.type_pair(shape);
    std::size_t memo = 0;
    sub(a, b, memo);
    EXPECT_LE(memo, unfolding_closure_size(a) * unfolding_closure_size(b)) << print(a) << " / " << print(b);
  }
}

TEST(Validator, RejectsForgedNodes) {
  NsubDerivation forged{"nsub-endL", T("end"), T("end"), "", {}};
  EXPECT_FALSE(valid_derivation(forged));
  NsubDerivation wrong_reason{"nsub-in-in", T("p?l(nat).end"), T("p?l(int).end"), "labels differ", {}};
  EXPECT_FALSE(valid_derivation(wrong_reason));
}
