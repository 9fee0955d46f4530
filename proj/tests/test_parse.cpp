#include <gtest/gtest.h>

#include "cartan/random.hpp"
#include "support.hpp"

using namespace cartan;

namespace {

const NameList xyz{"x", "y", "z"};
const RingPresentation R3 = RingPresentation::free(3, xyz);

std::size_t syntax_column(std::string_view text) {
  try {
    parse_expr(text, xyz);
  } catch (const SyntaxError& e) {
    return e.column();
  }
  return std::string::npos;
}

// Random source text built together with the tree it denotes.
struct Sample {
  std::string text;
  ExprTree tree;
};

Sample random_sample(Rng& rng, unsigned depth) {
  if (depth == 0 || rng.chance(25)) {
    if (rng.chance(60)) {
      const auto i = rng.below(3);
      return {xyz[i], ExprTree::gen(i)};
    }
    const long p = rng.range(0, 9), q = rng.range(1, 4);
    const Rational value = Rational(p) / q;
    return {q == 1 ? std::to_string(p) : std::to_string(p) + "/" + std::to_string(q), ExprTree::constant(value)};
  }
  switch (rng.below(7)) {
    case 0: {
      auto a = random_sample(rng, depth - 1), b = random_sample(rng, depth - 1);
      return {"(" + a.text + " + " + b.text + ")", ExprTree::sum({a.tree, b.tree})};
    }
    case 1: {
      auto a = random_sample(rng, depth - 1), b = random_sample(rng, depth - 1);
      return {"(" + a.text + " - " + b.text + ")",
              ExprTree::sum({a.tree, ExprTree::product({ExprTree::constant(-1), b.tree})})};
    }
    case 2: {
      auto a = random_sample(rng, depth - 1), b = random_sample(rng, depth - 1);
      const std::string op = rng.chance(50) ? "*" : " ";
      return {"(" + a.text + ")" + op + "(" + b.text + ")", ExprTree::product({a.tree, b.tree})};
    }
    case 3: {
      auto a = random_sample(rng, depth - 1);
      const unsigned e = static_cast<unsigned>(rng.range(0, 3));
      return {"(" + a.text + ")^" + std::to_string(e), ExprTree::power(a.tree, e)};
    }
    case 4: {
      auto a = random_sample(rng, depth - 1);
      return {"-(" + a.text + ")", ExprTree::product({ExprTree::constant(-1), a.tree})};
    }
    case 5: {
      auto a = random_sample(rng, depth - 1);
      const unsigned k = static_cast<unsigned>(rng.below(3));
      return {"beta" + std::to_string(k) + "(" + a.text + ")",
              ExprTree::prim({PrimitiveRegistry::kBeta, k}, {a.tree})};
    }
    default: {
      auto a = random_sample(rng, depth - 1), b = random_sample(rng, depth - 1);
      return {"S(" + a.text + ", " + b.text + ")", ExprTree::prim({PrimitiveRegistry::kStep, 0}, {a.tree, b.tree})};
    }
  }
}

SmoothExpr random_smooth(Rng& rng) { return normalize(random_sample(rng, 3).tree); }

}  // namespace

TEST(ParseExpr, Examples) {
  EXPECT_EQ(to_string(parse_expr("x*y + 1/2", xyz), xyz), "Sum(Product(x, y), Const(1/2))");
  EXPECT_EQ(to_string(parse_expr("beta0(x^2)", xyz), xyz), "Prim(beta0, [IntPow(x, 2)])");
  EXPECT_EQ(syntax_column("x +"), 3u);
}

TEST(ParseExpr, SyntaxErrorsCarryColumns) {
  EXPECT_EQ(syntax_column("(x + y"), 6u);
  EXPECT_EQ(syntax_column("x + * y"), 4u);
  EXPECT_EQ(syntax_column("x $ y"), 2u);
  EXPECT_NE(syntax_column("1/0"), std::string::npos);
  EXPECT_NE(syntax_column("x^y"), std::string::npos);
  EXPECT_NE(syntax_column("S(x)"), std::string::npos);
  EXPECT_NE(syntax_column("d(x)"), std::string::npos);
  EXPECT_EQ(syntax_column("x*y"), std::string::npos);
}

TEST(ParseExpr, UnknownIdentifiers) {
  try {
    parse_expr("x + w", xyz);
    FAIL() << "expected UnknownIdentifier";
  } catch (const UnknownIdentifier& e) {
    EXPECT_EQ(e.name(), "w");
    EXPECT_EQ(e.column(), 4u);
  }
  EXPECT_THROW(parse_expr("foo(x)", xyz), UnknownIdentifier);
  EXPECT_THROW(parse_expr("x3", xyz), UnknownIdentifier);
  EXPECT_EQ(normalize(parse_expr("x0*x2", {}, 3)), SmoothExpr::generator(0) * SmoothExpr::generator(2));
}

TEST(ParseExpr, JuxtapositionAndPrecedence) {
  const auto p = [](std::string_view s) { return parse_smooth(s, R3); };
  EXPECT_EQ(p("2 x y"), p("2*x*y"));
  EXPECT_EQ(p("-x^2"), -(p("x") * p("x")));
  EXPECT_EQ(p("x - y - z"), p("x - (y + z)"));
  EXPECT_EQ(p("(x + y)^2"), p("x^2 + 2*x*y + y^2"));
  EXPECT_EQ(p("x^2^3"), p("x^6"));
  EXPECT_EQ(p("3/6"), p("1/2"));
  EXPECT_EQ(p("Sinv0(x, y)"), SmoothExpr(1));
}

TEST(ParseExpr, TextMatchesTheTreeItDescribes) {
  Rng rng(401);
  for (int t = 0; t < 500; ++t) {
    const auto s = random_sample(rng, 4);
    EXPECT_EQ(normalize(parse_expr(s.text, xyz)), normalize(s.tree)) << s.text;
  }
}

TEST(ParseExpr, RoundTripOn500Expressions) {
  Rng rng(402);
  for (int t = 0; t < 500; ++t) {
    const SmoothExpr e = rng.chance(50) ? random_polynomial(rng, 3, PolynomialShape{4, 6, 9}) : random_smooth(rng);
    EXPECT_EQ(parse_smooth(to_string(e, xyz), R3), e) << to_string(e, xyz);
    EXPECT_EQ(normalize(parse_expr(to_string(e), {}, 3)), e) << to_string(e);
  }
}

TEST(ParseForm, Examples) {
  const auto dx = DifferentialForm::differential(R3, 0), dy = DifferentialForm::differential(R3, 1);
  EXPECT_EQ(parse_form("d(x)^d(y)", R3), wedge(dx, dy));
  const auto mixed = parse_form("x*d(y) + d(x)", R3);
  EXPECT_EQ(mixed, SmoothExpr::generator(0) * dy + dx);
  EXPECT_EQ(mixed.degrees(), std::set<std::size_t>{1});
  EXPECT_EQ(parse_form("d(x*y)", R3), SmoothExpr::generator(1) * dx + SmoothExpr::generator(0) * dy);
  const auto inhomogeneous = parse_form("x + d(y) + d(x)^d(z)", R3);
  EXPECT_EQ(inhomogeneous.degrees(), (std::set<std::size_t>{0, 1, 2}));
  EXPECT_FALSE(inhomogeneous.is_homogeneous());
}

TEST(ParseForm, Errors) {
  EXPECT_THROW(parse_form("d(x", R3), SyntaxError);
  EXPECT_THROW(parse_form("d(x)^2", R3), SyntaxError);
  EXPECT_THROW(parse_form("beta0(d(x))", R3), SyntaxError);
  EXPECT_THROW(parse_form("d(w)", R3), UnknownIdentifier);
}

TEST(ParseForm, RoundTripOn500Forms) {
  Rng rng(403);
  for (int t = 0; t < 500; ++t) {
    DifferentialForm a = random_form(rng, R3, 3, PolynomialShape{3, 4, 5});
    if (rng.chance(30)) a += DifferentialForm::monomial(R3, random_smooth(rng), random_basis_index(rng, 3, 3));
    EXPECT_EQ(parse_form(to_string(a), R3), a) << to_string(a);
  }
}

TEST(ParseForm, QuotientRingsReduce) {
  const RingPresentation Q(2, {"x", "y"}, IdealPresentation(2, {parse_smooth("x*y", RingPresentation::free(2, {"x", "y"}))}));
  EXPECT_TRUE(parse_form("d(x*y)", Q).is_zero());
  EXPECT_TRUE(parse_form("x^2*y", Q).is_zero());
  EXPECT_EQ(parse_form("x*d(y)", Q), -parse_form("y*d(x)", Q));
}

TEST(SplitArguments, TopLevelCommasOnly) {
  EXPECT_EQ(split_arguments("x, S(x, y), 1"), (std::vector<std::string>{"x", " S(x, y)", " 1"}));
  EXPECT_EQ(split_arguments("x"), std::vector<std::string>{"x"});
  EXPECT_THROW(split_arguments("S(x, y"), SyntaxError);
  EXPECT_THROW(split_arguments("x)"), SyntaxError);
}
