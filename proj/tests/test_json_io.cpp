#include <gtest/gtest.h>

#include "cartan/json_io.hpp"
#include "cartan/random.hpp"
#include "support.hpp"

using namespace cartan;

namespace {

const NameList xy{"x", "y"};
const RingPresentation R2 = RingPresentation::free(2, xy);

}  // namespace

TEST(JsonRing, RoundTrip) {
  const Json j = Json::parse(R"({"generators": ["x", "y"], "ideal": ["x*y"]})");
  const auto ring = ring_from_json(j);
  EXPECT_EQ(ring.size(), 2u);
  EXPECT_EQ(ring.names(), xy);
  EXPECT_EQ(to_json(ring), j);
  EXPECT_EQ(ring_from_json(to_json(ring)), ring);

  const auto dense = ring_from_json(Json::parse(R"({"generators": ["x"], "dense_interior": true})"));
  EXPECT_TRUE(dense.ideal().dense_interior());
  EXPECT_EQ(to_json(dense)["dense_interior"], true);

  EXPECT_THROW(ring_from_json(Json::parse(R"({"generators": ["x", 3]})")), Error);
  EXPECT_THROW(ring_from_json(Json::parse(R"({"generators": ["x"], "ideal": ["x +"]})")), SyntaxError);
  EXPECT_THROW(ring_from_json(Json::parse(R"j({"generators": ["x"], "ideal": ["beta0(x)"]})j")), NonPolynomial);
}

TEST(JsonHom, ImagesAreParsedInTheTarget) {
  const auto source = ring_from_json(Json::parse(R"({"generators": ["x", "y"]})"));
  const auto target = ring_from_json(Json::parse(R"({"generators": ["u", "v"]})"));
  const auto f = hom_from_json(Json::parse(R"({"images": ["u^2", "v"]})"), source, target);
  EXPECT_EQ(f.images()[0], parse_smooth("u^2", target));
  EXPECT_THROW(hom_from_json(Json::parse(R"({"images": ["u"]})"), source, target), NotAHomomorphism);
}

TEST(JsonForm, MatchesPublishedShape) {
  const auto a = parse_form("2*x*d(x)^d(y)", R2);
  EXPECT_EQ(to_json(a), Json::parse(R"({"degree": 2, "terms": [{"idx": [0, 1], "coef": "2*x"}]})"));
  EXPECT_TRUE(to_json(parse_form("x + d(y)", R2))["degree"].is_null());
  EXPECT_EQ(to_json(DifferentialForm::zero(R2))["degree"], 0);
}

TEST(JsonForm, RoundTrip) {
  const RingPresentation R3 = RingPresentation::free(3);
  Rng rng(501);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_form(rng, R3, 3, PolynomialShape{3, 4, 5});
    EXPECT_EQ(form_from_json(Json::parse(to_json(a).dump()), R3), a);
  }
  EXPECT_EQ(form_from_json(Json::parse(R"({"degree": 2, "terms": [{"idx": [1, 0], "coef": "x"}]})"), R2),
            parse_form("-x*d(x)^d(y)", R2));
}

TEST(JsonField, RoundTrip) {
  const auto v = field_from_json(Json::parse(R"({"coefficients": ["x*y", "0"]})"), R2);
  EXPECT_EQ(to_json(v), Json::parse(R"({"coefficients": ["x*y", "0"]})"));
  Rng rng(502);
  for (int t = 0; t < 100; ++t) {
    const auto w = random_vector_field(rng, R2);
    EXPECT_EQ(field_from_json(to_json(w), R2), w);
  }
  EXPECT_THROW(field_from_json(Json::parse(R"({"coefficients": ["x"]})"), R2), Error);
}

TEST(JsonReport, IdentityEntries) {
  const VectorField v(R2, {parse_smooth("y", R2), SmoothExpr()});
  const auto j = to_json(verify_cartan(v, v, monomial_basis_forms(R2, 1)));
  ASSERT_EQ(j.size(), 5u);
  EXPECT_EQ(j[2], Json::parse(R"({"identity": "iii", "pass": true, "witness": null})"));

  IdentityReport failing;
  failing.results.push_back({"iv", false, parse_form("d(x)", R2)});
  EXPECT_EQ(to_json(failing)[0]["witness"], "d(x)");
}

TEST(JsonDerClass, RoundTripWithCertificates) {
  const Json j = Json::parse(R"({"ideal": ["x*y"], "coefficients": ["x", "0"], "certificates": [["1"]]})");
  const auto a = derclass_from_json(j, xy);
  EXPECT_EQ(to_json(a, xy), j);

  Json without = j;
  without.erase("certificates");
  EXPECT_EQ(to_json(derclass_from_json(without, xy), xy), j);

  Json wrong = j;
  wrong["certificates"] = Json::parse(R"([["2"]])");
  EXPECT_THROW(derclass_from_json(wrong, xy), NotTangent);

  Json not_tangent = without;
  not_tangent["coefficients"] = Json::parse(R"(["1", "0"])");
  EXPECT_THROW(derclass_from_json(not_tangent, xy), NotTangent);
}

TEST(JsonPoset, PublishedShapeAndRoundTrip) {
  const Json j = Json::parse(R"({"opens": [{"name": "M", "boxes": "all"}, {"name": "U", "boxes": [[[-1, 1]]]}],
                                 "leq": [["U", "M"]]})");
  EXPECT_EQ(poset_dimension(j), 1u);
  const auto p = poset_from_json(j, 1);
  EXPECT_EQ(p.name(p.top()), "M");
  EXPECT_EQ(to_json(p), j);

  const Json bounds = Json::parse(R"({"opens": [{"name": "M", "boxes": [[[null, "inf"], ["-1/2", 3]]]},
                                                {"name": "U", "boxes": [[["1/3", "2/3"], [0, 1]]]}],
                                      "leq": [["U", "M"]]})");
  EXPECT_EQ(poset_dimension(bounds), 2u);
  const auto q = poset_from_json(bounds, 2);
  EXPECT_EQ(*q.region(0).boxes[0][1].lo, Rational(-1, 2));
  EXPECT_FALSE(q.region(0).boxes[0][0].hi.has_value());
  const auto again = poset_from_json(to_json(q), 2);
  EXPECT_EQ(to_json(again), to_json(q));

  EXPECT_THROW(poset_from_json(Json::parse(R"({"opens": [{"name": "M", "boxes": "some"}]})"), 1), Error);
  EXPECT_THROW(poset_from_json(Json::parse(R"({"opens": [{"name": "M", "boxes": [[[0]]]}]})"), 1), Error);
  EXPECT_THROW(poset_from_json(Json::parse(R"({"opens": [{"name": "M", "boxes": "all"}], "leq": [["Q", "M"]]})"), 1),
               InvalidPoset);
}

TEST(JsonFamily, FamiliesAndReports) {
  const Json pj = Json::parse(R"({"opens": [{"name": "M", "boxes": "all"}, {"name": "U", "boxes": [[[-1, 1], [-1, 1]]]}],
                                  "leq": [["U", "M"]]})");
  const PresheafCDGA P(poset_from_json(pj, 2), R2);
  const Json fj = Json::parse(R"({"M": {"coefficients": ["y", "0"]}, "U": {"coefficients": ["y", "0"]}})");
  const auto fam = family_from_json(fj, P);
  EXPECT_TRUE(fam.defined_on_all());
  EXPECT_EQ(fields_from_json(fj, R2).size(), 2u);
  const auto report = to_json(presheaf_cartan_verify(fam, fam, monomial_basis_forms(R2, 1)));
  EXPECT_EQ(report.size(), 2u);
  EXPECT_EQ(report["U"].size(), 5u);
  EXPECT_THROW(family_from_json(Json::parse(R"({"Q": {"coefficients": ["y", "0"]}})"), P), InvalidPoset);
}
