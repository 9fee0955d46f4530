#pragma once

// JSON encodings of rings, homs, forms, vector fields, derivation classes,
// identity reports, posets and derivation families.

#include <string>
#include <vector>

#include "cartan/derquot.hpp"
#include "cartan/parse.hpp"
#include "cartan/site.hpp"
#include "json.hpp"

namespace cartan {

using Json = nlohmann::json;

namespace detail {

inline std::vector<std::string> string_list(const Json& j, const char* field) {
  if (!j.is_array()) throw Error(std::string("'") + field + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) throw Error(std::string("'") + field + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

inline std::optional<Rational> bound_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "-inf") return std::nullopt;
    Rational q(s);
    q.canonicalize();
    return q;
  }
  if (j.is_number()) {
    Rational q(j.get<double>());
    return q;
  }
  throw Error("interval bounds must be integers, rational strings or null");
}

inline Json bound_to_json(const std::optional<Rational>& b) {
  if (!b) return nullptr;
  if (b->get_den() == 1 && b->get_num().fits_slong_p()) return b->get_num().get_si();
  return to_string(*b);
}

}  // namespace detail

// Ring: {"generators": ["x","y"], "ideal": ["x*y"], "dense_interior": false}
inline RingPresentation ring_from_json(const Json& j) {
  const auto names = detail::string_list(j.at("generators"), "generators");
  const RingPresentation free_ring = RingPresentation::free(names.size(), names);
  std::vector<SmoothExpr> gens;
  if (j.contains("ideal"))
    for (const auto& g : detail::string_list(j.at("ideal"), "ideal")) gens.push_back(parse_smooth(g, free_ring));
  const bool dense = j.value("dense_interior", false);
  return RingPresentation(names.size(), names, IdealPresentation(names.size(), std::move(gens), dense));
}

inline Json to_json(const RingPresentation& ring) {
  Json names = Json::array();
  for (std::size_t i = 0; i < ring.size(); ++i) names.push_back(generator_name(i, ring.names()));
  Json ideal = Json::array();
  for (const auto& g : ring.ideal().generators()) ideal.push_back(ring.format(g));
  Json j{{"generators", names}, {"ideal", ideal}};
  if (ring.ideal().dense_interior()) j["dense_interior"] = true;
  return j;
}

// Hom: {"images": ["u^2", "v"]}
inline RingHom hom_from_json(const Json& j, const RingPresentation& source, const RingPresentation& target) {
  std::vector<SmoothExpr> images;
  for (const auto& s : detail::string_list(j.at("images"), "images")) images.push_back(parse_smooth(s, target));
  return RingHom(source, target, std::move(images));
}

// Form: {"degree": 2, "terms": [{"idx": [0,1], "coef": "2*x"}]}; degree is
// null for inhomogeneous forms.
inline Json to_json(const DifferentialForm& a) {
  Json terms = Json::array();
  for (const auto& [idx, c] : a.terms()) terms.push_back({{"idx", idx}, {"coef", a.ring().format(c)}});
  Json degree = a.is_homogeneous() ? Json(a.degree()) : Json(nullptr);
  return {{"degree", degree}, {"terms", terms}};
}

inline DifferentialForm form_from_json(const Json& j, const RingPresentation& ring) {
  DifferentialForm out(ring);
  for (const auto& t : j.at("terms")) {
    BasisIndex idx = t.at("idx").get<BasisIndex>();
    out += DifferentialForm::monomial(ring, parse_smooth(t.at("coef").get<std::string>(), ring), idx);
  }
  return out;
}

// Vector field: {"coefficients": ["x*y", "0"]}
inline Json to_json(const VectorField& v) {
  Json c = Json::array();
  for (const auto& e : v.coefficients()) c.push_back(v.ring().format(e));
  return {{"coefficients", c}};
}

inline VectorField field_from_json(const Json& j, const RingPresentation& ring) {
  std::vector<SmoothExpr> c;
  for (const auto& s : detail::string_list(j.at("coefficients"), "coefficients")) c.push_back(parse_smooth(s, ring));
  return VectorField(ring, std::move(c));
}

// Identity report: [{"identity": "iii", "pass": true, "witness": null}, ...]
inline Json to_json(const IdentityReport& report) {
  Json out = Json::array();
  for (const auto& r : report.results)
    out.push_back({{"identity", r.identity},
                   {"pass", r.pass},
                   {"witness", r.witness ? Json(to_string(*r.witness)) : Json(nullptr)}});
  return out;
}

// Derivation class: {"ideal": ["x*y"], "coefficients": ["x","0"], "certificates": [["1"]]}
inline Json to_json(const DerClass& a, const NameList& names = {}) {
  Json ideal = Json::array(), coefficients = Json::array(), certificates = Json::array();
  for (const auto& g : a.ideal().generators()) ideal.push_back(to_string(g, names));
  for (const auto& c : a.field().coefficients()) coefficients.push_back(to_string(c, names));
  for (const auto& row : a.representative().certificates()) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back(to_string(c, names));
    certificates.push_back(r);
  }
  return {{"ideal", ideal}, {"coefficients", coefficients}, {"certificates", certificates}};
}

/// Reads a class; certificates are checked when present and computed when
/// absent.
inline DerClass derclass_from_json(const Json& j, const NameList& names) {
  const RingPresentation ring = RingPresentation::free(names.size(), names);
  std::vector<SmoothExpr> gens;
  for (const auto& g : detail::string_list(j.at("ideal"), "ideal")) gens.push_back(parse_smooth(g, ring));
  const IdealPresentation ideal(ring.size(), gens);
  const VectorField v = field_from_json(j, ring);
  if (!j.contains("certificates")) return DerClass::of(v, ideal);
  std::vector<std::vector<SmoothExpr>> certs;
  for (const auto& row : j.at("certificates")) {
    std::vector<SmoothExpr> r;
    for (const auto& s : detail::string_list(row, "certificates")) r.push_back(parse_smooth(s, ring));
    certs.push_back(std::move(r));
  }
  return DerClass(TangentField(v, ideal, std::move(certs)));
}

// Poset: {"opens": [{"name": "M", "boxes": "all"}, {"name": "U", "boxes": [[[-1, 1]]]}],
//         "leq": [["U", "M"]]}
inline OpenPoset poset_from_json(const Json& j, std::size_t dim) {
  std::vector<OpenPoset::Open> opens;
  for (const auto& o : j.at("opens")) {
    OpenPoset::Open open{o.at("name").get<std::string>(), {}};
    const Json& boxes = o.at("boxes");
    if (boxes.is_string()) {
      if (boxes.get<std::string>() != "all") throw Error("'boxes' must be \"all\" or a list of boxes");
      open.region = Region::whole();
    } else {
      for (const auto& b : boxes) {
        Box box;
        for (const auto& iv : b) {
          if (!iv.is_array() || iv.size() != 2) throw Error("intervals are [lo, hi] pairs");
          box.push_back({detail::bound_from_json(iv[0]), detail::bound_from_json(iv[1])});
        }
        open.region.boxes.push_back(std::move(box));
      }
    }
    opens.push_back(std::move(open));
  }
  std::vector<std::pair<std::string, std::string>> leq;
  if (j.contains("leq"))
    for (const auto& pair : j.at("leq")) leq.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
  return OpenPoset(dim, std::move(opens), leq);
}

/// Infers the dimension from the first box found (1 when all opens are "all").
inline std::size_t poset_dimension(const Json& j) {
  for (const auto& o : j.at("opens")) {
    const Json& boxes = o.at("boxes");
    if (boxes.is_array() && !boxes.empty()) return boxes.at(0).size();
  }
  return 1;
}

inline Json to_json(const OpenPoset& poset) {
  Json opens = Json::array(), leq = Json::array();
  for (std::size_t k = 0; k < poset.size(); ++k) {
    const Region& r = poset.region(k);
    Json boxes;
    if (r.all) {
      boxes = "all";
    } else {
      boxes = Json::array();
      for (const auto& b : r.boxes) {
        Json box = Json::array();
        for (const auto& iv : b) box.push_back({detail::bound_to_json(iv.lo), detail::bound_to_json(iv.hi)});
        boxes.push_back(box);
      }
    }
    opens.push_back({{"name", poset.name(k)}, {"boxes", boxes}});
    for (std::size_t m = 0; m < poset.size(); ++m)
      if (m != k && poset.leq(k, m)) leq.push_back({poset.name(k), poset.name(m)});
  }
  return {{"opens", opens}, {"leq", leq}};
}

// Family: {"M": {"coefficients": [...]}, "U": {"coefficients": [...]}}
inline LocalDerivationFamily family_from_json(const Json& j, const PresheafCDGA& presheaf) {
  LocalDerivationFamily out(presheaf);
  for (const auto& [name, field] : j.items()) out.set(name, field_from_json(field, presheaf.ring()));
  return out;
}

inline std::map<std::string, VectorField> fields_from_json(const Json& j, const RingPresentation& ring) {
  std::map<std::string, VectorField> out;
  for (const auto& [name, field] : j.items()) out.emplace(name, field_from_json(field, ring));
  return out;
}

inline Json to_json(const PresheafReport& report) {
  Json out = Json::object();
  for (const auto& [name, r] : report.per_open) out[name] = to_json(r);
  return out;
}

}  // namespace cartan
