// cartan: command-line front end to the Cartan calculus library.
//
// Exit codes: 0 success, 1 domain error or failed identity (JSON diagnostics
// on stderr), 2 syntax or IO error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cartan/cartan.hpp"

using namespace cartan;

namespace {

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised after a report has been printed when some check failed.
class CheckFailed : public DomainError {
 public:
  CheckFailed(std::string kind, Json details)
      : DomainError(kind), kind_(std::move(kind)), details_(std::move(details)) {}
  const std::string& kind() const noexcept { return kind_; }
  const Json& details() const noexcept { return details_; }

 private:
  std::string kind_;
  Json details_;
};

struct Options {
  std::vector<std::string> vars;
  std::vector<std::string> ideal;
  bool dense_interior = false;
  std::string ring_file;
  std::vector<std::string> fields;
  bool json = false;
  std::uint64_t seed = 1;
  std::size_t trials = 20;
  std::string poset_file;
  std::vector<std::string> family_files;
  std::vector<std::string> positional;
  bool as_form = false;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

NameList default_names(std::size_t n) {
  static const char* short_names[] = {"x", "y", "z"};
  NameList out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(n <= 3 ? short_names[i] : "x" + std::to_string(i));
  return out;
}

std::size_t field_arity(const Options& o) {
  return o.fields.empty() ? 0 : split_arguments(o.fields.front()).size();
}

/// The free ring on the declared (or defaulted) generators.
RingPresentation free_ring(const Options& o, std::size_t fallback) {
  if (!o.ring_file.empty()) {
    const RingPresentation r = ring_from_json(read_json(o.ring_file));
    return RingPresentation::free(r.size(), r.names());
  }
  NameList names = o.vars.empty() ? default_names(fallback) : o.vars;
  return RingPresentation::free(names.size(), names);
}

IdealPresentation ideal_of(const Options& o, const RingPresentation& free) {
  if (!o.ring_file.empty()) {
    if (!o.ideal.empty()) throw IoError("--ideal and --ring are exclusive");
    const RingPresentation r = ring_from_json(read_json(o.ring_file));
    return r.ideal();
  }
  std::vector<SmoothExpr> gens;
  for (const auto& text : o.ideal)
    for (const auto& g : split_arguments(text)) gens.push_back(parse_smooth(g, free));
  return IdealPresentation(free.size(), std::move(gens), o.dense_interior);
}

/// The (possibly quotient) ring forms and fields live in.
RingPresentation working_ring(const Options& o, std::size_t fallback) {
  const RingPresentation free = free_ring(o, fallback);
  return RingPresentation(free.size(), free.names(), ideal_of(o, free));
}

VectorField parse_field(const std::string& text, const RingPresentation& ring) {
  std::vector<SmoothExpr> c;
  for (const auto& part : split_arguments(text)) c.push_back(parse_smooth(part, ring));
  if (c.size() != ring.size())
    throw RingMismatch("vector field '" + text + "' has " + std::to_string(c.size()) + " components, ring has " +
                       std::to_string(ring.size()) + " generators");
  return VectorField(ring, std::move(c));
}

const std::string& nth_field(const Options& o, std::size_t k, std::size_t required) {
  if (o.fields.size() != required)
    throw IoError("expected " + std::to_string(required) + " --vf option(s), got " + std::to_string(o.fields.size()));
  return o.fields[k];
}

const std::string& positional(const Options& o, std::size_t k, std::size_t required) {
  if (o.positional.size() != required)
    throw IoError("expected " + std::to_string(required) + " argument(s), got " + std::to_string(o.positional.size()));
  return o.positional[k];
}

void emit(const Options& o, const Json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text << "\n";
}

void emit_form(const Options& o, const DifferentialForm& a) { emit(o, to_json(a), to_string(a)); }

Json report_summary(const IdentityReport& r) {
  Json failures = Json::array();
  for (const auto& res : to_json(r))
    if (!res["pass"].get<bool>()) failures.push_back(res);
  return failures;
}

std::string report_text(const IdentityReport& r) {
  std::ostringstream out;
  for (const auto& res : r.results) {
    out << "(" << res.identity << ") " << (res.pass ? "pass" : "FAIL");
    if (res.witness) out << "  witness: " << to_string(*res.witness);
    out << "\n";
  }
  std::string s = out.str();
  if (!s.empty()) s.pop_back();
  return s;
}

void cmd_d(const Options& o) {
  const RingPresentation ring = working_ring(o, 3);
  emit_form(o, exterior_derivative(parse_form(positional(o, 0, 1), ring)));
}

void cmd_wedge(const Options& o) {
  const RingPresentation ring = working_ring(o, 3);
  emit_form(o, wedge(parse_form(positional(o, 0, 2), ring), parse_form(positional(o, 1, 2), ring)));
}

void cmd_contract(const Options& o) {
  const RingPresentation ring = working_ring(o, field_arity(o));
  emit_form(o, contract(parse_field(nth_field(o, 0, 1), ring), parse_form(positional(o, 0, 1), ring)));
}

void cmd_lie(const Options& o) {
  const RingPresentation ring = working_ring(o, field_arity(o));
  emit_form(o, lie_derivative(parse_field(nth_field(o, 0, 1), ring), parse_form(positional(o, 0, 1), ring)));
}

void cmd_bracket(const Options& o) {
  const RingPresentation ring = working_ring(o, field_arity(o));
  const VectorField b = vf_bracket(parse_field(nth_field(o, 0, 2), ring), parse_field(nth_field(o, 1, 2), ring));
  emit(o, to_json(b), to_string(b));
}

void cmd_verify_cartan(const Options& o) {
  const RingPresentation ring = working_ring(o, o.fields.empty() ? 3 : field_arity(o));
  const auto forms = monomial_basis_forms(ring, 2);
  IdentityReport report;
  Json header;
  if (o.fields.empty()) {
    report = cartan_trials(ring, o.seed, o.trials, forms);
    header = {{"seed", o.seed}, {"trials", o.trials}};
  } else {
    report = verify_cartan(parse_field(nth_field(o, 0, 2), ring), parse_field(nth_field(o, 1, 2), ring), forms);
  }
  Json j = header.is_null() ? Json::object() : header;
  j["results"] = to_json(report);
  std::string text = report_text(report);
  if (o.fields.empty())
    text = "seed " + std::to_string(o.seed) + ", " + std::to_string(o.trials) + " trials\n" + text;
  emit(o, j, text);
  if (!report.all_pass()) throw CheckFailed("IdentityFailure", {{"failures", report_summary(report)}});
}

void cmd_tangent(const Options& o) {
  const RingPresentation ring = free_ring(o, field_arity(o));
  const DerClass c = DerClass::of(parse_field(nth_field(o, 0, 1), ring), ideal_of(o, ring));
  std::ostringstream text;
  text << "tangent";
  const auto& certs = c.representative().certificates();
  for (std::size_t k = 0; k < certs.size(); ++k) {
    text << "\n  v(" << ring.format(c.ideal().generators()[k]) << ") =";
    for (std::size_t j = 0; j < certs[k].size(); ++j)
      text << (j ? " + " : " ") << "(" << ring.format(certs[k][j]) << ")*(" << ring.format(c.ideal().generators()[j])
           << ")";
  }
  emit(o, to_json(c, ring.names()), text.str());
}

void cmd_in_j(const Options& o) {
  const RingPresentation ring = free_ring(o, field_arity(o));
  const bool result = in_J(parse_field(nth_field(o, 0, 1), ring), ideal_of(o, ring));
  emit(o, {{"in_j", result}}, result ? "true" : "false");
}

void cmd_class_equal(const Options& o) {
  const RingPresentation ring = free_ring(o, field_arity(o));
  const IdealPresentation ideal = ideal_of(o, ring);
  const DerClass a = DerClass::of(parse_field(nth_field(o, 0, 2), ring), ideal);
  const DerClass b = DerClass::of(parse_field(nth_field(o, 1, 2), ring), ideal);
  const bool result = class_equal(a, b);
  emit(o, {{"equal", result}}, result ? "true" : "false");
}

void cmd_cross_pair(const Options& o) {
  const RingPresentation ring = free_ring(o, field_arity(o));
  const auto [a1, a2] = canonical_pair_cross(DerClass::of(parse_field(nth_field(o, 0, 1), ring), ideal_of(o, ring)));
  const std::string s1 = ring.format(a1), s2 = ring.format(a2);
  emit(o, {{"pair", {s1, s2}}}, "(\"" + s1 + "\",\"" + s2 + "\")");
}

struct SiteInput {
  OpenPoset poset;
  RingPresentation ring;
};

SiteInput site_input(const Options& o) {
  if (o.poset_file.empty()) throw IoError("--poset is required");
  const Json pj = read_json(o.poset_file);
  const std::size_t dim = poset_dimension(pj);
  RingPresentation ring = free_ring(o, dim);
  return {poset_from_json(pj, ring.size()), ring};
}

void cmd_glue(const Options& o) {
  const SiteInput in = site_input(o);
  if (o.family_files.size() != 1) throw IoError("glue takes exactly one --family file");
  const VectorField v = glue_derivations(in.poset, fields_from_json(read_json(o.family_files[0]), in.ring));
  emit(o, to_json(v), to_string(v));
}

void cmd_presheaf_verify(const Options& o) {
  const SiteInput in = site_input(o);
  const PresheafCDGA presheaf(in.poset, in.ring);
  const auto forms = monomial_basis_forms(in.ring, 2);
  std::vector<std::pair<LocalDerivationFamily, LocalDerivationFamily>> pairs;
  if (o.family_files.size() == 2) {
    pairs.emplace_back(family_from_json(read_json(o.family_files[0]), presheaf),
                       family_from_json(read_json(o.family_files[1]), presheaf));
  } else if (o.fields.size() == 2) {
    pairs.emplace_back(LocalDerivationFamily::from_global(presheaf, parse_field(o.fields[0], in.ring)),
                       LocalDerivationFamily::from_global(presheaf, parse_field(o.fields[1], in.ring)));
  } else if (o.family_files.empty() && o.fields.empty()) {
    Rng rng(o.seed);
    for (std::size_t t = 0; t < o.trials; ++t) {
      const VectorField v = random_vector_field(rng, in.ring);
      const VectorField w = random_vector_field(rng, in.ring);
      pairs.emplace_back(LocalDerivationFamily::from_global(presheaf, v),
                         LocalDerivationFamily::from_global(presheaf, w));
    }
  } else {
    throw IoError("presheaf-verify takes two --family files, two --vf fields, or neither");
  }
  Json runs = Json::array();
  std::ostringstream text;
  bool ok = true;
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const PresheafReport r = presheaf_cartan_verify(pairs[t].first, pairs[t].second, forms);
    runs.push_back(to_json(r));
    ok = ok && r.all_pass();
    for (const auto& [name, rep] : r.per_open)
      if (!rep.all_pass() || pairs.size() == 1) text << "[" << name << "]\n" << report_text(rep) << "\n";
  }
  text << (ok ? "all identities pass on every open" : "identity failures found") << " (" << pairs.size()
       << " family pair" << (pairs.size() == 1 ? "" : "s") << ")";
  emit(o, {{"squares", true}, {"runs", runs}}, text.str());
  if (!ok) throw CheckFailed("IdentityFailure", {{"runs", runs}});
}

void cmd_parse(const Options& o) {
  const RingPresentation ring = working_ring(o, 3);
  const std::string& text = positional(o, 0, 1);
  if (o.as_form) {
    emit_form(o, parse_form(text, ring));
    return;
  }
  const ExprTree tree = parse_expr(text, ring);
  const std::string tree_text = to_string(tree, ring.names());
  const std::string normal = ring.format(ring.canonical(normalize(tree)));
  emit(o, {{"tree", tree_text}, {"normal", normal}}, tree_text);
}

std::string error_kind(const std::exception& e) {
#define CARTAN_KIND(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  CARTAN_KIND(UnknownIdentifier)
  CARTAN_KIND(SyntaxError)
  CARTAN_KIND(NotTangent)
  CARTAN_KIND(IncompatibleOverlap)
  CARTAN_KIND(IncompatibleFamily)
  CARTAN_KIND(Incompatible)
  CARTAN_KIND(NotACover)
  CARTAN_KIND(InvalidPoset)
  CARTAN_KIND(ExponentOverflow)
  CARTAN_KIND(NotDivisible)
  CARTAN_KIND(NonPolynomial)
  CARTAN_KIND(BadRadii)
  CARTAN_KIND(RingMismatch)
  CARTAN_KIND(DegreeMismatch)
  CARTAN_KIND(NotAHomomorphism)
  CARTAN_KIND(NotRelated)
  CARTAN_KIND(IdealMismatch)
  CARTAN_KIND(WrongIdeal)
#undef CARTAN_KIND
  return "Error";
}

Json diagnostics(const std::exception& e) {
  if (const auto* f = dynamic_cast<const CheckFailed*>(&e)) {
    Json j = f->details();
    j["error"] = f->kind();
    return j;
  }
  Json j{{"error", error_kind(e)}, {"message", e.what()}};
  if (const auto* s = dynamic_cast<const SyntaxError*>(&e)) j["column"] = s->column();
  if (const auto* t = dynamic_cast<const NotTangent*>(&e)) {
    j["generator"] = t->generator();
    j["reduction"] = t->reduction();
  }
  if (const auto* c = dynamic_cast<const IncompatibleOverlap*>(&e)) {
    j["pair"] = {c->first(), c->second()};
    Json w = Json::array();
    for (const auto& q : c->witness()) w.push_back(to_string(q));
    j["witness"] = w;
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic Cartan calculus on finitely presented smooth rings"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--vars", o.vars, "Generator names, comma separated")->delimiter(',');
  app.add_option("--ideal", o.ideal, "Ideal generators (repeatable or comma separated)");
  app.add_flag("--dense-interior", o.dense_interior, "Mark the ideal as that of a set with dense interior");
  app.add_option("--ring", o.ring_file, "Ring presentation JSON file");
  app.add_option("--vf", o.fields, "Vector field as comma separated coefficients (repeatable)");
  app.add_flag("--json", o.json, "Print JSON instead of text");
  app.add_option("--seed", o.seed, "Seed for randomized verification");
  app.add_option("--trials", o.trials, "Number of randomized trials");
  app.add_option("--poset", o.poset_file, "Poset JSON file");
  app.add_option("--family", o.family_files, "Derivation family JSON file (repeatable)");

  struct Verb {
    const char* name;
    const char* help;
    const char* args;
    void (*run)(const Options&);
  };
  const Verb verbs[] = {
      {"d", "Exterior derivative of a form", "form", cmd_d},
      {"wedge", "Wedge product of two forms", "forms", cmd_wedge},
      {"contract", "Contraction of a form with --vf", "form", cmd_contract},
      {"lie", "Lie derivative of a form along --vf", "form", cmd_lie},
      {"bracket", "Bracket of two --vf fields", nullptr, cmd_bracket},
      {"verify-cartan", "Check the five Cartan identities", nullptr, cmd_verify_cartan},
      {"tangent", "Certify that --vf preserves the ideal", nullptr, cmd_tangent},
      {"in-j", "Whether every coefficient of --vf lies in the ideal", nullptr, cmd_in_j},
      {"class-equal", "Whether two --vf fields define the same derivation", nullptr, cmd_class_equal},
      {"cross-pair", "Axis pair of a derivation of the cross xy = 0", nullptr, cmd_cross_pair},
      {"glue", "Glue a --family of local fields over a --poset cover", nullptr, cmd_glue},
      {"presheaf-verify", "Cartan identities open by open with restriction squares", nullptr, cmd_presheaf_verify},
      {"parse", "Parse an expression (or a form with --form)", "text", cmd_parse},
  };
  void (*selected)(const Options&) = nullptr;
  for (const auto& verb : verbs) {
    CLI::App* sub = app.add_subcommand(verb.name, verb.help);
    if (verb.args) sub->add_option(verb.args, o.positional, verb.args)->required();
    if (std::string(verb.name) == "parse") sub->add_flag("--form", o.as_form, "Parse a differential form");
    sub->callback([&selected, run = verb.run] { selected = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    selected(o);
    return 0;
  } catch (const DomainError& e) {
    std::cerr << diagnostics(e).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << diagnostics(e).dump() << "\n";
    return 2;
  }
}
