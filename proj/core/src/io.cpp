#include "folia/io.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

namespace folia {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::runtime_error(where + ": unknown key '" + it.key() + "'");
}

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::runtime_error(where + ": expected [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

std::vector<Complex> parse_coeff_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw std::runtime_error(where + ": expected a coefficient list");
  std::vector<Complex> out;
  for (const auto& e : j) out.push_back(parse_complex(e, where));
  return out;
}

}  // namespace

QuadraticDifferential differential_from_json_text(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) throw std::runtime_error("differential manifest: expected an object");

  if (j.contains("order") || j.contains("sqrt_coeffs")) {
    reject_unknown_keys(j, {"order", "sqrt_coeffs"}, "laurent model");
    if (!j.contains("order") || !j["order"].is_number_integer())
      throw std::runtime_error("laurent model: integer 'order' required");
    int n = j["order"].get<int>();
    if (!j.contains("sqrt_coeffs") || !j["sqrt_coeffs"].is_array())
      throw std::runtime_error("laurent model: 'sqrt_coeffs' list required");
    std::vector<SqrtTerm> terms;
    for (const auto& e : j["sqrt_coeffs"]) {
      if (!e.is_array() || e.size() != 3)
        throw std::runtime_error("laurent model: sqrt_coeffs entries are [k, re, im]");
      double k = e[0].get<double>();
      double k2 = 2.0 * k;
      if (std::abs(k2 - std::round(k2)) > 1e-9)
        throw std::runtime_error("laurent model: exponents must be half-integral");
      terms.push_back({static_cast<int>(std::llround(k2)),
                       Complex(e[1].get<double>(), e[2].get<double>())});
    }
    return QuadraticDifferential::laurent(n, std::move(terms));
  }

  reject_unknown_keys(j, {"numerator", "denominator", "poles"}, "differential manifest");
  if (!j.contains("numerator"))
    throw std::runtime_error("differential manifest: 'numerator' required");
  Poly num(parse_coeff_list(j["numerator"], "numerator"));
  Poly den = j.contains("denominator")
                 ? Poly(parse_coeff_list(j["denominator"], "denominator"))
                 : Poly({Complex(1)});
  QuadraticDifferential q = QuadraticDifferential::rational(std::move(num), std::move(den));

  if (j.contains("poles")) {
    if (!j["poles"].is_array()) throw std::runtime_error("differential manifest: 'poles' is a list");
    for (const auto& p : j["poles"]) {
      reject_unknown_keys(p, {"at", "order"}, "pole entry");
      if (!p.contains("at") || !p.contains("order"))
        throw std::runtime_error("pole entry: 'at' and 'order' required");
      int order = p["order"].get<int>();
      bool matched = false;
      if (p["at"].is_string() && p["at"].get<std::string>() == "inf") {
        int idx = q.pole_index_at_infinity();
        matched = idx >= 0 && q.poles()[idx].order == order;
      } else {
        Complex at = parse_complex(p["at"], "pole entry");
        for (const auto& have : q.poles())
          if (have.location && std::abs(*have.location - at) < 1e-6 * (1 + std::abs(at)) &&
              have.order == order)
            matched = true;
      }
      if (!matched)
        throw std::runtime_error("differential manifest: declared pole disagrees with the rational form");
    }
  }
  return q;
}

JsonValue differential_to_json(const QuadraticDifferential& q) {
  JsonValue j;
  if (q.is_laurent()) {
    j.set("order", JsonValue(int64_t(q.laurent_order())));
    JsonValue coeffs{JsonValue::Array{}};
    for (const auto& t : q.sqrt_terms())
      coeffs.push_back(JsonValue(JsonValue::Array{0.5 * t.twice_exponent, t.coeff.real(),
                                                  t.coeff.imag()}));
    j.set("sqrt_coeffs", std::move(coeffs));
    return j;
  }
  auto poly_json = [](const Poly& p) {
    JsonValue arr{JsonValue::Array{}};
    for (const auto& c : p.coeffs()) arr.push_back(JsonValue::complex(c));
    return arr;
  };
  j.set("numerator", poly_json(q.numerator()));
  j.set("denominator", poly_json(q.denominator()));
  JsonValue poles{JsonValue::Array{}};
  for (const auto& p : q.poles()) {
    JsonValue pj;
    pj.set("at", p.location ? JsonValue::complex(*p.location) : JsonValue("inf"));
    pj.set("order", JsonValue(int64_t(p.order)));
    poles.push_back(std::move(pj));
  }
  j.set("poles", std::move(poles));
  return j;
}

namespace {

JsonValue polyline_json(const std::vector<Complex>& pts, size_t max_points) {
  JsonValue arr{JsonValue::Array{}};
  size_t stride = pts.size() > max_points ? (pts.size() + max_points - 1) / max_points : 1;
  for (size_t i = 0; i < pts.size(); i += stride) arr.push_back(JsonValue::complex(pts[i]));
  if (!pts.empty() && (pts.size() - 1) % stride != 0)
    arr.push_back(JsonValue::complex(pts.back()));
  return arr;
}

const char* termination_name(Termination::Kind k) {
  switch (k) {
    case Termination::Kind::escaped_to_pole: return "pole";
    case Termination::Kind::hit_zero: return "zero";
    case Termination::Kind::closed: return "closed";
    default: return "max_length";
  }
}

}  // namespace

JsonValue skeleton_to_json(const FoliationSkeleton& sk) {
  JsonValue j;
  JsonValue hp{JsonValue::Array{}};
  for (const auto& h : sk.half_planes) {
    JsonValue e;
    e.set("pole", JsonValue(int64_t(h.pole_index)));
    e.set("sector", JsonValue(int64_t(h.sector)));
    hp.push_back(std::move(e));
  }
  j.set("half_planes", std::move(hp));

  JsonValue strips{JsonValue::Array{}};
  for (const auto& s : sk.strips) {
    JsonValue e;
    e.set("zeros", JsonValue(JsonValue::Array{s.zero_a, s.zero_b}));
    e.set("period", JsonValue::complex(s.period));
    e.set("width", JsonValue(s.width));
    e.set("arc", polyline_json(s.arc, 512));
    e.set("arc_decimated", JsonValue(true));
    strips.push_back(std::move(e));
  }
  j.set("strips", std::move(strips));

  JsonValue seps{JsonValue::Array{}};
  for (const auto& s : sk.separatrices) {
    JsonValue e;
    e.set("zero", JsonValue(int64_t(s.zero_index)));
    e.set("prong", JsonValue(int64_t(s.prong)));
    e.set("termination", JsonValue(termination_name(s.traj.termination.kind)));
    e.set("points", polyline_json(s.traj.points, 512));
    seps.push_back(std::move(e));
  }
  j.set("separatrices", std::move(seps));

  JsonValue sc{JsonValue::Array{}};
  for (const auto& s : sk.saddle_connections)
    sc.push_back(JsonValue(JsonValue::Array{s.zero_a, s.zero_b}));
  j.set("saddle_connections", std::move(sc));
  return j;
}

JsonValue principal_part_to_json(const PrincipalPart& p) {
  PrincipalPart canon = p.canonical_sign();
  JsonValue j;
  j.set("order", JsonValue(int64_t(canon.pole_order)));
  JsonValue coeffs{JsonValue::Array{}};
  for (const auto& c : canon.coefficients) coeffs.push_back(JsonValue::complex(c));
  j.set("coefficients", std::move(coeffs));
  j.set("residue", JsonValue::complex(canon.residue()));
  return j;
}

}  // namespace folia
