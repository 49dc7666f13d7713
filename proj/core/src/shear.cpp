#include "folia/shear.hpp"

#include <cmath>

#include "folia/quadrature.hpp"

namespace folia {

namespace {

Complex sqrt_near(Complex w, Complex ref) {
  Complex s = std::sqrt(w);
  if (ref != Complex(0) && (s * std::conj(ref)).real() < 0.0) return -s;
  return s;
}

}  // namespace

StripPeriod strip_period(const QuadraticDifferential& q, const FoliationSkeleton& skeleton,
                         int strip_index) {
  if (strip_index < 0 || strip_index >= static_cast<int>(skeleton.strips.size()))
    throw domain_error("strip period: no such strip");
  const Strip& strip = skeleton.strips[strip_index];
  if (strip.arc.size() < 2) throw domain_error("degenerate arc");
  double extent = 0.0;
  for (size_t i = 0; i + 1 < strip.arc.size(); ++i)
    extent += std::abs(strip.arc[i + 1] - strip.arc[i]);
  if (extent == 0.0) throw domain_error("degenerate arc");

  const GaussRule& rule = gauss_rule(4);
  Complex ref = 0.0;
  Complex acc = 0.0;
  for (size_t i = 0; i + 1 < strip.arc.size(); ++i) {
    Complex a = strip.arc[i], b = strip.arc[i + 1];
    Complex mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
      Complex s = sqrt_near(q.eval(mid + half * rule.nodes[k]), ref);
      ref = s;
      acc += rule.weights[k] * s * half;
    }
  }
  if (acc.imag() < 0) acc = -acc;
  return {strip_index, acc, acc.imag()};
}

std::vector<StripPeriod> apply_shear(const FoliationSkeleton& skeleton,
                                     const ShearVector& s, const ShearOptions& opts) {
  if (!skeleton.saddle_connections.empty())
    throw domain_error("non-generic skeleton: shear requires a saddle-free decomposition");
  if (s.s.size() != skeleton.strips.size())
    throw domain_error("dimension mismatch: one shear parameter per strip");
  for (size_t j = 0; j < s.s.size(); ++j)
    if (std::abs(s.s[j]) > opts.trust_factor * skeleton.strips[j].width)
      throw domain_error("shear outside the trust region");

  std::vector<StripPeriod> out;
  out.reserve(s.s.size());
  for (size_t j = 0; j < s.s.size(); ++j) {
    const Strip& strip = skeleton.strips[j];
    out.push_back({static_cast<int>(j), strip.period + s.s[j], strip.width});
  }
  return out;
}

int generic_strip_count(int genus, const std::vector<int>& pole_orders) {
  int chi = 6 * genus - 6;
  for (int n : pole_orders) {
    if (n < 3) throw domain_error("pole orders must be >= 3");
    chi += n + 1;
  }
  return chi;
}

std::string periods_to_csv(const std::vector<StripPeriod>& periods) {
  std::string out = "strip,re,im,width\n";
  for (const auto& p : periods) {
    out += std::to_string(p.strip);
    out += ',';
    out += format_double(p.period.real());
    out += ',';
    out += format_double(p.period.imag());
    out += ',';
    out += format_double(p.width);
    out += '\n';
  }
  return out;
}

JsonValue periods_to_json(const std::vector<StripPeriod>& periods) {
  JsonValue arr{JsonValue::Array{}};
  for (const auto& p : periods) {
    JsonValue j;
    j.set("strip", JsonValue(int64_t(p.strip)));
    j.set("period", JsonValue::complex(p.period));
    j.set("width", JsonValue(p.width));
    arr.push_back(std::move(j));
  }
  JsonValue root;
  root.set("periods", std::move(arr));
  return root;
}

}  // namespace folia
