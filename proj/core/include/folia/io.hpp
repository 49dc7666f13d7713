#pragma once

#include <string>

#include "folia/foliation.hpp"
#include "folia/jsonfmt.hpp"
#include "folia/qdiff.hpp"

namespace folia {

/// Parses a differential manifest: either
///   {"numerator": [[re,im],...], "denominator": [[re,im],...],
///    "poles": [{"at": "inf"|[re,im], "order": n}, ...]}
/// or a Laurent model {"order": n, "sqrt_coeffs": [[k,re,im],...]} where k is
/// the z-exponent of sqrt(q) (half-integral for odd orders).  Unknown keys
/// are rejected; a "poles" list, when present, is validated against the
/// rational form.
QuadraticDifferential differential_from_json_text(const std::string& text);

JsonValue differential_to_json(const QuadraticDifferential& q);
JsonValue skeleton_to_json(const FoliationSkeleton& sk);
JsonValue principal_part_to_json(const PrincipalPart& p);

}  // namespace folia
