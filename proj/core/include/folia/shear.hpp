#pragma once

#include <string>
#include <vector>

#include "folia/foliation.hpp"
#include "folia/jsonfmt.hpp"

namespace folia {

struct StripPeriod {
  int strip = 0;
  Complex period;  // Im > 0
  double width = 0.0;
};

/// Re-integrates sqrt(q) along the strip's recorded transverse arc and
/// normalizes the sign so Im > 0.
StripPeriod strip_period(const QuadraticDifferential& q, const FoliationSkeleton& skeleton,
                         int strip_index);

struct ShearVector {
  std::vector<double> s;
};

struct ShearOptions {
  // |s_j| <= trust_factor * width_j; the underlying local-diffeomorphism
  // statement only covers a neighborhood of the origin.
  double trust_factor = 10.0;
};

/// Translates each strip period by the real shear parameter; widths and all
/// combinatorial data are unchanged.
std::vector<StripPeriod> apply_shear(const FoliationSkeleton& skeleton,
                                     const ShearVector& s, const ShearOptions& opts = {});

/// Strip count chi = 6g - 6 + sum(n_i + 1) of a generic differential.
int generic_strip_count(int genus, const std::vector<int>& pole_orders);

std::string periods_to_csv(const std::vector<StripPeriod>& periods);
JsonValue periods_to_json(const std::vector<StripPeriod>& periods);

}  // namespace folia
