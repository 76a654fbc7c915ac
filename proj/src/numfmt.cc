#include "halftone/numfmt.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace halftone {

double RoundSignificant(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

}  // namespace halftone
