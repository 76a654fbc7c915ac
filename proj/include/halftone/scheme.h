#ifndef HALFTONE_SCHEME_H_
#define HALFTONE_SCHEME_H_

// Weighted Sigma-Delta error diffusion schemes: causal directions, exact
// rational weights, and per-direction feedback filters.

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace halftone::diffusion {

using Rational = boost::rational<long long>;

// Accepts "n", "n/d" and "-n/d".
Rational ParseRational(const std::string& text);
std::string FormatRational(const Rational& r);

// Offset to an earlier pixel: `di` rows up and `dj` columns left of the
// current one (dj may be negative, i.e. to the right on a previous row).
struct Direction {
  int di = 0;
  int dj = 0;

  // Already visited by a raster scan: di >= 1, or di == 0 and dj >= 1.
  bool IsCausal() const { return di >= 1 || (di == 0 && dj >= 1); }
  friend auto operator<=>(const Direction&, const Direction&) = default;
};

// Causal filter h_1..h_L (h_n = 0 for n <= 0).
class FeedbackFilter {
 public:
  FeedbackFilter() = default;
  explicit FeedbackFilter(std::vector<Rational> taps);

  // h = [1], the first-order filter.
  static FeedbackFilter FirstOrder();
  // h_1 = 3/2, h_3 = -1/2.
  static FeedbackFilter H2();
  // h_1 = 4/3, h_4 = -1/3.
  static FeedbackFilter H3();

  // taps()[n-1] is h_n.
  std::span<const Rational> taps() const { return taps_; }
  std::vector<double> TapsAsDouble() const;
  Rational TapSum() const;

  friend bool operator==(const FeedbackFilter&, const FeedbackFilter&) = default;

 private:
  std::vector<Rational> taps_;
};

struct OrderCertificate {
  bool holds = false;
  // g with delta^0 - h = Delta^r g, lowest power first, trailing zeros
  // removed. Empty when !holds.
  std::vector<Rational> quotient;
};

// Checks whether 1 - sum_n h_n z^n is divisible by (1 - z)^r.
OrderCertificate VerifyOrder(const FeedbackFilter& filter, int r);

struct SchemeEntry {
  Direction direction;
  Rational weight;
  FeedbackFilter filter;
};

class SchemeSpec {
 public:
  // Throws ValidationError unless every direction is causal and distinct,
  // the weights sum to exactly 1, and every filter certifies `order`.
  SchemeSpec(std::string name, std::vector<SchemeEntry> entries, int order);

  const std::string& name() const { return name_; }
  std::span<const SchemeEntry> entries() const { return entries_; }
  int order() const { return order_; }
  Rational WeightSum() const;

 private:
  std::string name_;
  std::vector<SchemeEntry> entries_;
  int order_;
};

// fs1, shiau-fan, jjn, a23, a33, fs2-33, shiau-fan2-33, jjn2-33.
const std::vector<SchemeSpec>& BuiltinSchemes();
std::vector<std::string> BuiltinSchemeNames();
std::optional<SchemeSpec> FindBuiltinScheme(const std::string& name);

// Coefficient of v_{n - o} in v_n - sum w (h *_d v)_n for every offset o =
// (rows up, columns left): +1 at the origin and -w*h_k at k*d.
using ExtendedGrid = std::map<std::pair<int, int>, Rational>;
ExtendedGrid ExpandScheme(const SchemeSpec& scheme);

// Dense rendering of the extended grid, one line per di (0 first), columns
// by increasing dj. Cells fed by a single weight/tap product are printed
// unreduced as (w_num*h_num)/(w_den*h_den), others reduced; the origin is
// shown as "[1]" and empty cells as "0".
std::string FormatExtendedGrid(const SchemeSpec& scheme);

// {"name": ..., "order": r, "entries": [{"di":..,"dj":..,"weight":"n/d",
//   "taps":["n/d",...]}, ...]}
SchemeSpec ParseSchemeJson(const std::string& text);
SchemeSpec LoadSchemeJson(const std::filesystem::path& path);
std::string SchemeToJson(const SchemeSpec& scheme);

}  // namespace halftone::diffusion

#endif  // HALFTONE_SCHEME_H_
