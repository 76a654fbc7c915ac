#include "halftone/scheme.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "halftone/error.h"
#include "json.hpp"

namespace halftone::diffusion {
namespace {

using Json = nlohmann::ordered_json;

std::string DirectionText(const Direction& d) {
  return "(" + std::to_string(d.di) + "," + std::to_string(d.dj) + ")";
}

Rational TapFromJson(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return ParseRational(j.get<std::string>());
  throw ValidationError("scheme JSON: rational must be a string or integer");
}

SchemeSpec MakeFirstOrder(std::string name,
                          std::vector<std::pair<Direction, long long>> items,
                          long long den) {
  std::vector<SchemeEntry> entries;
  for (auto& [d, n] : items) {
    entries.push_back({d, Rational(n, den), FeedbackFilter::FirstOrder()});
  }
  return SchemeSpec(std::move(name), std::move(entries), 1);
}

SchemeSpec WithFilter(const SchemeSpec& base, std::string name,
                      const FeedbackFilter& filter, int order) {
  std::vector<SchemeEntry> entries(base.entries().begin(),
                                   base.entries().end());
  for (auto& e : entries) e.filter = filter;
  return SchemeSpec(std::move(name), std::move(entries), order);
}

}  // namespace

Rational ParseRational(const std::string& text) {
  auto fail = [&]() -> Rational {
    throw ValidationError("malformed rational '" + text + "'");
  };
  auto parse_int = [&](const std::string& s) -> long long {
    if (s.empty()) fail();
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      fail();
    }
    if (used != s.size()) fail();
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return Rational(parse_int(text));
  const long long num = parse_int(text.substr(0, slash));
  const long long den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ValidationError("zero denominator in '" + text + "'");
  return Rational(num, den);
}

std::string FormatRational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

FeedbackFilter::FeedbackFilter(std::vector<Rational> taps)
    : taps_(std::move(taps)) {
  while (!taps_.empty() && taps_.back().numerator() == 0) taps_.pop_back();
}

FeedbackFilter FeedbackFilter::FirstOrder() {
  return FeedbackFilter(std::vector<Rational>{Rational(1)});
}

FeedbackFilter FeedbackFilter::H2() {
  return FeedbackFilter(
      std::vector<Rational>{Rational(3, 2), Rational(0), Rational(-1, 2)});
}

FeedbackFilter FeedbackFilter::H3() {
  return FeedbackFilter(std::vector<Rational>{Rational(4, 3), Rational(0),
                                              Rational(0), Rational(-1, 3)});
}

std::vector<double> FeedbackFilter::TapsAsDouble() const {
  std::vector<double> out;
  out.reserve(taps_.size());
  for (const auto& t : taps_) out.push_back(boost::rational_cast<double>(t));
  return out;
}

Rational FeedbackFilter::TapSum() const {
  Rational sum(0);
  for (const auto& t : taps_) sum += t;
  return sum;
}

OrderCertificate VerifyOrder(const FeedbackFilter& filter, int r) {
  if (r < 1) throw ValidationError("order must be positive");
  // Coefficients of 1 - sum h_n z^n, lowest power first.
  std::vector<Rational> poly{Rational(1)};
  for (const auto& t : filter.taps()) poly.push_back(-t);

  for (int step = 0; step < r; ++step) {
    if (poly.size() < 2) return {};
    Rational acc(0);
    std::vector<Rational> quotient;
    quotient.reserve(poly.size() - 1);
    for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
      acc += poly[k];
      quotient.push_back(acc);
    }
    if ((acc + poly.back()).numerator() != 0) return {};
    poly = std::move(quotient);
  }
  while (!poly.empty() && poly.back().numerator() == 0) poly.pop_back();
  return {true, std::move(poly)};
}

SchemeSpec::SchemeSpec(std::string name, std::vector<SchemeEntry> entries,
                       int order)
    : name_(std::move(name)), entries_(std::move(entries)), order_(order) {
  if (name_.empty()) throw ValidationError("scheme name must not be empty");
  if (entries_.empty()) {
    throw ValidationError("scheme '" + name_ + "' has no entries");
  }
  if (order_ < 1) {
    throw ValidationError("scheme '" + name_ + "' order must be >= 1");
  }
  std::set<Direction> seen;
  for (const auto& e : entries_) {
    if (!e.direction.IsCausal()) {
      throw ValidationError("scheme '" + name_ + "': direction " +
                            DirectionText(e.direction) +
                            " is not causal for a raster scan");
    }
    if (!seen.insert(e.direction).second) {
      throw ValidationError("scheme '" + name_ + "': duplicate direction " +
                            DirectionText(e.direction));
    }
    if (!VerifyOrder(e.filter, order_).holds) {
      throw ValidationError("scheme '" + name_ + "': filter at " +
                            DirectionText(e.direction) + " is not of order " +
                            std::to_string(order_));
    }
  }
  if (WeightSum() != Rational(1)) {
    throw ValidationError("scheme '" + name_ + "': weights sum to " +
                          FormatRational(WeightSum()) + ", expected 1");
  }
}

Rational SchemeSpec::WeightSum() const {
  Rational sum(0);
  for (const auto& e : entries_) sum += e.weight;
  return sum;
}

const std::vector<SchemeSpec>& BuiltinSchemes() {
  static const std::vector<SchemeSpec> schemes = [] {
    std::vector<SchemeSpec> out;
    const SchemeSpec fs1 = MakeFirstOrder(
        "fs1", {{{1, 0}, 5}, {{0, 1}, 7}, {{1, 1}, 1}, {{1, -1}, 3}}, 16);
    const SchemeSpec sf = MakeFirstOrder("shiau-fan",
                                         {{{0, 1}, 8},
                                          {{1, 0}, 4},
                                          {{1, -1}, 2},
                                          {{1, -2}, 1},
                                          {{1, -3}, 1}},
                                         16);
    const SchemeSpec jjn = MakeFirstOrder("jjn",
                                          {{{0, 1}, 7},
                                           {{0, 2}, 5},
                                           {{1, 2}, 3},
                                           {{1, 1}, 5},
                                           {{1, 0}, 7},
                                           {{1, -1}, 5},
                                           {{1, -2}, 3},
                                           {{2, 2}, 1},
                                           {{2, 1}, 3},
                                           {{2, 0}, 5},
                                           {{2, -1}, 3},
                                           {{2, -2}, 1}},
                                          48);
    out.push_back(fs1);
    out.push_back(sf);
    out.push_back(jjn);
    out.emplace_back(
        "a23",
        std::vector<SchemeEntry>{
            {{0, 1}, Rational(1, 2), FeedbackFilter::H2()},
            {{1, 0}, Rational(1, 2), FeedbackFilter::H3()}},
        2);
    out.emplace_back(
        "a33",
        std::vector<SchemeEntry>{
            {{0, 1}, Rational(1, 2), FeedbackFilter::H3()},
            {{1, 0}, Rational(1, 2), FeedbackFilter::H3()}},
        2);
    out.push_back(WithFilter(fs1, "fs2-33", FeedbackFilter::H3(), 2));
    out.push_back(WithFilter(sf, "shiau-fan2-33", FeedbackFilter::H3(), 2));
    out.push_back(WithFilter(jjn, "jjn2-33", FeedbackFilter::H3(), 2));
    return out;
  }();
  return schemes;
}

std::vector<std::string> BuiltinSchemeNames() {
  std::vector<std::string> names;
  for (const auto& s : BuiltinSchemes()) names.push_back(s.name());
  return names;
}

std::optional<SchemeSpec> FindBuiltinScheme(const std::string& name) {
  for (const auto& s : BuiltinSchemes()) {
    if (s.name() == name) return s;
  }
  return std::nullopt;
}

ExtendedGrid ExpandScheme(const SchemeSpec& scheme) {
  ExtendedGrid grid;
  grid[{0, 0}] = Rational(1);
  for (const auto& e : scheme.entries()) {
    const auto taps = e.filter.taps();
    for (std::size_t k = 0; k < taps.size(); ++k) {
      if (taps[k].numerator() == 0) continue;
      const int step = static_cast<int>(k + 1);
      grid[{e.direction.di * step, e.direction.dj * step}] -= e.weight * taps[k];
    }
  }
  return grid;
}

std::string FormatExtendedGrid(const SchemeSpec& scheme) {
  struct Cell {
    Rational value{0};
    int contributions = 0;
    long long raw_num = 0;
    long long raw_den = 1;
  };
  std::map<std::pair<int, int>, Cell> cells;
  for (const auto& e : scheme.entries()) {
    const auto taps = e.filter.taps();
    for (std::size_t k = 0; k < taps.size(); ++k) {
      if (taps[k].numerator() == 0) continue;
      const int step = static_cast<int>(k + 1);
      Cell& c = cells[{e.direction.di * step, e.direction.dj * step}];
      c.value -= e.weight * taps[k];
      ++c.contributions;
      c.raw_num = -e.weight.numerator() * taps[k].numerator();
      c.raw_den = e.weight.denominator() * taps[k].denominator();
    }
  }
  int max_di = 0;
  int min_dj = 0;
  int max_dj = 0;
  for (const auto& [offset, cell] : cells) {
    max_di = std::max(max_di, offset.first);
    min_dj = std::min(min_dj, offset.second);
    max_dj = std::max(max_dj, offset.second);
  }

  std::vector<std::vector<std::string>> text(
      max_di + 1, std::vector<std::string>(max_dj - min_dj + 1, "0"));
  text[0][-min_dj] = "[1]";
  for (const auto& [offset, cell] : cells) {
    std::string& out = text[offset.first][offset.second - min_dj];
    if (offset == std::pair{0, 0}) continue;
    if (cell.value.numerator() == 0) {
      out = "0";
    } else if (cell.contributions == 1) {
      out = std::to_string(cell.raw_num);
      if (cell.raw_den != 1) out += "/" + std::to_string(cell.raw_den);
    } else {
      out = FormatRational(cell.value);
    }
  }

  std::size_t width = 0;
  for (const auto& row : text) {
    for (const auto& s : row) width = std::max(width, s.size());
  }
  std::ostringstream os;
  for (const auto& row : text) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << ' ';
      os << std::string(width - row[c].size(), ' ') << row[c];
    }
    os << '\n';
  }
  return os.str();
}

SchemeSpec ParseSchemeJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scheme JSON: ") + e.what(), e.byte);
  }
  try {
    const std::string name = j.at("name").get<std::string>();
    const int order = j.at("order").get<int>();
    std::vector<SchemeEntry> entries;
    for (const auto& item : j.at("entries")) {
      SchemeEntry e;
      e.direction = {item.at("di").get<int>(), item.at("dj").get<int>()};
      e.weight = TapFromJson(item.at("weight"));
      std::vector<Rational> taps;
      if (item.contains("taps")) {
        for (const auto& t : item.at("taps")) taps.push_back(TapFromJson(t));
      } else {
        taps.emplace_back(1);
      }
      e.filter = FeedbackFilter(std::move(taps));
      entries.push_back(std::move(e));
    }
    return SchemeSpec(name, std::move(entries), order);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scheme JSON: ") + e.what());
  }
}

SchemeSpec LoadSchemeJson(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scheme file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return ParseSchemeJson(text);
}

std::string SchemeToJson(const SchemeSpec& scheme) {
  Json j;
  j["name"] = scheme.name();
  j["order"] = scheme.order();
  Json entries = Json::array();
  for (const auto& e : scheme.entries()) {
    Json item;
    item["di"] = e.direction.di;
    item["dj"] = e.direction.dj;
    item["weight"] = FormatRational(e.weight);
    Json taps = Json::array();
    for (const auto& t : e.filter.taps()) taps.push_back(FormatRational(t));
    item["taps"] = taps;
    entries.push_back(item);
  }
  j["entries"] = entries;
  return j.dump(2);
}

}  // namespace halftone::diffusion
