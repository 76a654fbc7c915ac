#include "halftone/cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "halftone/attraction.h"
#include "halftone/diffusion.h"
#include "halftone/error.h"
#include "halftone/evaluation.h"
#include "halftone/image.h"
#include "halftone/numfmt.h"
#include "halftone/pgm.h"
#include "halftone/rkhs.h"
#include "halftone/scheme.h"
#include "json.hpp"

namespace halftone::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Thrown for flag combinations CLI11 cannot check on its own.
struct UsageError : Error {
  using Error::Error;
};

struct HalftoneArgs {
  std::string input;
  std::string output;
  std::string scheme = "fs1";
  std::string scan = "raster";
  double rescale = 0.03;
  bool no_rescale = false;
};

struct DotsArgs {
  std::string input;
  std::string out;
  std::string snap;
  std::uint64_t seed = 0;
  int iters = 20000;
  double tau = 0.1;
  double softening = 1.0;
};

struct MetricsArgs {
  std::string original;
  std::string halftone;
  std::vector<std::string> metrics{"quadrature", "fourier", "ball", "lowpass"};
  double sigma = 2.0;
  int bandwidth = 8;
  double radius_max = 0.0;
  int resolution = 8;
  std::string kernel = "gaussian";
  double kernel_scale = 1.0;
  double margin = 0.1;
};

struct ExpandArgs {
  std::string scheme;
};

struct DecayArgs {
  int dims = 1;
  int order = 1;
  std::string filter;
  std::string scheme;
  std::string scan = "raster";
  std::string lambdas;
  std::string kernel = "ideal";
  double kernel_scale = 0.0;
  double margin = 0.1;
  std::uint64_t seed = 0;
  double bound = 0.9;
  int k_max = 0;
  double domain = 0.0;
  std::string out;
  std::string csv;
  int synthetic = 0;
  bool has_expect = false;
  double expect_slope = 0.0;
  double slope_tol = 0.25;
  bool two_sided = false;
};

std::string Join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& item : items) {
    if (!s.empty()) s += ", ";
    s += item;
  }
  return s;
}

// Builtin name, or a path to a scheme JSON file.
diffusion::SchemeSpec ResolveScheme(const std::string& name) {
  if (auto s = diffusion::FindBuiltinScheme(name)) return *s;
  if (fs::is_regular_file(name)) return diffusion::LoadSchemeJson(name);
  throw UsageError("unknown scheme '" + name + "'; builtin schemes: " +
                   Join(diffusion::BuiltinSchemeNames()));
}

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in list '" + text + "'");
    }
    if (used != item.size()) {
      throw UsageError("bad number '" + item + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << text;
  if (!f) throw IoError("failed writing " + path);
}

std::vector<attraction::Point> BlackPixels(const GrayImage& image) {
  std::vector<attraction::Point> dots;
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      if (image.at(r, c) < 0.5) dots.push_back({c + 1.0, r + 1.0});
    }
  }
  return dots;
}

int RunHalftone(const HalftoneArgs& a, std::ostream& out) {
  const diffusion::SchemeSpec scheme = ResolveScheme(a.scheme);
  const diffusion::ScanOrder scan = diffusion::ParseScanOrder(a.scan);
  SignedImage p = ToSigned(LoadPgm(a.input));
  if (scheme.order() >= 2 && !a.no_rescale) p = diffusion::Rescale(p, a.rescale);
  const auto result = diffusion::RunScheme(p, scheme, scan);
  SavePgm(result.q, a.output);
  Json j;
  j["scheme"] = scheme.name();
  j["scan"] = std::string(diffusion::ScanName(scan));
  j["v_max_abs"] = RoundSignificant(result.v_max_abs, 12);
  out << j.dump() << '\n';
  return kExitOk;
}

int RunDots(const DotsArgs& a, std::ostream& out) {
  const GrayImage image = LoadPgm(a.input);
  const int m = attraction::DotCount(image);
  const attraction::WeightField weights(image);
  const double lambda = attraction::EquilibrationLambda(weights, m);
  attraction::EvolutionParams params;
  params.tau = a.tau;
  params.max_iters = a.iters;
  params.seed = a.seed;
  params.softening = a.softening;
  const auto start =
      attraction::RandomConfiguration(m, image.width(), image.height(), a.seed);
  const auto result = attraction::Evolve(start, weights, params);
  WriteText(a.out, attraction::FormatDotsCsv(result.config));
  if (!a.snap.empty()) SavePgm(attraction::SnapToGrid(result.config), a.snap);

  Json j;
  j["m"] = m;
  j["lambda"] = RoundSignificant(lambda, 12);
  j["initial_energy"] = RoundSignificant(
      attraction::Energy(start.positions(), weights, lambda), 12);
  j["final_energy"] = RoundSignificant(
      attraction::Energy(result.config.positions(), weights, lambda), 12);
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  out << j.dump() << '\n';
  return kExitOk;
}

int RunMetrics(const MetricsArgs& a, std::ostream& out) {
  const GrayImage original = LoadPgm(a.original);
  const GrayImage half = LoadPgm(a.halftone);
  if (original.width() != half.width() || original.height() != half.height()) {
    throw UsageError("image dimensions differ: " +
                     std::to_string(original.width()) + "x" +
                     std::to_string(original.height()) + " vs " +
                     std::to_string(half.width()) + "x" +
                     std::to_string(half.height()));
  }
  const std::vector<attraction::Point> dots = BlackPixels(half);
  const double mass = attraction::WeightField(original).Sum();
  const double lambda = dots.empty() ? 0.0 : mass / dots.size();

  rkhs::MetricValues values;
  for (const auto& name : a.metrics) {
    if (name == "quadrature") {
      values.quadrature_error = rkhs::QuadratureError(
          dots, rkhs::DiscreteMeasure::FromImage(original),
          rkhs::RadialKernel::Gaussian(a.sigma), lambda);
    } else if (name == "fourier") {
      values.fourier_discrepancy = rkhs::FourierDiscrepancy(
          dots, original, rkhs::FourierKernel::Default(a.bandwidth), lambda);
    } else if (name == "ball") {
      const double r_max =
          a.radius_max > 0.0
              ? a.radius_max
              : std::max(1.0, std::min(original.width(), original.height()) / 4.0);
      values.ball_discrepancy =
          rkhs::BallDiscrepancy(dots, original, r_max, a.resolution, lambda);
    } else if (name == "lowpass") {
      const double scale =
          a.kernel_scale > 0.0 ? a.kernel_scale
                               : (a.kernel == "ideal" ? 0.25 : 1.0);
      values.lowpass_error = evaluation::LowPassImageError(
          original, half, evaluation::LowPassKernel::Parse(a.kernel, scale),
          a.margin);
    } else {
      throw UsageError("unknown metric '" + name +
                       "' (expected quadrature, fourier, ball, lowpass)");
    }
  }
  out << rkhs::MetricsToJson(values) << '\n';
  return kExitOk;
}

int RunExpand(const ExpandArgs& a, std::ostream& out) {
  out << diffusion::FormatExtendedGrid(ResolveScheme(a.scheme));
  return kExitOk;
}

int RunDecay(const DecayArgs& a, std::ostream& out, std::ostream& err) {
  const bool two_d = a.dims == 2 || !a.scheme.empty();
  std::vector<double> lambdas =
      a.lambdas.empty()
          ? (two_d ? std::vector<double>{2, 4, 8, 16}
                   : std::vector<double>{4, 8, 16, 32, 64})
          : ParseDoubleList(a.lambdas);
  if (lambdas.size() < 4) {
    throw UsageError("at least four lambdas are required, got " +
                     std::to_string(lambdas.size()));
  }

  evaluation::DecayReport report;
  int order = a.order;
  if (a.synthetic > 0) {
    order = a.synthetic;
    std::vector<double> errors;
    for (double l : lambdas) errors.push_back(std::pow(l, -a.synthetic));
    report = evaluation::MakeDecayReport(lambdas, std::move(errors));
  } else {
    evaluation::DecayOptions options;
    options.lambdas = lambdas;
    const double scale = a.kernel_scale > 0.0
                             ? a.kernel_scale
                             : (a.kernel == "ideal" ? 0.5 : 1.0);
    options.kernel = evaluation::LowPassKernel::Parse(a.kernel, scale);
    options.margin = a.margin;
    options.domain_length = a.domain > 0.0 ? a.domain : (two_d ? 64.0 : 0.0);
    if (two_d) {
      const diffusion::SchemeSpec scheme =
          ResolveScheme(a.scheme.empty() ? "fs1" : a.scheme);
      order = scheme.order();
      const auto signal = evaluation::BandlimitedSignal::Random(
          2, a.k_max > 0 ? a.k_max : 8, a.bound, a.seed);
      report = evaluation::DecayExperiment2D(
          signal, scheme, diffusion::ParseScanOrder(a.scan), options);
    } else {
      diffusion::FeedbackFilter filter;
      if (!a.filter.empty()) {
        std::vector<diffusion::Rational> taps;
        std::stringstream ss(a.filter);
        std::string item;
        while (std::getline(ss, item, ',')) {
          taps.push_back(diffusion::ParseRational(item));
        }
        filter = diffusion::FeedbackFilter(std::move(taps));
      } else if (a.order == 1) {
        filter = diffusion::FeedbackFilter::FirstOrder();
      } else if (a.order == 2) {
        filter = diffusion::FeedbackFilter::H2();
      } else {
        throw UsageError("no builtin filter of order " +
                         std::to_string(a.order) + "; pass --filter");
      }
      if (!diffusion::VerifyOrder(filter, order).holds) {
        throw UsageError("filter is not of order " + std::to_string(order));
      }
      const auto signal = evaluation::BandlimitedSignal::Random(
          1, a.k_max > 0 ? a.k_max : 32, a.bound, a.seed);
      report = evaluation::DecayExperiment1D(signal, filter, options);
    }
  }

  if (!a.out.empty()) WriteText(a.out, report.ToJson() + "\n");
  if (!a.csv.empty()) WriteText(a.csv, report.ToCsv());
  out << report.ToJson() << '\n';

  const double expect = a.has_expect ? a.expect_slope : -order;
  const double slope = report.fitted_slope;
  const bool ok = a.two_sided ? std::abs(slope - expect) <= a.slope_tol
                              : slope <= expect + a.slope_tol;
  if (!ok) {
    err << "fitted slope " << slope << " outside the accepted band around "
        << expect << " (tolerance " << a.slope_tol
        << (a.two_sided ? ", two-sided" : ", one-sided") << ")\n";
    return kExitBenchmark;
  }
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Halftoning by error diffusion and attraction-repulsion"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "halftone 0.1.0");

  HalftoneArgs ha;
  auto* halftone = app.add_subcommand("halftone", "Halftone a PGM image");
  halftone->add_option("input", ha.input, "Input PGM")->required();
  halftone->add_option("output", ha.output, "Output PGM")->required();
  halftone->add_option("--scheme", ha.scheme, "Builtin name or scheme JSON");
  halftone->add_option("--scan", ha.scan, "raster or serpentine")
      ->check(CLI::IsMember({"raster", "serpentine"}));
  halftone->add_option("--rescale", ha.rescale,
                       "Rescale margin for order >= 2 schemes")
      ->check(CLI::Range(0.0, 1.0));
  halftone->add_flag("--no-rescale", ha.no_rescale, "Never rescale");

  DotsArgs da;
  auto* dots = app.add_subcommand("dots", "Attraction-repulsion stippling");
  dots->add_option("input", da.input, "Input PGM")->required();
  dots->add_option("--out", da.out, "Dot CSV output")->required();
  dots->add_option("--snap", da.snap, "Also write a snapped binary PGM");
  dots->add_option("--seed", da.seed, "Initialization seed");
  dots->add_option("--iters", da.iters, "Maximum iterations")
      ->check(CLI::PositiveNumber);
  dots->add_option("--tau", da.tau, "Step size")->check(CLI::PositiveNumber);
  dots->add_option("--softening", da.softening,
                   "Attraction softening length in pixels")
      ->check(CLI::NonNegativeNumber);

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "Compare a halftone");
  metrics->add_option("original", ma.original, "Original PGM")->required();
  metrics->add_option("halftone", ma.halftone, "Halftone PGM")->required();
  metrics->add_option("--metric", ma.metrics,
                      "quadrature, fourier, ball, lowpass")
      ->delimiter(',');
  metrics->add_option("--sigma", ma.sigma, "Gaussian RKHS kernel width")
      ->check(CLI::PositiveNumber);
  metrics->add_option("--bandwidth", ma.bandwidth, "Fourier bandwidth")
      ->check(CLI::PositiveNumber);
  metrics->add_option("--radius-max", ma.radius_max,
                      "Largest ball radius (default min(W,H)/4)");
  metrics->add_option("--resolution", ma.resolution, "Ball radius cells")
      ->check(CLI::PositiveNumber);
  metrics->add_option("--kernel", ma.kernel, "Low-pass kernel")
      ->check(CLI::IsMember({"ideal", "gaussian"}));
  metrics->add_option("--kernel-scale", ma.kernel_scale,
                      "Cutoff (ideal) or sigma (gaussian) in pixels");
  metrics->add_option("--margin", ma.margin, "Interior margin fraction");

  ExpandArgs ea;
  auto* expand = app.add_subcommand("expand", "Print an extended weight grid");
  expand->add_option("scheme", ea.scheme, "Builtin name or scheme JSON")
      ->required();

  DecayArgs ya;
  auto* decay = app.add_subcommand("decay", "Oversampling decay benchmark");
  decay->add_option("--dims", ya.dims, "1 or 2")->check(CLI::IsMember({1, 2}));
  decay->add_option("--order", ya.order, "Quantizer order (1D)")
      ->check(CLI::PositiveNumber);
  decay->add_option("--filter", ya.filter, "1D taps h_1,h_2,... as fractions");
  decay->add_option("--scheme", ya.scheme, "2D scheme (implies --dims 2)");
  decay->add_option("--scan", ya.scan, "raster or serpentine")
      ->check(CLI::IsMember({"raster", "serpentine"}));
  decay->add_option("--lambdas", ya.lambdas, "Comma-separated rates");
  decay->add_option("--kernel", ya.kernel, "ideal or gaussian")
      ->check(CLI::IsMember({"ideal", "gaussian"}));
  decay->add_option("--kernel-scale", ya.kernel_scale,
                    "Cutoff frequency (ideal) or sigma (gaussian)");
  decay->add_option("--margin", ya.margin, "Interior margin fraction");
  decay->add_option("--seed", ya.seed, "Signal seed");
  decay->add_option("--bound", ya.bound, "Signal amplitude bound")
      ->check(CLI::Range(0.0, 1.0));
  decay->add_option("--kmax", ya.k_max, "Largest integer frequency");
  decay->add_option("--domain", ya.domain, "Window length per axis");
  decay->add_option("--out", ya.out, "Report JSON path");
  decay->add_option("--csv", ya.csv, "Report CSV path");
  decay->add_option("--synthetic", ya.synthetic,
                    "Fit an exact lambda^-r sequence instead of running");
  auto* expect = decay->add_option("--expect-slope", ya.expect_slope,
                                   "Expected slope (default -order)");
  decay->add_option("--slope-tol", ya.slope_tol, "Accepted slope deviation");
  decay->add_flag("--two-sided", ya.two_sided,
                  "Also fail when the slope is steeper than expected");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  ya.has_expect = expect->count() > 0;

  try {
    if (*halftone) return RunHalftone(ha, out);
    if (*dots) return RunDots(da, out);
    if (*metrics) return RunMetrics(ma, out);
    if (*expand) return RunExpand(ea, out);
    return RunDecay(ya, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBenchmark;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace halftone::cli
