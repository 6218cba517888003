#include "schmidtlab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "schmidtlab/entropy.hpp"
#include "schmidtlab/error.hpp"
#include "schmidtlab/io.hpp"
#include "schmidtlab/oracle.hpp"
#include "schmidtlab/spectrum.hpp"

namespace schmidtlab {
namespace {

using io::Json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Where a command's bytes go.
struct Sink {
  std::ostream& out;
  std::ostream& err;
  std::string path;  // empty: stdout
};

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + path);
  f << bytes;
  if (!f) throw std::runtime_error("write failed: " + path);
}

io::RunManifest manifest_for(const std::string& command, const Json& params, const std::string& payload) {
  return {command, params, io::version(), io::checksum(payload)};
}

void emit_json(const Sink& sink, const std::string& command, const Json& params, Json doc) {
  const std::string payload = io::write_json(doc);
  doc["manifest"] = manifest_for(command, params, payload).to_json();
  const std::string bytes = io::write_json(doc);
  if (sink.path.empty())
    sink.out << bytes;
  else
    write_file(sink.path, bytes);
}

// CSV has no room for metadata, so the manifest goes to a sidecar file next
// to --out, or to stderr when the table goes to stdout.
void emit_csv(const Sink& sink, const std::string& command, const Json& params, const io::CsvTable& table) {
  const std::string payload = table.str();
  const std::string manifest = io::write_json(manifest_for(command, params, payload).to_json());
  if (sink.path.empty()) {
    sink.out << payload;
    sink.err << manifest;
  } else {
    write_file(sink.path, payload);
    write_file(sink.path + ".manifest.json", manifest);
  }
}

std::string num(double v) { return io::format_double(v); }

// Evaluates rows [0, n) on worker threads; results keep their index order.
template <typename Row, typename F>
std::vector<Row> parallel_rows(std::size_t n, F compute) {
  std::vector<Row> rows(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = compute(i);
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<double> grid_points(double lo, double hi, int points, bool log_spaced) {
  if (points < 2) throw UsageError("--points must be at least 2");
  if (!(lo < hi)) throw UsageError("range minimum must be below maximum");
  if (log_spaced && !(lo > 0.0)) throw UsageError("log spacing needs a positive minimum");
  const double a = log_spaced ? std::log10(lo) : lo;
  const double b = log_spaced ? std::log10(hi) : hi;
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) {
    const double t = a + (b - a) * i / (points - 1);
    v[i] = log_spaced ? std::pow(10.0, t) : t;
  }
  v.front() = lo;
  v.back() = hi;
  return v;
}

bool relative_mismatch(double a, double b) { return std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b)); }

// ---------------------------------------------------------------- derive

struct DeriveArgs {
  std::optional<double> pump_waist, pump_wavelength, crystal_length;
  double phase_offset = 0.0;
  std::optional<double> b, sigma;
  std::optional<double> b_sigma;
  double gamma = 1.0;
  std::string out;
};

int run_derive(const DeriveArgs& a, const Sink& sink) {
  const bool physical = a.pump_waist || a.pump_wavelength || a.crystal_length;
  const bool widths = a.b || a.sigma;
  if (physical && !(a.pump_waist && a.pump_wavelength && a.crystal_length))
    throw UsageError("physical input needs --pump-waist, --pump-wavelength and --crystal-length");
  if (widths && !(a.b && a.sigma)) throw UsageError("width input needs both --b and --sigma");
  if (!physical && !widths && !a.b_sigma) throw UsageError("give physical inputs, --b/--sigma, or --b-sigma");

  std::vector<DerivedParams> candidates;
  Json params = Json::object();
  if (physical) {
    candidates.push_back(derive_params(
        PumpCrystalParams::from_wavelength(*a.pump_waist, *a.pump_wavelength, *a.crystal_length, a.phase_offset)));
    params["pump_waist"] = *a.pump_waist;
    params["pump_wavelength"] = *a.pump_wavelength;
    params["crystal_length"] = *a.crystal_length;
    params["phase_offset"] = a.phase_offset;
  }
  if (widths) {
    candidates.push_back(derive_params(BSigma{*a.b, *a.sigma}));
    params["b"] = *a.b;
    params["sigma"] = *a.sigma;
  }
  if (a.b_sigma) {
    candidates.push_back(derive_params(ScaledBSigma{*a.b_sigma, a.gamma}));
    params["b_sigma"] = *a.b_sigma;
    params["gamma"] = a.gamma;
  }
  for (const auto& c : candidates)
    if (relative_mismatch(c.b_sigma, candidates.front().b_sigma))
      throw UsageError("conflicting inputs: they imply different b_sigma values");
  const DerivedParams& dp = candidates.front();

  Json doc = Json::object();
  doc["b"] = dp.b;
  doc["sigma"] = dp.sigma;
  doc["b_sigma"] = dp.b_sigma;
  doc["rayleigh_z_r"] = dp.rayleigh_z_r ? Json(*dp.rayleigh_z_r) : Json(nullptr);
  doc["gamma"] = dp.gamma;
  doc["gamma_prime"] = dp.gamma_prime();
  doc["mu"] = dp.mu;
  doc["mu_signed"] = dp.mu_signed;
  doc["G"] = dp.G;
  doc["eta_A"] = dp.eta_A;
  doc["norm_N"] = dp.norm_N;
  doc["K"] = schmidt_number(dp.b_sigma);
  doc["units"] = Json{{"b", "m"},         {"sigma", "1/m"},       {"b_sigma", "1"}, {"rayleigh_z_r", "m"},
                      {"gamma", "m"},     {"gamma_prime", "m"},   {"mu", "1"},      {"mu_signed", "1"},
                      {"G", "m^2"},       {"eta_A", "1"},         {"norm_N", "1/m^2"}, {"K", "1"}};
  emit_json(sink, "derive", params, std::move(doc));
  return exit_ok;
}

// -------------------------------------------------------------- spectrum

struct SpectrumArgs {
  double b_sigma = 0.0;
  std::string basis = "cartesian";
  std::optional<int> max_order;
  std::optional<double> tail;
  std::string format = "csv";
  std::string out;
};

int run_spectrum(const SpectrumArgs& a, const Sink& sink) {
  const Basis basis = a.basis == "polar" ? Basis::polar : Basis::cartesian;
  Truncation truncation = TailMass{a.tail.value_or(kDefaultTailMass)};
  if (a.max_order) truncation = MaxOrder{*a.max_order};
  const SchmidtSpectrum s = build_spectrum(a.b_sigma, basis, truncation);

  Json params = Json::object();
  params["b_sigma"] = a.b_sigma;
  params["basis"] = a.basis;
  if (a.max_order)
    params["max_order"] = *a.max_order;
  else
    params["tail"] = a.tail.value_or(kDefaultTailMass);
  params["format"] = a.format;

  const bool polar = basis == Basis::polar;
  const std::string first = polar ? "ell" : "m";
  const std::string second = polar ? "p" : "n";
  const auto index_pair = [&](const SpectrumEntry& e) {
    if (polar) {
      const auto i = std::get<PolarIndex>(e.index);
      return std::pair{i.ell, i.p};
    }
    const auto i = std::get<CartesianIndex>(e.index);
    return std::pair{i.m, i.n};
  };

  double cumulative = 0.0, comp = 0.0;
  std::vector<double> running;
  running.reserve(s.entries.size());
  for (const auto& e : s.entries) {
    const double t = cumulative + e.lambda;
    comp += (cumulative - t) + e.lambda;
    cumulative = t;
    running.push_back(cumulative + comp);
  }
  const double total = running.empty() ? 0.0 : running.back();

  if (a.format == "json") {
    Json doc = Json::object();
    doc["b_sigma"] = s.b_sigma;
    doc["basis"] = a.basis;
    doc["max_order"] = s.max_order;
    doc["tail_mass"] = s.tail_mass;
    doc["total"] = total;
    Json entries = Json::array();
    for (std::size_t k = 0; k < s.entries.size(); ++k) {
      const auto [i, j] = index_pair(s.entries[k]);
      Json row = Json::object();
      row[first] = i;
      row[second] = j;
      row["order"] = s.entries[k].order();
      row["lambda"] = s.entries[k].lambda;
      row["cumulative"] = running[k];
      entries.push_back(std::move(row));
    }
    doc["entries"] = std::move(entries);
    emit_json(sink, "spectrum", params, std::move(doc));
    return exit_ok;
  }

  io::CsvTable table({first, second, "order", "lambda", "cumulative"});
  for (std::size_t k = 0; k < s.entries.size(); ++k) {
    const auto [i, j] = index_pair(s.entries[k]);
    table.add_row({std::to_string(i), std::to_string(j), std::to_string(s.entries[k].order()),
                   num(s.entries[k].lambda), num(running[k])});
  }
  table.add_row({"tail", "", "", num(s.tail_mass), num(total + s.tail_mass)});
  emit_csv(sink, "spectrum", params, table);
  return exit_ok;
}

// --------------------------------------------------------------- entropy

struct EntropyArgs {
  std::optional<double> b_sigma;
  std::optional<double> k;
  std::vector<double> alphas{0.5, 2.0, 3.0};
  bool paper_literal = false;
  std::string out;
};

int run_entropy(const EntropyArgs& a, const Sink& sink) {
  if (!a.b_sigma && !a.k) throw UsageError("give --b-sigma or --k");
  const RenyiForm form = a.paper_literal ? RenyiForm::inverted : RenyiForm::corrected;
  const double b_sigma = a.b_sigma ? *a.b_sigma : bsigma_from_k(*a.k);
  EntropyReport r = entropy_report(b_sigma, a.alphas, form);
  if (a.k) {
    // Keep the requested K verbatim rather than its round trip through b sigma.
    r.K = *a.k;
    r.S_approx_eq21 = von_neumann_approx(r.K, ApproxForm::leading_log);
    r.S_expansion_eq22 = von_neumann_approx(r.K, ApproxForm::expansion);
  }

  Json params = Json::object();
  if (a.b_sigma) params["b_sigma"] = *a.b_sigma;
  if (a.k) params["k"] = *a.k;
  params["alpha"] = a.alphas;
  params["paper_literal"] = a.paper_literal;

  Json doc = Json::object();
  doc["b_sigma"] = r.b_sigma;
  doc["K"] = r.K;
  for (const auto& [alpha, h] : r.renyi) doc["H_" + io::format_label(alpha)] = h;
  doc["S_exact"] = r.S_exact;
  doc["S_approx_eq21"] = r.S_approx_eq21;
  doc["S_expansion_eq22"] = r.S_expansion_eq22;
  doc["renyi_form"] = a.paper_literal ? "paper_literal" : "corrected";
  doc["units"] = Json{{"b_sigma", "1"}, {"K", "1"}, {"H_alpha", "bit"}, {"S", "bit"}};
  emit_json(sink, "entropy", params, std::move(doc));
  return exit_ok;
}

// ----------------------------------------------------------------- sweep

struct SweepArgs {
  double lo = 0.01;
  double hi = 100.0;
  int points = 101;
  bool log_spaced = false;
  std::string out;
};

int run_sweep(const SweepArgs& a, const Sink& sink) {
  if (!(a.lo > 0.0)) throw UsageError("--b-sigma-min must be positive");
  const std::vector<double> xs = grid_points(a.lo, a.hi, a.points, a.log_spaced);
  struct Row {
    double K, S, leading_log, expansion;
  };
  const auto rows = parallel_rows<Row>(xs.size(), [&](std::size_t i) {
    const double K = schmidt_number(xs[i]);
    return Row{K, von_neumann_exact(xs[i]), von_neumann_approx(K, ApproxForm::leading_log),
               von_neumann_approx(K, ApproxForm::expansion)};
  });
  io::CsvTable table({"b_sigma", "K", "S_exact", "S_approx_eq21", "S_expansion_eq22"});
  for (std::size_t i = 0; i < xs.size(); ++i)
    table.add_row({num(xs[i]), num(rows[i].K), num(rows[i].S), num(rows[i].leading_log), num(rows[i].expansion)});
  Json params = Json::object();
  params["b_sigma_min"] = a.lo;
  params["b_sigma_max"] = a.hi;
  params["points"] = a.points;
  params["log"] = a.log_spaced;
  emit_csv(sink, "sweep", params, table);
  return exit_ok;
}

// ------------------------------------------------------------- retention

struct RetentionArgs {
  std::vector<double> etas{0.25, 0.5, 0.75, 1.0};
  std::optional<double> k_min, k_max, b_sigma_min, b_sigma_max;
  int points = 101;
  bool log_spaced = false;
  std::string model = "both";
  std::string out;
};

int run_retention(const RetentionArgs& a, const Sink& sink) {
  const bool by_k = a.k_min || a.k_max;
  const bool by_b = a.b_sigma_min || a.b_sigma_max;
  if (by_k && by_b) throw UsageError("give either a K range or a b_sigma range, not both");
  for (double eta : a.etas)
    if (!(eta > 0.0 && eta <= 1.0)) throw UsageError("--eta values must lie in (0, 1]");

  std::vector<double> xs;
  if (by_b)
    xs = grid_points(a.b_sigma_min.value_or(0.01), a.b_sigma_max.value_or(1.0), a.points, a.log_spaced);
  else
    xs = grid_points(a.k_min.value_or(1.0), a.k_max.value_or(1e4), a.points, a.log_spaced);

  std::vector<RetentionModel> models;
  if (a.model != "exact_spectrum") models.push_back(RetentionModel::leading_log);
  if (a.model != "approx_eq21") models.push_back(RetentionModel::exact_spectrum);

  std::vector<std::string> header{"K", "b_sigma"};
  for (double eta : a.etas)
    for (auto m : models)
      header.push_back((m == RetentionModel::leading_log ? "approx_eq21_eta_" : "exact_spectrum_eta_") +
                       io::format_label(eta));

  const auto rows = parallel_rows<std::vector<std::string>>(xs.size(), [&](std::size_t i) {
    const double K = by_b ? schmidt_number(xs[i]) : xs[i];
    const double b_sigma = by_b ? xs[i] : bsigma_from_k(K);
    std::vector<std::string> cells{num(K), num(b_sigma)};
    for (double eta : a.etas)
      for (auto m : models) cells.push_back(eta * K < 1.0 ? "" : num(retained_fraction(K, {eta, m})));
    return cells;
  });
  io::CsvTable table(header);
  for (const auto& r : rows) table.add_row(r);

  Json params = Json::object();
  params["eta"] = a.etas;
  if (by_b) {
    params["b_sigma_min"] = xs.front();
    params["b_sigma_max"] = xs.back();
  } else {
    params["k_min"] = xs.front();
    params["k_max"] = xs.back();
  }
  params["points"] = a.points;
  params["log"] = a.log_spaced;
  params["model"] = a.model;
  emit_csv(sink, "retention", params, table);
  return exit_ok;
}

// ----------------------------------------------------------------- modes

struct ModesArgs {
  std::string basis = "lg";
  int m = 0, n = 0, ell = 0, p = 0;
  int grid = 65;
  double extent = 4.0;
  double gamma = 1.0;
  bool via_hg = false;
  std::string out;
};

int run_modes(const ModesArgs& a, const Sink& sink) {
  if (a.grid < 2) throw UsageError("--grid must be at least 2");
  if (!(a.extent > 0.0) || !std::isfinite(a.extent)) throw UsageError("--extent must be positive");
  const ModeScale<double> scale(a.gamma);
  const bool lg_basis = a.basis == "lg";
  if (!lg_basis && (a.m < 0 || a.n < 0)) throw UsageError("--m and --n must be non-negative");
  if (lg_basis && a.p < 0) throw UsageError("--p must be non-negative");
  if (a.via_hg && !lg_basis) throw UsageError("--via-hg applies to the lg basis only");

  std::optional<ConversionBlock> block;
  Eigen::Index row = 0;
  if (a.via_hg) {
    block = hg_to_lg_block(std::abs(a.ell) + 2 * a.p);
    for (; row < static_cast<Eigen::Index>(block->rows.size()); ++row)
      if (block->rows[row] == PolarIndex{a.ell, a.p}) break;
  }

  const double half = a.extent / a.gamma;
  const auto coord = [&](int i) { return -half + 2.0 * half * i / (a.grid - 1); };
  io::CsvTable table({"q_x", "q_y", "re", "im"});
  for (int iy = 0; iy < a.grid; ++iy) {
    for (int ix = 0; ix < a.grid; ++ix) {
      const double qx = coord(ix), qy = coord(iy);
      std::complex<double> v;
      if (!lg_basis) {
        v = hg_2d(a.m, a.n, scale, qx, qy);
      } else if (block) {
        const int order = block->order;
        for (int k = 0; k <= order; ++k) v += block->matrix(row, k) * hg_2d(order - k, k, scale, qx, qy);
      } else {
        v = lg_cartesian(a.ell, a.p, scale, qx, qy);
      }
      table.add_row({num(qx), num(qy), num(v.real()), num(v.imag())});
    }
  }
  Json params = Json::object();
  params["basis"] = a.basis;
  if (lg_basis) {
    params["ell"] = a.ell;
    params["p"] = a.p;
    params["via_hg"] = a.via_hg;
  } else {
    params["m"] = a.m;
    params["n"] = a.n;
  }
  params["grid"] = a.grid;
  params["extent"] = a.extent;
  params["gamma"] = a.gamma;
  emit_csv(sink, "modes", params, table);
  return exit_ok;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  double b_sigma = 0.0;
  double gamma = 1.0;
  int grid = 200;
  int modes = 10;
  int samples = 200;
  std::uint64_t seed = kDefaultOracleSeed;
  std::string out;
};

constexpr double kSvTolerance = 1e-6;
constexpr double kIdentityTolerance = 1e-9;
constexpr double kKTolerance = 1e-5;
// Modes whose analytic amplitude is below this fraction of the leading one
// sit at the rounding floor of the SVD and are not compared.
constexpr double kComparableAmplitude = 1e-8;
constexpr double kOamTail = 1e-12;

int run_verify(const VerifyArgs& a, const Sink& sink) {
  if (a.modes < 1) throw UsageError("--modes must be positive");
  if (a.samples < 1) throw UsageError("--samples must be positive");
  const DerivedParams dp = derive_params(ScaledBSigma{a.b_sigma, a.gamma});
  const double mu = dp.mu;
  const double base = one_minus_mu_sq(dp.b_sigma);

  const NumericalSpectrum axis = kernel_svd_1d(dp, a.grid);
  double err_cart = 0.0;
  const double lead_1d = std::sqrt(base);
  for (int k = 0; k < std::min<int>(a.modes, axis.singular_values.size()); ++k) {
    const double expected = lead_1d * std::pow(mu, k);
    if (expected < kComparableAmplitude * lead_1d) break;
    err_cart = std::max(err_cart, std::abs(axis.singular_values(k) - expected) / expected);
  }

  const int cutoff = oam_cutoff(dp.b_sigma, kOamTail);
  const bool polar_possible = cutoff <= kMaxDegree;
  const int ell_count = polar_possible ? cutoff + 1 : 3;
  const auto radial = parallel_rows<NumericalSpectrum>(
      static_cast<std::size_t>(ell_count), [&](std::size_t ell) { return radial_kernel_svd(int(ell), dp, a.grid); });
  double err_polar = 0.0;
  for (int ell = 0; ell <= std::min(2, ell_count - 1); ++ell) {
    const auto& sv = radial[ell].singular_values;
    for (int p = 0; p < std::min<int>(a.modes, sv.size()); ++p) {
      const double expected = base * std::pow(mu, 2 * p + ell);
      if (expected < kComparableAmplitude * base) break;
      err_polar = std::max(err_polar, std::abs(sv(p) - expected) / expected);
    }
  }

  const double mehler = verify_mehler(dp, a.samples, a.seed);
  std::optional<double> hardy;
  if (mu > 0.0) {
    double worst = 0.0;
    for (int ell = 0; ell <= 2; ++ell) worst = std::max(worst, verify_hardy_hille(ell, mu, a.samples, a.seed));
    hardy = worst;
  }

  const double K = schmidt_number(dp.b_sigma);
  std::optional<double> k_cart, k_polar;
  try {
    k_cart = numeric_k_cartesian(axis);
  } catch (const PrecisionError&) {
  }
  if (polar_possible) {
    try {
      k_polar = numeric_k_polar(radial);
    } catch (const PrecisionError&) {
    }
  }
  const auto rel = [K](std::optional<double> v) { return v ? std::optional(std::abs(*v - K) / K) : std::nullopt; };
  const auto opt = [](std::optional<double> v) { return v ? Json(*v) : Json(nullptr); };

  const double max_sv = std::max(err_cart, err_polar);
  const bool passed = max_sv < kSvTolerance && mehler < kIdentityTolerance &&
                      (!hardy || *hardy < kIdentityTolerance) && k_cart && k_polar &&
                      *rel(k_cart) < kKTolerance && *rel(k_polar) < kKTolerance;

  Json params = Json::object();
  params["b_sigma"] = a.b_sigma;
  params["gamma"] = a.gamma;
  params["grid"] = a.grid;
  params["modes"] = a.modes;
  params["samples"] = a.samples;
  params["seed"] = a.seed;

  Json doc = Json::object();
  doc["b_sigma"] = dp.b_sigma;
  doc["mu"] = mu;
  doc["K"] = K;
  doc["grid"] = a.grid;
  doc["max_sv_rel_err"] = max_sv;
  doc["max_sv_rel_err_cartesian"] = err_cart;
  doc["max_sv_rel_err_polar"] = err_polar;
  doc["mehler_max_rel_err"] = mehler;
  doc["hardy_hille_max_rel_err"] = opt(hardy);
  doc["numeric_k_cartesian"] = opt(k_cart);
  doc["numeric_k_polar"] = opt(k_polar);
  doc["k_rel_err_cartesian"] = opt(rel(k_cart));
  doc["k_rel_err_polar"] = opt(rel(k_polar));
  doc["oam_cutoff"] = cutoff;
  doc["accuracy_warning"] = axis.accuracy_warning;
  doc["tolerances"] = Json{{"sv_rel", kSvTolerance}, {"identity_rel", kIdentityTolerance}, {"k_rel", kKTolerance}};
  doc["passed"] = passed;
  emit_json(sink, "verify", params, std::move(doc));
  return passed ? exit_ok : exit_verification_failed;
}

// --------------------------------------------------------------- convert

int run_convert(int order, const Sink& sink) {
  const ConversionBlock block = hg_to_lg_block(order);
  Json rows = Json::array(), columns = Json::array(), re = Json::array(), im = Json::array();
  for (const auto& r : block.rows) rows.push_back(Json{{"ell", r.ell}, {"p", r.p}});
  for (int k = 0; k <= order; ++k) columns.push_back(Json{{"m", order - k}, {"n", k}});
  for (Eigen::Index i = 0; i < block.matrix.rows(); ++i) {
    Json rr = Json::array(), ri = Json::array();
    for (Eigen::Index j = 0; j < block.matrix.cols(); ++j) {
      rr.push_back(block.matrix(i, j).real());
      ri.push_back(block.matrix(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  Json doc = Json::object();
  doc["order"] = order;
  doc["rows"] = std::move(rows);
  doc["columns"] = std::move(columns);
  doc["real"] = std::move(re);
  doc["imag"] = std::move(im);
  doc["unitarity_residual"] = block.unitarity_residual();
  emit_json(sink, "convert", Json{{"order", order}}, std::move(doc));
  return exit_ok;
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("SCHMIDTLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schmidt decomposition of the SPDC biphoton in HG/LG modes", "schmidtlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::version());

  DeriveArgs derive;
  auto* c_derive = app.add_subcommand("derive", "derived kernel parameters as JSON");
  c_derive->add_option("--pump-waist", derive.pump_waist, "pump waist w_p [m]");
  c_derive->add_option("--pump-wavelength", derive.pump_wavelength, "pump wavelength [m]");
  c_derive->add_option("--crystal-length", derive.crystal_length, "crystal length L [m]");
  c_derive->add_option("--phase-offset", derive.phase_offset, "phase offset Phi")->capture_default_str();
  c_derive->add_option("--b", derive.b, "b [m]");
  c_derive->add_option("--sigma", derive.sigma, "sigma [1/m]");
  c_derive->add_option("--b-sigma", derive.b_sigma, "b sigma (dimensionless)");
  c_derive->add_option("--gamma", derive.gamma, "mode width with --b-sigma [m]")->capture_default_str();
  c_derive->add_option("--out", derive.out, "output path (default stdout)");

  SpectrumArgs spectrum;
  auto* c_spectrum = app.add_subcommand("spectrum", "analytic Schmidt spectrum");
  c_spectrum->add_option("--b-sigma", spectrum.b_sigma)->required();
  c_spectrum->add_option("--basis", spectrum.basis)->check(CLI::IsMember({"cartesian", "polar"}))->capture_default_str();
  auto* o_order = c_spectrum->add_option("--max-order", spectrum.max_order, "highest mode order kept");
  auto* o_tail = c_spectrum->add_option("--tail", spectrum.tail, "largest omitted probability mass");
  o_order->excludes(o_tail);
  c_spectrum->add_option("--format", spectrum.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  c_spectrum->add_option("--out", spectrum.out);

  EntropyArgs entropy;
  auto* c_entropy = app.add_subcommand("entropy", "Schmidt number and entropies as JSON");
  auto* o_bs = c_entropy->add_option("--b-sigma", entropy.b_sigma);
  auto* o_k = c_entropy->add_option("--k", entropy.k, "Schmidt number instead of b sigma");
  o_bs->excludes(o_k);
  c_entropy->add_option("--alpha", entropy.alphas, "Renyi orders")->capture_default_str()->delimiter(',');
  c_entropy->add_flag("--paper-literal", entropy.paper_literal, "Renyi entropies with the inverted log argument");
  c_entropy->add_option("--out", entropy.out);

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "K and entropies over a b sigma range as CSV");
  c_sweep->add_option("--b-sigma-min", sweep.lo)->capture_default_str();
  c_sweep->add_option("--b-sigma-max", sweep.hi)->capture_default_str();
  c_sweep->add_option("--points", sweep.points)->capture_default_str();
  c_sweep->add_flag("--log", sweep.log_spaced, "logarithmic spacing");
  c_sweep->add_option("--out", sweep.out);

  RetentionArgs retention;
  auto* c_ret = app.add_subcommand("retention", "fraction of shared bits kept under partial detection");
  c_ret->add_option("--eta", retention.etas, "detected mode fractions")->capture_default_str()->delimiter(',');
  c_ret->add_option("--k-min", retention.k_min);
  c_ret->add_option("--k-max", retention.k_max);
  c_ret->add_option("--b-sigma-min", retention.b_sigma_min);
  c_ret->add_option("--b-sigma-max", retention.b_sigma_max);
  c_ret->add_option("--points", retention.points)->capture_default_str();
  c_ret->add_flag("--log", retention.log_spaced);
  c_ret->add_option("--model", retention.model)
      ->check(CLI::IsMember({"approx_eq21", "exact_spectrum", "both"}))
      ->capture_default_str();
  c_ret->add_option("--out", retention.out);

  ModesArgs modes;
  auto* c_modes = app.add_subcommand("modes", "mode field samples as CSV");
  c_modes->add_option("--basis", modes.basis)->check(CLI::IsMember({"hg", "lg"}))->capture_default_str();
  c_modes->add_option("--m", modes.m);
  c_modes->add_option("--n", modes.n);
  c_modes->add_option("--ell", modes.ell);
  c_modes->add_option("--p", modes.p);
  c_modes->add_option("--grid", modes.grid, "samples per axis")->capture_default_str();
  c_modes->add_option("--extent", modes.extent, "half width in units of 1/gamma")->capture_default_str();
  c_modes->add_option("--gamma", modes.gamma)->capture_default_str();
  c_modes->add_flag("--via-hg", modes.via_hg, "build the LG mode from its HG expansion");
  c_modes->add_option("--out", modes.out);

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "numerical oracle run; exit 1 on failure");
  c_verify->add_option("--b-sigma", verify.b_sigma)->required();
  c_verify->add_option("--gamma", verify.gamma)->capture_default_str();
  c_verify->add_option("--grid", verify.grid)->capture_default_str();
  c_verify->add_option("--modes", verify.modes)->capture_default_str();
  c_verify->add_option("--samples", verify.samples)->capture_default_str();
  c_verify->add_option("--seed", verify.seed)->capture_default_str();
  c_verify->add_option("--out", verify.out);

  int convert_order = 0;
  std::string convert_out;
  auto* c_convert = app.add_subcommand("convert", "HG to LG conversion block as JSON");
  c_convert->add_option("--order", convert_order)->required();
  c_convert->add_option("--out", convert_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*c_derive) return run_derive(derive, {out, err, derive.out});
    if (*c_spectrum) return run_spectrum(spectrum, {out, err, spectrum.out});
    if (*c_entropy) return run_entropy(entropy, {out, err, entropy.out});
    if (*c_sweep) return run_sweep(sweep, {out, err, sweep.out});
    if (*c_ret) return run_retention(retention, {out, err, retention.out});
    if (*c_modes) return run_modes(modes, {out, err, modes.out});
    if (*c_verify) return run_verify(verify, {out, err, verify.out});
    if (*c_convert) return run_convert(convert_order, {out, err, convert_out});
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_verification_failed;
  }
  return exit_usage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace schmidtlab
