#include "fhtc/cpfsk.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/roots.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "fhtc/error.hpp"
#include "json.hpp"

namespace fhtc::cpfsk {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// log I0(x) for x >= 0.
double log_bessel_i0(double x) {
  if (x < 500.0) return std::log(boost::math::cyl_bessel_i(0, x));
  const double r = 1.0 / (8.0 * x);
  const double corr = r * (1.0 + r * (4.5 + r * (37.5 + r * 459.375)));
  return x - 0.5 * std::log(2.0 * kPi * x) + std::log1p(corr);
}

// log2(1 + e^d) without overflow.
double log2_one_plus_exp(double d) {
  const double v = d > 0.0 ? d + std::log1p(std::exp(-d)) : std::log1p(std::exp(d));
  return v / std::numbers::ln2;
}

struct Located {
  std::size_t index;
  double frac;
};

// Bracket x in an ascending grid; snaps to a node within a relative 1e-9.
Located locate(std::span<const double> grid, double x, const char* axis) {
  const double tol = 1e-9 * std::max(1.0, std::fabs(x));
  if (grid.empty() || x < grid.front() - tol || x > grid.back() + tol) {
    std::ostringstream os;
    os << "capacity table: " << axis << " = " << x << " outside the tabulated range";
    throw OutOfRange(os.str());
  }
  if (grid.size() == 1) return {0, 0.0};
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = it == grid.begin() ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
  i = std::min(i, grid.size() - 2);
  if (std::fabs(x - grid[i]) <= tol) return {i, 0.0};
  if (std::fabs(x - grid[i + 1]) <= tol) return {i + 1, 0.0};
  return {i, (x - grid[i]) / (grid[i + 1] - grid[i])};
}

// Interpolated rate column over the gamma grid at modulation index h.
std::vector<double> column(const CapacityTable& table, double h) {
  const Located lh = locate(table.h, h, "h");
  const std::size_t ng = table.gamma_db.size();
  std::vector<double> col(ng);
  for (std::size_t j = 0; j < ng; ++j) {
    const double lo = table.at(lh.index, j);
    col[j] = lh.frac == 0.0 ? lo : lo + lh.frac * (table.at(lh.index + 1, j) - lo);
  }
  return col;
}

// Continuous part of the h = 1 (Sunde FSK) spectrum; the remaining half of
// the power sits in two lines at f = +-1/2.
double sunde_continuous_psd(double f) {
  const double den = 4.0 * f * f - 1.0;
  // Removable singularity at |f| = 1/2 where the density tends to 1/4.
  if (std::fabs(den) < 1e-6) return 0.25;
  const double c = std::cos(kPi * f);
  return 4.0 * c * c / (kPi * kPi * den * den);
}

// The CPFSK spectrum approaches a line at f = 0 as h -> 0 and lines at
// f = 1/2 as h -> 1; the peak width shrinks like the distance to the limit.
// Pieces graded geometrically toward both points keep every peak within a
// few widths of a piece edge.
template <typename F>
double integrate(F&& f, double a, double b) {
  if (b <= a) return 0.0;
  std::vector<double> cuts{a, b};
  for (double peak : {0.0, 0.5}) {
    for (int k = 4; k <= 40; ++k) {
      for (double side : {-1.0, 1.0}) {
        const double x = peak + side * std::ldexp(1.0, -k);
        if (x > a && x < b) cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 6, 1e-12);
  }
  return sum;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_row(std::ostream& os, const char* label, std::span<const double> values) {
  if (label) os << label;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (label || k > 0) os << ',';
    os << values[k];
  }
  os << '\n';
}

std::vector<double> parse_row(const std::string& line, const char* expected_label) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  bool first = true;
  while (std::getline(ss, cell, ',')) {
    if (first && expected_label) {
      if (cell != expected_label) throw FormatError(std::string("capacity table: expected row label '") + expected_label + "'");
      first = false;
      continue;
    }
    first = false;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw FormatError("capacity table: bad number '" + cell + "'");
    }
    if (used != cell.size()) throw FormatError("capacity table: bad number '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

double tone_correlation(double h) { return std::fabs(sinc(h)); }

void CapacityTable::validate() const {
  if (h.empty() || gamma_db.empty()) throw FormatError("capacity table: empty grid");
  if (rates.size() != h.size() * gamma_db.size()) throw FormatError("capacity table: matrix shape does not match grids");
  if (!std::is_sorted(h.begin(), h.end()) || std::adjacent_find(h.begin(), h.end()) != h.end())
    throw FormatError("capacity table: h grid must be strictly ascending");
  if (!std::is_sorted(gamma_db.begin(), gamma_db.end()) ||
      std::adjacent_find(gamma_db.begin(), gamma_db.end()) != gamma_db.end())
    throw FormatError("capacity table: gamma grid must be strictly ascending");
  for (std::size_t i = 0; i < h.size(); ++i) {
    for (std::size_t j = 0; j < gamma_db.size(); ++j) {
      const double r = at(i, j);
      if (!(r >= 0.0 && r <= 1.0)) throw FormatError("capacity table: rate outside [0, 1]");
      if (j > 0 && r < at(i, j - 1)) throw FormatError("capacity table: rates decrease along gamma");
    }
  }
}

NoiseBank::NoiseBank(std::uint64_t samples, RngStream rng)
    : w0_re_(samples), w0_im_(samples), w1_re_(samples), w1_im_(samples) {
  // Circular complex Gaussians with unit variance (each part variance 1/2).
  const double s = std::numbers::sqrt2 / 2.0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    w0_re_[k] = s * rng.normal();
    w0_im_[k] = s * rng.normal();
    w1_re_[k] = s * rng.normal();
    w1_im_[k] = s * rng.normal();
  }
}

// Symbol-by-symbol noncoherent reception. With unit symbol energy and noise
// density 1/gamma, the two correlator outputs for a transmitted tone are
//   y_right = 1 + n0,   y_wrong = rho (1 + n0) + sqrt(1 - rho^2) n1
// with n0, n1 i.i.d. CN(0, 1/gamma) and rho the tone correlation magnitude
// (the phase of rho is absorbed by the circular symmetry of n1). Averaging
// the likelihood over the unknown carrier phase gives
//   p(y | tone k) ~ I0(2 gamma |y_k|),
// and the information rate is 1 - E[log2(1 + I0(2g|y_wrong|)/I0(2g|y_right|))].
// Both symbols are statistically identical, so conditioning on one of them
// leaves the estimator unchanged.
double NoiseBank::rate(double h, double gamma) const {
  if (!(h > 0.0 && h <= 1.0)) throw InvalidArgument("cpfsk: modulation index must lie in (0, 1]");
  if (!(gamma > 0.0)) throw InvalidArgument("cpfsk: SINR must be positive");
  const double rho = tone_correlation(h);
  const double orth = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const double sigma = 1.0 / std::sqrt(gamma);
  const double scale = 2.0 * gamma;
  double loss = 0.0;
  const std::size_t n = size();
  for (std::size_t k = 0; k < n; ++k) {
    const double rr = 1.0 + sigma * w0_re_[k];
    const double ri = sigma * w0_im_[k];
    const double wr = rho * rr + orth * sigma * w1_re_[k];
    const double wi = rho * ri + orth * sigma * w1_im_[k];
    const double right = std::hypot(rr, ri);
    const double wrong = std::hypot(wr, wi);
    loss += log2_one_plus_exp(log_bessel_i0(scale * wrong) - log_bessel_i0(scale * right));
  }
  return std::clamp(1.0 - loss / static_cast<double>(n), 0.0, 1.0);
}

double estimate_capacity(double h, double gamma, std::uint64_t samples, RngStream rng) {
  if (!(h > 0.0 && h <= 1.0)) throw InvalidArgument("estimate_capacity: modulation index must lie in (0, 1]");
  if (samples == 0) throw InvalidArgument("estimate_capacity: need at least one sample");
  return NoiseBank(samples, rng).rate(h, gamma);
}

std::size_t isotonic_nondecreasing(std::span<double> values) {
  // Blocks of (sum, count); merge while the last block mean decreases.
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  for (double v : values) {
    sums.push_back(v);
    counts.push_back(1);
    while (sums.size() > 1 &&
           sums[sums.size() - 2] / static_cast<double>(counts[counts.size() - 2]) >
               sums.back() / static_cast<double>(counts.back())) {
      sums[sums.size() - 2] += sums.back();
      counts[counts.size() - 2] += counts.back();
      sums.pop_back();
      counts.pop_back();
    }
  }
  std::size_t changed = 0;
  std::size_t k = 0;
  for (std::size_t b = 0; b < sums.size(); ++b) {
    const double mean = sums[b] / static_cast<double>(counts[b]);
    for (std::size_t c = 0; c < counts[b]; ++c, ++k) {
      if (counts[b] > 1 && values[k] != mean) {
        values[k] = mean;
        ++changed;
      }
    }
  }
  return changed;
}

std::vector<double> default_h_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

std::vector<double> default_gamma_db_grid() {
  std::vector<double> g;
  for (int i = -40; i <= 140; ++i) g.push_back(i / 10.0);
  return g;
}

CapacityTable build_table(std::span<const double> h_grid, std::span<const double> gamma_db_grid,
                          std::uint64_t samples, std::uint64_t seed, int threads) {
  CapacityTable table;
  table.h.assign(h_grid.begin(), h_grid.end());
  table.gamma_db.assign(gamma_db_grid.begin(), gamma_db_grid.end());
  table.rates.assign(table.h.size() * table.gamma_db.size(), 0.0);
  for (double h : table.h) {
    if (!(h >= 0.0 && h <= 1.0)) throw InvalidArgument("build_table: h grid must lie in [0, 1]");
  }

  const NoiseBank bank(samples, RngStream(seed, 0));
  const std::size_t nh = table.h.size();
  const std::size_t ng = table.gamma_db.size();
  auto fill_row = [&](std::size_t i) {
    if (table.h[i] == 0.0) return;  // coincident tones carry nothing
    for (std::size_t j = 0; j < ng; ++j) table.at(i, j) = bank.rate(table.h[i], to_linear(Db{table.gamma_db[j]}));
  };

  unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, nh));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < nh; ++i) fill_row(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < nh; i += n_threads) fill_row(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::uint64_t adjusted = 0;
  for (std::size_t i = 0; i < nh; ++i) {
    adjusted += isotonic_nondecreasing(std::span<double>(table.rates).subspan(i * ng, ng));
  }
  table.meta.samples = samples;
  table.meta.seed = seed;
  table.meta.stream = 0;
  table.meta.isotonic_adjustments = adjusted;
  table.meta.build_timestamp = utc_timestamp();
  return table;
}

double capacity(const CapacityTable& table, double h, Db gamma) {
  const Located lh = locate(table.h, h, "h");
  const Located lg = locate(table.gamma_db, gamma.value, "gamma_db");
  auto node = [&](std::size_t di, std::size_t dj) { return table.at(lh.index + di, lg.index + dj); };
  if (lh.frac == 0.0 && lg.frac == 0.0) return node(0, 0);
  if (lh.frac == 0.0) return node(0, 0) + lg.frac * (node(0, 1) - node(0, 0));
  if (lg.frac == 0.0) return node(0, 0) + lh.frac * (node(1, 0) - node(0, 0));
  const double lo = node(0, 0) + lg.frac * (node(0, 1) - node(0, 0));
  const double hi = node(1, 0) + lg.frac * (node(1, 1) - node(1, 0));
  return lo + lh.frac * (hi - lo);
}

double sinr_threshold(const CapacityTable& table, double h, double rate, double margin_db) {
  if (!(rate > 0.0)) throw InvalidArgument("sinr_threshold: rate must be positive");
  if (!(margin_db >= 0.0)) throw InvalidArgument("sinr_threshold: margin must be nonnegative");
  const std::vector<double> col = column(table, h);
  const auto& g = table.gamma_db;
  std::size_t j = 0;
  while (j < col.size() && col[j] < rate) ++j;
  if (j == col.size()) {
    std::ostringstream os;
    os << "sinr_threshold: rate " << rate << " exceeds the largest tabulated rate " << col.back()
       << " at h = " << h;
    throw RateUnachievable(os.str());
  }
  double gamma_db = g[j];
  if (j > 0 && col[j] > col[j - 1]) {
    gamma_db = g[j - 1] + (rate - col[j - 1]) / (col[j] - col[j - 1]) * (g[j] - g[j - 1]);
  }
  return to_linear(Db{gamma_db + margin_db});
}

double psd(double h, double f) {
  if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("psd: requires 0 < h < 1");
  const double a1 = sinc(f + 0.5 * h);
  const double a2 = sinc(f - 0.5 * h);
  const double psi = std::cos(kPi * h);
  const double th = 2.0 * kPi * f;
  const double den = 1.0 + psi * psi - 2.0 * psi * std::cos(th);
  const double b11 = (std::cos(th + kPi * h) - psi * std::cos(kPi * h)) / den;
  const double b22 = (std::cos(th - kPi * h) - psi * std::cos(kPi * h)) / den;
  const double b12 = (std::cos(th) - psi) / den;
  return 0.5 * (a1 * a1 + a2 * a2) + 0.5 * (b11 * a1 * a1 + 2.0 * b12 * a1 * a2 + b22 * a2 * a2);
}

double occupied_bandwidth(double h, double fraction) {
  if (!(h > 0.0 && h <= 1.0)) throw InvalidArgument("occupied_bandwidth: requires 0 < h <= 1");
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("occupied_bandwidth: fraction must lie in (0, 1)");
  const bool sunde = h == 1.0;
  auto density = [&](double f) { return sunde ? sunde_continuous_psd(f) : psd(h, f); };
  // Discrete power reached at |f| >= 1/2 (h = 1 only), one-sided.
  auto lines_below = [&](double x) { return sunde && x >= 0.5 ? 0.25 : 0.0; };

  const double target = 0.5 * fraction;  // one-sided
  // Segment edges every 1/8 of the symbol rate; the spectrum peaks sit on
  // edges (f = 0 for h < 1/2, f = 1/2 for h > 1/2).
  constexpr double kSeg = 0.125;
  double acc = 0.0;
  double lo = 0.0;
  for (int s = 0; s < 4096; ++s) {
    const double hi = lo + kSeg;
    const double seg = integrate(density, lo, hi);
    if (acc + seg + lines_below(hi) >= target) {
      auto excess = [&](double x) { return acc + integrate(density, lo, x) + lines_below(x) - target; };
      if (excess(lo) >= 0.0) return 2.0 * lo;
      boost::math::tools::eps_tolerance<double> tol(50);
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(excess, lo, hi, tol, iters);
      return a + b;  // 2 * midpoint
    }
    acc += seg;
    lo = hi;
  }
  throw NoConvergence("occupied_bandwidth: power fraction not reached");
}

double spectral_efficiency(double h) {
  // Pure but costly (adaptive quadrature plus a root search); the optimizer
  // asks for the same hundred grid values millions of times.
  static std::mutex mu;
  static std::unordered_map<double, double> memo;
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find(h); it != memo.end()) return it->second;
  }
  const double eta = 1.0 / occupied_bandwidth(h, 0.99);
  std::lock_guard lock(mu);
  memo.emplace(h, eta);
  return eta;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

void save_table(const CapacityTable& table, const std::filesystem::path& csv_path) {
  table.validate();
  {
    std::ofstream os(csv_path);
    if (!os) throw Error("save_table: cannot open " + csv_path.string());
    os << std::setprecision(17);
    os << "# fhtc capacity table, format " << table.meta.format_version << '\n';
    write_row(os, "h", table.h);
    write_row(os, "gamma_db", table.gamma_db);
    const std::size_t ng = table.gamma_db.size();
    for (std::size_t i = 0; i < table.h.size(); ++i) {
      write_row(os, nullptr, std::span<const double>(table.rates).subspan(i * ng, ng));
    }
    if (!os) throw Error("save_table: write failed for " + csv_path.string());
  }
  nlohmann::ordered_json meta;
  meta["format_version"] = table.meta.format_version;
  meta["estimator"] = table.meta.estimator;
  meta["samples"] = table.meta.samples;
  meta["seed"] = table.meta.seed;
  meta["stream"] = table.meta.stream;
  meta["common_random_numbers"] = table.meta.common_random_numbers;
  meta["build_timestamp"] = table.meta.build_timestamp;
  meta["isotonic_adjustments"] = table.meta.isotonic_adjustments;
  meta["h_points"] = table.h.size();
  meta["gamma_points"] = table.gamma_db.size();
  std::ofstream js(sidecar_path(csv_path));
  if (!js) throw Error("save_table: cannot open " + sidecar_path(csv_path).string());
  js << meta.dump(2) << '\n';
}

CapacityTable load_table(const std::filesystem::path& csv_path) {
  std::ifstream is(csv_path);
  if (!is) throw Error("load_table: cannot open " + csv_path.string());
  CapacityTable table;
  std::string line;
  int stage = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (stage == 0) {
      table.h = parse_row(line, "h");
      stage = 1;
    } else if (stage == 1) {
      table.gamma_db = parse_row(line, "gamma_db");
      stage = 2;
    } else {
      std::vector<double> row = parse_row(line, nullptr);
      if (row.size() != table.gamma_db.size()) throw FormatError("capacity table: row length does not match gamma grid");
      table.rates.insert(table.rates.end(), row.begin(), row.end());
    }
  }
  const auto side = sidecar_path(csv_path);
  std::ifstream js(side);
  if (!js) throw FormatError("load_table: missing metadata sidecar " + side.string());
  nlohmann::json meta;
  try {
    js >> meta;
    table.meta.format_version = meta.at("format_version").get<int>();
    table.meta.estimator = meta.at("estimator").get<std::string>();
    table.meta.samples = meta.at("samples").get<std::uint64_t>();
    table.meta.seed = meta.at("seed").get<std::uint64_t>();
    table.meta.stream = meta.value("stream", std::uint64_t{0});
    table.meta.common_random_numbers = meta.value("common_random_numbers", true);
    table.meta.build_timestamp = meta.at("build_timestamp").get<std::string>();
    table.meta.isotonic_adjustments = meta.at("isotonic_adjustments").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("load_table: bad metadata sidecar: ") + e.what());
  }
  if (table.meta.format_version != kTableFormatVersion) throw FormatError("load_table: unsupported format version");
  table.validate();
  return table;
}

}  // namespace fhtc::cpfsk
