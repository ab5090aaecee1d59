#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fhtc/rng.hpp"
#include "fhtc/units.hpp"

namespace fhtc::cpfsk {

inline constexpr int kTableFormatVersion = 1;

struct TableMetadata {
  int format_version = kTableFormatVersion;
  std::string estimator = "noncoherent-binary-cpfsk-sir";
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  bool common_random_numbers = true;
  std::string build_timestamp;
  // Number of cells changed by the monotone cleanup along the SINR axis.
  std::uint64_t isotonic_adjustments = 0;
};

// Symmetric information rate C(h, gamma) of noncoherent binary CPFSK,
// tabulated on an (h, gamma_dB) grid. Row-major: rates[i * gamma_db.size() + j]
// belongs to (h[i], gamma_db[j]).
struct CapacityTable {
  std::vector<double> h;
  std::vector<double> gamma_db;
  std::vector<double> rates;
  TableMetadata meta;

  double at(std::size_t ih, std::size_t ig) const { return rates[ih * gamma_db.size() + ig]; }
  double& at(std::size_t ih, std::size_t ig) { return rates[ih * gamma_db.size() + ig]; }
  // Throws FormatError when the shape or monotonicity invariants fail.
  void validate() const;
};

/// Magnitude of the correlation between the two tones over one symbol,
/// |sin(pi h)/(pi h)|.
double tone_correlation(double h);

/// Monte Carlo estimate of the symmetric information rate (bits/symbol) at
/// linear SINR gamma, using `samples` draws from `rng`.
double estimate_capacity(double h, double gamma, std::uint64_t samples, RngStream rng);

/// Pre-drawn noise for common-random-number estimation: every cell of a table
/// reuses the same draws, so the tabulated surface is a smooth function of
/// (h, gamma) rather than carrying independent noise per cell.
class NoiseBank {
 public:
  NoiseBank(std::uint64_t samples, RngStream rng);
  std::size_t size() const { return w0_re_.size(); }
  double rate(double h, double gamma) const;

 private:
  std::vector<double> w0_re_, w0_im_, w1_re_, w1_im_;
};

/// Builds the table over ascending grids. gamma grid is in dB. Rows at h = 0
/// are identically zero (coincident tones). Threads <= 0 selects the hardware
/// concurrency.
CapacityTable build_table(std::span<const double> h_grid, std::span<const double> gamma_db_grid,
                          std::uint64_t samples, std::uint64_t seed, int threads = 0);

/// Pool-adjacent-violators fit; returns the number of changed entries.
std::size_t isotonic_nondecreasing(std::span<double> values);

/// Default grids: h in {0, 0.01, ..., 1}, gamma in {-4, -3.9, ..., 14} dB
/// (the search range -2..12 dB plus 2 dB of headroom for code-gap margins).
std::vector<double> default_h_grid();
std::vector<double> default_gamma_db_grid();

/// Bilinear interpolation in (h, gamma_dB). Exact at grid nodes.
/// Throws OutOfRange outside the grid hull.
double capacity(const CapacityTable& table, double h, Db gamma);

/// Smallest SINR whose interpolated rate reaches `rate` at modulation index h,
/// raised by `margin_db`; returned as a linear ratio. Throws RateUnachievable
/// if the rate exceeds the column's maximum.
double sinr_threshold(const CapacityTable& table, double h, double rate, double margin_db = 0.0);

/// Baseband power spectral density of binary CPFSK with equiprobable
/// symbols, unit symbol period, normalized to unit total power. Valid for
/// 0 < h < 1; h = 1 has discrete lines and is handled by spectral_efficiency.
double psd(double h, double f);

/// Two-sided bandwidth (in units of the symbol rate) that holds `fraction` of
/// the total power.
double occupied_bandwidth(double h, double fraction = 0.99);

/// Symbol rate divided by the 99%-power bandwidth, in symbols/s/Hz.
/// The closed-form spectrum cancels badly within about 1e-3 of h = 0 and
/// h = 1 (h = 1 itself is exact), so values there are unreliable; grid values
/// 0.01..0.99 hold about 1e-8 relative.
double spectral_efficiency(double h);

/// CSV (grids, then one row of rates per h) plus a JSON sidecar at
/// sidecar_path(csv_path). Values printed with 17 significant digits so a
/// save/load round trip is bit-exact.
void save_table(const CapacityTable& table, const std::filesystem::path& csv_path);
CapacityTable load_table(const std::filesystem::path& csv_path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace fhtc::cpfsk
