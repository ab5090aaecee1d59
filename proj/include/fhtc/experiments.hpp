#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fhtc::exp {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kConfigFormatVersion = 1;

// Flat `key = value` document. Lines starting with '#' are comments; list
// values are comma separated. Every accessor throws ConfigError on a
// malformed value.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  bool empty() const { return values_.empty(); }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key, double fallback) const;
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> words(const std::string& key, const std::vector<std::string>& fallback) const;

  // Throws ConfigError naming the first key outside `allowed`, or a
  // format_version other than the supported one.
  void check_keys(const std::set<std::string>& allowed) const;
  void require(const std::string& key, const std::string& why) const;

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

// One CSV series. The first three columns are always x,value,stderr; figure
// families may append descriptive columns.
struct Curve {
  std::string name;
  std::vector<std::string> columns{"x", "value", "stderr"};
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> params;

  double x(std::size_t i) const { return rows[i][0]; }
  double value(std::size_t i) const { return rows[i][1]; }
  double stderr_(std::size_t i) const { return rows[i][2]; }
};

/// `#`-prefixed parameter echo, then the column header and rows printed with
/// 17 significant digits. No timestamps.
void write_curve(const Curve& curve, const std::filesystem::path& path,
                 const std::vector<std::pair<std::string, std::string>>& common);

struct FigureOutput {
  int figure = 0;
  std::vector<Curve> curves;
  std::vector<std::filesystem::path> files;

  const Curve& curve(const std::string& name) const;
};

/// Keys accepted by every figure.
const std::set<std::string>& figure_keys();

/// Emits figN_<series>.csv into out_dir (created if missing). Figures 1-5
/// need `seed`; figures 8-15 need `table`.
FigureOutput run_figure(int figure, const Config& config, const std::filesystem::path& out_dir);

struct TableRow {
  std::string process;
  double r_net = 0, r_ex = 0, alpha = 0;
  double tau_exhaustive = 0, tau_gradient = 0;
  std::uint64_t evaluations_exhaustive = 0, evaluations = 0, iterations = 0;
  int lprime = 0;
  double h = 0, beta_db = 0, rate = 0;
};

const std::set<std::string>& table_keys();

/// Both optimizers over every (r_net, r_ex, alpha) row for each process named
/// in `processes` (bpp, ppp). An empty config yields no rows.
std::vector<TableRow> run_tables(const Config& config, const std::filesystem::path& out_dir);

}  // namespace fhtc::exp
