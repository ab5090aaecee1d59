#pragma once

#include <cmath>

namespace fhtc {

// A power ratio in decibels. The CLI takes dB wherever the figures are
// plotted in dB; everything past the boundary is linear.
struct Db {
  double value = 0.0;
};

inline double to_linear(Db x) { return std::pow(10.0, x.value / 10.0); }
inline Db to_db(double linear) { return Db{10.0 * std::log10(linear)}; }

}  // namespace fhtc
