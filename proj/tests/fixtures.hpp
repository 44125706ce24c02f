#pragma once

// Synthetic data generators shared by the unit and acceptance tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "memd/dataset.hpp"
#include "memd/maxent.hpp"

namespace fixture {

inline std::vector<std::string> numbered_names(std::size_t d, const std::string& prefix = "f") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

/// Two-class Gaussian data, `per_class` instances each. The first
/// `informative` features have mean 0 in class "a" and `shift` in class "b";
/// the rest are N(0, 1) in both.
inline memd::Dataset planted_gaussian(std::size_t per_class, std::size_t d, std::size_t informative,
                                      double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  memd::Dataset data(d);
  const std::uint32_t a = data.label_map().intern("a");
  const std::uint32_t b = data.label_map().intern("b");
  std::vector<double> row(d);
  for (std::size_t n = 0; n < 2 * per_class; ++n) {
    const bool second = n % 2 == 1;
    for (std::size_t i = 0; i < d; ++i) {
      row[i] = noise(rng) + (second && i < informative ? shift : 0.0);
    }
    data.add_dense_row(row, second ? b : a);
  }
  data.feature_names() = numbered_names(d);
  return data;
}

/// M-class Gaussian data: class c shifts feature c (mod informative) by `shift`.
inline memd::Dataset multiclass_gaussian(std::size_t classes, std::size_t per_class, std::size_t d,
                                         double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  memd::Dataset data(d);
  for (std::size_t c = 0; c < classes; ++c) data.label_map().intern("c" + std::to_string(c));
  std::vector<double> row(d);
  for (std::size_t n = 0; n < classes * per_class; ++n) {
    const auto c = static_cast<std::uint32_t>(n % classes);
    for (std::size_t i = 0; i < d; ++i) row[i] = noise(rng);
    row[c] += shift;
    row[(c + 1) % d] -= 0.5 * shift;
    data.add_dense_row(row, c);
  }
  data.feature_names() = numbered_names(d);
  return data;
}

/// Random exponential-family marginal with the given support.
inline memd::MaxEntDensity random_exponential(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean(0.05, 20.0);
  return memd::fit_exponential_halfline(memd::MomentVector{{mean(rng)}, 1});
}

inline memd::MaxEntDensity gaussian(double m, double v) {
  return memd::fit_gaussian_realline(memd::MomentVector{{m, v + m * m}, 1});
}

inline memd::MaxEntDensity exponential(double rate) {
  return memd::fit_exponential_halfline(memd::MomentVector{{1.0 / rate}, 1});
}

}  // namespace fixture
