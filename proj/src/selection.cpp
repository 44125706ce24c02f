#include "memd/selection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>

#include "memd/error.hpp"
#include "memd/kernels.hpp"

namespace memd {

namespace {

constexpr double kScoreCeiling = 1e12;

// Parameters of one class column laid out order-major for the batched kernels:
// lambda[k][i], mu[k][i].
struct ColumnSoA {
  std::vector<std::vector<double>> lambda;
  std::vector<std::vector<double>> mu;
};

ColumnSoA gather_column(const std::vector<MaxEntDensity>& densities, std::size_t features,
                        std::size_t classes, std::size_t cls, std::size_t orders) {
  ColumnSoA soa;
  soa.lambda.assign(orders, std::vector<double>(features));
  soa.mu.assign(orders, std::vector<double>(features));
  for (std::size_t i = 0; i < features; ++i) {
    const MaxEntDensity& d = densities[i * classes + cls];
    for (std::size_t k = 0; k < orders; ++k) {
      soa.lambda[k][i] = d.lambdas()[k];
      soa.mu[k][i] = d.moments().values[k];
    }
  }
  return soa;
}

// out[i] += J(p_i || q_i) over all features.
void accumulate_pair_j(const ColumnSoA& p, const ColumnSoA& q, std::span<double> out) {
  const auto& kt = kernels::active();
  for (std::size_t k = 0; k < p.lambda.size(); ++k) {
    kt.accumulate_j(p.lambda[k], q.lambda[k], p.mu[k], q.mu[k], out);
  }
}

std::size_t orders_of(const MarginalGrid& grid) {
  return grid.marginals.empty() ? 0 : grid.marginals.front().spec().size();
}

}  // namespace

std::string_view to_string(RankingMethod method) {
  switch (method) {
    case RankingMethod::BinaryJ: return "binary_j";
    case RankingMethod::OneVsAllJ: return "one_vs_all_j";
    case RankingMethod::JsGm: return "js_gm";
  }
  return "unknown";
}

void validate_grid(const MarginalGrid& grid) {
  if (grid.marginals.size() != grid.features * grid.classes) {
    throw Error(ErrorCode::InvalidArgument, "grid size does not match features x classes");
  }
  if (grid.priors.size() != grid.classes) {
    throw Error(ErrorCode::InvalidArgument, "one prior per class required");
  }
  if (grid.rest && grid.rest->size() != grid.marginals.size()) {
    throw Error(ErrorCode::InvalidArgument, "complement grid size mismatch");
  }
  // A single spec across the grid lets the scorers batch over features.
  if (grid.marginals.empty()) return;
  const MaxEntDensity& first = grid.marginals.front();
  auto check = [&](const MaxEntDensity& d) {
    if (!(d.spec() == first.spec()) || !(d.support() == first.support())) {
      throw Error(ErrorCode::IncompatibleDensities,
                  "grid densities differ in support or feature functions");
    }
  };
  for (const auto& d : grid.marginals) check(d);
  if (grid.rest) {
    for (const auto& d : *grid.rest) check(d);
  }
}

RankedFeatures rank_by_scores(std::vector<double> scores, RankingMethod method) {
  std::size_t clamped = 0;
  for (double& s : scores) {
    if (std::isnan(s)) {
      s = 0.0;
      ++clamped;
    } else if (s > kScoreCeiling) {
      s = kScoreCeiling;
      ++clamped;
    } else if (s < 0.0) {
      // Rounding residue of a zero divergence.
      s = 0.0;
    }
  }
  if (clamped > 0) {
    std::cerr << "memd: warning: " << clamped << " feature score(s) clamped to [0, 1e12]\n";
  }
  RankedFeatures out;
  out.method = method;
  out.order.resize(scores.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  out.scores = std::move(scores);
  return out;
}

MarginalGrid fit_marginal_grid(const Dataset& data, const GridConfig& config,
                               bool with_complements) {
  validate_model_family(config.spec, config.support);
  const std::size_t d = data.dimension();
  const std::size_t m = data.num_classes();
  if (m == 0) throw Error(ErrorCode::EmptyClass, "dataset has no classes");
  const auto counts = data.class_counts();
  for (std::size_t c = 0; c < m; ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::EmptyClass, "class '" + data.label_map().name(static_cast<std::uint32_t>(c)) +
                                             "' has no training instances");
    }
  }
  if (with_complements && m < 2) {
    throw Error(ErrorCode::WrongArity, "complement models need at least two classes");
  }

  const auto orders = config.spec.orders();
  const std::size_t l = orders.size();
  // sums[c][k][i] = sum over class-c rows of x_i^order(k).
  std::vector<std::vector<std::vector<double>>> sums(
      m, std::vector<std::vector<double>>(l, std::vector<double>(d, 0.0)));

  if (config.spec.max_order() <= 2) {
    // Powers 1 and 2 accumulate together; map them onto the requested orders.
    std::vector<std::vector<double>> s1(m, std::vector<double>(d, 0.0));
    std::vector<std::vector<double>> s2(m, std::vector<double>(d, 0.0));
    const auto& kt = kernels::active();
    for (std::size_t r = 0; r < data.size(); ++r) {
      const RowView row = data.row(r);
      const std::uint32_t c = data.label(r);
      if (row.indices.size() == d) {
        kt.accumulate_powers(row.values, s1[c], s2[c]);
      } else {
        for (std::size_t k = 0; k < row.indices.size(); ++k) {
          const double v = row.values[k];
          s1[c][row.indices[k]] += v;
          s2[c][row.indices[k]] += v * v;
        }
      }
    }
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t k = 0; k < l; ++k) sums[c][k] = orders[k] == 1 ? s1[c] : s2[c];
    }
  } else {
    for (std::size_t r = 0; r < data.size(); ++r) {
      const RowView row = data.row(r);
      const std::uint32_t c = data.label(r);
      for (std::size_t e = 0; e < row.indices.size(); ++e) {
        for (std::size_t k = 0; k < l; ++k) {
          sums[c][k][row.indices[e]] += std::pow(row.values[e], orders[k]);
        }
      }
    }
  }

  auto fit_one = [&](std::span<const double> power_sums, std::size_t n, std::size_t feature,
                     const std::string& what) {
    try {
      return fit_marginal(moments_from_power_sums(power_sums, n), config.spec, config.support,
                          config.fit);
    } catch (const Error& e) {
      throw Error(e.code(), "feature " + std::to_string(feature) + ", " + what + ": " + e.message());
    }
  };

  MarginalGrid grid;
  grid.features = d;
  grid.classes = m;
  std::vector<double> count_weights(counts.begin(), counts.end());
  grid.priors = WeightVector::from_counts(count_weights);
  grid.marginals.reserve(d * m);
  std::vector<double> power_sums(l);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t c = 0; c < m; ++c) {
      for (std::size_t k = 0; k < l; ++k) power_sums[k] = sums[c][k][i];
      grid.marginals.push_back(
          fit_one(power_sums, counts[c], i, "class '" + data.label_map().name(static_cast<std::uint32_t>(c)) + "'"));
    }
  }
  if (with_complements) {
    std::vector<MaxEntDensity> rest;
    rest.reserve(d * m);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t c = 0; c < m; ++c) {
        std::fill(power_sums.begin(), power_sums.end(), 0.0);
        std::size_t n = 0;
        for (std::size_t other = 0; other < m; ++other) {
          if (other == c) continue;
          for (std::size_t k = 0; k < l; ++k) power_sums[k] += sums[other][k][i];
          n += counts[other];
        }
        rest.push_back(fit_one(power_sums, n, i,
                               "complement of '" + data.label_map().name(static_cast<std::uint32_t>(c)) + "'"));
      }
    }
    grid.rest = std::move(rest);
  }
  return grid;
}

RankedFeatures score_binary_j(const MarginalGrid& grid) {
  if (grid.classes != 2) {
    throw Error(ErrorCode::WrongArity, "binary J ranking needs exactly two classes");
  }
  validate_grid(grid);
  const std::size_t l = orders_of(grid);
  std::vector<double> scores(grid.features, 0.0);
  const ColumnSoA a = gather_column(grid.marginals, grid.features, 2, 0, l);
  const ColumnSoA b = gather_column(grid.marginals, grid.features, 2, 1, l);
  accumulate_pair_j(a, b, scores);
  return rank_by_scores(std::move(scores), RankingMethod::BinaryJ);
}

RankedFeatures score_one_vs_all_j(const MarginalGrid& grid) {
  if (!grid.rest) {
    throw Error(ErrorCode::MissingComplementModels,
                "one-vs-all ranking needs complement models for every class");
  }
  validate_grid(grid);
  const std::size_t l = orders_of(grid);
  const auto& kt = kernels::active();
  std::vector<double> scores(grid.features, 0.0);
  std::vector<double> pair(grid.features);
  for (std::size_t c = 0; c < grid.classes; ++c) {
    const ColumnSoA own = gather_column(grid.marginals, grid.features, grid.classes, c, l);
    const ColumnSoA rest = gather_column(*grid.rest, grid.features, grid.classes, c, l);
    std::fill(pair.begin(), pair.end(), 0.0);
    accumulate_pair_j(own, rest, pair);
    kt.axpy(grid.priors[c], pair, scores);
  }
  return rank_by_scores(std::move(scores), RankingMethod::OneVsAllJ);
}

RankedFeatures score_js_gm(const MarginalGrid& grid) {
  validate_grid(grid);
  const std::size_t l = orders_of(grid);
  const auto& kt = kernels::active();
  std::vector<ColumnSoA> columns;
  columns.reserve(grid.classes);
  for (std::size_t c = 0; c < grid.classes; ++c) {
    columns.push_back(gather_column(grid.marginals, grid.features, grid.classes, c, l));
  }
  std::vector<double> scores(grid.features, 0.0);
  std::vector<double> pair(grid.features);
  for (std::size_t j = 0; j < grid.classes; ++j) {
    for (std::size_t k = j + 1; k < grid.classes; ++k) {
      std::fill(pair.begin(), pair.end(), 0.0);
      accumulate_pair_j(columns[j], columns[k], pair);
      kt.axpy(2.0 * grid.priors[j] * grid.priors[k], pair, scores);
    }
  }
  return rank_by_scores(std::move(scores), RankingMethod::JsGm);
}

std::vector<std::size_t> brute_force_subset_oracle(const MarginalGrid& grid, std::size_t k) {
  if (grid.classes != 2) throw Error(ErrorCode::WrongArity, "subset oracle needs two classes");
  if (grid.features > 15) {
    throw Error(ErrorCode::OracleTooLarge, "subset oracle limited to 15 features");
  }
  if (k > grid.features) throw Error(ErrorCode::InvalidK, "k exceeds the feature count");
  std::vector<double> per_feature(grid.features);
  for (std::size_t i = 0; i < grid.features; ++i) {
    per_feature[i] = j_divergence(grid.at(i, 0), grid.at(i, 1));
  }
  const std::uint32_t limit = 1u << grid.features;
  std::uint32_t best_mask = 0;
  double best = -1.0;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
    double total = 0.0;
    for (std::size_t i = 0; i < grid.features; ++i) {
      if (mask & (1u << i)) total += per_feature[i];
    }
    if (total > best) {
      best = total;
      best_mask = mask;
    }
  }
  std::vector<std::size_t> subset;
  for (std::size_t i = 0; i < grid.features; ++i) {
    if (best_mask & (1u << i)) subset.push_back(i);
  }
  return subset;
}

}  // namespace memd
