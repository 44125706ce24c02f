#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "memd/error.hpp"
#include "memd/selection.hpp"
#include "oracles.hpp"

using namespace memd;

namespace {

// Rate r with J(Exp(1), Exp(r)) = j, i.e. (r - 1)^2 / r = j.
double rate_for_j(double j) { return ((2.0 + j) + std::sqrt((2.0 + j) * (2.0 + j) - 4.0)) / 2.0; }

MarginalGrid exponential_grid(const std::vector<std::vector<double>>& rates, WeightVector priors) {
  MarginalGrid g;
  g.features = rates.size();
  g.classes = rates.front().size();
  for (const auto& row : rates) {
    for (double r : row) g.marginals.push_back(fixture::exponential(r));
  }
  g.priors = std::move(priors);
  return g;
}

MarginalGrid binary_grid_with_j(const std::vector<double>& js) {
  std::vector<std::vector<double>> rates;
  for (double j : js) rates.push_back({1.0, rate_for_j(j)});
  return exponential_grid(rates, WeightVector::uniform(2));
}

MarginalGrid random_binary_grid(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> rate(0.2, 5.0);
  std::vector<std::vector<double>> rates;
  for (std::size_t i = 0; i < d; ++i) rates.push_back({rate(rng), rate(rng)});
  std::uniform_real_distribution<double> u(0.1, 0.9);
  const double p = u(rng);
  return exponential_grid(rates, WeightVector({p, 1.0 - p}));
}

std::vector<std::size_t> sorted_prefix(const std::vector<std::size_t>& order, std::size_t k) {
  std::vector<std::size_t> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("selection") {
  TEST_CASE("ranking orders by descending score") {
    const auto r = rank_by_scores({0.2, 0.9, 0.5}, RankingMethod::BinaryJ);
    CHECK(r.order == std::vector<std::size_t>{1, 2, 0});
    const auto g = binary_grid_with_j({0.2, 0.9, 0.5});
    CHECK(score_binary_j(g).order == std::vector<std::size_t>{1, 2, 0});
    CHECK(score_binary_j(g).scores[1] == doctest::Approx(0.9).epsilon(1e-12));
  }

  TEST_CASE("ties resolve by ascending index") {
    const auto g = exponential_grid({{2.0, 2.0}, {1.0, 1.0}, {3.0, 3.0}, {0.5, 0.5}},
                                    WeightVector::uniform(2));
    const auto r = score_binary_j(g);
    CHECK(r.order == std::vector<std::size_t>{0, 1, 2, 3});
    for (double s : r.scores) CHECK(s == 0.0);
  }

  TEST_CASE("scores are clamped") {
    const double nan = std::nan("");
    const auto r = rank_by_scores({nan, 1e300, -1.0}, RankingMethod::JsGm);
    CHECK(r.scores[0] == 0.0);
    CHECK(r.scores[1] == 1e12);
    CHECK(r.scores[2] == 0.0);
    CHECK(r.order == std::vector<std::size_t>{1, 0, 2});
  }

  TEST_CASE("subset oracle examples") {
    const auto g = binary_grid_with_j({0.1, 0.4, 0.3, 0.2});
    CHECK(brute_force_subset_oracle(g, 2) == std::vector<std::size_t>{1, 2});
    CHECK(brute_force_subset_oracle(g, 4) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(code_of([&] { brute_force_subset_oracle(g, 5); }) == ErrorCode::InvalidK);
    std::mt19937_64 rng(31);
    const auto big = random_binary_grid(rng, 16);
    CHECK(code_of([&] { brute_force_subset_oracle(big, 3); }) == ErrorCode::OracleTooLarge);
  }

  TEST_CASE("top-k of the binary ranking equals the best k-subset") {
    std::mt19937_64 rng(32);
    for (std::size_t d : {6U, 8U}) {
      for (int t = 0; t < 10; ++t) {
        const auto g = random_binary_grid(rng, d);
        const auto order = score_binary_j(g).order;
        for (std::size_t k = 1; k <= d; ++k) {
          CHECK(brute_force_subset_oracle(g, k) == sorted_prefix(order, k));
        }
      }
    }
  }

  TEST_CASE("one-vs-all J reduces to binary J for two classes with equal priors") {
    Dataset data(4);
    const auto a = data.label_map().intern("a");
    const auto b = data.label_map().intern("b");
    std::mt19937_64 rng(33);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> row(4);
    for (int n = 0; n < 40; ++n) {
      for (std::size_t i = 0; i < 4; ++i) row[i] = e(rng) * (n % 2 ? 1.0 + static_cast<double>(i) : 1.0);
      data.add_dense_row(row, n % 2 ? b : a);
    }
    GridConfig cfg;
    const auto grid = fit_marginal_grid(data, cfg, true);
    const auto ova = score_one_vs_all_j(grid);
    const auto bin = score_binary_j(grid);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(ova.scores[i] == doctest::Approx(bin.scores[i]).epsilon(1e-12));
    }
    CHECK(ova.order == bin.order);
  }

  TEST_CASE("one-vs-all J matches a term-by-term recomputation") {
    Dataset data(3);
    for (const char* name : {"x", "y", "z"}) data.label_map().intern(name);
    std::mt19937_64 rng(34);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> row(3);
    for (int n = 0; n < 90; ++n) {
      const auto c = static_cast<std::uint32_t>(n % 7 == 0 ? 0 : n % 3);
      for (std::size_t i = 0; i < 3; ++i) row[i] = e(rng) * (1.0 + static_cast<double>(c * i));
      data.add_dense_row(row, c);
    }
    const auto grid = fit_marginal_grid(data, GridConfig{}, true);
    REQUIRE(grid.rest.has_value());
    const auto counts = data.class_counts();
    const auto r = score_one_vs_all_j(grid);
    for (std::size_t i = 0; i < 3; ++i) {
      double expected = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        // Means from the raw samples; rates are their reciprocals.
        double in = 0.0, out = 0.0;
        std::size_t n_out = 0;
        for (std::size_t s = 0; s < data.size(); ++s) {
          const double v = data.dense_row(s)[i];
          if (data.label(s) == c) {
            in += v;
          } else {
            out += v;
            ++n_out;
          }
        }
        const double rate_in = static_cast<double>(counts[c]) / in;
        const double rate_out = static_cast<double>(n_out) / out;
        const double pi = static_cast<double>(counts[c]) / static_cast<double>(data.size());
        expected += pi * (oracle::kl_exponential(rate_in, rate_out) +
                          oracle::kl_exponential(rate_out, rate_in));
      }
      CHECK(r.scores[i] == doctest::Approx(expected).epsilon(1e-10));
    }
  }

  TEST_CASE("one-vs-all needs complement models") {
    const auto g = exponential_grid({{1.0, 2.0, 3.0}}, WeightVector::uniform(3));
    CHECK(code_of([&] { score_one_vs_all_j(g); }) == ErrorCode::MissingComplementModels);
    CHECK(code_of([&] { score_binary_j(g); }) == ErrorCode::WrongArity);
  }

  TEST_CASE("JS_GM ranking") {
    const auto same = exponential_grid({{1.0, 1.0, 1.0}}, WeightVector::uniform(3));
    CHECK(score_js_gm(same).scores[0] == 0.0);
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> rate(0.2, 5.0);
    std::vector<std::vector<double>> rates(7, std::vector<double>(3));
    for (auto& row : rates) {
      for (auto& r : row) r = rate(rng);
    }
    const auto g = exponential_grid(rates, WeightVector({0.2, 0.3, 0.5}));
    const auto r = score_js_gm(g);
    for (std::size_t i = 0; i < rates.size(); ++i) {
      const std::vector<MaxEntDensity> row{g.at(i, 0), g.at(i, 1), g.at(i, 2)};
      CHECK(r.scores[i] == doctest::Approx(2.0 * js_gm(row, g.priors)).epsilon(1e-12));
    }
  }

  TEST_CASE("rescaling the class counts leaves every ranking unchanged") {
    std::mt19937_64 rng(36);
    std::uniform_real_distribution<double> rate(0.2, 5.0);
    std::vector<std::vector<double>> rates(9, std::vector<double>(3));
    for (auto& row : rates) {
      for (auto& r : row) r = rate(rng);
    }
    const std::vector<double> counts{3.0, 5.0, 7.0};
    const std::vector<double> scaled{3.0 * 17.0, 5.0 * 17.0, 7.0 * 17.0};
    const auto g1 = exponential_grid(rates, WeightVector::from_counts(counts));
    const auto g2 = exponential_grid(rates, WeightVector::from_counts(scaled));
    CHECK(score_js_gm(g1).order == score_js_gm(g2).order);
    const auto b1 = exponential_grid({{1.0, 2.0}, {3.0, 1.0}, {1.0, 1.1}},
                                     WeightVector::from_counts(std::vector<double>{2.0, 3.0}));
    const auto b2 = exponential_grid({{1.0, 2.0}, {3.0, 1.0}, {1.0, 1.1}},
                                     WeightVector::from_counts(std::vector<double>{20.0, 30.0}));
    CHECK(score_binary_j(b1).order == score_binary_j(b2).order);
  }

  TEST_CASE("a dominant feature ranks first under every method") {
    std::mt19937_64 rng(37);
    Dataset data(6);
    const auto a = data.label_map().intern("a");
    const auto b = data.label_map().intern("b");
    std::exponential_distribution<double> e(1.0);
    std::vector<double> row(6);
    for (int n = 0; n < 100; ++n) {
      const bool second = n % 2;
      for (std::size_t i = 0; i < 5; ++i) row[i] = e(rng) * (second ? 1.3 : 1.0);
      row[5] = e(rng) * (second ? 40.0 : 1.0);
      data.add_dense_row(row, second ? b : a);
    }
    const auto grid = fit_marginal_grid(data, GridConfig{}, true);
    CHECK(score_binary_j(grid).order.front() == 5);
    CHECK(score_one_vs_all_j(grid).order.front() == 5);
    CHECK(score_js_gm(grid).order.front() == 5);
  }

  TEST_CASE("grid fitting") {
    Dataset data(2);
    const auto a = data.label_map().intern("a");
    const auto b = data.label_map().intern("b");
    for (int n = 0; n < 40; ++n) {
      const std::vector<double> row{1.0 + n % 3, 0.5 * (n % 5)};
      data.add_dense_row(row, n < 30 ? a : b);
    }
    const auto grid = fit_marginal_grid(data, GridConfig{}, false);
    CHECK(grid.priors[0] == 0.75);
    CHECK(grid.priors[1] == 0.25);
    CHECK(grid.fitted_count() == 4);
    CHECK(fit_marginal_grid(data, GridConfig{}, true).fitted_count() == 8);

    data.label_map().intern("never");
    CHECK(code_of([&] { fit_marginal_grid(data, GridConfig{}, false); }) == ErrorCode::EmptyClass);
  }

  TEST_CASE("sparse and dense storage give the same grid") {
    const Dataset dense = fixture::planted_gaussian(20, 7, 2, 1.5, 38);
    Dataset sparse(7);
    for (const auto& name : dense.label_map().names()) sparse.label_map().intern(name);
    for (std::size_t r = 0; r < dense.size(); ++r) {
      const auto row = dense.dense_row(r);
      std::vector<std::uint32_t> idx;
      std::vector<double> val;
      for (std::uint32_t i = 0; i < 7; ++i) {
        if (i % 3 != 1) {
          idx.push_back(i);
          val.push_back(row[i] * row[i]);
        }
      }
      sparse.add_sparse_row(idx, val, dense.label(r));
    }
    Dataset densified(7);
    for (const auto& name : dense.label_map().names()) densified.label_map().intern(name);
    for (std::size_t r = 0; r < sparse.size(); ++r) densified.add_dense_row(sparse.dense_row(r), sparse.label(r));

    for (int orders : {1, 2}) {
      GridConfig cfg;
      cfg.spec = FeatureFunctionSpec::up_to(orders);
      const auto g1 = fit_marginal_grid(sparse, cfg, true);
      const auto g2 = fit_marginal_grid(densified, cfg, true);
      REQUIRE(g1.marginals.size() == g2.marginals.size());
      for (std::size_t n = 0; n < g1.marginals.size(); ++n) {
        for (std::size_t k = 0; k < g1.marginals[n].lambdas().size(); ++k) {
          CHECK(g1.marginals[n].lambdas()[k] ==
                doctest::Approx(g2.marginals[n].lambdas()[k]).epsilon(1e-9));
        }
      }
    }
  }
}
