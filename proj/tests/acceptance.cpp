// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "memd/classifier.hpp"
#include "memd/divergence.hpp"
#include "memd/harness.hpp"
#include "memd/maxent.hpp"
#include "memd/selection.hpp"
#include "oracles.hpp"

using namespace memd;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) total += (v = e(rng));
  for (auto& v : p) v /= total;
  return p;
}

struct DiscreteInstance {
  std::vector<DiscreteDistribution> ps;
  WeightVector w;
};

std::vector<DiscreteInstance> discrete_instances() {
  std::mt19937_64 rng(20240404);
  std::uniform_int_distribution<std::size_t> msize(2, 5);
  std::uniform_int_distribution<std::size_t> ssize(2, 6);
  std::vector<DiscreteInstance> out;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = msize(rng);
    const std::size_t s = ssize(rng);
    DiscreteInstance inst{{}, WeightVector(random_simplex(rng, m))};
    for (std::size_t i = 0; i < m; ++i) inst.ps.emplace_back(random_simplex(rng, s));
    out.push_back(std::move(inst));
  }
  return out;
}

// 1. Closed-form J against forward + backward quadrature KL.
Outcome closed_form_j_vs_quadrature() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rate(0.1, 10.0);
  std::uniform_real_distribution<double> loc(-5.0, 5.0);
  std::uniform_real_distribution<double> var(0.1, 5.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto p = fixture::exponential(rate(rng));
    const auto q = fixture::exponential(rate(rng));
    worst = std::max(worst, std::abs(j_divergence(p, q) - (kl_numeric(p, q) + kl_numeric(q, p))));
  }
  for (int t = 0; t < 200; ++t) {
    const auto p = fixture::gaussian(loc(rng), var(rng));
    const auto q = fixture::gaussian(loc(rng), var(rng));
    worst = std::max(worst, std::abs(j_divergence(p, q) - (kl_numeric(p, q) + kl_numeric(q, p))));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-6 && elapsed < 10.0,
          fmt("max |J - (KL+KL)| = %.3g (<= 1e-6), %.2f s (< 10 s)", worst, elapsed)};
}

// 2. Analytic spot values of J.
Outcome analytic_spot_values() {
  const double je = j_divergence(fixture::exponential(1.0), fixture::exponential(2.0));
  const double jg = j_divergence(fixture::gaussian(0.0, 1.0), fixture::gaussian(1.0, 1.0));
  const double expected_e = oracle::kl_exponential(1.0, 2.0) + oracle::kl_exponential(2.0, 1.0);
  const double expected_g = oracle::kl_gaussian(0, 1, 1, 1) + oracle::kl_gaussian(1, 1, 0, 1);
  const double de = std::abs(je - expected_e);
  const double dg = std::abs(jg - expected_g);
  return {de <= 1e-12 && dg <= 1e-12 && std::abs(expected_e - 0.5) <= 1e-15 &&
              std::abs(expected_g - 1.0) <= 1e-15,
          fmt("J(Exp1,Exp2) = %.17g, J(N(0,1),N(1,1)) = %.17g (+-1e-12)", je, jg)};
}

// 3. Top-k of the binary J ranking equals the exhaustive best subset.
Outcome theorem_one_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  std::uniform_real_distribution<double> loc(-2.0, 2.0);
  std::uniform_real_distribution<double> var(0.2, 3.0);
  std::uniform_real_distribution<double> rate(0.2, 5.0);
  std::uniform_real_distribution<double> prior(0.1, 0.9);
  std::size_t mismatches = 0;
  std::size_t checks = 0;
  for (int t = 0; t < 50; ++t) {
    MarginalGrid g;
    g.features = dim(rng);
    g.classes = 2;
    const bool gaussian = t % 2 == 0;
    for (std::size_t i = 0; i < 2 * g.features; ++i) {
      g.marginals.push_back(gaussian ? fixture::gaussian(loc(rng), var(rng))
                                     : fixture::exponential(rate(rng)));
    }
    const double p = prior(rng);
    g.priors = WeightVector({p, 1.0 - p});
    const auto order = score_binary_j(g).order;
    for (std::size_t k = 1; k <= g.features; ++k) {
      std::vector<std::size_t> top(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(top.begin(), top.end());
      ++checks;
      if (brute_force_subset_oracle(g, k) != top) ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 60.0,
          fmt("%zu mismatches over %zu (grid, k) checks, %.2f s (< 60 s)", mismatches, checks,
              elapsed)};
}

// 4. JS equals the mutual information of the induced joint.
Outcome proposition_one(const std::vector<DiscreteInstance>& instances) {
  double worst = 0.0;
  for (const auto& inst : instances) {
    const double js = js_divergence_discrete(inst.ps, inst.w);
    const double mi = oracle::mutual_information(joint_from_mixture(inst.ps, inst.w));
    worst = std::max(worst, std::abs(js - mi));
  }
  return {worst <= 1e-9, fmt("max |JS - I| = %.3g over 1000 instances (<= 1e-9)", worst)};
}

// 5. JS never exceeds JS_GM.
Outcome proposition_two(const std::vector<DiscreteInstance>& instances) {
  std::size_t violations = 0;
  double min_gap = 1e300;
  for (const auto& inst : instances) {
    const double gap = js_gm_discrete(inst.ps, inst.w) - js_divergence_discrete(inst.ps, inst.w);
    min_gap = std::min(min_gap, gap);
    if (gap < -1e-12) ++violations;
  }
  return {violations == 0,
          fmt("%zu violations of JS <= JS_GM + 1e-12, smallest gap %.3g", violations, min_gap)};
}

// 6. Truncated exponential on [0, 1] reproduces its target mean.
Outcome truncated_exponential_solver() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> target(0.05, 0.95);
  const FeatureFunctionSpec first({1});
  const auto unit = SupportSpec::interval(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double mu = target(rng);
    const auto d = fit_numeric(MomentVector{{mu}, 1}, first, unit);
    const double mean =
        oracle::simpson([&](double x) { return x * std::exp(d.log_density(x)); }, 0.0, 1.0);
    worst = std::max(worst, std::abs(mean - mu));
  }
  const double uniform = fit_numeric(MomentVector{{0.5}, 1}, first, unit).lambdas()[0];
  return {worst <= 1e-8 && std::abs(uniform) <= 1e-8,
          fmt("max |E[X] - mu| = %.3g (<= 1e-8), lambda at mu=0.5 = %.3g (|.| <= 1e-8)", worst,
              uniform)};
}

// 7. The multiplier-form binary rule agrees with predict.
Outcome decision_rule_equivalence() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t pairs = 0;
  std::size_t agree = 0;
  for (int m = 0; m < 100; ++m) {
    const bool gaussian = m % 2 == 0;
    const std::size_t d = 1 + rng() % 8;
    const std::size_t per_a = 3 + rng() % 20;
    const std::size_t per_b = 3 + rng() % 20;
    Dataset data(d);
    const auto a = data.label_map().intern("a");
    const auto b = data.label_map().intern("b");
    std::vector<double> row(d);
    for (std::size_t n = 0; n < per_a + per_b; ++n) {
      const bool second = n >= per_a;
      for (std::size_t i = 0; i < d; ++i) {
        const double scale = second ? 0.5 + 2.0 * static_cast<double>((i * 7 + m) % 5) / 4.0 : 1.0;
        row[i] = gaussian ? scale * (2.0 * u(rng) - 1.0) + (second ? 0.3 : 0.0) : scale * u(rng);
      }
      data.add_dense_row(row, second ? b : a);
    }
    FitConfig cfg;
    if (gaussian) {
      cfg.grid.spec = FeatureFunctionSpec::up_to(2);
      cfg.grid.support = SupportSpec::real_line();
    }
    cfg.method = m % 3 == 0 ? Method::MeMdJS : Method::MeMdJ;
    cfg.k = 1 + rng() % d;
    const NaiveBayesModel model = fit(data, cfg);
    for (int t = 0; t < 10; ++t) {
      std::vector<double> x(d);
      for (auto& v : x) v = gaussian ? 6.0 * u(rng) - 3.0 : 3.0 * u(rng);
      ++pairs;
      if (binary_decision_lambda_form(model, x) == predict(model, x)) ++agree;
    }
  }
  return {agree == pairs, fmt("%zu of %zu (model, input) pairs agree", agree, pairs)};
}

// 8. Planted informative features are found and classified.
Outcome synthetic_end_to_end() {
  const auto start = Clock::now();
  ExperimentConfig cfg;
  cfg.fit.grid.spec = FeatureFunctionSpec::up_to(2);
  cfg.fit.grid.support = SupportSpec::real_line();
  cfg.k = 5;
  cfg.folds = 2;
  int found = 0;
  double accuracy_total = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const Dataset data = fixture::planted_gaussian(500, 50, 5, 2.0, 8000 + s);
    const MarginalGrid grid = fit_marginal_grid(data, cfg.fit.grid, false);
    const auto order = score_binary_j(grid).order;
    const bool all_top = std::all_of(order.begin() + 10, order.end(), [](std::size_t i) { return i >= 5; });
    if (all_top) ++found;
    cfg.seed = static_cast<std::uint64_t>(s);
    accuracy_total += cross_validate(data, cfg).mean_accuracy;
  }
  const double found_rate = static_cast<double>(found) / seeds;
  const double mean_accuracy = accuracy_total / seeds;
  const double elapsed = seconds_since(start);
  return {found_rate >= 0.95 && mean_accuracy >= 0.90 && elapsed < 120.0,
          fmt("informative in top 10 for %.0f%% of seeds (>= 95%%), 2-fold K=5 accuracy %.4f "
              "(>= 0.90), %.1f s (< 120 s)",
              100.0 * found_rate, mean_accuracy, elapsed)};
}

// 9. MeMd-J and MeMd-JS perform alike on multiclass data; marginal counts.
Outcome multiclass_parity() {
  const Dataset data = fixture::multiclass_gaussian(4, 100, 20, 1.5, 9);
  ExperimentConfig cfg;
  cfg.fit.grid.spec = FeatureFunctionSpec::up_to(2);
  cfg.fit.grid.support = SupportSpec::real_line();
  cfg.seed = 9;
  cfg.fit.method = Method::MeMdJ;
  const auto j = cross_validate(data, cfg);
  cfg.fit.method = Method::MeMdJS;
  const auto js = cross_validate(data, cfg);
  const std::size_t m = 4;
  const std::size_t d = data.dimension();
  bool counts_ok = true;
  for (const auto& f : j.folds) counts_ok = counts_ok && f.fitted_marginals == 2 * m * d;
  for (const auto& f : js.folds) counts_ok = counts_ok && f.fitted_marginals == m * d;
  const double gap = 100.0 * std::abs(j.mean_accuracy - js.mean_accuracy);
  return {gap <= 3.0 && counts_ok,
          fmt("MeMd-J %.4f vs MeMd-JS %.4f, gap %.2f points (<= 3); marginals %zu vs %zu "
              "(expect %zu vs %zu)",
              j.mean_accuracy, js.mean_accuracy, gap, j.folds.front().fitted_marginals,
              js.folds.front().fitted_marginals, 2 * m * d, m * d)};
}

// 10. Two `memd cv` runs with one seed produce identical bytes.
Outcome cli_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "memd_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "data.csv");
    write_dense_csv(f, fixture::planted_gaussian(100, 30, 4, 1.5, 10));
  }
  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("report" + std::to_string(run) + ".txt");
    const std::string cmd = std::string("\"") + MEMD_TOOL_PATH + "\" cv --data \"" +
                            (dir / "data.csv").string() + "\" --orders 2 --folds 5 --seed 42 --out \"" +
                            out.string() + "\"";
    if (std::system(cmd.c_str()) != 0) {
      std::filesystem::remove_all(dir);
      return {false, "memd cv exited with an error"};
    }
    std::ifstream in(out, std::ios::binary);
    reports[run].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::filesystem::remove_all(dir);
  const bool same = !reports[0].empty() && reports[0] == reports[1];
  return {same, fmt("two reports of %zu bytes, %s", reports[0].size(),
                    same ? "byte-identical" : "different")};
}

}  // namespace

int main() {
  const auto instances = discrete_instances();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form J vs quadrature", closed_form_j_vs_quadrature},
      {"analytic spot values", analytic_spot_values},
      {"top-k ranking vs exhaustive subsets", theorem_one_oracle},
      {"JS equals mutual information", [&] { return proposition_one(instances); }},
      {"JS bounded by JS_GM", [&] { return proposition_two(instances); }},
      {"truncated exponential solver", truncated_exponential_solver},
      {"multiplier-form decision rule", decision_rule_equivalence},
      {"synthetic end-to-end", synthetic_end_to_end},
      {"multiclass parity", multiclass_parity},
      {"cv determinism", cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << " -- " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
