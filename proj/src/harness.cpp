#include "memd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "memd/error.hpp"
#include "memd/format.hpp"

namespace memd {

namespace {

constexpr int kMaxSplitAttempts = 10;
constexpr double kRankFraction = 0.8;

// SplitMix64 finalizer; derives independent seeds for sub-streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string describe_support(const SupportSpec& s) {
  switch (s.kind) {
    case SupportSpec::Kind::HalfLineNonNegative: return "halfline";
    case SupportSpec::Kind::RealLine: return "real";
    case SupportSpec::Kind::Interval:
      if (s.lower == 0.0 && s.upper == 1.0) return "unit";
      return "interval[" + format_real(s.lower) + ";" + format_real(s.upper) + "]";
  }
  return "unknown";
}

std::string quote_csv(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

struct FoldData {
  Dataset train;
  Dataset test;
};

template <typename MakeFold>
ExperimentReport run_cross_validation(std::size_t n, std::span<const std::uint32_t> labels,
                                      const LabelMap& label_map, const ExperimentConfig& config,
                                      MakeFold&& make_fold) {
  if (config.folds < 2 || config.folds > n) {
    throw Error(ErrorCode::InvalidFolds, std::to_string(config.folds) + " folds for " +
                                             std::to_string(n) + " instances");
  }
  const FoldPlan plan = kfold_split(n, config.folds, config.seed,
                                    config.stratified ? labels : std::span<const std::uint32_t>{});
  ExperimentReport report;
  report.instances = n;
  report.classes = label_map.size();
  report.labels = label_map.names();
  for (std::size_t f = 0; f < plan.k; ++f) {
    const auto started = std::chrono::steady_clock::now();
    FoldResult result;
    result.fold = f;
    try {
      const FoldData data = make_fold(plan.complement(f), plan.members(f));
      result.train_size = data.train.size();
      result.test_size = data.test.size();
      result.features = data.train.dimension();
      FitConfig fit_config = config.fit;
      if (config.k) {
        fit_config.k = config.k;
      } else {
        result.k_seed = mix_seed(config.seed, f);
        fit_config.k = choose_k(data.train, config, result.k_seed).k;
      }
      result.k = *fit_config.k;
      const NaiveBayesModel model = fit(data.train, fit_config);
      result.accuracy = accuracy(model, data.test);
      result.fitted_marginals = model.grid().fitted_count();
      for (const std::size_t i : model.selected()) {
        result.top_features.push_back(i < model.feature_names().size() ? model.feature_names()[i]
                                                                        : std::to_string(i + 1));
      }
    } catch (const Error& e) {
      throw Error(e.code(), "fold " + std::to_string(f) + ": " + e.message());
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    report.folds.push_back(std::move(result));
  }
  double total = 0.0;
  for (const auto& fold : report.folds) total += fold.accuracy;
  report.mean_accuracy = total / static_cast<double>(report.folds.size());
  return report;
}

}  // namespace

std::vector<std::size_t> FoldPlan::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::complement(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed,
                     std::span<const std::uint32_t> labels) {
  if (k < 2 || k > n) {
    throw Error(ErrorCode::InvalidFolds,
                std::to_string(k) + " folds for " + std::to_string(n) + " instances");
  }
  if (!labels.empty() && labels.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "one label per instance required for stratification");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(n, 0);
  std::mt19937_64 rng(seed);
  if (labels.empty()) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t size = base + (f < extra ? 1 : 0);
      for (std::size_t i = 0; i < size; ++i) plan.assignments[perm[pos++]] = f;
    }
    return plan;
  }
  const std::uint32_t classes = *std::max_element(labels.begin(), labels.end()) + 1;
  std::size_t next = 0;
  for (std::uint32_t c = 0; c < classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == c) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (const std::size_t i : members) {
      plan.assignments[i] = next;
      next = (next + 1) % k;
    }
  }
  return plan;
}

std::vector<std::size_t> k_grid(std::size_t d) {
  std::vector<std::size_t> ks;
  const std::size_t dense = std::min<std::size_t>(d, 200);
  for (std::size_t k = 1; k <= dense; ++k) ks.push_back(k);
  std::size_t k = dense;
  while (k < d) {
    k = std::min(d, static_cast<std::size_t>(std::ceil(static_cast<double>(k) * 1.5)));
    ks.push_back(k);
  }
  return ks;
}

std::size_t min_argmax_k(std::span<const std::size_t> ks, std::span<const double> accuracies) {
  if (ks.empty() || ks.size() != accuracies.size()) {
    throw Error(ErrorCode::InvalidArgument, "accuracy curve and K grid differ in length");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ks.size(); ++i) {
    if (accuracies[i] > accuracies[best] ||
        (accuracies[i] == accuracies[best] && ks[i] < ks[best])) {
      best = i;
    }
  }
  return ks[best];
}

KSelection choose_k(const Dataset& train, const ExperimentConfig& config, std::uint64_t seed) {
  const std::size_t n = train.size();
  const std::size_t m = train.num_classes();
  const auto counts = train.class_counts();
  if (std::any_of(counts.begin(), counts.end(), [](std::size_t c) { return c < 2; })) {
    throw Error(ErrorCode::StratificationError,
                "every class needs instances on both sides of the 80/20 split");
  }
  const std::size_t rank_size =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(kRankFraction * static_cast<double>(n))),
                              1, n - 1);

  std::vector<std::size_t> rank_rows;
  std::vector<std::size_t> val_rows;
  std::uint64_t accepted_seed = 0;
  bool found = false;
  for (int attempt = 0; attempt < kMaxSplitAttempts && !found; ++attempt) {
    const std::uint64_t s = mix_seed(seed, static_cast<std::uint64_t>(attempt));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(s);
    std::shuffle(perm.begin(), perm.end(), rng);
    rank_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(rank_size));
    val_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(rank_size), perm.end());
    std::sort(rank_rows.begin(), rank_rows.end());
    std::sort(val_rows.begin(), val_rows.end());
    std::vector<bool> in_rank(m, false);
    std::vector<bool> in_val(m, false);
    for (const auto r : rank_rows) in_rank[train.label(r)] = true;
    for (const auto r : val_rows) in_val[train.label(r)] = true;
    found = std::all_of(in_rank.begin(), in_rank.end(), [](bool b) { return b; }) &&
            std::all_of(in_val.begin(), in_val.end(), [](bool b) { return b; });
    accepted_seed = s;
  }
  if (!found) {
    throw Error(ErrorCode::StratificationError,
                "no 80/20 split kept every class on both sides after " +
                    std::to_string(kMaxSplitAttempts) + " attempts");
  }

  const Dataset rank_set = train.subset(rank_rows);
  const MarginalGrid grid =
      fit_marginal_grid(rank_set, config.fit.grid, needs_complements(config.fit.method, m));
  const RankedFeatures ranking = rank_features(grid, config.fit.method);

  KSelection out;
  out.seed = accepted_seed;
  out.ks = k_grid(train.dimension());
  const std::size_t k_max = out.ks.back();
  std::vector<std::size_t> correct(out.ks.size(), 0);
  std::vector<double> cumulative(m);
  for (const std::size_t r : val_rows) {
    const std::vector<double> x = train.dense_row(r);
    for (std::size_t c = 0; c < m; ++c) cumulative[c] = std::log(grid.priors[c]);
    std::size_t next = 0;
    for (std::size_t rank = 0; rank < k_max; ++rank) {
      const std::size_t feature = ranking.order[rank];
      for (std::size_t c = 0; c < m; ++c) cumulative[c] += grid.at(feature, c).log_density(x[feature]);
      if (rank + 1 == out.ks[next]) {
        if (decide(cumulative, grid.priors) == train.label(r)) ++correct[next];
        ++next;
      }
    }
  }
  out.accuracies.reserve(correct.size());
  for (const std::size_t c : correct) {
    out.accuracies.push_back(static_cast<double>(c) / static_cast<double>(val_rows.size()));
  }
  out.k = min_argmax_k(out.ks, out.accuracies);
  return out;
}

ExperimentReport cross_validate(const Dataset& data, const ExperimentConfig& config) {
  return run_cross_validation(data.size(), data.labels(), data.label_map(), config,
                              [&](const std::vector<std::size_t>& train_rows,
                                  const std::vector<std::size_t>& test_rows) {
                                return FoldData{data.subset(train_rows), data.subset(test_rows)};
                              });
}

ExperimentReport cross_validate(const Corpus& corpus, const ExperimentConfig& config,
                                const StopwordSet& stopwords) {
  return run_cross_validation(
      corpus.size(), corpus.labels, corpus.label_map, config,
      [&](const std::vector<std::size_t>& train_rows, const std::vector<std::size_t>& test_rows) {
        const Corpus train = corpus.subset(train_rows);
        const Vocabulary vocabulary = build_vocabulary(train.documents, stopwords, config.gamma);
        return FoldData{vectorize(train, vocabulary), vectorize(corpus.subset(test_rows), vocabulary)};
      });
}

void write_report(std::ostream& out, const ExperimentReport& report,
                  const ExperimentConfig& config, bool include_timings) {
  const auto orders = config.fit.grid.spec.orders();
  std::string order_list;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    order_list += (i ? ";" : "") + std::to_string(orders[i]);
  }
  std::string label_list;
  for (std::size_t i = 0; i < report.labels.size(); ++i) {
    label_list += (i ? ";" : "") + report.labels[i];
  }
  out << "# memd cross-validation report\n";
  out << "# method=" << to_string(config.fit.method) << ",orders=" << order_list
      << ",support=" << describe_support(config.fit.grid.support)
      << ",smoothing=" << format_real(config.fit.grid.fit.smoothing)
      << ",variance_floor=" << format_real(config.fit.grid.fit.variance_floor)
      << ",k=" << (config.k ? std::to_string(*config.k) : std::string("auto"))
      << ",folds=" << config.folds << ",seed=" << config.seed
      << ",stratified=" << (config.stratified ? "true" : "false") << ",gamma=" << config.gamma
      << '\n';
  out << "# instances=" << report.instances << ",classes=" << report.classes
      << ",labels=" << label_list << '\n';
  out << "# folds\n";
  out << "fold,train_size,test_size,features,k,k_seed,fitted_marginals,accuracy,top_features";
  if (include_timings) out << ",seconds";
  out << '\n';
  for (const auto& f : report.folds) {
    std::string top;
    for (std::size_t i = 0; i < f.top_features.size(); ++i) top += (i ? " " : "") + f.top_features[i];
    out << f.fold << ',' << f.train_size << ',' << f.test_size << ',' << f.features << ',' << f.k
        << ',' << f.k_seed << ',' << f.fitted_marginals << ',' << format_real(f.accuracy) << ','
        << quote_csv(top);
    if (include_timings) out << ',' << format_real(f.seconds);
    out << '\n';
  }
  out << "# summary\n";
  out << "folds,mean_accuracy\n";
  out << report.folds.size() << ',' << format_real(report.mean_accuracy) << '\n';
}

void write_ranking_csv(std::ostream& out, const RankedFeatures& ranking,
                       std::span<const std::string> feature_names) {
  out << "feature_id,score,rank\n";
  for (std::size_t r = 0; r < ranking.order.size(); ++r) {
    const std::size_t i = ranking.order[r];
    out << (i < feature_names.size() ? feature_names[i] : std::to_string(i + 1)) << ','
        << format_real(ranking.scores[i]) << ',' << r + 1 << '\n';
  }
}

}  // namespace memd
