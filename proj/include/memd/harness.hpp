#pragma once

// Cross-validation, K selection by internal validation, and report output.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memd/classifier.hpp"
#include "memd/dataset.hpp"
#include "memd/text.hpp"

namespace memd {

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // fold id per instance

  /// Instance indices of fold f, ascending.
  std::vector<std::size_t> members(std::size_t fold) const;
  /// Instance indices outside fold f, ascending.
  std::vector<std::size_t> complement(std::size_t fold) const;
};

/// Seeded random permutation cut into k folds whose sizes differ by at most
/// one (the first n mod k folds take the extra instance). With `labels`, each
/// class is shuffled and dealt round-robin so folds are stratified. Throws
/// Error(InvalidFolds) unless 2 <= k <= n.
FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed,
                     std::span<const std::uint32_t> labels = {});

/// Candidate K values: 1..min(d, 200), then x1.5 steps (rounded up), ending at d.
std::vector<std::size_t> k_grid(std::size_t d);

/// Smallest K attaining the maximum accuracy.
std::size_t min_argmax_k(std::span<const std::size_t> ks, std::span<const double> accuracies);

struct ExperimentConfig {
  FitConfig fit;
  /// Fixed K, or unset for internal 80/20 validation.
  std::optional<std::size_t> k;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  bool stratified = false;
  /// Vocabulary cut-off for corpus input.
  int gamma = 2;
};

struct KSelection {
  std::size_t k = 0;
  std::vector<std::size_t> ks;
  std::vector<double> accuracies;
  std::uint64_t seed = 0;  // seed of the accepted split
};

/// Ranks features on a seeded 80% slice of `train` and returns the smallest
/// K that maximizes accuracy on the remaining 20%. A split leaving a class
/// out of either slice is redrawn (up to 10 attempts) before
/// Error(StratificationError).
KSelection choose_k(const Dataset& train, const ExperimentConfig& config, std::uint64_t seed);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t features = 0;  // d of the training fold (its vocabulary, for text)
  std::size_t k = 0;
  std::uint64_t k_seed = 0;
  double accuracy = 0.0;
  std::size_t fitted_marginals = 0;
  std::vector<std::string> top_features;  // the K selected, in rank order
  double seconds = 0.0;
};

struct ExperimentReport {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  std::size_t instances = 0;
  std::size_t classes = 0;
  std::vector<std::string> labels;
};

/// Fits on all folds but one and scores the held-out fold, for every fold.
/// Fit errors are rethrown with the fold id in the message.
ExperimentReport cross_validate(const Dataset& data, const ExperimentConfig& config);

/// As above for raw text: the vocabulary is rebuilt from each training fold.
ExperimentReport cross_validate(const Corpus& corpus, const ExperimentConfig& config,
                                const StopwordSet& stopwords);

/// `#`-commented CSV sections: configuration, per-fold lines, summary.
/// Timings are only written when asked, so that reports are reproducible
/// byte for byte.
void write_report(std::ostream& out, const ExperimentReport& report,
                  const ExperimentConfig& config, bool include_timings = false);

/// `feature_id,score,rank` rows in rank order (rank is 1-based).
void write_ranking_csv(std::ostream& out, const RankedFeatures& ranking,
                       std::span<const std::string> feature_names);

}  // namespace memd
