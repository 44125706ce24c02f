#pragma once

// Naive-Bayes decision layer over the top-K ranked ME marginals.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memd/dataset.hpp"
#include "memd/selection.hpp"

namespace memd {

/// MeMdJ ranks by binary J (two classes) or one-vs-all averaged J; MeMdJS
/// ranks by JS_GM and needs no complement models.
enum class Method { MeMdJ, MeMdJS };

std::string_view to_string(Method method);

/// Ranking used by `method` for a problem with `classes` classes.
RankingMethod ranking_method_for(Method method, std::size_t classes);

/// Complement models are only fitted for one-vs-all ranking.
bool needs_complements(Method method, std::size_t classes);

/// Scores every feature of `grid` with the ranking `method` calls for.
RankedFeatures rank_features(const MarginalGrid& grid, Method method);

struct FitConfig {
  GridConfig grid;
  Method method = Method::MeMdJ;
  /// Number of top-ranked features kept; all of them when unset.
  std::optional<std::size_t> k;
};

class NaiveBayesModel {
 public:
  /// Keeps the top `k` features of `ranking`. Throws Error(InvalidK) if k is
  /// zero or exceeds the feature count.
  NaiveBayesModel(MarginalGrid grid, RankedFeatures ranking, std::size_t k, LabelMap labels,
                  std::vector<std::string> feature_names, Method method);

  const MarginalGrid& grid() const noexcept { return grid_; }
  const RankedFeatures& ranking() const noexcept { return ranking_; }
  std::span<const std::size_t> selected() const noexcept { return selected_; }
  const WeightVector& priors() const noexcept { return grid_.priors; }
  const LabelMap& labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  Method method() const noexcept { return method_; }
  std::size_t classes() const noexcept { return grid_.classes; }
  std::size_t features() const noexcept { return grid_.features; }

  /// Free-form provenance (input format, preprocessing) kept with the model.
  std::map<std::string, std::string>& metadata() noexcept { return metadata_; }
  const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

  /// Values of the selected features of x, in selection order.
  void gather_selected(RowView x, std::span<double> out) const;
  void gather_selected(std::span<const double> dense, std::span<double> out) const;

  /// ln pi_j + sum over selected features of log p_ij(x_i), given the
  /// gathered selected values.
  std::vector<double> log_posterior_selected(std::span<const double> selected_values) const;

 private:
  MarginalGrid grid_;
  RankedFeatures ranking_;
  std::vector<std::size_t> selected_;
  LabelMap labels_;
  std::vector<std::string> feature_names_;
  Method method_;
  std::map<std::string, std::string> metadata_;

  // Per-class coefficient columns over the selected features:
  // log p = -(c0 + c1 x + c2 x^2) when every order is <= 2.
  bool quadratic_ = true;
  std::vector<std::vector<double>> c0_, c1_, c2_;
  std::vector<std::int32_t> slot_of_feature_;
};

/// Fits the grid on `train`, ranks by the configured method and keeps the
/// top K. Throws Error(EmptyClass) for a class without instances,
/// Error(InvalidK) for K > d, Error(WrongArity) with fewer than two classes.
NaiveBayesModel fit(const Dataset& train, const FitConfig& config);

/// Unnormalized log posteriors, one per class; -inf entries when x lies
/// outside a selected feature's support.
std::vector<double> log_posterior(const NaiveBayesModel& model, RowView x);
std::vector<double> log_posterior(const NaiveBayesModel& model, std::span<const double> dense);

/// Argmax of the log posteriors, lowest index on ties. When every entry is
/// -inf the priors decide.
std::size_t decide(std::span<const double> log_posteriors, const WeightVector& priors);

std::size_t predict(const NaiveBayesModel& model, RowView x);
std::size_t predict(const NaiveBayesModel& model, std::span<const double> dense);

/// The two-class rule in multiplier form:
///   sum_{i in S} (l0_i2 - l0_i1 + sum_k (lk_i2 - lk_i1) x_i^k) >= ln P(c2) - ln P(c1)
/// selects class 0 (equality resolves to class 0, matching predict's tie-break).
/// Throws Error(WrongArity) unless M = 2.
std::size_t binary_decision_lambda_form(const NaiveBayesModel& model, std::span<const double> dense);
std::size_t binary_decision_lambda_form(const NaiveBayesModel& model, RowView x);

/// Fraction of rows whose prediction matches the label.
double accuracy(const NaiveBayesModel& model, const Dataset& data);

}  // namespace memd
