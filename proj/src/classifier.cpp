#include "memd/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "memd/error.hpp"
#include "memd/kernels.hpp"

namespace memd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

const SupportSpec& grid_support(const MarginalGrid& grid) {
  return grid.marginals.front().support();
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::MeMdJ: return "j";
    case Method::MeMdJS: return "js";
  }
  return "unknown";
}

RankingMethod ranking_method_for(Method method, std::size_t classes) {
  if (method == Method::MeMdJS) return RankingMethod::JsGm;
  return classes == 2 ? RankingMethod::BinaryJ : RankingMethod::OneVsAllJ;
}

bool needs_complements(Method method, std::size_t classes) {
  return ranking_method_for(method, classes) == RankingMethod::OneVsAllJ;
}

RankedFeatures rank_features(const MarginalGrid& grid, Method method) {
  switch (ranking_method_for(method, grid.classes)) {
    case RankingMethod::BinaryJ: return score_binary_j(grid);
    case RankingMethod::OneVsAllJ: return score_one_vs_all_j(grid);
    case RankingMethod::JsGm: return score_js_gm(grid);
  }
  return {};
}

NaiveBayesModel::NaiveBayesModel(MarginalGrid grid, RankedFeatures ranking, std::size_t k,
                                 LabelMap labels, std::vector<std::string> feature_names,
                                 Method method)
    : grid_(std::move(grid)),
      ranking_(std::move(ranking)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      method_(method) {
  validate_grid(grid_);
  if (grid_.features == 0) throw Error(ErrorCode::InvalidArgument, "model has no features");
  if (k == 0 || k > grid_.features) {
    throw Error(ErrorCode::InvalidK, "K = " + std::to_string(k) + " outside [1, " +
                                         std::to_string(grid_.features) + "]");
  }
  if (ranking_.order.size() != grid_.features) {
    throw Error(ErrorCode::InvalidArgument, "ranking does not cover every feature");
  }
  if (labels_.size() != grid_.classes) {
    throw Error(ErrorCode::InvalidArgument, "label map does not match the class count");
  }
  for (std::size_t c = 0; c < grid_.classes; ++c) {
    if (!(grid_.priors[c] > 0.0)) {
      throw Error(ErrorCode::EmptyClass, "class prior must be positive");
    }
  }
  selected_.assign(ranking_.order.begin(), ranking_.order.begin() + static_cast<std::ptrdiff_t>(k));

  const FeatureFunctionSpec& spec = grid_.marginals.front().spec();
  quadratic_ = spec.max_order() <= 2;
  const int i1 = spec.index_of(1);
  const int i2 = spec.index_of(2);
  c0_.assign(grid_.classes, std::vector<double>(k, 0.0));
  c1_.assign(grid_.classes, std::vector<double>(k, 0.0));
  c2_.assign(grid_.classes, std::vector<double>(k, 0.0));
  for (std::size_t c = 0; c < grid_.classes; ++c) {
    for (std::size_t s = 0; s < k; ++s) {
      const MaxEntDensity& d = grid_.at(selected_[s], c);
      c0_[c][s] = d.log_normalizer();
      if (i1 >= 0) c1_[c][s] = d.lambdas()[static_cast<std::size_t>(i1)];
      if (i2 >= 0) c2_[c][s] = d.lambdas()[static_cast<std::size_t>(i2)];
    }
  }
  slot_of_feature_.assign(grid_.features, -1);
  for (std::size_t s = 0; s < k; ++s) slot_of_feature_[selected_[s]] = static_cast<std::int32_t>(s);
}

void NaiveBayesModel::gather_selected(RowView x, std::span<double> out) const {
  if (x.indices.size() == grid_.features) {
    gather_selected(x.values, out);
    return;
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t e = 0; e < x.indices.size(); ++e) {
    if (x.indices[e] >= slot_of_feature_.size()) {
      throw Error(ErrorCode::InvalidArgument, "instance has more features than the model");
    }
    const std::int32_t slot = slot_of_feature_[x.indices[e]];
    if (slot >= 0) out[static_cast<std::size_t>(slot)] = x.values[e];
  }
}

void NaiveBayesModel::gather_selected(std::span<const double> dense, std::span<double> out) const {
  if (dense.size() != grid_.features) {
    throw Error(ErrorCode::InvalidArgument, "instance has " + std::to_string(dense.size()) +
                                                " features, model expects " +
                                                std::to_string(grid_.features));
  }
  for (std::size_t s = 0; s < selected_.size(); ++s) out[s] = dense[selected_[s]];
}

std::vector<double> NaiveBayesModel::log_posterior_selected(
    std::span<const double> selected_values) const {
  std::vector<double> out(grid_.classes, kNegInf);
  const SupportSpec& support = grid_support(grid_);
  for (const double v : selected_values) {
    if (!support.contains(v)) return out;
  }
  const auto& kt = kernels::active();
  for (std::size_t c = 0; c < grid_.classes; ++c) {
    double ll = 0.0;
    if (quadratic_) {
      ll = kt.quadratic_loglik(selected_values, c0_[c], c1_[c], c2_[c]);
    } else {
      for (std::size_t s = 0; s < selected_.size(); ++s) {
        ll += grid_.at(selected_[s], c).log_density(selected_values[s]);
      }
    }
    out[c] = std::log(grid_.priors[c]) + ll;
  }
  return out;
}

NaiveBayesModel fit(const Dataset& train, const FitConfig& config) {
  const std::size_t m = train.num_classes();
  if (m < 2) throw Error(ErrorCode::WrongArity, "classification needs at least two classes");
  const std::size_t k = config.k.value_or(train.dimension());
  if (k == 0 || k > train.dimension()) {
    throw Error(ErrorCode::InvalidK, "K = " + std::to_string(k) + " outside [1, " +
                                         std::to_string(train.dimension()) + "]");
  }
  MarginalGrid grid = fit_marginal_grid(train, config.grid, needs_complements(config.method, m));
  RankedFeatures ranking = rank_features(grid, config.method);
  return NaiveBayesModel(std::move(grid), std::move(ranking), k, train.label_map(),
                         train.feature_names(), config.method);
}

std::vector<double> log_posterior(const NaiveBayesModel& model, RowView x) {
  std::vector<double> selected(model.selected().size());
  model.gather_selected(x, selected);
  return model.log_posterior_selected(selected);
}

std::vector<double> log_posterior(const NaiveBayesModel& model, std::span<const double> dense) {
  std::vector<double> selected(model.selected().size());
  model.gather_selected(dense, selected);
  return model.log_posterior_selected(selected);
}

std::size_t decide(std::span<const double> log_posteriors, const WeightVector& priors) {
  const bool all_excluded = std::all_of(log_posteriors.begin(), log_posteriors.end(),
                                        [](double v) { return v == kNegInf; });
  if (all_excluded) {
    const auto p = priors.values();
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < log_posteriors.size(); ++j) {
    if (log_posteriors[j] > log_posteriors[best]) best = j;
  }
  return best;
}

std::size_t predict(const NaiveBayesModel& model, RowView x) {
  return decide(log_posterior(model, x), model.priors());
}

std::size_t predict(const NaiveBayesModel& model, std::span<const double> dense) {
  return decide(log_posterior(model, dense), model.priors());
}

namespace {

std::size_t lambda_form_on_selected(const NaiveBayesModel& model, std::span<const double> xs) {
  const MarginalGrid& grid = model.grid();
  const double rhs = std::log(model.priors()[1]) - std::log(model.priors()[0]);
  const SupportSpec& support = grid_support(grid);
  for (const double v : xs) {
    if (!support.contains(v)) return model.priors()[0] >= model.priors()[1] ? 0 : 1;
  }
  const auto orders = grid.marginals.front().spec().orders();
  const auto selected = model.selected();
  double lhs = 0.0;
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const MaxEntDensity& p1 = grid.at(selected[s], 0);
    const MaxEntDensity& p2 = grid.at(selected[s], 1);
    double term = p2.log_normalizer() - p1.log_normalizer();
    for (std::size_t k = 0; k < orders.size(); ++k) {
      term += (p2.lambdas()[k] - p1.lambdas()[k]) * std::pow(xs[s], orders[k]);
    }
    lhs += term;
  }
  return lhs >= rhs ? 0 : 1;
}

}  // namespace

std::size_t binary_decision_lambda_form(const NaiveBayesModel& model,
                                        std::span<const double> dense) {
  if (model.classes() != 2) throw Error(ErrorCode::WrongArity, "lambda form is two-class only");
  std::vector<double> xs(model.selected().size());
  model.gather_selected(dense, xs);
  return lambda_form_on_selected(model, xs);
}

std::size_t binary_decision_lambda_form(const NaiveBayesModel& model, RowView x) {
  if (model.classes() != 2) throw Error(ErrorCode::WrongArity, "lambda form is two-class only");
  std::vector<double> xs(model.selected().size());
  model.gather_selected(x, xs);
  return lambda_form_on_selected(model, xs);
}

double accuracy(const NaiveBayesModel& model, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  std::vector<double> xs(model.selected().size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    model.gather_selected(data.row(r), xs);
    if (decide(model.log_posterior_selected(xs), model.priors()) == data.label(r)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace memd
