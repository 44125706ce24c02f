#pragma once

// Feature ranking by divergence between per-class ME marginals.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "memd/dataset.hpp"
#include "memd/divergence.hpp"
#include "memd/maxent.hpp"

namespace memd {

/// Feature-major grid of marginals: entry (i, j) models feature i in class j.
/// `rest` holds the one-vs-all complement models (feature i, not class j)
/// when they were fitted.
struct MarginalGrid {
  std::size_t features = 0;
  std::size_t classes = 0;
  std::vector<MaxEntDensity> marginals;
  std::optional<std::vector<MaxEntDensity>> rest;
  WeightVector priors;

  const MaxEntDensity& at(std::size_t feature, std::size_t cls) const {
    return marginals[feature * classes + cls];
  }
  const MaxEntDensity& rest_at(std::size_t feature, std::size_t cls) const {
    return (*rest)[feature * classes + cls];
  }
  /// Number of ME densities estimated to build the grid.
  std::size_t fitted_count() const noexcept {
    return marginals.size() + (rest ? rest->size() : 0);
  }
};

/// Throws Error(IncompatibleDensities) if a feature's densities disagree on
/// support or feature functions, Error(InvalidArgument) on shape mismatch.
void validate_grid(const MarginalGrid& grid);

enum class RankingMethod { BinaryJ, OneVsAllJ, JsGm };

std::string_view to_string(RankingMethod method);

struct RankedFeatures {
  std::vector<std::size_t> order;  // descending score, ties by ascending index
  std::vector<double> scores;      // indexed by feature
  RankingMethod method = RankingMethod::BinaryJ;
};

/// Clamps scores into [0, 1e12] (NaN -> 0, warning on stderr) and orders them.
RankedFeatures rank_by_scores(std::vector<double> scores, RankingMethod method);

struct GridConfig {
  FeatureFunctionSpec spec{{1}};
  SupportSpec support = SupportSpec::half_line();
  FitOptions fit;
};

/// Fits one marginal per (feature, class), plus complement marginals pooled
/// from the other classes' samples when `with_complements`. Priors are the
/// empirical class frequencies. Throws Error(EmptyClass) if any class in the
/// label map has no instance.
MarginalGrid fit_marginal_grid(const Dataset& data, const GridConfig& config,
                               bool with_complements);

/// scores[i] = J(P_c1^(i) || P_c2^(i)). Throws Error(WrongArity) unless M = 2.
RankedFeatures score_binary_j(const MarginalGrid& grid);

/// scores[i] = sum_j pi_j J(P_cj^(i) || P_cj'^(i)). Throws
/// Error(MissingComplementModels) without complement models.
RankedFeatures score_one_vs_all_j(const MarginalGrid& grid);

/// scores[i] = sum_j sum_{k != j} pi_j pi_k J(P_cj^(i) || P_ck^(i)); each
/// unordered pair counted twice, i.e. twice js_gm of the row.
RankedFeatures score_js_gm(const MarginalGrid& grid);

/// Exhaustive search for the size-k subset maximizing the summed per-feature
/// J. Test-scale only: throws Error(OracleTooLarge) for d > 15,
/// Error(WrongArity) unless M = 2, Error(InvalidK) for k > d. Returns sorted
/// indices.
std::vector<std::size_t> brute_force_subset_oracle(const MarginalGrid& grid, std::size_t k);

}  // namespace memd
