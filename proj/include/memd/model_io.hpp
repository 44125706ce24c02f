#pragma once

#include <filesystem>
#include <iosfwd>

#include "memd/classifier.hpp"

namespace memd {

inline constexpr int kModelFormatVersion = 1;

/// Writes the model as versioned JSON. Every real is rendered with the
/// shortest representation that parses back to the same double, so
/// save/load is bit-exact.
void save_model(std::ostream& out, const NaiveBayesModel& model);
void save_model(const std::filesystem::path& path, const NaiveBayesModel& model);

/// Throws ParseError on malformed JSON (with its line) or a schema mismatch
/// (line 0). Complement models are not stored; a loaded model predicts but
/// reports fitted_count() of the per-class grid only.
NaiveBayesModel load_model(std::istream& in);
NaiveBayesModel load_model(const std::filesystem::path& path);

}  // namespace memd
