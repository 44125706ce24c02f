#include "memd/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <ostream>

#include "memd/error.hpp"

namespace memd {

namespace {

using nlohmann::json;

json support_to_json(const SupportSpec& s) {
  switch (s.kind) {
    case SupportSpec::Kind::HalfLineNonNegative: return {{"kind", "halfline"}};
    case SupportSpec::Kind::RealLine: return {{"kind", "real"}};
    case SupportSpec::Kind::Interval:
      return {{"kind", "interval"}, {"lower", s.lower}, {"upper", s.upper}};
  }
  return {};
}

SupportSpec support_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "halfline") return SupportSpec::half_line();
  if (kind == "real") return SupportSpec::real_line();
  if (kind == "interval") {
    return SupportSpec::interval(j.at("lower").get<double>(), j.at("upper").get<double>());
  }
  throw ParseError(0, "unknown support kind '" + kind + "'");
}

RankingMethod ranking_from_string(const std::string& s) {
  for (auto m : {RankingMethod::BinaryJ, RankingMethod::OneVsAllJ, RankingMethod::JsGm}) {
    if (to_string(m) == s) return m;
  }
  throw ParseError(0, "unknown ranking method '" + s + "'");
}

Method method_from_string(const std::string& s) {
  for (auto m : {Method::MeMdJ, Method::MeMdJS}) {
    if (to_string(m) == s) return m;
  }
  throw ParseError(0, "unknown method '" + s + "'");
}

json density_to_json(const MaxEntDensity& d, std::size_t feature, std::size_t cls) {
  return {{"feature", feature},
          {"class", cls},
          {"support", support_to_json(d.support())},
          {"orders", std::vector<int>(d.spec().orders().begin(), d.spec().orders().end())},
          {"lambda0", d.log_normalizer()},
          {"lambdas", std::vector<double>(d.lambdas().begin(), d.lambdas().end())},
          {"moments", d.moments().values},
          {"sample_count", d.moments().sample_count},
          {"window", {d.window().lower, d.window().upper}},
          {"fit_tolerance", d.fit_tolerance()}};
}

MaxEntDensity density_from_json(const json& j) {
  const auto window = j.at("window").get<std::vector<double>>();
  if (window.size() != 2) throw ParseError(0, "window must have two bounds");
  return MaxEntDensity(support_from_json(j.at("support")),
                       FeatureFunctionSpec(j.at("orders").get<std::vector<int>>()),
                       j.at("lambdas").get<std::vector<double>>(), j.at("lambda0").get<double>(),
                       MomentVector{j.at("moments").get<std::vector<double>>(),
                                    j.at("sample_count").get<std::size_t>()},
                       Window{window[0], window[1]}, j.at("fit_tolerance").get<double>());
}

}  // namespace

void save_model(std::ostream& out, const NaiveBayesModel& model) {
  const MarginalGrid& grid = model.grid();
  json marginals = json::array();
  for (std::size_t i = 0; i < grid.features; ++i) {
    for (std::size_t c = 0; c < grid.classes; ++c) {
      marginals.push_back(density_to_json(grid.at(i, c), i, c));
    }
  }
  const auto priors = grid.priors.values();
  json doc = {
      {"format", "memd-model"},
      {"version", kModelFormatVersion},
      {"method", std::string(to_string(model.method()))},
      {"labels", model.labels().names()},
      {"priors", std::vector<double>(priors.begin(), priors.end())},
      {"feature_names", model.feature_names()},
      {"features", grid.features},
      {"classes", grid.classes},
      {"ranking",
       {{"method", std::string(to_string(model.ranking().method))},
        {"order", model.ranking().order},
        {"scores", model.ranking().scores}}},
      {"selected_count", model.selected().size()},
      {"metadata", model.metadata()},
      {"marginals", std::move(marginals)},
  };
  out << doc.dump(1) << '\n';
}

void save_model(const std::filesystem::path& path, const NaiveBayesModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  save_model(out, model);
}

NaiveBayesModel load_model(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(
                              std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
    throw ParseError(line, std::string("malformed model JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "memd-model") {
      throw ParseError(0, "not a memd model file");
    }
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw ParseError(0, "unsupported model version " + doc.at("version").dump());
    }
    MarginalGrid grid;
    grid.features = doc.at("features").get<std::size_t>();
    grid.classes = doc.at("classes").get<std::size_t>();
    grid.priors = WeightVector(doc.at("priors").get<std::vector<double>>());
    const auto& marginals = doc.at("marginals");
    if (marginals.size() != grid.features * grid.classes) {
      throw ParseError(0, "marginal count does not match features x classes");
    }
    grid.marginals.reserve(marginals.size());
    for (std::size_t n = 0; n < marginals.size(); ++n) {
      const auto& m = marginals[n];
      if (m.at("feature").get<std::size_t>() != n / grid.classes ||
          m.at("class").get<std::size_t>() != n % grid.classes) {
        throw ParseError(0, "marginals out of feature-major order");
      }
      grid.marginals.push_back(density_from_json(m));
    }
    RankedFeatures ranking;
    const auto& r = doc.at("ranking");
    ranking.method = ranking_from_string(r.at("method").get<std::string>());
    ranking.order = r.at("order").get<std::vector<std::size_t>>();
    ranking.scores = r.at("scores").get<std::vector<double>>();
    NaiveBayesModel model(std::move(grid), std::move(ranking),
                          doc.at("selected_count").get<std::size_t>(),
                          LabelMap(doc.at("labels").get<std::vector<std::string>>()),
                          doc.at("feature_names").get<std::vector<std::string>>(),
                          method_from_string(doc.at("method").get<std::string>()));
    model.metadata() = doc.at("metadata").get<std::map<std::string, std::string>>();
    return model;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("model schema: ") + e.what());
  }
}

NaiveBayesModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return load_model(in);
}

}  // namespace memd
