#include "memd/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "memd/classifier.hpp"
#include "memd/error.hpp"
#include "memd/format.hpp"
#include "memd/harness.hpp"
#include "memd/model_io.hpp"
#include "memd/text.hpp"

namespace memd {

namespace {

struct Options {
  std::string data;
  std::string format = "csv";
  std::string method = "j";
  int orders = 1;
  std::string support;
  std::string k = "auto";
  double smoothing = kDefaultSmoothing;
  double variance_floor = kDefaultVarianceFloor;
  int gamma = 2;
  std::string stopwords;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t folds = 10;
  bool stratified = false;
  bool timings = false;
  std::string model;
};

struct Input {
  std::optional<Dataset> data;
  std::optional<Corpus> corpus;
  StopwordSet stopwords;
};

void add_input_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--data", o.data, "Input path")->required();
  cmd.add_option("--format", o.format, "Input format")
      ->check(CLI::IsMember({"csv", "sparse", "corpus"}));
}

void add_fit_options(CLI::App& cmd, Options& o) {
  add_input_options(cmd, o);
  cmd.add_option("--method", o.method, "Ranking method")->check(CLI::IsMember({"j", "js"}));
  cmd.add_option("--orders", o.orders, "Highest moment order")->check(CLI::IsMember({1, 2}));
  cmd.add_option("--support", o.support, "Feature support (default: halfline for orders 1, real for 2)")
      ->check(CLI::IsMember({"halfline", "real", "unit"}));
  cmd.add_option("--smoothing", o.smoothing, "Moment smoothing floor");
  cmd.add_option("--variance-floor", o.variance_floor, "Variance floor");
  cmd.add_option("--gamma", o.gamma, "Minimum corpus frequency of a vocabulary word");
  cmd.add_option("--stopwords", o.stopwords, "Stopword list, one word per line");
  cmd.add_option("--seed", o.seed, "Random seed");
}

ExperimentConfig make_config(const Options& o, bool k_allowed) {
  ExperimentConfig cfg;
  cfg.fit.method = o.method == "js" ? Method::MeMdJS : Method::MeMdJ;
  cfg.fit.grid.spec = FeatureFunctionSpec::up_to(o.orders);
  std::string support = o.support;
  if (support.empty()) support = o.orders == 1 ? "halfline" : "real";
  if (support == "halfline") {
    cfg.fit.grid.support = SupportSpec::half_line();
  } else if (support == "real") {
    cfg.fit.grid.support = SupportSpec::real_line();
  } else {
    cfg.fit.grid.support = SupportSpec::interval(0.0, 1.0);
  }
  validate_model_family(cfg.fit.grid.spec, cfg.fit.grid.support);
  if (!(o.smoothing > 0.0)) throw Error(ErrorCode::InvalidConfig, "--smoothing must be positive");
  if (!(o.variance_floor > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "--variance-floor must be positive");
  }
  cfg.fit.grid.fit.smoothing = o.smoothing;
  cfg.fit.grid.fit.variance_floor = o.variance_floor;
  if (k_allowed && o.k != "auto") {
    const auto k = parse_unsigned(o.k);
    if (!k || *k == 0) throw Error(ErrorCode::InvalidK, "--k must be a positive integer or 'auto'");
    cfg.k = static_cast<std::size_t>(*k);
  }
  cfg.folds = o.folds;
  cfg.seed = o.seed;
  cfg.stratified = o.stratified;
  cfg.gamma = o.gamma;
  return cfg;
}

Input load_input(const Options& o) {
  Input in;
  if (o.format == "csv") {
    in.data = load_dense_csv(o.data);
  } else if (o.format == "sparse") {
    in.data = load_sparse(o.data);
  } else {
    in.corpus = load_corpus(o.data);
    if (!o.stopwords.empty()) in.stopwords = load_stopwords(o.stopwords);
  }
  return in;
}

Dataset vectorize_whole(const Corpus& corpus, const StopwordSet& stopwords, int gamma) {
  return vectorize(corpus, build_vocabulary(corpus.documents, stopwords, gamma));
}

// Writes to --out when given, otherwise to `fallback`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::IoError, "cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

int cmd_fit(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw Error(ErrorCode::InvalidConfig, "fit needs --out");
  const ExperimentConfig cfg = make_config(o, true);
  const Input in = load_input(o);
  const Dataset data = in.corpus ? vectorize_whole(*in.corpus, in.stopwords, o.gamma) : *in.data;
  FitConfig fit_cfg = cfg.fit;
  std::string k_source = "fixed";
  if (cfg.k) {
    fit_cfg.k = cfg.k;
  } else {
    const KSelection sel = choose_k(data, cfg, cfg.seed);
    fit_cfg.k = sel.k;
    k_source = "auto (split seed " + std::to_string(sel.seed) + ")";
  }
  NaiveBayesModel model = fit(data, fit_cfg);
  model.metadata()["input_format"] = o.format;
  model.metadata()["k_selection"] = k_source;
  model.metadata()["smoothing"] = format_real(o.smoothing);
  model.metadata()["variance_floor"] = format_real(o.variance_floor);
  if (in.corpus) model.metadata()["gamma"] = std::to_string(o.gamma);
  save_model(o.out, model);
  out << "fitted " << model.grid().fitted_count() << " marginals, kept " << model.selected().size()
      << " of " << model.features() << " features\n";
  return kExitOk;
}

int cmd_rank(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = make_config(o, false);
  const Input in = load_input(o);
  const Dataset data = in.corpus ? vectorize_whole(*in.corpus, in.stopwords, o.gamma) : *in.data;
  if (data.num_classes() < 2) throw Error(ErrorCode::WrongArity, "ranking needs at least two classes");
  const MarginalGrid grid = fit_marginal_grid(
      data, cfg.fit.grid, needs_complements(cfg.fit.method, data.num_classes()));
  const RankedFeatures ranking = rank_features(grid, cfg.fit.method);
  Sink sink(o.out, out);
  write_ranking_csv(sink.get(), ranking, data.feature_names());
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const NaiveBayesModel model = load_model(std::filesystem::path(o.model));
  const auto meta = model.metadata().find("input_format");
  const std::string format =
      o.format.empty() ? (meta != model.metadata().end() ? meta->second : "csv") : o.format;
  Dataset data;
  if (format == "csv") {
    data = load_dense_csv(o.data);
  } else if (format == "sparse") {
    data = load_sparse(o.data, model.features());
  } else {
    data = vectorize(load_corpus(o.data), Vocabulary(model.feature_names()));
  }
  if (data.dimension() != model.features()) {
    throw Error(ErrorCode::InvalidArgument, "data has " + std::to_string(data.dimension()) +
                                                " features, model expects " +
                                                std::to_string(model.features()));
  }
  Sink sink(o.out, out);
  std::ostream& w = sink.get();
  w << "instance_id,predicted_label";
  for (const auto& name : model.labels().names()) w << ",log_posterior_" << name;
  w << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    const std::vector<double> lp = log_posterior(model, data.row(r));
    w << r << ',' << model.labels().name(static_cast<std::uint32_t>(decide(lp, model.priors())));
    for (const double v : lp) w << ',' << format_real(v);
    w << '\n';
  }
  return kExitOk;
}

int cmd_cv(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = make_config(o, true);
  const Input in = load_input(o);
  const ExperimentReport report =
      in.corpus ? cross_validate(*in.corpus, cfg, in.stopwords) : cross_validate(*in.data, cfg);
  Sink sink(o.out, out);
  write_report(sink.get(), report, cfg, o.timings);
  return kExitOk;
}

int exit_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::IoError: return kExitParse;
    case ErrorCode::InvalidMoment:
    case ErrorCode::SolverDiverged:
    case ErrorCode::IncompatibleDensities: return kExitNumeric;
    default: return kExitConfig;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Maximum-entropy marginal feature ranking and naive Bayes classification", "memd");
  app.require_subcommand(1);
  Options o;

  auto* fit_cmd = app.add_subcommand("fit", "Fit a model and write it to --out");
  add_fit_options(*fit_cmd, o);
  fit_cmd->add_option("--k", o.k, "Number of features kept, or 'auto'");
  fit_cmd->add_option("--out", o.out, "Model output path")->required();

  auto* rank_cmd = app.add_subcommand("rank", "Rank features and write feature_id,score,rank CSV");
  add_fit_options(*rank_cmd, o);
  rank_cmd->add_option("--out", o.out, "Output path (default stdout)");

  auto* predict_cmd = app.add_subcommand("predict", "Classify instances with a saved model");
  predict_cmd->add_option("--model", o.model, "Model path")->required();
  predict_cmd->add_option("--data", o.data, "Input path")->required();
  predict_cmd->add_option("--format", o.format, "Input format (default: the model's)")
      ->check(CLI::IsMember({"csv", "sparse", "corpus"}));
  predict_cmd->add_option("--out", o.out, "Output path (default stdout)");

  auto* cv_cmd = app.add_subcommand("cv", "Cross-validate and write a report");
  add_fit_options(*cv_cmd, o);
  cv_cmd->add_option("--k", o.k, "Number of features kept, or 'auto'");
  cv_cmd->add_option("--folds", o.folds, "Number of folds");
  cv_cmd->add_flag("--stratified", o.stratified, "Stratify folds by class");
  cv_cmd->add_flag("--timings", o.timings, "Include per-fold wall-clock seconds");
  cv_cmd->add_option("--out", o.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (predict_cmd->parsed() && predict_cmd->count("--format") == 0) o.format.clear();

  try {
    if (fit_cmd->parsed()) return cmd_fit(o, out);
    if (rank_cmd->parsed()) return cmd_rank(o, out);
    if (predict_cmd->parsed()) return cmd_predict(o, out);
    return cmd_cv(o, out);
  } catch (const Error& e) {
    err << "memd: " << e.what() << '\n';
    return exit_status_for(e.code());
  } catch (const std::exception& e) {
    err << "memd: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace memd
