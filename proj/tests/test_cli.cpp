#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "memd/cli.hpp"
#include "memd/dataset.hpp"

using namespace memd;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "memd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

struct TempDir {
  std::filesystem::path path = std::filesystem::temp_directory_path() / "memd_cli_test";
  TempDir() {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("fit, rank, predict and cv on a dense CSV") {
    TempDir tmp;
    {
      std::ofstream f(tmp.file("data.csv"));
      write_dense_csv(f, fixture::planted_gaussian(30, 6, 2, 3.0, 101));
    }
    const auto fit = run({"fit", "--data", tmp.file("data.csv"), "--orders", "2", "--k", "2",
                          "--out", tmp.file("model.memd")});
    CHECK(fit.status == kExitOk);
    CHECK(std::filesystem::exists(tmp.file("model.memd")));

    const auto rank = run({"rank", "--data", tmp.file("data.csv"), "--orders", "2"});
    CHECK(rank.status == kExitOk);
    CHECK(rank.out.rfind("feature_id,score,rank\n", 0) == 0);
    CHECK(std::count(rank.out.begin(), rank.out.end(), '\n') == 7);

    const auto predict = run({"predict", "--model", tmp.file("model.memd"), "--data", tmp.file("data.csv")});
    CHECK(predict.status == kExitOk);
    CHECK(predict.out.rfind("instance_id,predicted_label,log_posterior_a,log_posterior_b\n0,", 0) == 0);

    const std::vector<std::string> cv{"cv", "--data", tmp.file("data.csv"), "--orders", "2",
                                      "--folds", "3", "--seed", "5"};
    const auto a = run(cv);
    const auto b = run(cv);
    CHECK(a.status == kExitOk);
    CHECK(a.out == b.out);
    auto to_file = cv;
    to_file.insert(to_file.end(), {"--out", tmp.file("report.txt")});
    CHECK(run(to_file).status == kExitOk);
    CHECK(slurp(tmp.file("report.txt")) == a.out);
  }

  TEST_CASE("sparse input and model metadata") {
    TempDir tmp;
    std::ofstream(tmp.file("train.svm")) << "a 1:0.5 2:0.1\nb 2:0.9 3:0.4\na 1:0.6\nb 2:0.7 3:0.2\n"
                                            "a 1:0.4 3:0.05\nb 2:0.8\n";
    CHECK(run({"fit", "--data", tmp.file("train.svm"), "--format", "sparse", "--k", "2", "--out",
               tmp.file("m")})
              .status == kExitOk);
    CHECK(slurp(tmp.file("m")).find("\"input_format\": \"sparse\"") != std::string::npos);
    std::ofstream(tmp.file("test.svm")) << "a 1:0.5\nb 2:0.9\n";
    const auto p = run({"predict", "--model", tmp.file("m"), "--data", tmp.file("test.svm")});
    CHECK(p.status == kExitOk);
    CHECK(p.out.find("\n0,a,") != std::string::npos);
    CHECK(p.out.find("\n1,b,") != std::string::npos);
  }

  TEST_CASE("corpus input") {
    TempDir tmp;
    {
      std::ofstream f(tmp.file("corpus.tsv"));
      for (int n = 0; n < 20; ++n) {
        f << (n % 2 ? "spam\tcheap offer now offer\n" : "ham\tmeeting agenda now notes\n");
      }
    }
    std::ofstream(tmp.file("stop.txt")) << "now\n";
    const auto r = run({"rank", "--data", tmp.file("corpus.tsv"), "--format", "corpus",
                        "--stopwords", tmp.file("stop.txt")});
    CHECK(r.status == kExitOk);
    CHECK(r.out.find("\nnow,") == std::string::npos);
    const auto cv = run({"cv", "--data", tmp.file("corpus.tsv"), "--format", "corpus", "--folds", "2",
                         "--k", "1", "--method", "js"});
    CHECK(cv.status == kExitOk);
    CHECK(cv.out.find("2,1\n") != std::string::npos);
  }

  TEST_CASE("exit statuses") {
    TempDir tmp;
    std::ofstream(tmp.file("bad.csv")) << "label,x\na,1\nb,oops\n";
    const auto parse = run({"cv", "--data", tmp.file("bad.csv")});
    CHECK(parse.status == kExitParse);
    CHECK(parse.err.find("line 3") != std::string::npos);
    CHECK(run({"cv", "--data", tmp.file("missing.csv")}).status == kExitParse);

    std::ofstream(tmp.file("neg.csv")) << "label,x\na,1\nb,-1\na,2\nb,-2\n";
    CHECK(run({"cv", "--data", tmp.file("neg.csv"), "--folds", "2", "--k", "1"}).status == kExitNumeric);
    CHECK(run({"cv", "--data", tmp.file("neg.csv"), "--support", "real"}).status == kExitConfig);
    CHECK(run({"cv", "--data", tmp.file("neg.csv"), "--folds", "9", "--orders", "2"}).status ==
          kExitConfig);
    CHECK(run({"fit", "--data", tmp.file("neg.csv"), "--orders", "2", "--k", "5", "--out",
               tmp.file("m")})
              .status == kExitConfig);
    CHECK(run({"cv", "--data", tmp.file("neg.csv"), "--method", "xyz"}).status == kExitConfig);
    CHECK(run({"frobnicate"}).status == kExitConfig);
    CHECK(run({}).status == kExitConfig);
    CHECK(run({"--help"}).status == kExitOk);
  }
}
