#include "memd/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <sstream>

#include "memd/error.hpp"
#include "memd/format.hpp"

namespace memd {

Document tokenize(std::string_view raw) {
  Document doc;
  std::string current;
  for (const char ch : raw) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      doc.tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) doc.tokens.push_back(std::move(current));
  return doc;
}

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    index_.emplace(words_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const Document> documents, const StopwordSet& stopwords,
                            int gamma) {
  if (gamma < 1) throw Error(ErrorCode::InvalidArgument, "gamma must be at least 1");
  std::unordered_map<std::string, std::size_t> frequency;
  for (const auto& doc : documents) {
    for (const auto& token : doc.tokens) ++frequency[token];
  }
  std::vector<std::string> kept;
  for (const auto& [word, count] : frequency) {
    if (count >= static_cast<std::size_t>(gamma) && !stopwords.contains(word)) {
      kept.push_back(word);
    }
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyVocabulary, "no word survives pruning");
  return Vocabulary(std::move(kept));
}

TfRow tf_weights(const Document& document, const Vocabulary& vocabulary) {
  std::map<std::uint32_t, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& token : document.tokens) {
    if (const auto id = vocabulary.find(token)) {
      ++counts[*id];
      ++total;
    }
  }
  TfRow row;
  if (total == 0) {
    row.flagged = true;
    return row;
  }
  row.indices.reserve(counts.size());
  row.values.reserve(counts.size());
  for (const auto& [id, count] : counts) {
    row.indices.push_back(id);
    row.values.push_back(static_cast<double>(count) / static_cast<double>(total));
  }
  return row;
}

Corpus Corpus::subset(std::span<const std::size_t> rows) const {
  Corpus out;
  out.label_map = label_map;
  out.documents.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (const std::size_t i : rows) {
    out.documents.push_back(documents[i]);
    out.labels.push_back(labels[i]);
  }
  return out;
}

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected <label>\\t<text>");
    const auto label = trim(std::string_view(line).substr(0, tab));
    if (label.empty()) throw ParseError(line_no, "empty label");
    corpus.labels.push_back(corpus.label_map.intern(label));
    corpus.documents.push_back(tokenize(std::string_view(line).substr(tab + 1)));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return parse_corpus(in);
  }
  std::vector<fs::path> classes;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory()) classes.push_back(entry.path());
  }
  std::sort(classes.begin(), classes.end());
  Corpus corpus;
  for (const auto& dir : classes) {
    const auto label = corpus.label_map.intern(dir.filename().string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file, std::ios::binary);
      if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
      const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      corpus.documents.push_back(tokenize(raw));
      corpus.labels.push_back(label);
    }
  }
  return corpus;
}

StopwordSet parse_stopwords(std::istream& in) {
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = trim(line);
    if (word.empty()) continue;
    std::string lower(word);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    words.insert(std::move(lower));
  }
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_stopwords(in);
}

Dataset vectorize(const Corpus& corpus, const Vocabulary& vocabulary) {
  Dataset data(vocabulary.size());
  data.label_map() = corpus.label_map;
  data.feature_names() = vocabulary.words();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TfRow row = tf_weights(corpus.documents[i], vocabulary);
    data.add_sparse_row(row.indices, row.values, corpus.labels[i]);
  }
  return data;
}

}  // namespace memd
