#pragma once

// Text corpus preprocessing: tokenization, vocabulary pruning and normalized
// term-frequency rows.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "memd/dataset.hpp"

namespace memd {

struct Document {
  std::vector<std::string> tokens;
};

using StopwordSet = std::unordered_set<std::string>;

/// Lowercases and splits on every non-alphanumeric character.
Document tokenize(std::string_view raw);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Sorted, de-duplicated; ids follow lexicographic order.
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::optional<std::uint32_t> find(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Words with corpus frequency >= gamma that are not stopwords. Throws
/// Error(EmptyVocabulary) if nothing survives, Error(InvalidArgument) if
/// gamma < 1.
Vocabulary build_vocabulary(std::span<const Document> documents, const StopwordSet& stopwords,
                            int gamma);

struct TfRow {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  /// Set when the document has no in-vocabulary token (all-zero row).
  bool flagged = false;
};

/// W_i = count(w_i) / total count of in-vocabulary tokens in the document.
TfRow tf_weights(const Document& document, const Vocabulary& vocabulary);

struct Corpus {
  std::vector<Document> documents;
  std::vector<std::uint32_t> labels;
  LabelMap label_map;

  std::size_t size() const noexcept { return documents.size(); }
  Corpus subset(std::span<const std::size_t> rows) const;
};

/// One document per line: `<label>\t<raw text>`.
Corpus parse_corpus(std::istream& in);

/// A TSV file as above, or a directory holding one sub-directory per class
/// with one file per document (classes and files in lexicographic order).
Corpus load_corpus(const std::filesystem::path& path);

/// One word per line, lowercased; blank lines ignored.
StopwordSet parse_stopwords(std::istream& in);
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Sparse term-weight rows over `vocabulary`, keeping the corpus label map.
Dataset vectorize(const Corpus& corpus, const Vocabulary& vocabulary);

}  // namespace memd
