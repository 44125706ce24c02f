#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memd {

/// Class id <-> name, ids assigned in order of first appearance.
class LabelMap {
 public:
  LabelMap() = default;
  /// Throws Error(InvalidArgument) on duplicate names.
  explicit LabelMap(std::vector<std::string> names);

  /// Id of `name`, adding it if unseen.
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::vector<std::string> names_;
};

/// One instance. Dense rows carry every index 0..d-1; sparse rows carry the
/// non-zero entries in ascending index order.
struct RowView {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;
};

/// Labeled instances in compressed-row form. Rows added densely keep their
/// zeros so inner loops can run over contiguous values.
class Dataset {
 public:
  explicit Dataset(std::size_t dimension = 0);

  void add_dense_row(std::span<const double> values, std::uint32_t label);
  /// Indices must be strictly ascending and < dimension().
  void add_sparse_row(std::span<const std::uint32_t> indices, std::span<const double> values,
                      std::uint32_t label);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t num_classes() const noexcept { return label_map_.size(); }

  RowView row(std::size_t i) const;
  bool row_is_dense(std::size_t i) const { return row(i).indices.size() == dimension_; }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  /// Row i expanded to a dense vector.
  std::vector<double> dense_row(std::size_t i) const;

  LabelMap& label_map() noexcept { return label_map_; }
  const LabelMap& label_map() const noexcept { return label_map_; }
  std::vector<std::string>& feature_names() noexcept { return feature_names_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  /// Rows in the given order, with the same label map and feature names.
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Instances per class id, length num_classes().
  std::vector<std::size_t> class_counts() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dimension_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  std::vector<std::uint32_t> labels_;
  LabelMap label_map_;
  std::vector<std::string> feature_names_;
};

/// Dense CSV with mandatory header `label,f1,...,fd`. Throws ParseError with
/// the offending line on ragged rows, non-numeric or non-finite cells, or a
/// missing header.
Dataset parse_dense_csv(std::istream& in);
Dataset load_dense_csv(const std::filesystem::path& path);
void write_dense_csv(std::ostream& out, const Dataset& data);

/// `<label> <fid>:<value> ...` per line, fids 1-based and strictly ascending.
/// The dimension is the largest fid seen or `min_dimension`, whichever is
/// larger.
Dataset parse_sparse(std::istream& in, std::size_t min_dimension = 0);
Dataset load_sparse(const std::filesystem::path& path, std::size_t min_dimension = 0);
void write_sparse(std::ostream& out, const Dataset& data);

}  // namespace memd
