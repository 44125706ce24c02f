#include "memd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "memd/error.hpp"
#include "memd/format.hpp"

namespace memd {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

}  // namespace

LabelMap::LabelMap(std::vector<std::string> names) {
  for (auto& n : names) {
    if (find(n)) throw Error(ErrorCode::InvalidArgument, "duplicate label '" + n + "'");
    names_.push_back(std::move(n));
  }
}

std::uint32_t LabelMap::intern(std::string_view name) {
  if (const auto id = find(name)) return *id;
  names_.emplace_back(name);
  return static_cast<std::uint32_t>(names_.size() - 1);
}

std::optional<std::uint32_t> LabelMap::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - names_.begin());
}

Dataset::Dataset(std::size_t dimension) : dimension_(dimension) {}

void Dataset::add_dense_row(std::span<const double> values, std::uint32_t label) {
  if (values.size() != dimension_) {
    throw Error(ErrorCode::InvalidArgument, "dense row length does not match the dimension");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    indices_.push_back(static_cast<std::uint32_t>(i));
    values_.push_back(values[i]);
  }
  row_ptr_.push_back(values_.size());
  labels_.push_back(label);
}

void Dataset::add_sparse_row(std::span<const std::uint32_t> indices,
                             std::span<const double> values, std::uint32_t label) {
  if (indices.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "sparse row index/value lengths differ");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= dimension_ || (i > 0 && indices[i] <= indices[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "sparse row indices must ascend below the dimension");
    }
  }
  indices_.insert(indices_.end(), indices.begin(), indices.end());
  values_.insert(values_.end(), values.begin(), values.end());
  row_ptr_.push_back(values_.size());
  labels_.push_back(label);
}

RowView Dataset::row(std::size_t i) const {
  const std::size_t begin = row_ptr_[i];
  const std::size_t count = row_ptr_[i + 1] - begin;
  return {std::span<const std::uint32_t>(indices_).subspan(begin, count),
          std::span<const double>(values_).subspan(begin, count)};
}

std::vector<double> Dataset::dense_row(std::size_t i) const {
  std::vector<double> out(dimension_, 0.0);
  const RowView r = row(i);
  for (std::size_t k = 0; k < r.indices.size(); ++k) out[r.indices[k]] = r.values[k];
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out(dimension_);
  out.label_map_ = label_map_;
  out.feature_names_ = feature_names_;
  for (const std::size_t i : rows) {
    const RowView r = row(i);
    out.indices_.insert(out.indices_.end(), r.indices.begin(), r.indices.end());
    out.values_.insert(out.values_.end(), r.values.begin(), r.values.end());
    out.row_ptr_.push_back(out.values_.size());
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (const auto l : labels_) ++counts.at(l);
  return counts;
}

Dataset parse_dense_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++line_no;
  const auto header = split(line, ',');
  if (header.size() < 2 || trim(header[0]) != "label") {
    throw ParseError(line_no, "missing header: expected label,f1,...,fd");
  }
  Dataset data(header.size() - 1);
  for (std::size_t i = 1; i < header.size(); ++i) {
    data.feature_names().emplace_back(trim(header[i]));
  }
  std::vector<double> values(data.dimension());
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " cells, found " +
                                    std::to_string(cells.size()));
    }
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto v = parse_real(cells[i]);
      if (!v) throw ParseError(line_no, "non-numeric cell '" + std::string(trim(cells[i])) + "'");
      if (!std::isfinite(*v)) throw ParseError(line_no, "non-finite cell");
      values[i - 1] = *v;
    }
    const auto label = trim(cells[0]);
    if (label.empty()) throw ParseError(line_no, "empty label");
    const auto id = data.label_map().intern(label);
    data.add_dense_row(values, id);
  }
  return data;
}

Dataset load_dense_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_dense_csv(in);
}

void write_dense_csv(std::ostream& out, const Dataset& data) {
  out << "label";
  for (std::size_t i = 0; i < data.dimension(); ++i) {
    out << ','
        << (i < data.feature_names().size() ? data.feature_names()[i] : "f" + std::to_string(i + 1));
  }
  out << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    out << data.label_map().name(data.label(r));
    for (const double v : data.dense_row(r)) out << ',' << format_real(v);
    out << '\n';
  }
}

Dataset parse_sparse(std::istream& in, std::size_t min_dimension) {
  struct PendingRow {
    std::vector<std::uint32_t> indices;
    std::vector<double> values;
    std::uint32_t label;
  };
  std::vector<PendingRow> rows;
  LabelMap labels;
  std::size_t dimension = min_dimension;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;
    PendingRow row;
    row.label = labels.intern(token);
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw ParseError(line_no, "malformed pair '" + token + "'");
      const auto fid = parse_unsigned(std::string_view(token).substr(0, colon));
      const auto value = parse_real(std::string_view(token).substr(colon + 1));
      if (!fid || *fid == 0 || !value) {
        throw ParseError(line_no, "malformed pair '" + token + "'");
      }
      if (!std::isfinite(*value)) throw ParseError(line_no, "non-finite value");
      if (*fid > 0xffffffffULL) throw ParseError(line_no, "feature id too large");
      const auto index = static_cast<std::uint32_t>(*fid - 1);
      if (!row.indices.empty() && index <= row.indices.back()) {
        throw ParseError(line_no, "feature ids must be strictly ascending");
      }
      row.indices.push_back(index);
      row.values.push_back(*value);
      dimension = std::max<std::size_t>(dimension, *fid);
    }
    rows.push_back(std::move(row));
  }
  Dataset data(dimension);
  data.label_map() = labels;
  for (std::size_t i = 0; i < dimension; ++i) data.feature_names().push_back(std::to_string(i + 1));
  for (const auto& row : rows) data.add_sparse_row(row.indices, row.values, row.label);
  return data;
}

Dataset load_sparse(const std::filesystem::path& path, std::size_t min_dimension) {
  auto in = open_input(path);
  return parse_sparse(in, min_dimension);
}

void write_sparse(std::ostream& out, const Dataset& data) {
  for (std::size_t r = 0; r < data.size(); ++r) {
    out << data.label_map().name(data.label(r));
    const RowView row = data.row(r);
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      if (row.values[k] == 0.0) continue;
      out << ' ' << row.indices[k] + 1 << ':' << format_real(row.values[k]);
    }
    out << '\n';
  }
}

}  // namespace memd
