#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "hosc/clustering.hpp"
#include "hosc/error.hpp"
#include "hosc/evaluation.hpp"
#include "hosc/geometry.hpp"
#include "hosc/rotation.hpp"
#include "hosc/sign_label.hpp"

namespace hosc {

inline constexpr int kFormatVersion = 1;

enum class VectorFormat { Csv, EmbeddingText };

struct VectorFileSpec {
  std::string path;
  VectorFormat format = VectorFormat::Csv;
  std::optional<std::string> id_column;
  std::optional<std::string> label_column;
};

/// Normalized vectors plus whatever side columns the file carried.
struct LoadedVectors {
  PointSet points;
  std::vector<std::string> tokens;  // embedding_text only
  std::vector<std::string> labels;  // csv label_column only
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

/// Locale-independent: always '.' as the decimal separator.
inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Shortest representation that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  return out;
}

inline bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

inline std::string zero_rows_message(const std::vector<std::size_t>& lines) {
  std::string msg = "all-zero coordinates on line(s)";
  for (auto l : lines) msg += " " + std::to_string(l);
  return msg;
}

inline LoadedVectors finish(std::size_t dim, const std::vector<std::vector<double>>& raw,
                            const std::vector<std::size_t>& line_numbers) {
  std::vector<double> rows;
  rows.reserve(raw.size() * dim);
  std::vector<std::size_t> zero_lines;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    try {
      const UnitPoint p = normalize(raw[r], r);
      rows.insert(rows.end(), p.coords.begin(), p.coords.end());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ZeroVector) throw Error(e.kind(), "NaN or Inf coordinate", line_numbers[r]);
      zero_lines.push_back(line_numbers[r]);
    }
  }
  if (!zero_lines.empty()) throw Error(ErrorKind::ZeroVector, zero_rows_message(zero_lines), zero_lines.front());
  LoadedVectors out;
  out.points = PointSet(dim, std::move(rows));
  return out;
}

}  // namespace detail

/// CSV with a header row. Every column except the optional id / label
/// columns is a coordinate. Lines starting with '#' are ignored. With an id
/// column the ids must be a permutation of 0..N-1 and rows are reordered by id.
inline LoadedVectors load_vectors_csv(std::istream& in, const VectorFileSpec& spec = {}) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skippable(line)) continue;
    for (auto f : detail::split(line, ',')) header.emplace_back(detail::unquote(f));
    break;
  }
  if (header.empty()) throw Error(ErrorKind::EmptyInput, "missing CSV header");

  auto column = [&](const std::optional<std::string>& name) -> std::optional<std::size_t> {
    if (!name) return std::nullopt;
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw Error(ErrorKind::ParseError, "no column named '" + *name + "'", line_no);
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto id_col = column(spec.id_column);
  const auto label_col = column(spec.label_column);
  const std::size_t dim = header.size() - (id_col ? 1 : 0) - (label_col ? 1 : 0);
  if (dim == 0) throw Error(ErrorKind::ParseError, "no coordinate columns", line_no);

  std::vector<std::vector<double>> raw;
  std::vector<std::size_t> lines, ids;
  std::vector<std::string> labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skippable(line)) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != header.size())
      throw Error(ErrorKind::InconsistentDimension,
                  "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()), line_no);
    std::vector<double> row;
    row.reserve(dim);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (id_col && c == *id_col) {
        const auto id = detail::parse_int<std::size_t>(fields[c]);
        if (!id) throw Error(ErrorKind::ParseError, "bad id '" + std::string(fields[c]) + "'", line_no);
        ids.push_back(*id);
      } else if (label_col && c == *label_col) {
        labels.emplace_back(detail::unquote(fields[c]));
      } else {
        const auto v = detail::parse_double(fields[c]);
        if (!v) throw Error(ErrorKind::ParseError, "bad number '" + std::string(fields[c]) + "'", line_no);
        row.push_back(*v);
      }
    }
    raw.push_back(std::move(row));
    lines.push_back(line_no);
  }
  if (raw.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");

  if (id_col) {
    std::vector<std::size_t> slot(raw.size(), SIZE_MAX);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (ids[r] >= raw.size())
        throw Error(ErrorKind::ParseError, "id " + std::to_string(ids[r]) + " outside 0.." + std::to_string(raw.size() - 1), lines[r]);
      if (slot[ids[r]] != SIZE_MAX) throw Error(ErrorKind::DuplicateId, "id " + std::to_string(ids[r]), lines[r]);
      slot[ids[r]] = r;
    }
    std::vector<std::vector<double>> sorted_raw;
    std::vector<std::size_t> sorted_lines;
    std::vector<std::string> sorted_labels;
    for (auto r : slot) {
      sorted_raw.push_back(std::move(raw[r]));
      sorted_lines.push_back(lines[r]);
      if (label_col) sorted_labels.push_back(std::move(labels[r]));
    }
    raw = std::move(sorted_raw);
    lines = std::move(sorted_lines);
    labels = std::move(sorted_labels);
  }

  LoadedVectors out = detail::finish(dim, raw, lines);
  out.labels = std::move(labels);
  return out;
}

struct EmbeddingRow {
  std::string token;
  std::vector<double> values;
  std::size_t line = 0;
};

/// Word-vector text layout: "token v1 ... vD" per line, with an optional
/// leading "count dim" line. Vectors are returned unnormalized.
inline std::vector<EmbeddingRow> read_embedding_text(std::istream& in) {
  std::vector<EmbeddingRow> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      if (fields.size() == 2 && detail::parse_int<std::size_t>(fields[0]) && detail::parse_int<std::size_t>(fields[1]))
        continue;
    }
    if (fields.size() < 2) throw Error(ErrorKind::ParseError, "expected a token followed by numbers", line_no);
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim)
      throw Error(ErrorKind::InconsistentDimension,
                  "expected " + std::to_string(dim) + " values, got " + std::to_string(fields.size() - 1), line_no);
    EmbeddingRow row{std::string(fields[0]), {}, line_no};
    row.values.reserve(dim);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto x = detail::parse_double(fields[c]);
      if (!x) throw Error(ErrorKind::ParseError, "bad number '" + std::string(fields[c]) + "'", line_no);
      if (!std::isfinite(*x)) throw Error(ErrorKind::InvalidValue, "non-finite value", line_no);
      row.values.push_back(*x);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline LoadedVectors load_vectors_embedding_text(std::istream& in) {
  auto rows = read_embedding_text(in);
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "no data rows");
  std::vector<std::vector<double>> raw;
  std::vector<std::size_t> lines;
  std::vector<std::string> tokens;
  for (auto& r : rows) {
    tokens.push_back(std::move(r.token));
    raw.push_back(std::move(r.values));
    lines.push_back(r.line);
  }
  LoadedVectors out = detail::finish(raw.front().size(), raw, lines);
  out.tokens = std::move(tokens);
  return out;
}

inline LoadedVectors load_vectors(const VectorFileSpec& spec) {
  auto in = detail::open_in(spec.path);
  return spec.format == VectorFormat::Csv ? load_vectors_csv(in, spec) : load_vectors_embedding_text(in);
}

inline WordEmbeddingTable load_embedding_table(const std::string& path) {
  auto in = detail::open_in(path);
  WordEmbeddingTable table;
  for (auto& r : read_embedding_text(in)) table.emplace(std::move(r.token), std::move(r.values));
  return table;
}

/// JSONL, one {"id": int, "text": string, "label": string} per line.
inline LabeledCorpus load_corpus(std::istream& in, const std::unordered_set<std::string>& stopwords = {}) {
  std::vector<Document> docs;
  std::unordered_set<std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer() || j["id"].get<long long>() < 0 ||
        !j.contains("text") || !j["text"].is_string() || !j.contains("label"))
      throw Error(ErrorKind::ParseError, "expected {\"id\": int >= 0, \"text\": string, \"label\": string}", line_no);
    Document d;
    d.id = j["id"].get<std::size_t>();
    d.tokens = tokenize(j["text"].get<std::string>(), stopwords.empty() ? nullptr : &stopwords);
    d.label = j["label"].is_string() ? j["label"].get<std::string>() : j["label"].dump();
    if (!seen.insert(d.id).second) throw Error(ErrorKind::DuplicateId, "document id " + std::to_string(d.id), line_no);
    docs.push_back(std::move(d));
  }
  return LabeledCorpus(std::move(docs));
}

inline LabeledCorpus load_corpus(const std::string& path, const std::unordered_set<std::string>& stopwords = {}) {
  auto in = detail::open_in(path);
  return load_corpus(in, stopwords);
}

/// One word per line; blank lines and '#' comments ignored.
inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
  auto in = detail::open_in(path);
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line))
    if (!detail::skippable(line))
      for (auto& t : tokenize(line)) out.insert(t);
  return out;
}

/// Normalized mean of the embeddings of the tokens found in the table
/// (repeated tokens count repeatedly).
inline UnitPoint mean_word_embedding(std::span<const std::string> doc, const WordEmbeddingTable& table, std::size_t id = 0) {
  std::vector<double> sum;
  std::size_t found = 0;
  for (const auto& tok : doc) {
    auto it = table.find(tok);
    if (it == table.end()) continue;
    if (sum.empty()) sum.assign(it->second.size(), 0.0);
    if (it->second.size() != sum.size()) throw Error(ErrorKind::DimensionMismatch, "embedding sizes differ");
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += it->second[k];
    ++found;
  }
  if (found == 0) throw Error(ErrorKind::NoResolvableWords, "no token of the document is in the embedding table");
  for (auto& x : sum) x /= static_cast<double>(found);
  return normalize(sum, id);
}

// ---- writers -------------------------------------------------------------

inline void write_assignments(std::ostream& os, const ClusteringResult& result, std::size_t n_points) {
  os << "# format_version " << kFormatVersion << '\n' << "point_id,cluster_id\n";
  const auto a = result.assignments(n_points);
  for (std::size_t i = 0; i < a.size(); ++i) os << i << ',' << a[i] << '\n';
}

/// Cluster id per point (-1 for noise), indexed by point id. Ids must be
/// exactly 0..N-1.
inline std::vector<long> read_assignments(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<std::pair<std::size_t, long>> rows;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skippable(line)) continue;
    if (!header) {
      header = true;
      if (detail::trim(line) != "point_id,cluster_id")
        throw Error(ErrorKind::ParseError, "expected header point_id,cluster_id", line_no);
      continue;
    }
    const auto f = detail::split(line, ',');
    const auto id = f.size() == 2 ? detail::parse_int<std::size_t>(f[0]) : std::nullopt;
    const auto c = f.size() == 2 ? detail::parse_int<long>(f[1]) : std::nullopt;
    if (!id || !c || *c < -1) throw Error(ErrorKind::ParseError, "expected point_id,cluster_id", line_no);
    rows.emplace_back(*id, *c);
    lines.push_back(line_no);
  }
  std::vector<long> out(rows.size(), -2);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].first >= rows.size()) throw Error(ErrorKind::ParseError, "point ids must be 0..N-1", lines[r]);
    if (out[rows[r].first] != -2) throw Error(ErrorKind::DuplicateId, "point id " + std::to_string(rows[r].first), lines[r]);
    out[rows[r].first] = rows[r].second;
  }
  return out;
}

/// Rebuilds clusters (ordered by cluster id) and noise from assignments.
inline ClusteringResult result_from_assignments(std::span<const long> assignments) {
  ClusteringResult r;
  long max_id = -1;
  for (long c : assignments) max_id = std::max(max_id, c);
  r.clusters.resize(static_cast<std::size_t>(max_id + 1));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] < 0)
      r.noise.push_back(i);
    else
      r.clusters[static_cast<std::size_t>(assignments[i])].push_back(i);
  }
  std::erase_if(r.clusters, [](const auto& c) { return c.empty(); });
  r.stats.n_points = assignments.size();
  return r;
}

inline nlohmann::ordered_json stats_json(const ClusteringResult& result, std::string_view method) {
  const auto& s = result.stats;
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["method"] = method;
  j["stats"] = {
      {"N_prime", s.n_points},
      {"N_occupied", s.n_occupied},
      {"proto_cluster_count", s.proto_cluster_count},
      {"max_resolution", s.max_resolution},
      {"centering_before", s.centering_before},
      {"centering_after", s.centering_after},
      {"d0_used", s.d0_used},
      {"delta0", s.delta0},
      {"k0", s.k0},
      {"cluster_count", result.clusters.size()},
      {"noise_count", result.noise.size()},
  };
  nlohmann::ordered_json groups = nlohmann::ordered_json::array();
  for (const auto& g : result.label_groups) {
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (const auto& l : g) labels.push_back(l.str());
    groups.push_back(std::move(labels));
  }
  j["label_groups"] = std::move(groups);
  j["warnings"] = result.warnings;
  return j;
}

inline void write_sweep(std::ostream& os, std::span<const SweepRow> rows) {
  os << "# format_version " << kFormatVersion << '\n' << "param,clusters,noise\n";
  for (const auto& r : rows) os << detail::format_double(r.param) << ',' << r.clusters << ',' << r.noise << '\n';
}

struct DistanceTriple {
  double angular = 0.0;
  double euclidean = 0.0;
  unsigned levenshtein = 0;
};

inline void write_correlation(std::ostream& os, std::span<const DistanceTriple> rows) {
  os << "# format_version " << kFormatVersion << '\n' << "angular,euclidean,levenshtein\n";
  for (const auto& r : rows)
    os << detail::format_double(r.angular) << ',' << detail::format_double(r.euclidean) << ',' << r.levenshtein << '\n';
}

/// "point_id,s1..sD" with +1/-1 entries, one row per requested point.
inline void write_sign_matrix(std::ostream& os, const PointSet& points, std::span<const std::size_t> ids) {
  os << "# format_version " << kFormatVersion << '\n' << "point_id";
  for (std::size_t k = 1; k <= points.dim(); ++k) os << ",s" << k;
  os << '\n';
  for (auto id : ids) {
    os << id;
    for (double x : points.row(id)) os << (x >= 0.0 ? ",1" : ",-1");
    os << '\n';
  }
}

/// "id[,label],x1..xD".
inline void write_points_csv(std::ostream& os, const PointSet& points, std::span<const std::string> labels = {}) {
  os << "id";
  if (!labels.empty()) os << ",label";
  for (std::size_t k = 1; k <= points.dim(); ++k) os << ",x" << k;
  os << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << i;
    if (!labels.empty()) os << ',' << labels[i];
    for (double x : points.row(i)) os << ',' << detail::format_double(x);
    os << '\n';
  }
}

inline nlohmann::ordered_json plan_to_json(const RotationPlan& plan, std::size_t dim) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["dim"] = dim;
  j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : plan.pairs) j["pairs"].push_back({a, b});
  j["angles"] = plan.angles;
  return j;
}

/// Returns the plan and its declared dimension; the plan is validated
/// against that dimension.
inline std::pair<RotationPlan, std::size_t> plan_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("format_version") && j["format_version"].get<int>() != kFormatVersion)
      throw Error(ErrorKind::ParseError, "unsupported rotation plan format_version");
    RotationPlan plan;
    const auto dim = j.at("dim").get<std::size_t>();
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::ParseError, "each pair must be [i, j]");
      plan.pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
    }
    plan.angles = j.at("angles").get<std::vector<double>>();
    plan.validate(dim);
    return {std::move(plan), dim};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

inline nlohmann::ordered_json measure_json(const MeasureReport& r, const nlohmann::ordered_json& config) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["measure"] = r.measure;
  j["value"] = r.value;
  j["per_cluster"] = nlohmann::ordered_json::array();
  for (const auto& v : r.per_cluster) j["per_cluster"].push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json());
  j["config"] = config;
  return j;
}

/// 64-bit FNV-1a over a file's bytes, hex encoded.
inline std::string content_hash(const std::string& path) {
  auto in = detail::open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (in.eof()) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace hosc
