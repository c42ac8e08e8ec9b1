#ifndef DESPAN_IO_HPP
#define DESPAN_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <ranges>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "despan/error.hpp"
#include "despan/points.hpp"
#include "despan/rank_graph.hpp"
#include "despan/reachability.hpp"

// Text formats (1-based, ASCII decimal, LF):
//   edge list: "n m", then m lines "i j" or "i j w" with i < j
//   points:    "n d", then n lines of d coordinates
namespace despan {

// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class Int>
std::string format_int(Int x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
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

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

// Non-blank lines with their 1-based line numbers.
struct NumberedLine {
  std::size_t number;
  std::vector<std::string_view> fields;
};

class LineReader {
 public:
  explicit LineReader(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) storage_.push_back(std::move(line));
    for (std::size_t i = 0; i < storage_.size(); ++i) {
      auto fields = split_fields(storage_[i]);
      if (!fields.empty()) lines_.push_back({i + 1, std::move(fields)});
    }
  }

  const std::vector<NumberedLine>& lines() const noexcept { return lines_; }
  std::size_t last_line() const noexcept { return storage_.size(); }

 private:
  std::vector<std::string> storage_;
  std::vector<NumberedLine> lines_;
};

}  // namespace detail

inline RankGraph parse_edge_list(std::istream& in) {
  const detail::LineReader reader(in);
  const auto& lines = reader.lines();
  if (lines.empty()) throw ParseError(1, "missing header \"n m\"");
  const auto& header = lines.front();
  if (header.fields.size() != 2) throw ParseError(header.number, "header must be \"n m\"");
  const auto n64 = detail::parse_number<std::uint64_t>(header.fields[0], header.number, "vertex count");
  const auto m = detail::parse_number<std::uint64_t>(header.fields[1], header.number, "edge count");
  if (n64 == 0 || n64 > 0xffffffffULL) throw ParseError(header.number, "vertex count out of range");
  const auto n = static_cast<Vertex>(n64);
  if (m > pair_count(n)) throw ParseError(header.number, "more edges than vertex pairs");
  if (lines.size() - 1 != m) {
    const std::size_t at = lines.size() - 1 > m ? lines[m + 1].number : reader.last_line();
    throw ParseError(at, "expected " + format_int(m) + " edge lines, found " + format_int(lines.size() - 1));
  }

  std::vector<Edge> edges;
  std::vector<double> weights;
  std::vector<std::size_t> origin;
  edges.reserve(m);
  std::size_t arity = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.fields.size() != 2 && line.fields.size() != 3) {
      throw ParseError(line.number, "edge line must be \"i j\" or \"i j w\"");
    }
    if (arity == 0) arity = line.fields.size();
    if (line.fields.size() != arity) throw ParseError(line.number, "mixed weighted and unweighted edge lines");
    const auto i = detail::parse_number<std::uint64_t>(line.fields[0], line.number, "vertex");
    const auto j = detail::parse_number<std::uint64_t>(line.fields[1], line.number, "vertex");
    if (i < 1 || i > n || j < 1 || j > n) throw ParseError(line.number, "vertex out of range [1, n]");
    if (i >= j) throw ParseError(line.number, "edge must satisfy i < j");
    edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j)});
    origin.push_back(line.number);
    if (arity == 3) {
      const double w = detail::parse_number<double>(line.fields[2], line.number, "weight");
      if (!(w > 0.0) || !std::isfinite(w)) throw ParseError(line.number, "weight must be positive");
      weights.push_back(w);
    }
  }

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (edges[order[k]] == edges[order[k - 1]]) {
      throw ParseError(origin[order[k]], "duplicate edge (first seen on line " + format_int(origin[order[k - 1]]) + ")");
    }
  }
  return RankGraph(n, std::move(edges), std::move(weights));
}

inline void write_edge_list(std::ostream& out, const RankGraph& g) {
  out << g.n() << ' ' << g.edge_count() << '\n';
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge e = g.edges()[i];
    out << e.lo << ' ' << e.hi;
    if (g.has_weights()) out << ' ' << format_double(g.weights()[i]);
    out << '\n';
  }
}

struct RawPoints {
  unsigned dim = 0;
  std::vector<double> coords;
};

// Rejects duplicate points, naming the lines involved.
inline RawPoints parse_points(std::istream& in) {
  const detail::LineReader reader(in);
  const auto& lines = reader.lines();
  if (lines.empty()) throw ParseError(1, "missing header \"n d\"");
  const auto& header = lines.front();
  if (header.fields.size() != 2) throw ParseError(header.number, "header must be \"n d\"");
  const auto n = detail::parse_number<std::uint64_t>(header.fields[0], header.number, "point count");
  const auto d = detail::parse_number<unsigned>(header.fields[1], header.number, "dimension");
  if (n < 1 || n > 0xffffffffULL) throw ParseError(header.number, "point count out of range");
  if (d < 1) throw ParseError(header.number, "dimension must be >= 1");
  if (lines.size() - 1 != n) {
    const std::size_t at = lines.size() - 1 > n ? lines[n + 1].number : reader.last_line();
    throw ParseError(at, "expected " + format_int(n) + " point lines, found " + format_int(lines.size() - 1));
  }
  RawPoints raw;
  raw.dim = d;
  raw.coords.reserve(n * d);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.fields.size() != d) throw ParseError(line.number, "expected " + format_int(d) + " coordinates");
    for (auto f : line.fields) {
      const double c = detail::parse_number<double>(f, line.number, "coordinate");
      if (!std::isfinite(c)) throw ParseError(line.number, "non-finite coordinate");
      raw.coords.push_back(c);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t i) { return std::span<const double>(raw.coords).subspan(i * d, d); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::ranges::lexicographical_compare(row(a), row(b));
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (std::ranges::equal(row(order[k]), row(order[k - 1]))) {
      throw ParseError(lines[order[k] + 1].number,
                       "duplicate point (same as line " + format_int(lines[order[k - 1] + 1].number) + ")");
    }
  }
  return raw;
}

inline PointSet parse_point_set(std::istream& in) {
  const RawPoints raw = parse_points(in);
  return normalize_points(raw.dim, raw.coords);
}

inline void write_points(std::ostream& out, const PointSet& points) {
  out << points.size() << ' ' << points.dim() << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? " " : "") << format_double(p[k]);
    out << '\n';
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

inline RankGraph read_edge_list(const std::string& path) {
  auto in = open_input(path);
  return parse_edge_list(in);
}

inline PointSet read_point_set(const std::string& path) {
  auto in = open_input(path);
  return parse_point_set(in);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

inline std::string edge_list_text(const RankGraph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

inline std::string points_text(const PointSet& p) {
  std::ostringstream out;
  write_points(out, p);
  return out.str();
}

inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

/// Ordered table written as CSV with a leading schema line
/// "# despan-csv v1 <name>".
class CsvTable {
 public:
  static constexpr int kSchemaVersion = 1;

  CsvTable(std::string name, std::vector<std::string> columns)
      : name_(std::move(name)), columns_(std::move(columns)) {}

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void add_row(std::vector<std::string> row) {
    require(row.size() == columns_.size(), "csv row for '" + name_ + "' has the wrong number of fields");
    rows_.push_back(std::move(row));
  }

  std::size_t column(std::string_view name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    require(it != columns_.end(), "csv table '" + name_ + "' has no column " + std::string(name));
    return static_cast<std::size_t>(it - columns_.begin());
  }

  // Field of row r in column `name`, as a number.
  double number(std::size_t r, std::string_view name) const {
    const std::string& s = rows_.at(r).at(column(name));
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
    return detail::parse_number<double>(s, r + 2, "field");
  }

  std::string text() const {
    std::string out = "# despan-csv v" + std::to_string(kSchemaVersion) + " " + name_ + "\n";
    auto emit = [&](const std::vector<std::string>& fields) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
      }
      out += '\n';
    };
    emit(columns_);
    for (const auto& r : rows_) emit(r);
    return out;
  }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::vector<std::string> deficiency_csv_columns() {
  return {"n", "psi", "hop_bound", "trials", "mean", "stderr", "seed"};
}

inline std::vector<std::string> deficiency_csv_row(const DeficiencyReport& r) {
  return {format_int(r.n),
          format_double(r.psi),
          r.hop_bound ? format_int(*r.hop_bound) : std::string("inf"),
          format_int(r.trials),
          format_double(r.mean_failed_pairs),
          format_double(r.std_error),
          format_int(r.seed)};
}

}  // namespace despan

#endif  // DESPAN_IO_HPP
