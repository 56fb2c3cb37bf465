#include "specdescent/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace specdescent {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      return fields;
    }
    start = comma + 1;
  }
}

template <typename Int>
Int parse_int(std::string_view text) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

// Reads a CSV table with a fixed header; `parse_row` gets the split fields.
template <typename Row, typename ParseRow>
std::vector<Row> read_table(std::istream& in, std::string_view header, ParseRow&& parse_row) {
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  const std::size_t columns = split(header).size();
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) {
      continue;
    }
    if (!seen_header) {
      if (view != header) {
        throw ParseError("expected header '" + std::string(header) + "'", line_no);
      }
      seen_header = true;
      continue;
    }
    const auto fields = split(view);
    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    try {
      rows.push_back(parse_row(fields));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!seen_header) {
    throw ParseError("missing header", line_no);
  }
  return rows;
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_real(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (text == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  if (text == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double value = 0.0;
  const char* begin = text.data();
  if (!text.empty() && text.front() == '+') {
    ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw std::invalid_argument("not a real number: '" + std::string(text) + "'");
  }
  return value;
}

void write_records_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                       bool include_timing) {
  out << kRecordsHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.d << ',' << format_real(r.gamma) << ',' << r.trial << ',' << r.seed
        << ',' << format_real(r.sigma_max) << ',' << format_real(r.sigma_min) << ','
        << format_real(r.kappa) << ',' << format_real(r.kappa_mp) << ','
        << format_real(include_timing ? r.wall_time_ms : 0.0) << '\n';
  }
}

std::vector<SweepRecord> read_records_csv(std::istream& in) {
  return read_table<SweepRecord>(in, kRecordsHeader, [](const auto& f) {
    SweepRecord r;
    r.n = parse_int<Eigen::Index>(f[0]);
    r.d = parse_int<Eigen::Index>(f[1]);
    r.gamma = parse_real(f[2]);
    r.trial = parse_int<std::size_t>(f[3]);
    r.seed = parse_int<std::uint64_t>(f[4]);
    r.sigma_max = parse_real(f[5]);
    r.sigma_min = parse_real(f[6]);
    r.kappa = parse_real(f[7]);
    r.kappa_mp = parse_real(f[8]);
    r.wall_time_ms = parse_real(f[9]);
    r.failed = std::isnan(r.kappa);
    return r;
  });
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.d << ',' << format_real(r.gamma) << ',' << r.trials << ','
        << format_real(r.kappa_q25) << ',' << format_real(r.kappa_median) << ','
        << format_real(r.kappa_q75) << ',' << format_real(r.kappa_mp) << ',' << r.inf_count
        << '\n';
  }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  return read_table<AggregateRow>(in, kAggregateHeader, [](const auto& f) {
    AggregateRow r;
    r.n = parse_int<Eigen::Index>(f[0]);
    r.d = parse_int<Eigen::Index>(f[1]);
    r.gamma = parse_real(f[2]);
    r.trials = parse_int<std::size_t>(f[3]);
    r.kappa_q25 = parse_real(f[4]);
    r.kappa_median = parse_real(f[5]);
    r.kappa_q75 = parse_real(f[6]);
    r.kappa_mp = parse_real(f[7]);
    r.inf_count = parse_int<std::size_t>(f[8]);
    return r;
  });
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) {
      continue;
    }
    std::vector<double> row;
    for (const auto field : split(view)) {
      try {
        row.push_back(parse_real(field));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
      }
      if (!std::isfinite(row.back())) {
        throw ParseError("matrix entries must be finite", line_no);
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(rows.front().size()),
                       line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError("matrix file is empty", line_no);
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Vector read_vector_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) {
      continue;
    }
    for (const auto field : split(view)) {
      try {
        values.push_back(parse_real(field));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
      }
      if (!std::isfinite(values.back())) {
        throw ParseError("vector entries must be finite", line_no);
      }
    }
  }
  if (values.empty()) {
    throw ParseError("vector file is empty", line_no);
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace specdescent
