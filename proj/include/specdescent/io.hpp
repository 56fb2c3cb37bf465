#pragma once

// Text formats shared by the CLI and the plot generator:
//   records.csv    n,d,gamma,trial,seed,sigma_max,sigma_min,kappa,kappa_mp,wall_time_ms
//   aggregate.csv  n,d,gamma,trials,kappa_q25,kappa_median,kappa_q75,kappa_mp,inf_count
// Reals are written with 17 significant digits; infinities as "inf", failed
// measurements as "nan".

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "specdescent/errors.hpp"
#include "specdescent/experiments.hpp"

namespace specdescent {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::string_view kRecordsHeader =
    "n,d,gamma,trial,seed,sigma_max,sigma_min,kappa,kappa_mp,wall_time_ms";
inline constexpr std::string_view kAggregateHeader =
    "n,d,gamma,trials,kappa_q25,kappa_median,kappa_q75,kappa_mp,inf_count";

std::string format_real(double value);
// Accepts anything format_real produces. Throws std::invalid_argument otherwise.
double parse_real(std::string_view text);

// Timing is wall-clock and varies between runs; without include_timing the
// column is written as 0 so reruns are byte-identical.
void write_records_csv(std::ostream& out, const std::vector<SweepRecord>& records,
                       bool include_timing = false);
std::vector<SweepRecord> read_records_csv(std::istream& in);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

// One matrix row per line, comma-separated reals. Blank lines are skipped.
Matrix read_matrix_csv(std::istream& in);
// All reals in the stream, whether one per line or comma-separated.
Vector read_vector_csv(std::istream& in);

}  // namespace specdescent
