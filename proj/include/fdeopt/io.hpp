#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "fdeopt/admm.hpp"
#include "fdeopt/config.hpp"

namespace fdeopt {

/// %.12g formatting; CSV round-trips to full printed precision.
std::string fmt_g(double v);

struct SummaryRow {
  int n;
  std::size_t total;  // N = n^3
  double alpha, beta1, beta2, gamma, delta, rho;
  double e_l2, dual_inf, pcg_avg;
  int admm_iters;
  double wall_seconds;
  std::string status;
};

SummaryRow make_summary_row(const RunConfig& cfg, double delta, const SolveResult& result);

extern const char* const kSummaryHeader;  // csv column names

std::string summary_csv_row(const SummaryRow& row);
std::string summary_plain_row(const SummaryRow& row);

void write_iteration_log(std::ostream& os, const std::vector<IterRecord>& history);

/// Raw little-endian float64 dump: 32-byte header (magic "FDEOPTv1",
/// u32 n, u32 field id, u64 count, 8 zero bytes) followed by the payload.
void dump_solution(const std::string& path, uint32_t n, uint32_t field_id,
                   const std::vector<double>& data);

struct DumpHeader {
  uint32_t n;
  uint32_t field_id;
  uint64_t count;
};

DumpHeader read_dump_header(const std::string& path);
std::vector<double> read_dump(const std::string& path, DumpHeader* header = nullptr);

/// Writes the sidecar manifest describing the dumped fields.
void write_dump_manifest(const std::string& path, int n,
                         const std::vector<std::pair<std::string, uint32_t>>& fields);

double peak_rss_kb();

}  // namespace fdeopt
