#include "fdeopt/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fdeopt {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

const char* const kSummaryHeader =
    "n,N,alpha,beta1,beta2,gamma,delta,rho,E_l2,dual_inf,pcg_avg,admm_iters,wall_seconds,status";

SummaryRow make_summary_row(const RunConfig& cfg, double delta, const SolveResult& result) {
  SummaryRow row;
  row.n = cfg.spec.n;
  row.total = static_cast<std::size_t>(cfg.spec.n) * cfg.spec.n * cfg.spec.n;
  row.alpha = cfg.spec.alpha;
  row.beta1 = cfg.spec.beta1;
  row.beta2 = cfg.spec.beta2;
  row.gamma = cfg.spec.gamma;
  row.delta = delta;
  row.rho = cfg.admm.rho;
  row.e_l2 = result.misfit;
  row.dual_inf = result.dual_inf;
  row.pcg_avg = result.pcg_avg;
  row.admm_iters = result.iterations;
  row.wall_seconds = result.wall_seconds;
  row.status = to_string(result.status);
  return row;
}

std::string summary_csv_row(const SummaryRow& r) {
  std::string s;
  s += std::to_string(r.n) + "," + std::to_string(r.total) + "," + fmt_g(r.alpha) + "," +
       fmt_g(r.beta1) + "," + fmt_g(r.beta2) + "," + fmt_g(r.gamma) + "," + fmt_g(r.delta) + "," +
       fmt_g(r.rho) + "," + fmt_g(r.e_l2) + "," + fmt_g(r.dual_inf) + "," + fmt_g(r.pcg_avg) +
       "," + std::to_string(r.admm_iters) + "," + fmt_g(r.wall_seconds) + "," + r.status;
  return s;
}

std::string summary_plain_row(const SummaryRow& r) {
  std::string s;
  s += "n=" + std::to_string(r.n) + " N=" + std::to_string(r.total) + " alpha=" + fmt_g(r.alpha) +
       " beta1=" + fmt_g(r.beta1) + " beta2=" + fmt_g(r.beta2) + " gamma=" + fmt_g(r.gamma) +
       " delta=" + fmt_g(r.delta) + " rho=" + fmt_g(r.rho) + " E_l2=" + fmt_g(r.e_l2) +
       " dual_inf=" + fmt_g(r.dual_inf) + " pcg_avg=" + fmt_g(r.pcg_avg) +
       " admm_iters=" + std::to_string(r.admm_iters) + " wall_seconds=" + fmt_g(r.wall_seconds) +
       " status=" + r.status;
  return s;
}

void write_iteration_log(std::ostream& os, const std::vector<IterRecord>& history) {
  os << "iter,r_eq,r_y,r_u,dual_inf,inner_iters,inner_tol\n";
  for (const auto& rec : history)
    os << rec.iter << "," << fmt_g(rec.r_eq) << "," << fmt_g(rec.r_y) << "," << fmt_g(rec.r_u)
       << "," << fmt_g(rec.dual_inf) << "," << rec.inner_iters << "," << fmt_g(rec.inner_tol)
       << "\n";
}

namespace {
constexpr char kMagic[8] = {'F', 'D', 'E', 'O', 'P', 'T', 'v', '1'};
}

void dump_solution(const std::string& path, uint32_t n, uint32_t field_id,
                   const std::vector<double>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  char header[32] = {};
  std::memcpy(header, kMagic, 8);
  std::memcpy(header + 8, &n, 4);
  std::memcpy(header + 12, &field_id, 4);
  const uint64_t count = data.size();
  std::memcpy(header + 16, &count, 8);
  out.write(header, sizeof(header));
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

DumpHeader read_dump_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  char header[32];
  in.read(header, sizeof(header));
  if (in.gcount() != sizeof(header) || std::memcmp(header, kMagic, 8) != 0)
    throw std::runtime_error("'" + path + "' is not a solution dump");
  DumpHeader h;
  std::memcpy(&h.n, header + 8, 4);
  std::memcpy(&h.field_id, header + 12, 4);
  std::memcpy(&h.count, header + 16, 8);
  return h;
}

std::vector<double> read_dump(const std::string& path, DumpHeader* header) {
  const DumpHeader h = read_dump_header(path);
  if (header) *header = h;
  std::ifstream in(path, std::ios::binary);
  in.seekg(32);
  std::vector<double> data(h.count);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(h.count * 8));
  if (static_cast<uint64_t>(in.gcount()) != h.count * 8)
    throw std::runtime_error("'" + path + "' truncated");
  return data;
}

void write_dump_manifest(const std::string& path, int n,
                         const std::vector<std::pair<std::string, uint32_t>>& fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "format: raw little-endian float64 arrays\n";
  out << "header: 32 bytes = magic FDEOPTv1 | u32 n | u32 field_id | u64 count | 8 zero bytes\n";
  out << "n: " << n << "\n";
  out << "N: " << static_cast<long long>(n) * n * n << "\n";
  out << "layout: lexicographic, time outermost, then x1, then x2\n";
  for (const auto& [file, id] : fields) out << "field " << id << ": " << file << "\n";
}

double peak_rss_kb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      double kb = 0.0;
      std::sscanf(line.c_str(), "VmHWM: %lf", &kb);
      return kb;
    }
  }
  return 0.0;
}

}  // namespace fdeopt
