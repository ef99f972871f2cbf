// cbm: build, benchmark and verify compressed binary matrices.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#ifdef __linux__
#include <sched.h>
#endif

#include "CLI11.hpp"
#include "cbm/builder.hpp"
#include "cbm/gcn.hpp"
#include "cbm/io.hpp"
#include "cbm/kernels.hpp"
#include "cbm/prng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cbm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct InputOptions {
  std::string path;
  std::string format = "auto";  // mtx | edgelist | cbm | auto
  bool symmetrize = false;
  bool drop_self_loops = false;
  bool one_based = false;
  bool zero_based = false;

  std::string resolved_format() const {
    if (format != "auto") return format;
    const auto ext = fs::path(path).extension().string();
    if (ext == ".mtx" || ext == ".mm") return "mtx";
    if (ext == ".cbm") return "cbm";
    return "edgelist";
  }

  GraphLoadOptions load_options(const std::string& fmt) const {
    GraphLoadOptions opts;
    opts.symmetrize = symmetrize;
    opts.drop_self_loops = drop_self_loops;
    // Matrix Market files are one-based by convention; edge lists usually
    // start at zero. Explicit flags override either default.
    opts.one_based = fmt == "mtx";
    if (one_based) opts.one_based = true;
    if (zero_based) opts.one_based = false;
    return opts;
  }
};

void add_input_flags(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.path, "input graph file")->required();
  cmd->add_option("--format", in.format, "input format")
      ->check(CLI::IsMember({"auto", "mtx", "edgelist", "cbm"}));
  cmd->add_flag("--symmetrize", in.symmetrize, "add the reverse of every edge");
  cmd->add_flag("--drop-self-loops", in.drop_self_loops,
                "discard diagonal entries");
  cmd->add_flag("--one-based", in.one_based, "input indices start at 1");
  cmd->add_flag("--zero-based", in.zero_based, "input indices start at 0");
}

CsrBinaryMatrix load_graph(const InputOptions& in, const std::string& fmt) {
  const auto opts = in.load_options(fmt);
  if (fmt == "mtx") return load_matrix_market(in.path, opts);
  if (fmt == "edgelist") return load_edge_list(in.path, opts);
  throw std::invalid_argument("expected a graph input, got format '" + fmt + "'");
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CBM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

bool pin_to_cores(int threads) {
#ifdef __linux__
  cpu_set_t set;
  CPU_ZERO(&set);
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = threads;
  const int take = std::min(std::max(threads, 1), hw);
  for (int i = 0; i < take; ++i) CPU_SET(i, &set);
  return sched_setaffinity(0, sizeof(set), &set) == 0;
#else
  (void)threads;
  return false;
#endif
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    worst = std::max(worst,
                     std::abs(double(a.data[i]) - double(b.data[i])));
  return worst;
}

/// Mean seconds per call, one untimed warm-up run first.
template <typename Fn>
double time_runs(int runs, Fn&& fn) {
  fn();
  const auto t0 = Clock::now();
  for (int r = 0; r < runs; ++r) fn();
  return seconds_since(t0) / runs;
}

struct BenchReport {
  std::string dataset;
  count_t alpha = 0;
  int threads = 1;
  int runs = 0;
  double compression_ratio = 0;
  double t_csr = 0;
  double t_cbm = 0;
  double runtime_reduction_pct = 0;
  OpCount op_counts;
  double build_time = 0;
  json extra;  // per-command fields (columns, gcn dims, options, pinning)

  json to_json() const {
    json j{{"dataset", dataset},
           {"alpha", alpha},
           {"threads", threads},
           {"runs", runs},
           {"compression_ratio", compression_ratio},
           {"t_csr", t_csr},
           {"t_cbm", t_cbm},
           {"runtime_reduction_pct", runtime_reduction_pct},
           {"multiply_adds", op_counts.multiply_adds},
           {"update_adds", op_counts.update_adds},
           {"build_time", build_time}};
    j.update(extra);
    return j;
  }
};

class ReportWriter {
 public:
  ReportWriter(const std::string& kind, const std::string& out_path)
      : kind_(kind) {
    if (!out_path.empty()) {
      file_.open(out_path, std::ios::trunc);
      if (!file_)
        throw std::invalid_argument("cannot open report file " + out_path);
    }
  }

  void write(const BenchReport& r) {
    std::ostream& os = file_.is_open() ? file_ : std::cout;
    if (kind_ == "json") {
      os << r.to_json().dump() << "\n";
      return;
    }
    if (!header_done_) {
      os << "dataset,alpha,threads,runs,compression_ratio,t_csr,t_cbm,"
            "runtime_reduction_pct,multiply_adds,update_adds,build_time\n";
      header_done_ = true;
    }
    os.precision(17);
    os << r.dataset << ',' << r.alpha << ',' << r.threads << ',' << r.runs
       << ',' << r.compression_ratio << ',' << r.t_csr << ',' << r.t_cbm << ','
       << r.runtime_reduction_pct << ',' << r.op_counts.multiply_adds << ','
       << r.op_counts.update_adds << ',' << r.build_time << "\n";
  }

 private:
  std::string kind_;
  std::ofstream file_;
  bool header_done_ = false;
};

json options_json(const GraphLoadOptions& opts) {
  return {{"symmetrize", opts.symmetrize},
          {"drop_self_loops", opts.drop_self_loops},
          {"one_based", opts.one_based}};
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

int cmd_build(const InputOptions& in, count_t alpha, bool normalized,
              const std::string& output, int threads) {
  const std::string fmt = in.resolved_format();
  const CsrBinaryMatrix a = load_graph(in, fmt);

  const auto t0 = Clock::now();
  const CbmMatrix c = normalized ? build_cbm_normalized(a, alpha, threads)
                                 : build_cbm(a, alpha, threads);
  const double build_time = seconds_since(t0);

  save_cbm(c, output);

  const CsrBinaryMatrix& represented_src = a;
  const double ratio =
      normalized ? compression_ratio(reconstruct_rows(c), c)
                 : compression_ratio(represented_src, c);
  json j{{"dataset", fs::path(in.path).stem().string()},
         {"alpha", alpha},
         {"normalized", normalized},
         {"n_rows", c.n_rows},
         {"nnz", a.nnz()},
         {"delta_nnz", c.delta_matrix.nnz()},
         {"build_time", build_time},
         {"compression_ratio", ratio},
         {"output", output},
         {"options", options_json(in.load_options(fmt))}};
  std::cout << j.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// spmm-bench
// ---------------------------------------------------------------------------

int cmd_spmm_bench(const InputOptions& in, std::vector<count_t> alphas,
                   index_t columns, int runs, int threads, std::uint64_t seed,
                   bool normalized, const std::string& report,
                   const std::string& output) {
  const std::string fmt = in.resolved_format();
  const CsrBinaryMatrix a = load_graph(in, fmt);
  if (normalized && a.n_rows != a.n_cols)
    throw std::invalid_argument("--normalized requires a square graph");

  const bool pinned = pin_to_cores(threads);
  std::cerr << (pinned ? "[cbm] pinned to cores 0.." + std::to_string(threads - 1)
                       : "[cbm] thread pinning unavailable; running unpinned")
            << "\n";

  const CsrRealMatrix baseline =
      normalized ? normalized_adjacency_csr(a) : to_real(a);
  const DenseMatrix b = random_dense(a.n_cols, columns, -1.0, 1.0, seed);

  ReportWriter writer(report, output);
  for (const count_t alpha : alphas) {
    const auto t0 = Clock::now();
    const CbmMatrix c = normalized ? build_cbm_normalized(a, alpha, threads)
                                   : build_cbm(a, alpha, threads);
    const double build_time = seconds_since(t0);

    // Never time a kernel that produces wrong results.
    DenseMatrix c_cbm(c.n_rows, b.n_cols);
    DenseMatrix c_csr(c.n_rows, b.n_cols);
    spmm_into(c, b, c_cbm, threads);
    csr_spmm_into(baseline, b, c_csr, threads);
    const double diff = max_abs_diff(c_cbm, c_csr);
    if (diff > 1e-8) {
      std::cerr << "[cbm] equivalence check FAILED at alpha="
                << alpha << ": max |cbm - csr| = " << diff
                << "; timings withheld\n";
      return 1;
    }

    BenchReport r;
    r.dataset = fs::path(in.path).stem().string();
    r.alpha = alpha;
    r.threads = threads;
    r.runs = runs;
    r.build_time = build_time;
    r.op_counts = count_scalar_ops(c);
    r.compression_ratio = normalized
                              ? compression_ratio(reconstruct_rows(c), c)
                              : compression_ratio(a, c);
    r.t_csr = time_runs(runs, [&] { csr_spmm_into(baseline, b, c_csr, threads); });
    r.t_cbm = time_runs(runs, [&] { spmm_into(c, b, c_cbm, threads); });
    r.runtime_reduction_pct = (r.t_csr - r.t_cbm) / r.t_csr * 100.0;
    r.extra = json{{"columns", columns},
                   {"seed", seed},
                   {"normalized", normalized},
                   {"pinned", pinned},
                   {"options", options_json(in.load_options(fmt))}};
    writer.write(r);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gcn-bench
// ---------------------------------------------------------------------------

int cmd_gcn_bench(const InputOptions& in, std::vector<count_t> alphas,
                  index_t features, index_t hidden, index_t classes, int runs,
                  int threads, std::uint64_t seed, const std::string& report,
                  const std::string& output) {
  const std::string fmt = in.resolved_format();
  const CsrBinaryMatrix a = load_graph(in, fmt);
  if (a.n_rows != a.n_cols)
    throw std::invalid_argument("gcn-bench requires a square graph");

  const bool pinned = pin_to_cores(threads);
  std::cerr << (pinned ? "[cbm] pinned to cores 0.." + std::to_string(threads - 1)
                       : "[cbm] thread pinning unavailable; running unpinned")
            << "\n";

  const CsrRealMatrix baseline = normalized_adjacency_csr(a);
  const DenseMatrix x = random_dense(a.n_rows, features, -1.0, 1.0, seed + 1);
  const GcnModel model = GcnModel::seeded(features, hidden, classes, seed + 2);

  ReportWriter writer(report, output);
  for (const count_t alpha : alphas) {
    const auto t0 = Clock::now();
    const CbmMatrix adj = build_cbm_normalized(a, alpha, threads);
    const double build_time = seconds_since(t0);

    const DenseMatrix z_cbm = gcn_forward(adj, x, model, threads);
    const DenseMatrix z_csr = gcn_forward_csr(baseline, x, model, threads);
    const double diff = max_abs_diff(z_cbm, z_csr);
    if (diff > 1e-8) {
      std::cerr << "[cbm] equivalence check FAILED at alpha=" << alpha
                << ": max |cbm - csr| = " << diff << "; timings withheld\n";
      return 1;
    }

    BenchReport r;
    r.dataset = fs::path(in.path).stem().string();
    r.alpha = alpha;
    r.threads = threads;
    r.runs = runs;
    r.build_time = build_time;
    r.op_counts = count_scalar_ops(adj);
    r.compression_ratio = compression_ratio(reconstruct_rows(adj), adj);
    r.t_csr = time_runs(runs, [&] { gcn_forward_csr(baseline, x, model, threads); });
    r.t_cbm = time_runs(runs, [&] { gcn_forward(adj, x, model, threads); });
    r.runtime_reduction_pct = (r.t_csr - r.t_cbm) / r.t_csr * 100.0;
    r.extra = json{{"features", features}, {"hidden", hidden},
                   {"classes", classes},  {"seed", seed},
                   {"normalized", true},  {"pinned", pinned},
                   {"options", options_json(in.load_options(fmt))}};
    writer.write(r);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const InputOptions& in, std::vector<count_t> alphas, int threads,
               std::uint64_t seed) {
  const std::string fmt = in.resolved_format();

  if (fmt == "cbm") {
    // container self-check: loading re-validates every structural invariant
    const CbmMatrix c = load_cbm(in.path);
    std::cout << "ok container: " << c.n_rows << " rows, "
              << c.delta_matrix.nnz() << " deltas, alpha=" << c.alpha << "\n";
    return 0;
  }

  const CsrBinaryMatrix a = load_graph(in, fmt);
  int failures = 0;
  auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok " : "FAIL ") << what << "\n";
    if (!ok) ++failures;
  };

  for (const count_t alpha : alphas) {
    const std::string tag = " (alpha=" + std::to_string(alpha) + ")";
    const CbmMatrix c = build_cbm(a, alpha, threads);

    report(c.delta_matrix.nnz() <= a.nnz(),
           "delta-count bound (deltas <= nnz)" + tag);
    report(count_scalar_ops(c).total() <= a.nnz(),
           "scalar-op bound (ops <= nnz)" + tag);
    report(reconstruct_rows(c) == a, "round-trip reconstruction" + tag);

    const DenseMatrix b = random_dense(a.n_cols, 8, -1.0, 1.0, seed);
    const DenseMatrix via_cbm = spmm(c, b, threads);
    const DenseMatrix via_csr = csr_spmm(to_real(a), b, threads);
    report(max_abs_diff(via_cbm, via_csr) <= 1e-8, "oracle equivalence" + tag);
    report(via_cbm == spmm_sequential_reference(c, b),
           "staged kernel matches the sequential chain walk" + tag);

    if (a.n_rows == a.n_cols) {
      const CbmMatrix cn = build_cbm_normalized(a, alpha, threads);
      const DenseMatrix n_cbm = spmm(cn, b, threads);
      const DenseMatrix n_csr = csr_spmm(normalized_adjacency_csr(a), b, threads);
      report(max_abs_diff(n_cbm, n_csr) <= 1e-8,
             "normalized oracle equivalence" + tag);
    }
  }
  if (failures) {
    std::cerr << "[cbm] " << failures << " propert"
              << (failures == 1 ? "y" : "ies") << " failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressed binary matrix toolkit"};
  app.require_subcommand(1);

  InputOptions in_build, in_spmm, in_gcn, in_verify;
  std::vector<count_t> alphas;
  count_t build_alpha = 0;
  bool normalized = false;
  std::string output, report = "json";
  index_t columns = 500, features = 500, hidden = 16, classes = 7;
  int runs = 50, threads_flag = 0;
  std::uint64_t seed = 1;

  auto* build = app.add_subcommand("build", "compress a graph into a container");
  add_input_flags(build, in_build);
  build->add_option("--alpha", build_alpha, "pruning threshold");
  build->add_flag("--normalized", normalized,
                  "represent the normalized adjacency matrix");
  build->add_option("--output", output, "container path")->required();
  build->add_option("--threads", threads_flag, "worker threads");

  auto* spmm_cmd = app.add_subcommand(
      "spmm-bench", "time compressed SpMM against the CSR baseline");
  add_input_flags(spmm_cmd, in_spmm);
  spmm_cmd->add_option("--alpha", alphas, "pruning thresholds (repeatable)");
  spmm_cmd->add_option("--columns", columns, "dense operand columns")
      ->check(CLI::PositiveNumber);
  spmm_cmd->add_option("--runs", runs, "timed runs per kernel")
      ->check(CLI::PositiveNumber);
  spmm_cmd->add_option("--threads", threads_flag, "worker threads");
  spmm_cmd->add_option("--seed", seed, "operand seed");
  spmm_cmd->add_flag("--normalized", normalized,
                     "benchmark the normalized operator");
  spmm_cmd->add_option("--report", report, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  spmm_cmd->add_option("--output", output, "write reports to a file");

  auto* gcn_cmd = app.add_subcommand(
      "gcn-bench", "time two-layer GCN inference, compressed vs CSR");
  add_input_flags(gcn_cmd, in_gcn);
  gcn_cmd->add_option("--alpha", alphas, "pruning thresholds (repeatable)");
  gcn_cmd->add_option("--features", features, "input feature width")
      ->check(CLI::PositiveNumber);
  gcn_cmd->add_option("--hidden", hidden, "hidden width")
      ->check(CLI::PositiveNumber);
  gcn_cmd->add_option("--classes", classes, "output classes")
      ->check(CLI::PositiveNumber);
  gcn_cmd->add_option("--runs", runs, "timed runs per kernel")
      ->check(CLI::PositiveNumber);
  gcn_cmd->add_option("--threads", threads_flag, "worker threads");
  gcn_cmd->add_option("--seed", seed, "feature/weight seed");
  gcn_cmd->add_option("--report", report, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  gcn_cmd->add_option("--output", output, "write reports to a file");

  auto* verify = app.add_subcommand(
      "verify", "run the invariant suite on a graph or container");
  add_input_flags(verify, in_verify);
  verify->add_option("--alpha", alphas, "pruning thresholds (repeatable)");
  verify->add_option("--threads", threads_flag, "worker threads");
  verify->add_option("--seed", seed, "operand seed");

  CLI11_PARSE(app, argc, argv);

  const int threads = resolve_threads(threads_flag);
  if (alphas.empty())
    alphas = app.got_subcommand(verify)
                 ? std::vector<count_t>{0, 1, 2, 4, 8}
                 : std::vector<count_t>{0};

  try {
    if (app.got_subcommand(build))
      return cmd_build(in_build, build_alpha, normalized, output, threads);
    if (app.got_subcommand(spmm_cmd))
      return cmd_spmm_bench(in_spmm, alphas, columns, runs, threads, seed,
                            normalized, report, output);
    if (app.got_subcommand(gcn_cmd))
      return cmd_gcn_bench(in_gcn, alphas, features, hidden, classes, runs,
                           threads, seed, report, output);
    if (app.got_subcommand(verify))
      return cmd_verify(in_verify, alphas, threads, seed);
  } catch (const format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app.got_subcommand(verify) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
