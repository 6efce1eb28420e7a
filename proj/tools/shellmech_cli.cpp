// Command-line front end: cell generation, analysis, elevation optimization
// and mesh export.
//
// Exit codes: 0 success, 1 I/O or solver failure, 2 ambiguous spectrum,
// 3 optimizer stall.

#include "shellmech/shellmech.hpp"
#include "shellmech/report.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace shellmech;

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void print_warnings(const UnitCell& cell) {
  for (const std::string& w : validate(cell).warnings)
    std::cerr << "warning: " << w << "\n";
}

void print_summary(const UnitCell& cell) {
  std::printf("nodes=%d bars=%d area=%g\n", cell.num_nodes(), cell.num_bars(),
              cell.lattice.area());
}

struct GenerateArgs {
  std::string preset;
  int nx = 2, ny = 2;
  double h = 0.3;
  std::uint64_t seed = 0;
  double gap = 0.5;
  double tube = 0.4;
  std::string nodes;  // hole node ids, comma separated
  std::string out;
};

UnitCell build_preset(const GenerateArgs& a) {
  if (a.preset == "flat") return generate_flat(a.nx, a.ny);
  if (a.preset == "corrugation") return generate_corrugation(a.nx, a.ny, a.h);
  if (a.preset == "random") return generate_random(a.nx, a.ny, a.h, a.seed);
  if (a.preset == "handle") return generate_handle(a.nx, a.ny, a.gap, a.tube);
  if (a.preset == "hole") {
    const UnitCell base = a.h > 0.0 ? generate_random(a.nx, a.ny, a.h, a.seed)
                                    : generate_flat(a.nx, a.ny);
    std::set<int> ids;
    if (a.nodes.empty()) {
      ids.insert((a.ny / 2) * a.nx + a.nx / 2);  // center node
    } else {
      std::stringstream ss(a.nodes);
      std::string tok;
      while (std::getline(ss, tok, ',')) ids.insert(std::stoi(tok));
    }
    return punch_hole(base, ids);
  }
  throw CellError("unknown preset: " + a.preset);
}

int run_generate(const GenerateArgs& a) {
  const UnitCell cell = build_preset(a);
  save_cell(cell, a.out);
  print_warnings(cell);
  print_summary(cell);
  return 0;
}

struct AnalyzeArgs {
  std::vector<std::string> cells;
  std::string out;
  double tol = 1e-8;
  unsigned jobs = 1;
};

AnalysisReport analyze_cell(const std::string& path, double tol) {
  using clock = std::chrono::steady_clock;
  const auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  AnalysisReport report;
  report.timestamp = utc_timestamp();
  report.cell_path = path;
  const UnitCell cell = load_cell(path);
  report.nodes = cell.num_nodes();
  report.bars = cell.num_bars();
  report.area = cell.lattice.area();
  report.metadata = cell.metadata;

  const auto t0 = clock::now();
  const ElongationSystem sys = assemble(cell);
  const auto t1 = clock::now();
  const EffectiveTensor eff = effective_tensor(sys);
  const auto t2 = clock::now();
  report.a = eff.a;
  report.kernel = analyze_tensor(eff, tol);
  report.poisson = poisson_identity(report.kernel);
  const auto t3 = clock::now();

  report.assemble_ms = ms(t0, t1);
  report.solve_ms = ms(t1, t2);
  report.analysis_ms = ms(t2, t3);
  return report;
}

std::string report_path_for(const AnalyzeArgs& a, const std::string& cell) {
  namespace fs = std::filesystem;
  if (a.cells.size() == 1 && !a.out.empty() && !fs::is_directory(a.out))
    return a.out;
  const fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
  return (dir / (fs::path(cell).stem().string() + ".report.json")).string();
}

int run_analyze(const AnalyzeArgs& a) {
  std::atomic<int> status{0};
  std::atomic<std::size_t> next{0};
  std::mutex io;

  const auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= a.cells.size()) return;
      const std::string& path = a.cells[idx];
      try {
        const AnalysisReport report = analyze_cell(path, a.tol);
        const std::string out_path = report_path_for(a, path);
        {
          std::ofstream out(out_path);
          if (!out) throw CellError("cannot open " + out_path);
          out << report_to_json(report);
        }
        std::lock_guard<std::mutex> lock(io);
        std::printf(
            "%s: kernel_dim=%d gap_ratio=%g classification=(%d,%d,%d) "
            "residual_aja=%.3g -> %s\n",
            path.c_str(), report.kernel.kernel_dim, report.kernel.gap_ratio,
            report.kernel.pure_membrane_dim, report.kernel.pure_flexure_dim,
            report.kernel.mixed_dim, report.kernel.residual_aja,
            out_path.c_str());
        if (report.kernel.has_flag("ambiguous")) {
          int expect = 0;
          status.compare_exchange_strong(expect, 2);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io);
        std::cerr << path << ": error: " << e.what() << "\n";
        status = 1;
      }
    }
  };

  const unsigned jobs =
      std::max(1u, std::min<unsigned>(a.jobs, a.cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return status;
}

struct OptimizeArgs {
  std::string cell;
  std::string out;
  std::string log;
  int iters = 1000;
  double bound = 0.0;
  bool has_bound = false;
  std::uint64_t seed = 0;
};

int run_optimize(const OptimizeArgs& a) {
  const UnitCell cell = load_cell(a.cell);
  MinimizeOptions opt;
  opt.iterations = a.iters;
  opt.seed = a.seed;
  if (a.has_bound) opt.bound = a.bound;
  const auto [optimized, trace] = minimize(cell, opt);
  save_cell(optimized, a.out);
  if (!a.log.empty()) write_trace_csv(trace, a.log);
  const double before = trace.iterates.front().objective;
  const double after = trace.iterates.back().objective;
  std::printf("objective: %.17g -> %.17g (reduction %.6g)\n", before, after,
              after > 0.0 ? before / after
                          : std::numeric_limits<double>::infinity());
  if (trace.stalled) {
    std::cerr << "warning: line search stalled\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective stiffness analysis of periodic triangulated shells"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print help");

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "Generate a unit cell");
  g->set_help_flag("--help", "Print help");
  g->add_option("preset", gen.preset, "flat|corrugation|random|hole|handle")
      ->required();
  g->add_option("--nx", gen.nx, "grid size along a1")->required();
  g->add_option("--ny", gen.ny, "grid size along a2")->required();
  g->add_option("--h", gen.h, "elevation amplitude");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--gap", gen.gap, "layer separation (handle)");
  g->add_option("--tube", gen.tube, "tube side (handle)");
  g->add_option("--nodes", gen.nodes, "hole node ids, comma separated");
  g->add_option("-o,--out", gen.out, "output cell file")->required();

  AnalyzeArgs an;
  CLI::App* al = app.add_subcommand("analyze", "Analyze cell files");
  al->add_option("cells", an.cells, "cell files")->required();
  al->add_option("-t,--tol", an.tol, "relative kernel threshold");
  al->add_option("-o,--out", an.out, "report file (or directory for batches)");
  al->add_option("--jobs", an.jobs, "parallel workers for batch analysis");

  OptimizeArgs op;
  CLI::App* o = app.add_subcommand("optimize", "Minimize tr A_EE over elevations");
  o->add_option("cell", op.cell, "cell file")->required();
  o->add_option("--iters", op.iters, "iteration budget")->required();
  CLI::Option* bound_opt = o->add_option("--bound", op.bound,
                                         "box bound on |z - z0|");
  o->add_option("--seed", op.seed, "seed recorded in the trace");
  o->add_option("-o,--out", op.out, "optimized cell file")->required();
  o->add_option("--log", op.log, "CSV iterate log");

  std::string ex_cell, ex_out;
  std::vector<int> ex_tiles{1, 1};
  CLI::App* ex = app.add_subcommand("export", "Export a tiled triangle mesh");
  ex->add_option("cell", ex_cell, "cell file")->required();
  ex->add_option("--tiles", ex_tiles, "tile counts along a1 and a2")
      ->expected(2);
  ex->add_option("-o,--out", ex_out, "output mesh file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) return run_generate(gen);
    if (al->parsed()) return run_analyze(an);
    if (o->parsed()) {
      op.has_bound = bound_opt->count() > 0;
      return run_optimize(op);
    }
    if (ex->parsed()) {
      export_obj(load_cell(ex_cell), ex_tiles[0], ex_tiles[1], ex_out);
      std::printf("wrote %s\n", ex_out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
