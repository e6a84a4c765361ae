// afgm: simulate, fit and benchmark additive functional graphical models.
// Thin driver over the C API in afgm.h.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "afgm.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(afgm_status s) {
  return (s == AFGM_ERR_NUMERICAL || s == AFGM_ERR_DEGENERATE) ? kExitNumerical : kExitUsage;
}

void check(afgm_status s, const std::string& what) {
  if (s != AFGM_OK) throw CliError{exit_code_for(s), what + ": " + afgm_last_error()};
}

// Owns a library-allocated string.
struct CString {
  char* ptr = nullptr;
  ~CString() { afgm_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitUsage, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw CliError{kExitUsage, "cannot create output directory '" + dir_.string() + "': " + ec.message()};
  }

  // Write-temp-then-rename so readers never observe a partial file.
  void write(const std::string& name, const std::string& content) {
    const fs::path final_path = dir_ / name;
    fs::create_directories(final_path.parent_path());
    const fs::path tmp = final_path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw CliError{kExitUsage, "cannot write '" + tmp.string() + "'"};
      out << content;
      if (!out.flush()) throw CliError{kExitUsage, "write failed for '" + tmp.string() + "'"};
    }
    std::error_code ec;
    fs::rename(tmp, final_path, ec);
    if (ec) throw CliError{kExitUsage, "cannot rename into '" + final_path.string() + "': " + ec.message()};
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

void write_manifest(OutputSet& out, const std::string& command, Json args, Json config, std::uint64_t seed,
                    const std::string& started) {
  Json m;
  m["command"] = command;
  m["tool_version"] = afgm_version();
  m["arguments"] = std::move(args);
  m["resolved_config"] = std::move(config);
  m["seed"] = seed;
  m["started_at"] = started;
  m["finished_at"] = utc_now();
  m["outputs"] = out.written();
  out.write("manifest.json", m.dump(2) + "\n");
}

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("AFGM_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0') return v;
    throw CliError{kExitUsage, "AFGM_THREADS must be a nonnegative integer"};
  }
  return 0;
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a) {
  const std::string started = utc_now();
  const std::string cfg_text = read_text(a.config);
  afgm_scenario* sc = nullptr;
  check(afgm_simulate(cfg_text.c_str(), a.seed ? static_cast<int64_t>(*a.seed) : -1, &sc), "simulate");
  std::unique_ptr<afgm_scenario, decltype(&afgm_scenario_free)> guard(sc, afgm_scenario_free);

  afgm_dataset* ds = nullptr;
  check(afgm_scenario_dataset(sc, &ds), "simulate");
  std::unique_ptr<afgm_dataset, decltype(&afgm_dataset_free)> ds_guard(ds, afgm_dataset_free);

  OutputSet out(a.out);
  CString csv, grid, truth, truth_csv, dag, resolved;
  check(afgm_dataset_csv(ds, &csv.ptr), "simulate");
  check(afgm_dataset_grid_json(ds, &grid.ptr), "simulate");
  check(afgm_scenario_truth_json(sc, &truth.ptr), "simulate");
  check(afgm_scenario_truth_csv(sc, &truth_csv.ptr), "simulate");
  check(afgm_scenario_dag_json(sc, &dag.ptr), "simulate");
  check(afgm_scenario_config_json(sc, &resolved.ptr), "simulate");
  out.write("dataset.csv", csv.str());
  out.write("grid.json", grid.str());
  out.write("truth.json", truth.str());
  out.write("truth.csv", truth_csv.str());
  out.write("dag.json", dag.str());

  const Json config = Json::parse(resolved.str());
  Json args;
  args["config"] = a.config;
  args["out"] = a.out;
  write_manifest(out, "simulate", args, config, config["seed"].get<std::uint64_t>(), started);
  return kExitOk;
}

struct FitArgs {
  std::string data;
  std::string grid;
  std::string config;
  std::string out;
  std::string method = "afgm";
  std::optional<double> density;
  std::optional<std::size_t> lambda_index;
  std::optional<std::size_t> threads;
};

int cmd_fit(const FitArgs& a) {
  const std::string started = utc_now();
  if (a.density.has_value() == a.lambda_index.has_value())
    throw CliError{kExitUsage, "fit: give exactly one of --density or --lambda-index"};
  if (a.method != "afgm" && a.method != "linear")
    throw CliError{kExitUsage, "fit: --method must be afgm or linear"};
  const std::string grid_path = a.grid.empty() ? (fs::path(a.data).parent_path() / "grid.json").string() : a.grid;
  const std::string cfg_text = a.config.empty() ? std::string("{}") : read_text(a.config);

  afgm_dataset* ds = nullptr;
  check(afgm_dataset_read(a.data.c_str(), grid_path.c_str(), &ds), "fit: reading dataset");
  std::unique_ptr<afgm_dataset, decltype(&afgm_dataset_free)> ds_guard(ds, afgm_dataset_free);

  const std::size_t threads = resolve_threads(a.threads);
  afgm_fit* fit = nullptr;
  check(a.method == "afgm" ? afgm_fit_run(ds, cfg_text.c_str(), threads, &fit)
                           : afgm_fit_linear_run(ds, cfg_text.c_str(), threads, &fit),
        "fit");
  std::unique_ptr<afgm_fit, decltype(&afgm_fit_free)> fit_guard(fit, afgm_fit_free);

  std::size_t index = 0;
  if (a.density) {
    check(afgm_fit_select_density(fit, *a.density, &index), "fit: --density");
  } else {
    std::size_t count = 0;
    check(afgm_fit_lambda_count(fit, &count), "fit");
    if (*a.lambda_index >= count)
      throw CliError{kExitUsage, "fit: --lambda-index must be below the grid size " + std::to_string(count)};
    index = *a.lambda_index;
  }
  double lambda = 0.0;
  std::size_t edges = 0, unconverged = 0;
  check(afgm_fit_lambda(fit, index, &lambda), "fit");
  check(afgm_fit_edge_count(fit, index, &edges), "fit");
  check(afgm_fit_unconverged_count(fit, index, &unconverged), "fit");

  OutputSet out(a.out);
  CString gjson, gcsv, norms, diag;
  check(afgm_fit_graph_json(fit, index, &gjson.ptr), "fit");
  check(afgm_fit_graph_csv(fit, index, &gcsv.ptr), "fit");
  check(afgm_fit_block_norms_csv(fit, &norms.ptr), "fit");
  check(afgm_fit_diagnostics_json(fit, &diag.ptr), "fit");
  out.write("graph.json", gjson.str());
  out.write("graph.csv", gcsv.str());
  out.write("block_norms.csv", norms.str());
  out.write("diagnostics.json", diag.str());

  Json d = Json::parse(diag.str());
  Json args;
  args["data"] = a.data;
  args["grid"] = grid_path;
  args["config"] = a.config;
  args["out"] = a.out;
  args["method"] = a.method;
  if (a.density) args["density"] = *a.density;
  if (a.lambda_index) args["lambda_index"] = *a.lambda_index;
  args["selected_lambda_index"] = index;
  args["selected_lambda"] = lambda;
  args["threads"] = threads;
  write_manifest(out, "fit", args, d["config"], d["config"]["seed"].get<std::uint64_t>(), started);

  std::printf("lambda_index=%zu lambda=%.17g edges=%zu\n", index, lambda, edges);
  if (unconverged > 0) {
    std::fprintf(stderr, "fit: %zu node(s) hit the sweep limit at lambda index %zu:\n", unconverged, index);
    for (const auto& node : d["nodes"])
      if (!node["converged"][index].get<bool>())
        std::fprintf(stderr, "  node %zu: %zu sweeps\n", node["node"].get<std::size_t>(),
                     node["sweeps"][index].get<std::size_t>());
    return kExitNumerical;
  }
  return kExitOk;
}

struct BenchArgs {
  std::string scenario;
  std::string fit_config;
  std::string methods = "afgm,linear";
  std::size_t replicates = 20;
  std::size_t lambdas = 30;
  std::uint64_t seed = 0;
  std::optional<std::size_t> threads;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  const std::string started = utc_now();
  if (a.replicates < 2) throw CliError{kExitUsage, "bench: --replicates must be at least 2"};
  const std::string sc_text = read_text(a.scenario);
  const std::string fit_text = a.fit_config.empty() ? std::string() : read_text(a.fit_config);
  const std::size_t threads = resolve_threads(a.threads);

  afgm_report* rep = nullptr;
  check(afgm_bench_run(sc_text.c_str(), fit_text.empty() ? nullptr : fit_text.c_str(), a.methods.c_str(),
                       a.replicates, a.lambdas, a.seed, threads, &rep),
        "bench");
  std::unique_ptr<afgm_report, decltype(&afgm_report_free)> guard(rep, afgm_report_free);

  OutputSet out(a.out);
  std::size_t methods = 0, reps = 0;
  check(afgm_report_method_count(rep, &methods), "bench");
  check(afgm_report_replicate_count(rep, &reps), "bench");
  for (std::size_t m = 0; m < methods; ++m) {
    CString name;
    check(afgm_report_method_name(rep, m, &name.ptr), "bench");
    for (std::size_t r = 0; r < reps; ++r) {
      CString csv;
      check(afgm_report_roc_csv(rep, m, r, &csv.ptr), "bench");
      char fname[128];
      std::snprintf(fname, sizeof fname, "roc/%s_rep%03zu.csv", name.ptr, r + 1);
      out.write(fname, csv.str());
    }
    double mean = 0.0, se = 0.0;
    check(afgm_report_mean_auc(rep, m, &mean, &se), "bench");
    std::printf("%-7s mean_auc=%.4f se=%.4f\n", name.ptr, mean, se);
  }
  CString report;
  check(afgm_report_json(rep, &report.ptr), "bench");
  out.write("report.json", report.str());

  Json config;
  config["scenario"] = Json::parse(sc_text);
  config["fit"] = fit_text.empty() ? Json(nullptr) : Json::parse(fit_text);
  Json args;
  args["scenario"] = a.scenario;
  args["fit_config"] = a.fit_config;
  args["methods"] = a.methods;
  args["replicates"] = a.replicates;
  args["lambdas"] = a.lambdas;
  args["threads"] = threads;
  args["out"] = a.out;
  write_manifest(out, "bench", args, config, a.seed, started);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Additive functional graphical models: simulate, fit and benchmark"};
  app.set_version_flag("--version", std::string(afgm_version()));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a simulated scenario and its true graph");
  simulate->add_option("--config", sim.config, "Scenario config JSON")->required();
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--seed", sim.seed, "Override the config seed");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Estimate the graph from a dataset");
  fit->add_option("--data", fa.data, "Dataset CSV (subject,node,time_index,value)")->required();
  fit->add_option("--grid", fa.grid, "Grid JSON (defaults to grid.json next to the data)");
  fit->add_option("--config", fa.config, "Fit config JSON");
  fit->add_option("--out", fa.out, "Output directory")->required();
  fit->add_option("--method", fa.method, "afgm or linear");
  fit->add_option("--density", fa.density, "Pick the lambda whose edge density is closest to this");
  fit->add_option("--lambda-index", fa.lambda_index, "Pick a lambda by its grid index (0 = largest)");
  fit->add_option("--threads", fa.threads, "Worker threads (0 = all cores)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Replicated ROC/AUC benchmark on simulated scenarios");
  bench->add_option("--scenario", ba.scenario, "Scenario config JSON")->required();
  bench->add_option("--fit-config", ba.fit_config, "Fit config JSON (default: m_n fixed to the component count)");
  bench->add_option("--methods", ba.methods, "Comma-separated methods: afgm,linear");
  bench->add_option("--replicates", ba.replicates, "Number of replicates (>= 2)");
  bench->add_option("--lambdas", ba.lambdas, "Lambda grid size");
  bench->add_option("--seed", ba.seed, "Master seed");
  bench->add_option("--threads", ba.threads, "Worker threads (0 = all cores)");
  bench->add_option("--out", ba.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*fit) return cmd_fit(fa);
    if (*bench) return cmd_bench(ba);
  } catch (const CliError& e) {
    std::fprintf(stderr, "afgm: %s\n", e.message.c_str());
    return e.code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "afgm: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
