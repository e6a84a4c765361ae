#include "afgm.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "afgm/error.hpp"
#include "afgm/evalrep.hpp"
#include "afgm/io.hpp"
#include "afgm/version.hpp"

struct afgm_dataset {
  afgm::FunctionalDataset ds;
};
struct afgm_scenario {
  afgm::ScenarioConfig cfg;
  afgm::GeneratedData data;
};
struct afgm_fit {
  afgm::AfgmConfig cfg;
  std::vector<afgm::NeighborhoodFit> fits;
};
struct afgm_report {
  afgm::BenchmarkReport rep;
};

namespace {

thread_local std::string g_last_error;

afgm_status status_of(afgm::ErrorKind k) {
  switch (k) {
    case afgm::ErrorKind::invalid_argument: return AFGM_ERR_INVALID_ARGUMENT;
    case afgm::ErrorKind::precondition: return AFGM_ERR_PRECONDITION;
    case afgm::ErrorKind::degenerate: return AFGM_ERR_DEGENERATE;
    case afgm::ErrorKind::numerical: return AFGM_ERR_NUMERICAL;
    case afgm::ErrorKind::config: return AFGM_ERR_CONFIG;
    case afgm::ErrorKind::io: return AFGM_ERR_IO;
  }
  return AFGM_ERR_INTERNAL;
}

template <class Fn>
afgm_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return AFGM_OK;
  } catch (const afgm::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("json: ") + e.what();
    return AFGM_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AFGM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AFGM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return AFGM_ERR_INTERNAL;
  }
}

void need(const void* ptr, const char* name) {
  if (!ptr) afgm::fail(afgm::ErrorKind::invalid_argument, std::string(name) + " must not be null");
}

char* to_c_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) afgm::fail(afgm::ErrorKind::io, std::string("cannot open '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

afgm::AfgmConfig fit_config(const char* json) {
  if (!json || !*json) return {};
  return afgm::io::afgm_config_from_json(afgm::io::parse_json(json, "fit config"));
}

const afgm::NeighborhoodFit& first_fit(const afgm_fit* fit, std::size_t index) {
  need(fit, "fit");
  if (fit->fits.empty() || index >= fit->fits.front().lambdas.size())
    afgm::fail(afgm::ErrorKind::invalid_argument, "lambda index out of range");
  return fit->fits.front();
}

const afgm::MethodSummary& method_at(const afgm_report* rep, std::size_t method) {
  need(rep, "report");
  if (method >= rep->rep.methods.size()) afgm::fail(afgm::ErrorKind::invalid_argument, "method index out of range");
  return rep->rep.methods[method];
}

afgm_status run_fit(const afgm_dataset* ds, const char* config_json, size_t threads, afgm_fit** out,
                    afgm::FeatureKind kind) {
  return guarded([&] {
    need(ds, "dataset");
    need(out, "out");
    *out = nullptr;
    auto fit = std::make_unique<afgm_fit>();
    fit->cfg = fit_config(config_json);
    fit->cfg.threads = threads;
    const afgm::FunctionalDataset centered = ds->ds.centered() ? ds->ds : afgm::center_dataset(ds->ds);
    fit->fits = afgm::fit_neighborhoods(centered, fit->cfg, kind);
    *out = fit.release();
  });
}

}  // namespace

extern "C" {

const char* afgm_version(void) { return afgm::kVersion; }

const char* afgm_last_error(void) { return g_last_error.c_str(); }

const char* afgm_status_name(afgm_status status) {
  switch (status) {
    case AFGM_OK: return "ok";
    case AFGM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AFGM_ERR_PRECONDITION: return "precondition violated";
    case AFGM_ERR_DEGENERATE: return "degenerate input";
    case AFGM_ERR_NUMERICAL: return "numerical failure";
    case AFGM_ERR_CONFIG: return "configuration error";
    case AFGM_ERR_IO: return "i/o error";
    case AFGM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void afgm_string_free(char* s) { std::free(s); }

afgm_status afgm_dataset_read(const char* csv_path, const char* grid_path, afgm_dataset** out) {
  return guarded([&] {
    need(csv_path, "csv_path");
    need(grid_path, "grid_path");
    need(out, "out");
    *out = nullptr;
    const afgm::TimeGrid grid = afgm::io::grid_from_json(read_file(grid_path));
    auto ds = std::make_unique<afgm_dataset>();
    ds->ds = afgm::io::dataset_from_csv(read_file(csv_path), grid);
    *out = ds.release();
  });
}

afgm_status afgm_dataset_dims(const afgm_dataset* ds, size_t* n, size_t* p, size_t* T) {
  return guarded([&] {
    need(ds, "dataset");
    if (n) *n = ds->ds.n();
    if (p) *p = ds->ds.p();
    if (T) *T = ds->ds.T();
  });
}

afgm_status afgm_dataset_csv(const afgm_dataset* ds, char** csv) {
  return guarded([&] {
    need(ds, "dataset");
    need(csv, "csv");
    *csv = to_c_string(afgm::io::dataset_to_csv(ds->ds));
  });
}

afgm_status afgm_dataset_grid_json(const afgm_dataset* ds, char** json) {
  return guarded([&] {
    need(ds, "dataset");
    need(json, "json");
    *json = to_c_string(afgm::io::grid_to_json(ds->ds.grid()));
  });
}

void afgm_dataset_free(afgm_dataset* ds) { delete ds; }

afgm_status afgm_simulate(const char* scenario_json, int64_t seed_override, afgm_scenario** out) {
  return guarded([&] {
    need(scenario_json, "scenario_json");
    need(out, "out");
    *out = nullptr;
    auto sc = std::make_unique<afgm_scenario>();
    sc->cfg = afgm::io::scenario_from_json(afgm::io::parse_json(scenario_json, "scenario config"));
    if (seed_override >= 0) sc->cfg.seed = static_cast<std::uint64_t>(seed_override);
    sc->data = afgm::generate_scenario(sc->cfg);
    *out = sc.release();
  });
}

afgm_status afgm_scenario_dataset(const afgm_scenario* sc, afgm_dataset** out) {
  return guarded([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = new afgm_dataset{sc->data.dataset};
  });
}

afgm_status afgm_scenario_truth_json(const afgm_scenario* sc, char** json) {
  return guarded([&] {
    need(sc, "scenario");
    need(json, "json");
    *json = to_c_string(afgm::io::dump_json(afgm::io::graph_to_json(sc->data.truth)));
  });
}

afgm_status afgm_scenario_truth_csv(const afgm_scenario* sc, char** csv) {
  return guarded([&] {
    need(sc, "scenario");
    need(csv, "csv");
    *csv = to_c_string(afgm::io::graph_to_csv(sc->data.truth));
  });
}

afgm_status afgm_scenario_dag_json(const afgm_scenario* sc, char** json) {
  return guarded([&] {
    need(sc, "scenario");
    need(json, "json");
    *json = to_c_string(afgm::io::dump_json(afgm::io::dag_to_json(sc->data.dag)));
  });
}

afgm_status afgm_scenario_config_json(const afgm_scenario* sc, char** json) {
  return guarded([&] {
    need(sc, "scenario");
    need(json, "json");
    *json = to_c_string(afgm::io::dump_json(afgm::io::scenario_to_json(sc->cfg)));
  });
}

void afgm_scenario_free(afgm_scenario* sc) { delete sc; }

afgm_status afgm_fit_run(const afgm_dataset* ds, const char* config_json, size_t threads, afgm_fit** out) {
  return run_fit(ds, config_json, threads, out, afgm::FeatureKind::spline);
}

afgm_status afgm_fit_linear_run(const afgm_dataset* ds, const char* config_json, size_t threads, afgm_fit** out) {
  return run_fit(ds, config_json, threads, out, afgm::FeatureKind::linear);
}

afgm_status afgm_fit_lambda_count(const afgm_fit* fit, size_t* count) {
  return guarded([&] {
    need(fit, "fit");
    need(count, "count");
    *count = fit->fits.empty() ? 0 : fit->fits.front().lambdas.size();
  });
}

afgm_status afgm_fit_lambda(const afgm_fit* fit, size_t index, double* lambda) {
  return guarded([&] {
    need(lambda, "lambda");
    *lambda = first_fit(fit, index).lambdas[index];
  });
}

afgm_status afgm_fit_select_density(const afgm_fit* fit, double density, size_t* index) {
  return guarded([&] {
    need(fit, "fit");
    need(index, "index");
    *index = afgm::select_lambda_by_density(fit->fits, density);
  });
}

afgm_status afgm_fit_edge_count(const afgm_fit* fit, size_t index, size_t* count) {
  return guarded([&] {
    first_fit(fit, index);
    need(count, "count");
    *count = afgm::edges_from_fits(fit->fits, index).edge_count();
  });
}

afgm_status afgm_fit_graph_json(const afgm_fit* fit, size_t index, char** json) {
  return guarded([&] {
    first_fit(fit, index);
    need(json, "json");
    *json = to_c_string(afgm::io::dump_json(afgm::io::graph_to_json(afgm::edges_from_fits(fit->fits, index))));
  });
}

afgm_status afgm_fit_graph_csv(const afgm_fit* fit, size_t index, char** csv) {
  return guarded([&] {
    first_fit(fit, index);
    need(csv, "csv");
    *csv = to_c_string(afgm::io::graph_to_csv(afgm::edges_from_fits(fit->fits, index)));
  });
}

afgm_status afgm_fit_block_norms_csv(const afgm_fit* fit, char** csv) {
  return guarded([&] {
    need(fit, "fit");
    need(csv, "csv");
    *csv = to_c_string(afgm::io::block_norms_csv(fit->fits));
  });
}

afgm_status afgm_fit_unconverged_count(const afgm_fit* fit, size_t index, size_t* count) {
  return guarded([&] {
    first_fit(fit, index);
    need(count, "count");
    std::size_t c = 0;
    for (const auto& f : fit->fits) c += f.converged[index] ? 0 : 1;
    *count = c;
  });
}

afgm_status afgm_fit_diagnostics_json(const afgm_fit* fit, char** json) {
  return guarded([&] {
    need(fit, "fit");
    need(json, "json");
    afgm::io::Json j;
    j["config"] = afgm::io::afgm_config_to_json(fit->cfg);
    j["m_n"] = fit->fits.empty() ? 0 : fit->fits.front().m_n;
    j["k_n"] = fit->fits.empty() ? 0 : fit->fits.front().k_n;
    j["lambdas"] = fit->fits.empty() ? std::vector<double>{} : fit->fits.front().lambdas;
    afgm::io::Json nodes = afgm::io::Json::array();
    for (const auto& f : fit->fits) {
      afgm::io::Json nj;
      nj["node"] = f.target + 1;
      std::vector<bool> conv(f.converged.begin(), f.converged.end());
      nj["converged"] = conv;
      nj["sweeps"] = f.sweeps;
      nodes.push_back(std::move(nj));
    }
    j["nodes"] = std::move(nodes);
    *json = to_c_string(afgm::io::dump_json(j));
  });
}

void afgm_fit_free(afgm_fit* fit) { delete fit; }

afgm_status afgm_bench_run(const char* scenario_json, const char* fit_config_json, const char* methods,
                           size_t replicates, size_t lambdas, uint64_t seed, size_t threads, afgm_report** out) {
  return guarded([&] {
    need(scenario_json, "scenario_json");
    need(out, "out");
    *out = nullptr;
    const afgm::ScenarioConfig sc = afgm::io::scenario_from_json(afgm::io::parse_json(scenario_json, "scenario config"));
    afgm::BenchmarkOptions opts;
    if (fit_config_json && *fit_config_json) {
      opts.fit = fit_config(fit_config_json);
    } else {
      opts.fit.m_override = sc.n_components;
    }
    if (methods && *methods) {
      opts.methods.clear();
      std::stringstream ss(methods);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) opts.methods.push_back(afgm::parse_method(item));
    }
    opts.replicates = replicates;
    opts.lambda_count = lambdas;
    opts.seed = seed;
    opts.threads = threads;
    auto rep = std::make_unique<afgm_report>();
    rep->rep = afgm::run_benchmark(sc, opts);
    *out = rep.release();
  });
}

afgm_status afgm_report_json(const afgm_report* rep, char** json) {
  return guarded([&] {
    need(rep, "report");
    need(json, "json");
    *json = to_c_string(afgm::io::dump_json(afgm::io::report_to_json(rep->rep)));
  });
}

afgm_status afgm_report_method_count(const afgm_report* rep, size_t* count) {
  return guarded([&] {
    need(rep, "report");
    need(count, "count");
    *count = rep->rep.methods.size();
  });
}

afgm_status afgm_report_method_name(const afgm_report* rep, size_t method, char** name) {
  return guarded([&] {
    need(name, "name");
    *name = to_c_string(afgm::method_name(method_at(rep, method).method));
  });
}

afgm_status afgm_report_mean_auc(const afgm_report* rep, size_t method, double* mean, double* se) {
  return guarded([&] {
    const auto& m = method_at(rep, method);
    if (mean) *mean = m.mean_auc;
    if (se) *se = m.se_auc;
  });
}

afgm_status afgm_report_replicate_count(const afgm_report* rep, size_t* count) {
  return guarded([&] {
    need(rep, "report");
    need(count, "count");
    *count = rep->rep.replicates;
  });
}

afgm_status afgm_report_roc_csv(const afgm_report* rep, size_t method, size_t replicate, char** csv) {
  return guarded([&] {
    const auto& m = method_at(rep, method);
    need(csv, "csv");
    if (replicate >= m.curves.size()) afgm::fail(afgm::ErrorKind::invalid_argument, "replicate index out of range");
    *csv = to_c_string(afgm::io::roc_to_csv(m.curves[replicate]));
  });
}

void afgm_report_free(afgm_report* rep) { delete rep; }

}  // extern "C"
