#include "afgm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "afgm/error.hpp"

namespace afgm::io {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) {
          out += nl;
          out += pad;
        }
        dump_rec(e, indent, depth + 1, out);
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(ErrorKind::config, "config field '" + field + "': " + what);
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::config, where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) config_error(it.key(), "unknown field in " + where);
}

std::size_t get_count(const Json& j, const std::string& key, std::size_t min_value) {
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
    config_error(key, "expected an integer >= " + std::to_string(min_value));
  return v.get<std::size_t>();
}

double get_real(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number()) config_error(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) config_error(key, "expected a finite number");
  return x;
}

std::uint64_t get_seed(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    config_error(key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_boolean()) config_error(key, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (!v.is_string()) config_error(key, "expected a string");
  return v.get<std::string>();
}

[[noreturn]] void csv_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::io, "dataset csv line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += "\n";
  return out;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::config, what + ": invalid JSON (" + e.what() + ")");
  }
}

std::string dataset_to_csv(const FunctionalDataset& ds) {
  std::string out = "subject,node,time_index,value\n";
  out.reserve(out.size() + ds.n() * ds.p() * ds.T() * 32);
  for (std::size_t u = 0; u < ds.n(); ++u)
    for (std::size_t i = 0; i < ds.p(); ++i)
      for (std::size_t s = 0; s < ds.T(); ++s) {
        out += std::to_string(u + 1);
        out += ',';
        out += std::to_string(i + 1);
        out += ',';
        out += std::to_string(s + 1);
        out += ',';
        out += fmt17(ds.at(u, i, s));
        out += '\n';
      }
  return out;
}

FunctionalDataset dataset_from_csv(const std::string& text, const TimeGrid& grid) {
  struct Row {
    std::size_t u, i, s;
    double v;
  };
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0, p = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != "subject,node,time_index,value") csv_error(1, "expected header 'subject,node,time_index,value'");
      continue;
    }
    if (line.empty()) continue;
    std::size_t fields[3];
    const char* b = line.data();
    const char* e = line.data() + line.size();
    for (auto& f : fields) {
      auto [ptr, ec] = std::from_chars(b, e, f);
      if (ec != std::errc() || ptr == e || *ptr != ',') csv_error(lineno, "expected 4 comma-separated fields");
      b = ptr + 1;
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(std::string(b, e), &used);
      if (used != static_cast<std::size_t>(e - b)) csv_error(lineno, "trailing characters after value");
    } catch (const std::logic_error&) {
      csv_error(lineno, "unparseable value");
    }
    if (!std::isfinite(v)) csv_error(lineno, "non-finite value");
    if (fields[0] == 0 || fields[1] == 0 || fields[2] == 0) csv_error(lineno, "indices are 1-based");
    if (fields[2] > grid.size()) csv_error(lineno, "time_index exceeds the grid length");
    n = std::max(n, fields[0]);
    p = std::max(p, fields[1]);
    rows.push_back({fields[0] - 1, fields[1] - 1, fields[2] - 1, v});
  }
  if (rows.empty()) fail(ErrorKind::io, "dataset csv has no data rows");
  const std::size_t T = grid.size();
  if (rows.size() != n * p * T)
    fail(ErrorKind::io, "dataset csv is ragged: expected " + std::to_string(n * p * T) + " rows for n=" +
                            std::to_string(n) + ", p=" + std::to_string(p) + ", T=" + std::to_string(T) +
                            " but found " + std::to_string(rows.size()));
  std::vector<double> values(n * p * T, 0.0);
  std::vector<bool> seen(n * p * T, false);
  for (const auto& r : rows) {
    const std::size_t idx = (r.u * p + r.i) * T + r.s;
    if (seen[idx]) fail(ErrorKind::io, "dataset csv is ragged: duplicate entry for subject " + std::to_string(r.u + 1) +
                                           ", node " + std::to_string(r.i + 1) + ", time " + std::to_string(r.s + 1));
    seen[idx] = true;
    values[idx] = r.v;
  }
  return FunctionalDataset(grid, n, p, std::move(values), false);
}

std::string grid_to_json(const TimeGrid& grid) {
  Json j;
  j["points"] = grid.points();
  return dump_json(j);
}

TimeGrid grid_from_json(const std::string& text) {
  const Json j = parse_json(text, "grid");
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array())
    fail(ErrorKind::io, "grid json must be an object with a 'points' array");
  std::vector<double> pts;
  for (const auto& v : j["points"]) {
    if (!v.is_number()) fail(ErrorKind::io, "grid json: points must be numbers");
    pts.push_back(v.get<double>());
  }
  return make_trapezoid_grid(std::move(pts));
}

Json graph_to_json(const Graph& g) {
  Json j;
  j["p"] = g.p();
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back(Json::array({a, b}));
  j["edges"] = std::move(edges);
  return j;
}

Graph graph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("edges"))
    fail(ErrorKind::io, "graph json must have 'p' and 'edges'");
  Graph g(j.at("p").get<std::size_t>());
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) fail(ErrorKind::io, "graph json: each edge must be a pair");
    g.add_edge(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return g;
}

std::string graph_to_csv(const Graph& g) {
  std::string out = "i,j\n";
  for (const auto& [a, b] : g.edges()) out += std::to_string(a) + "," + std::to_string(b) + "\n";
  return out;
}

Json dag_to_json(const Dag& d) {
  Json j;
  j["p"] = d.p();
  Json arcs = Json::array();
  for (const auto& [a, b] : d.arcs()) arcs.push_back(Json::array({a, b}));
  j["arcs"] = std::move(arcs);
  return j;
}

std::string block_norms_csv(const std::vector<NeighborhoodFit>& fits) {
  std::string out = "lambda_index,lambda,target,source,norm\n";
  for (const auto& f : fits)
    for (std::size_t l = 0; l < f.norms.size(); ++l)
      for (std::size_t j = 0; j < f.norms[l].size(); ++j) {
        if (j == f.target) continue;
        out += std::to_string(l) + "," + fmt17(f.lambdas[l]) + "," + std::to_string(f.target + 1) + "," +
               std::to_string(j + 1) + "," + fmt17(f.norms[l][j]) + "\n";
      }
  return out;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "lambda,fp,tp\n";
  for (std::size_t l = 0; l < curve.points.size(); ++l)
    out += fmt17(curve.lambdas[l]) + "," + fmt17(curve.points[l].fp) + "," + fmt17(curve.points[l].tp) + "\n";
  return out;
}

Json report_to_json(const BenchmarkReport& rep) {
  Json j;
  j["model"] = model_name(rep.model);
  j["replicates"] = rep.replicates;
  j["master_seed"] = rep.master_seed;
  j["seeds"] = rep.seeds;
  Json results = Json::array();
  for (const auto& m : rep.methods) {
    Json r;
    r["model"] = model_name(rep.model);
    r["method"] = method_name(m.method);
    r["mean_auc"] = m.mean_auc;
    r["se_auc"] = m.se_auc;
    r["replicates"] = rep.replicates;
    r["seeds"] = rep.seeds;
    r["aucs"] = m.aucs;
    results.push_back(std::move(r));
  }
  j["results"] = std::move(results);
  return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
  reject_unknown(j,
                 {"model", "p", "n", "T", "dag_density", "dag_edge_count", "noise_sd_obs", "score_noise_sd",
                  "n_components", "smoothing_basis_size", "smoothing_order", "standardize_child_scores", "assembly",
                  "seed"},
                 "scenario config");
  ScenarioConfig c;
  if (j.contains("model")) {
    const Json& m = j["model"];
    if (m.is_string())
      c.model = parse_model(m.get<std::string>());
    else if (m.is_number_integer())
      c.model = parse_model(std::to_string(m.get<int>()));
    else
      config_error("model", "expected \"I\", \"II\" or \"III\"");
  }
  if (j.contains("p")) c.p = get_count(j, "p", 2);
  if (j.contains("n")) c.n = get_count(j, "n", 2);
  if (j.contains("T")) c.T = get_count(j, "T", 2);
  if (j.contains("dag_density")) {
    c.dag_density = get_real(j, "dag_density");
    if (c.dag_density < 0.0 || c.dag_density > 1.0) config_error("dag_density", "must lie in [0, 1]");
  }
  if (j.contains("dag_edge_count") && !j["dag_edge_count"].is_null()) c.dag_edge_count = get_count(j, "dag_edge_count", 0);
  if (j.contains("noise_sd_obs")) {
    c.noise_sd_obs = get_real(j, "noise_sd_obs");
    if (c.noise_sd_obs < 0.0) config_error("noise_sd_obs", "must be nonnegative");
  }
  if (j.contains("score_noise_sd") && !j["score_noise_sd"].is_null()) {
    c.score_noise_sd = get_real(j, "score_noise_sd");
    if (*c.score_noise_sd < 0.0) config_error("score_noise_sd", "must be nonnegative");
  }
  if (j.contains("n_components")) {
    c.n_components = get_count(j, "n_components", 1);
    if (c.n_components > 5) config_error("n_components", "must lie in 1..5");
  }
  if (j.contains("smoothing_basis_size")) c.smoothing_basis_size = get_count(j, "smoothing_basis_size", 2);
  if (j.contains("smoothing_order")) c.smoothing_order = static_cast<int>(get_count(j, "smoothing_order", 2));
  if (c.smoothing_basis_size < static_cast<std::size_t>(c.smoothing_order))
    config_error("smoothing_basis_size", "must be at least smoothing_order");
  if (j.contains("standardize_child_scores")) c.standardize_child_scores = get_bool(j, "standardize_child_scores");
  if (j.contains("assembly")) {
    const std::string a = get_string(j, "assembly");
    if (a == "literal")
      c.assembly = Assembly::literal;
    else if (a == "karhunen_loeve")
      c.assembly = Assembly::karhunen_loeve;
    else
      config_error("assembly", "expected \"literal\" or \"karhunen_loeve\"");
  }
  if (j.contains("seed")) c.seed = get_seed(j, "seed");
  return c;
}

Json scenario_to_json(const ScenarioConfig& c) {
  Json j;
  j["model"] = model_name(c.model);
  j["p"] = c.p;
  j["n"] = c.n;
  j["T"] = c.T;
  j["dag_density"] = c.dag_density;
  j["dag_edge_count"] = c.dag_edge_count ? Json(*c.dag_edge_count) : Json(nullptr);
  j["noise_sd_obs"] = c.noise_sd_obs;
  j["score_noise_sd"] = c.effective_score_noise_sd();
  j["n_components"] = c.n_components;
  j["smoothing_basis_size"] = c.smoothing_basis_size;
  j["smoothing_order"] = c.smoothing_order;
  j["standardize_child_scores"] = c.standardize_child_scores;
  j["assembly"] = c.assembly == Assembly::literal ? "literal" : "karhunen_loeve";
  j["seed"] = c.seed;
  return j;
}

AfgmConfig afgm_config_from_json(const Json& j) {
  reject_unknown(j,
                 {"variance_fraction", "m_override", "spline_degree", "max_components", "response", "lambda_count",
                  "lambda_min_ratio", "lambdas", "solver", "seed"},
                 "fit config");
  AfgmConfig c;
  if (j.contains("variance_fraction")) {
    c.variance_fraction = get_real(j, "variance_fraction");
    if (!(c.variance_fraction > 0.0 && c.variance_fraction < 1.0)) config_error("variance_fraction", "must lie in (0, 1)");
  }
  if (j.contains("m_override") && !j["m_override"].is_null()) c.m_override = get_count(j, "m_override", 1);
  if (j.contains("spline_degree")) c.spline_degree = static_cast<int>(get_count(j, "spline_degree", 1));
  if (j.contains("max_components")) c.max_components = get_count(j, "max_components", 1);
  if (j.contains("response")) {
    const std::string r = get_string(j, "response");
    if (r == "scaled")
      c.response = ResponseScores::scaled;
    else if (r == "transformed")
      c.response = ResponseScores::transformed;
    else
      config_error("response", "expected \"scaled\" or \"transformed\"");
  }
  if (j.contains("lambda_count")) c.lambda_grid.count = get_count(j, "lambda_count", 1);
  if (j.contains("lambda_min_ratio")) {
    c.lambda_grid.min_ratio = get_real(j, "lambda_min_ratio");
    if (!(c.lambda_grid.min_ratio > 0.0 && c.lambda_grid.min_ratio < 1.0)) config_error("lambda_min_ratio", "must lie in (0, 1)");
  }
  if (j.contains("lambdas") && !j["lambdas"].is_null()) {
    if (!j["lambdas"].is_array()) config_error("lambdas", "expected an array of numbers");
    for (const auto& v : j["lambdas"]) {
      if (!v.is_number()) config_error("lambdas", "expected an array of numbers");
      c.lambda_grid.explicit_values.push_back(v.get<double>());
    }
    for (std::size_t l = 0; l < c.lambda_grid.explicit_values.size(); ++l) {
      if (!(c.lambda_grid.explicit_values[l] > 0.0)) config_error("lambdas", "values must be positive");
      if (l > 0 && !(c.lambda_grid.explicit_values[l] < c.lambda_grid.explicit_values[l - 1]))
        config_error("lambdas", "values must be strictly descending");
    }
  }
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    reject_unknown(s, {"tol", "max_sweeps", "kkt_tol", "update"}, "solver config");
    if (s.contains("tol")) {
      c.solver.tol = get_real(s, "tol");
      if (!(c.solver.tol > 0.0)) config_error("solver.tol", "must be positive");
    }
    if (s.contains("max_sweeps")) c.solver.max_sweeps = get_count(s, "max_sweeps", 1);
    if (s.contains("kkt_tol")) {
      c.solver.kkt_tol = get_real(s, "kkt_tol");
      if (!(c.solver.kkt_tol > 0.0)) config_error("solver.kkt_tol", "must be positive");
    }
    if (s.contains("update")) {
      const std::string u = get_string(s, "update");
      if (u == "exact")
        c.solver.update = BlockUpdate::exact;
      else if (u == "proximal")
        c.solver.update = BlockUpdate::proximal;
      else
        config_error("solver.update", "expected \"exact\" or \"proximal\"");
    }
  }
  if (j.contains("seed")) c.seed = get_seed(j, "seed");
  return c;
}

Json afgm_config_to_json(const AfgmConfig& c) {
  Json j;
  j["variance_fraction"] = c.variance_fraction;
  j["m_override"] = c.m_override ? Json(*c.m_override) : Json(nullptr);
  j["spline_degree"] = c.spline_degree;
  j["max_components"] = c.max_components;
  j["response"] = c.response == ResponseScores::scaled ? "scaled" : "transformed";
  j["lambda_count"] = c.lambda_grid.count;
  j["lambda_min_ratio"] = c.lambda_grid.min_ratio;
  j["lambdas"] = c.lambda_grid.explicit_values.empty() ? Json(nullptr) : Json(c.lambda_grid.explicit_values);
  Json s;
  s["tol"] = c.solver.tol;
  s["max_sweeps"] = c.solver.max_sweeps;
  s["kkt_tol"] = c.solver.kkt_tol;
  s["update"] = c.solver.update == BlockUpdate::exact ? "exact" : "proximal";
  j["solver"] = std::move(s);
  j["seed"] = c.seed;
  return j;
}

}  // namespace afgm::io
