#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "afgm/evalrep.hpp"
#include "afgm/fdata.hpp"
#include "afgm/graph.hpp"
#include "afgm/simgen.hpp"

namespace afgm::io {

using Json = nlohmann::ordered_json;

/// Serializes JSON with every floating-point number printed to 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

// Long-form dataset CSV: subject,node,time_index,value (all indices 1-based).
std::string dataset_to_csv(const FunctionalDataset& ds);
FunctionalDataset dataset_from_csv(const std::string& text, const TimeGrid& grid);

std::string grid_to_json(const TimeGrid& grid);
TimeGrid grid_from_json(const std::string& text);

Json graph_to_json(const Graph& g);
Graph graph_from_json(const Json& j);
std::string graph_to_csv(const Graph& g);

Json dag_to_json(const Dag& d);

/// lambda_index,lambda,target,source,norm for every ordered pair and lambda.
std::string block_norms_csv(const std::vector<NeighborhoodFit>& fits);

std::string roc_to_csv(const RocCurve& curve);
Json report_to_json(const BenchmarkReport& rep);

ScenarioConfig scenario_from_json(const Json& j);
Json scenario_to_json(const ScenarioConfig& cfg);

AfgmConfig afgm_config_from_json(const Json& j);
Json afgm_config_to_json(const AfgmConfig& cfg);

/// Parses text as JSON; syntax errors become config errors.
Json parse_json(const std::string& text, const std::string& what);

}  // namespace afgm::io
