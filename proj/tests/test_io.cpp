#include <string>

#include "afgm/error.hpp"
#include "afgm/io.hpp"
#include "afgm/simgen.hpp"
#include "doctest.h"

using namespace afgm;

TEST_CASE("JSON numbers keep 17 significant digits") {
  io::Json j;
  j["x"] = 0.1;
  j["v"] = {1.0 / 3.0, 2.0};
  const std::string s = io::dump_json(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  auto back = io::parse_json(s, "test");
  CHECK(back["v"][0].get<double>() == 1.0 / 3.0);
  CHECK_THROWS_AS(io::parse_json("{oops", "test"), Error);
}

TEST_CASE("dataset CSV round trip") {
  auto grid = make_trapezoid_grid({0.0, 0.3, 1.0});
  FunctionalDataset ds(grid, 2, 2, {0.1, 0.2, 0.3, 1.0, 2.0, 3.0, -0.1, -0.2, -0.3, 1e-17, 2.5e10, -7.0});
  const std::string csv = io::dataset_to_csv(ds);
  CHECK(csv.rfind("subject,node,time_index,value\n", 0) == 0);
  auto back = io::dataset_from_csv(csv, grid);
  CHECK(back.values() == ds.values());
  CHECK(io::grid_from_json(io::grid_to_json(grid)).points() == grid.points());

  // Row order does not matter.
  std::string shuffled = "subject,node,time_index,value\n";
  shuffled += "2,2,3,-7\n";
  for (std::size_t u = 1; u <= 2; ++u)
    for (std::size_t i = 1; i <= 2; ++i)
      for (std::size_t s = 1; s <= 3; ++s)
        if (!(u == 2 && i == 2 && s == 3))
          shuffled += std::to_string(u) + "," + std::to_string(i) + "," + std::to_string(s) + ",0\n";
  CHECK(io::dataset_from_csv(shuffled, grid).at(1, 1, 2) == -7.0);
}

TEST_CASE("malformed dataset CSV is rejected") {
  auto grid = make_trapezoid_grid({0.0, 1.0});
  const std::string head = "subject,node,time_index,value\n";
  CHECK_THROWS_AS(io::dataset_from_csv(head, grid), Error);
  CHECK_THROWS_AS(io::dataset_from_csv(head + "1,1,1,0\n", grid), Error);
  CHECK_THROWS_AS(io::dataset_from_csv(head + "1,1,1,0\n1,1,1,0\n", grid), Error);
  CHECK_THROWS_AS(io::dataset_from_csv(head + "1,1,1,0\n1,1,3,0\n", grid), Error);
  CHECK_THROWS_AS(io::dataset_from_csv(head + "1,1,1,x\n1,1,2,0\n", grid), Error);
  CHECK_THROWS_AS(io::dataset_from_csv(head + "1,1,1\n1,1,2,0\n", grid), Error);
  CHECK_THROWS_AS(io::dataset_from_csv("a,b,c,d\n1,1,1,0\n1,1,2,0\n", grid), Error);
  try {
    io::dataset_from_csv(head + "1,1,1,0\n1,1,2,nope\n", grid);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("graph serialization") {
  Graph g(5);
  g.add_edge(4, 2);
  g.add_edge(1, 5);
  auto j = io::graph_to_json(g);
  CHECK(j["p"] == 5);
  CHECK(j["edges"][0][0] == 1);
  CHECK(j["edges"][1][0] == 2);
  CHECK(io::graph_from_json(io::parse_json(io::dump_json(j), "graph")) == g);
  CHECK(io::graph_to_csv(g) == "i,j\n1,5\n2,4\n");
  CHECK_THROWS_AS(io::graph_from_json(io::parse_json("{\"p\":3,\"edges\":[[1,1]]}", "graph")), Error);
}

TEST_CASE("scenario config parsing") {
  auto cfg = io::scenario_from_json(io::parse_json(
      R"({"model":"III","p":12,"n":40,"T":30,"dag_edge_count":4,"seed":9,"assembly":"karhunen_loeve"})", "cfg"));
  CHECK(cfg.model == SimModel::III);
  CHECK(cfg.p == 12);
  CHECK(cfg.dag_edge_count == 4u);
  CHECK(cfg.assembly == Assembly::karhunen_loeve);
  auto again = io::scenario_from_json(io::scenario_to_json(cfg));
  CHECK(io::dump_json(io::scenario_to_json(again)) == io::dump_json(io::scenario_to_json(cfg)));

  auto named = [](const char* text, const char* field) {
    try {
      io::scenario_from_json(io::parse_json(text, "cfg"));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
      CHECK(std::string(e.what()).find(field) != std::string::npos);
      return;
    }
    FAIL("expected a config error");
  };
  named(R"({"model":"V"})", "model");
  named(R"({"p":"ten"})", "p");
  named(R"({"p":-3})", "p");
  named(R"({"noise_sd_obs":-1})", "noise_sd_obs");
  named(R"({"colour":1})", "colour");
}

TEST_CASE("fit config parsing") {
  auto cfg = io::afgm_config_from_json(io::parse_json(
      R"({"m_override":5,"lambda_count":12,"lambda_min_ratio":0.05,"response":"scaled",
          "solver":{"tol":1e-7,"update":"proximal"}})",
      "cfg"));
  CHECK(cfg.m_override == 5u);
  CHECK(cfg.lambda_grid.count == 12);
  CHECK(cfg.lambda_grid.min_ratio == 0.05);
  CHECK(cfg.response == ResponseScores::scaled);
  CHECK(cfg.solver.tol == 1e-7);
  CHECK(cfg.solver.update == BlockUpdate::proximal);
  auto round = io::afgm_config_from_json(io::afgm_config_to_json(cfg));
  CHECK(io::dump_json(io::afgm_config_to_json(round)) == io::dump_json(io::afgm_config_to_json(cfg)));
  CHECK_THROWS_AS(io::afgm_config_from_json(io::parse_json(R"({"variance_fraction":1.5})", "cfg")), Error);
  CHECK_THROWS_AS(io::afgm_config_from_json(io::parse_json(R"({"solver":{"update":"newton"}})", "cfg")), Error);
  CHECK_THROWS_AS(io::afgm_config_from_json(io::parse_json(R"({"lambdas":[0.1,0.2]})", "cfg")), Error);
}
