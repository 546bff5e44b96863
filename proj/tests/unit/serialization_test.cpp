#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "tvcs/serialization.hpp"

using namespace tvcs;

TEST_SUITE("serialization") {

TEST_CASE("doubles round trip through seventeen digits") {
  Rng rng(1);
  std::uniform_real_distribution<double> unit(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double x = unit(rng) * std::pow(10.0, k % 20 - 10);
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("structure documents") {
  const auto s = structure_from_json(
      R"({"p": 4, "overall": 2, "view1": [{"indices": [0, 1], "budget": 1}, {"indices": [2, 3], "budget": 1}]})");
  CHECK(s.dimension == 4);
  CHECK(s.overall_budget == 2);
  CHECK(s.view1.size() == 2);
  CHECK(s.view2.empty());
  const auto back = structure_from_json(structure_to_json(s));
  CHECK(structure_to_json(back) == structure_to_json(s));

  CHECK(structure_from_json(R"({"p": 3})").overall_budget == 3);
  CHECK_THROWS_AS(structure_from_json(R"({"overall": 3})"), FormatError);
  CHECK_THROWS_AS(structure_from_json(R"({"p": 0})"), FormatError);
  CHECK_THROWS_AS(structure_from_json(R"({"p": 3, "view1": [{"indices": [-1], "budget": 1}]})"), FormatError);
  CHECK_THROWS_AS(structure_from_json(R"({"p": 3, "view2": [{"indices": [0]}]})"), FormatError);
  CHECK_THROWS_AS(structure_from_json(R"({"p": 3, "view1": {}})"), FormatError);
  CHECK_THROWS_AS(structure_from_json("[1, 2"), FormatError);
  try {
    structure_from_json(R"({"p": 3, "view1": [{"indices": [0], "budget": "one"}]})");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("view1[0]") != std::string::npos);
    CHECK(std::string(e.what()).find("budget") != std::string::npos);
  }
}

TEST_CASE("vector documents") {
  CHECK(parse_vector("[3, 1, 2.5, -5]") == std::vector<double>{3, 1, 2.5, -5});
  CHECK(parse_vector(R"({"v": [1e-3, 2]})") == std::vector<double>{1e-3, 2});
  CHECK(parse_vector("3 1\n2,5\n") == std::vector<double>{3, 1, 2, 5});
  CHECK_THROWS_AS(parse_vector("[1, \"a\"]"), FormatError);
  CHECK_THROWS_AS(parse_vector(R"({"w": [1]})"), FormatError);
  CHECK_THROWS_AS(parse_vector("1 two 3"), FormatError);
}

TEST_CASE("regression data documents") {
  RegressionData d;
  d.rows = 1;
  d.cols = 2;
  d.features.resize(2, 2);
  d.features << 0.1, 0.2, 1.0 / 3.0, -4;
  d.responses.resize(2);
  d.responses << 1, -1;
  const auto back = regression_data_from_json(regression_data_to_json(d));
  CHECK(back.features == d.features);
  CHECK(back.responses == d.responses);
  CHECK_THROWS_AS(regression_data_from_json(R"({"rows": 1, "cols": 2, "features": [[1]], "responses": [1]})"),
                  FormatError);
  CHECK_THROWS_AS(regression_data_from_json(R"({"rows": 1, "cols": 1, "features": [[1]], "responses": [1, 2]})"),
                  FormatError);
}

TEST_CASE("quality matrix and time series text") {
  const auto model = crowd_model_from_csv("0.6,0.7,0.8\n0.9 0.55 0.65\n");
  CHECK(model.workers() == 2);
  CHECK(model.tasks() == 3);
  CHECK(model.quality(1, 1) == 0.55);
  CHECK(model.priors == std::vector<double>(3, 0.5));
  CHECK_THROWS_AS(crowd_model_from_csv("0.6,0.7\n0.9\n"), FormatError);
  CHECK_THROWS_AS(crowd_model_from_csv("0.6,1.0\n"), FormatError);
  CHECK_THROWS_AS(crowd_model_from_csv(""), FormatError);

  const auto data = grn_data_from_csv("1 0\n2 1\n4 3\n\n10 5\n11 5\n");
  REQUIRE(data.series.size() == 2);
  CHECK(data.series[0].cols() == 3);
  CHECK(data.series[1](0, 1) == 11);
  CHECK(data.genes() == 2);
  CHECK_THROWS_AS(grn_data_from_csv("1 0\n2\n"), FormatError);
  CHECK_THROWS_AS(grn_data_from_csv("1 0\n\n2 1\n"), FormatError);
}

TEST_CASE("result documents") {
  ProjectionResult r;
  r.support = {1, 0};
  r.projected = {0.1, 0.0};
  r.iterations_used = 12;
  const auto doc = nlohmann::json::parse(projection_result_to_json(r));
  CHECK(doc["support"] == nlohmann::json::array({1, 0}));
  CHECK(doc["projected"][0].get<double>() == 0.1);
  CHECK(doc["iterations"] == 12);
  for (const char* key : {"gap", "contraction_ratio", "perturbed"}) CHECK(doc.contains(key));

  SolveTrace t;
  t.objective = {2.0, 1.0 / 3.0};
  t.supports = {{0, 0}, {1, 0}};
  t.seconds = {0.0, 0.5};
  t.final_w = {0.25, 0.0};
  t.iterations = 1;
  CHECK(solve_trace_to_csv(t) == "iteration,objective\n0,2\n1,0.33333333333333331\n");
  const auto trace = nlohmann::json::parse(solve_trace_to_json(t));
  CHECK(trace["objective"][1].get<double>() == 1.0 / 3.0);
  CHECK(trace["supports"][1] == nlohmann::json::array({1, 0}));
}

TEST_CASE("atomic writes leave no temporary file") {
  const auto dir = std::filesystem::temp_directory_path() / "tvcs_unit_atomic";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  CHECK(read_text_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  CHECK_THROWS(write_file_atomic(dir / "missing" / "out.txt", "x"));
  CHECK_THROWS(read_text_file(dir / "nothing.txt"));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
