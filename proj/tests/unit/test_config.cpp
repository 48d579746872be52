#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "critlab/error.hpp"
#include "critlab/io.hpp"
#include "helpers.hpp"

using namespace critlab;
using namespace testing;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "dimension": 1,
    "h": 0.25,
    "exhaustion": {"growth": "geometric", "r0": 1, "K": 4},
    "markers": {"x0": [0], "x1": [0.5]}
  })");
}

ErrorCode code_of(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("defaults are resolved and echoed") {
  const ProblemConfig c = parse_config(minimal());
  CHECK(c.lo[0] == -8.0);
  CHECK(c.hi[0] == 8.0);
  const json out = to_json(c);
  CHECK(out["bbox"]["hi"][0] == 8.0);
  CHECK(out["markers"]["b0_radius"] == 0.5);
  CHECK(out["tolerances"]["sub"] == 0.1);
  CHECK(out["potential"]["type"] == "free");
  // the echo parses back to itself
  CHECK(to_json(parse_config(out)) == out);
  const Problem p = build_problem(c);
  CHECK(p.ex.levels() == 4);
}

TEST_CASE("schema violations") {
  json j = minimal();
  j["markers"]["x1"] = json::array({0});
  CHECK(code_of(j) == ErrorCode::schema);
  j = minimal();
  j["extra"] = 1;
  CHECK(code_of(j) == ErrorCode::schema);
  j = minimal();
  j["exhaustion"]["growht"] = "linear";
  CHECK(code_of(j) == ErrorCode::schema);
  j = minimal();
  j.erase("markers");
  CHECK(code_of(j) == ErrorCode::schema);
  j = minimal();
  j["dimension"] = 4;
  CHECK(code_of(j) == ErrorCode::schema);
  j = minimal();
  j["markers"]["x0"] = json::array({0, 0});
  CHECK(code_of(j) == ErrorCode::schema);
  j = minimal();
  j["potential"] = {{"type", "cubic"}};
  CHECK(code_of(j) == ErrorCode::schema);
  j = minimal();
  j["tolerances"] = {{"crit", 0.5}};
  CHECK(code_of(j) == ErrorCode::schema);
}

TEST_CASE("tolerance overrides") {
  ProblemConfig c = parse_config(minimal());
  apply_tolerance_overrides(c, json{{"eig", 1e-9}, {"settle", 0.05}});
  CHECK(c.tol.eig == 1e-9);
  CHECK(c.tol.settle == 0.05);
  CHECK_THROWS_AS(apply_tolerance_overrides(c, json{{"bogus", 1}}), Error);
  CHECK(eig_options(c.tol).tol == 1e-9);
}

TEST_CASE("field CSV round trip") {
  const Problem p = build_problem(parse_config(minimal()));
  GridFunction f(p.ex.size());
  for (std::size_t l = 0; l < f.size(); ++l) f[l] = 0.1 * static_cast<double>(l) - 1.0 / 3;
  const auto path = std::filesystem::temp_directory_path() / "critlab_field_test.csv";
  write_field_csv(path, p.ex.outer(), f);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,x,value");
  CHECK(read_field_csv(path, p.ex.outer()) == f);

  FieldSpec spec(FieldSpec::Kind::file);
  spec.path = path.string();
  CHECK(evaluate_field(spec, p.ex) == f);

  std::ofstream bad(path);
  bad << "index,x,value\n0,3.0,1\n";
  bad.close();
  CHECK_THROWS_AS(read_field_csv(path, p.ex.outer()), Error);
  std::filesystem::remove(path);
}

TEST_CASE("analytic fields") {
  const Problem p = build_problem(parse_config(minimal()));
  FieldSpec b(FieldSpec::Kind::bump);
  b.radius = 1.0;
  const GridFunction v = evaluate_field(b, p.ex);
  const auto at = [&](double x) { return v[p.ex.outer().local(p.ex.grid().nearest({x, 0, 0}))]; };
  CHECK(at(0) == 1.0);
  CHECK(at(0.5) == doctest::Approx(0.5625));
  CHECK(at(1.0) == 0.0);
  b.kind = FieldSpec::Kind::odd_bump;
  const GridFunction o = evaluate_field(b, p.ex);
  CHECK(o[p.ex.outer().local(p.ex.grid().nearest({-0.5, 0, 0}))] == doctest::Approx(-0.5625));
  CHECK_THROWS_AS(evaluate_field(FieldSpec(FieldSpec::Kind::construct), p.ex), Error);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"laplace_d1.json", "laplace_d2.json", "laplace_d3.json",
                           "hardy_c020.json", "hardy_c025.json", "hardy_c030.json",
                           "interval_refine.json"})
    CHECK_NOTHROW(load_config(std::string(CRITLAB_SOURCE_DIR) + "/configs/" + name));
}
