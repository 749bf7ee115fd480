#include "oracles.hpp"

#include <jetx/io.hpp>

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace jetx;
using oracle::vec;

TEST_CASE("jet JSON round trip is exact") {
  for (int k = 0; k < 5; ++k) {
    const Jet j = oracle::random_jet(k % 3 + 1, 4, 2000 + k);
    const Jet back = parse_jet(dump_json(to_json(j)));
    REQUIRE(back.size() == j.size());
    CHECK(back.dim == j.dim);
    for (std::size_t i = 0; i < j.size(); ++i) {
      CHECK(back.values[i] == j.values[i]);
      CHECK(back.points[i] == j.points[i]);
      CHECK(back.gradients[i] == j.gradients[i]);
    }
  }
}

TEST_CASE("jet parsing") {
  const Jet j = parse_jet(R"({"dim": 2, "points": [[0, 0], [1, 0.5]], "values": [1, 2], "gradients": [[0, 1], [1, 1]]})");
  CHECK(j.size() == 2);
  CHECK(j.points[1](1) == 0.5);
  CHECK(j.gradients[0](1) == 1.0);
}

TEST_CASE("jet schema errors") {
  CHECK_THROWS_AS(parse_jet(R"({"points": [[0]], "values": [1], "gradients": [[0]]})"), SchemaError);
  CHECK_THROWS_AS(parse_jet(R"({"dim": 1, "points": [[0]], "values": [1]})"), SchemaError);
  CHECK_THROWS_AS(parse_jet(R"({"dim": 1, "points": 3, "values": [1], "gradients": [[0]]})"), SchemaError);
  CHECK_THROWS_AS(parse_jet(R"({"dim": 2, "points": [[0]], "values": [1], "gradients": [[0]]})"), SchemaError);
  CHECK_THROWS_AS(parse_jet(R"({"dim": 1, "points": [["a"]], "values": [1], "gradients": [[0]]})"), SchemaError);
  CHECK_THROWS_AS(parse_jet(R"({"dim": 1, "points": [[0], [1]], "values": [1], "gradients": [[0], [0]]})"), SchemaError);
  CHECK_THROWS_AS(parse_jet("[1, 2]"), SchemaError);
}

TEST_CASE("parse errors carry the line") {
  try {
    parse_jet("{\n  \"dim\": 1,\n  \"points\": [[0]\n  \"values\": [1]\n}");
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  try {
    parse_json_text("{\"a\": tru}");
    FAIL("no exception");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("modulus JSON") {
  const Modulus h = parse_modulus(R"({"kind": "holder", "alpha": 0.25})");
  CHECK(h.omega(16.0) == doctest::Approx(2.0));
  const Modulus l = parse_modulus(R"({"kind": "linear"})");
  CHECK(l.omega(3.0) == 3.0);
  const Modulus l2 = parse_modulus(R"({"kind": "linear", "slope": 2.5})");
  CHECK(l2.omega(2.0) == 5.0);
  const Modulus t = parse_modulus(R"({"kind": "tabulated", "samples": [[0, 0], [1, 1], [3, 2]]})");
  CHECK(t.omega(2.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(parse_modulus(R"({"kind": "cubic"})"), SchemaError);
  CHECK_THROWS_AS(parse_modulus(R"({"kind": "holder"})"), SchemaError);
  CHECK_THROWS_AS(parse_modulus(R"({"kind": "holder", "alpha": 1.5})"), SchemaError);
  CHECK_THROWS_AS(parse_modulus(R"({"kind": "tabulated", "samples": [[0, 0], [1, 2], [2, 1]]})"), SchemaError);
  for (const Modulus& m : {h, l2, t, Modulus::capped(h, 1.0)}) {
    const Modulus back = modulus_from_json(to_json(m));
    for (double x : {0.1, 0.7, 1.0, 2.5, 9.0}) CHECK(back.omega(x) == doctest::Approx(m.omega(x)).epsilon(1e-15));
  }
}

TEST_CASE("dump format") {
  json j;
  j["x"] = 0.1;
  j["v"] = json::array({1.5, 2.0});
  j["big"] = json::array({1.0, 2.0, 3.0, 4.0, 5.0});
  j["inf"] = std::numeric_limits<double>::infinity();
  j["nan"] = std::nan("");
  j["s"] = "ok";
  const std::string out = dump_json(j);
  CHECK(out.find("\"x\": 0.10000000000000001") != std::string::npos);
  CHECK(out.find("\"v\": [1.5, 2]") != std::string::npos);
  CHECK(out.find("\"big\": [\n") != std::string::npos);
  CHECK(out.find("\"inf\": \"inf\"") != std::string::npos);
  CHECK(out.find("\"nan\": \"nan\"") != std::string::npos);
  CHECK(out.back() == '\n');
  CHECK(parse_json_text(out)["x"].get<double>() == 0.1);
  CHECK(dump_json(parse_json_text(out)) == out);
}

TEST_CASE("check report JSON") {
  const Jet j = oracle::random_jet(1, 3, 2100);
  const CheckReport r = compute_A(j, Modulus::holder(0.5));
  const json o = to_json(r);
  CHECK(o.contains("passed"));
  CHECK(o.contains("constant"));
  CHECK(o["constant"].get<double>() == r.constant);
  CHECK(dump_json(o) == dump_json(to_json(compute_A(j, Modulus::holder(0.5)))));
}

TEST_CASE("CSV writers") {
  const Jet j = Jet::make(1, {vec({0.0})}, {1.0}, {vec({0.5})});
  const ExtensionResult r = extend(j, Modulus::linear(1.0), GridSpec::make(1, {-1.0}, {1.0}, {5}));
  std::ostringstream os;
  write_grid_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x0,F,dF0");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 5);

  std::ostringstream cs;
  write_conjugate_csv(cs, Modulus::capped(Modulus::holder(0.5), 1.0), 4.0, 5);
  const std::string c = cs.str();
  CHECK(c.rfind("t,omega,phi,phi_star\n", 0) == 0);
  CHECK(c.find("0,0,0,0\n") != std::string::npos);
  CHECK(c.find("inf") != std::string::npos);
  CHECK_THROWS_AS(write_conjugate_csv(cs, Modulus::linear(1.0), 1.0, 1), DomainError);
}
