#include "descfilt/errors.hpp"
#include "descfilt/model_io.hpp"
#include "descfilt/reference_example.hpp"
#include "support/random_models.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

using namespace descfilt;
using namespace descfilt::testing;

namespace {

const char* kScalarSpec = R"({
  "n": 1, "m": 1, "p": 1, "tau": 2,
  "F": [[1]], "C": [[1]], "H": [[1]], "S": [[1]], "R": [[1]]
})";

std::string parse_error_message(std::string_view text) {
  try {
    parse_model_spec(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("constant matrices expand to per-step sequences") {
  const auto spec = parse_model_spec(kScalarSpec);
  CHECK(spec.model.tau == 2);
  CHECK(spec.model.F.size() == 3);
  CHECK(spec.model.C.size() == 2);
  CHECK(spec.model.R[2](0, 0) == 1.0);
  CHECK_FALSE(spec.inputs.has_value());
  CHECK(spec.generator.empty());
}

TEST_CASE("per-step lists, inputs and generator are read") {
  const auto spec = parse_model_spec(R"({
    "n": 1, "m": 1, "p": 1, "tau": 1,
    "F": [[[1]], [[2]]], "C": [[[3]]], "H": [[1]], "S": [[1]], "R": [[[1]], [[4]]],
    "inputs": {"f": [[0.5], [0.25]], "g": [1]},
    "generator": "zero"
  })");
  CHECK(spec.model.F[1](0, 0) == 2.0);
  CHECK(spec.model.C[0](0, 0) == 3.0);
  CHECK(spec.model.R[1](0, 0) == 4.0);
  REQUIRE(spec.inputs.has_value());
  CHECK(spec.inputs->f[1](0) == 0.25);
  CHECK(spec.inputs->g[1](0) == 1.0);
  CHECK(spec.inputs->w[0](0) == 0.0);
  CHECK(spec.generator == "zero");
}

TEST_CASE("malformed specs are parse errors") {
  SUBCASE("syntax errors carry a line and column") {
    const auto msg = parse_error_message("{\n  \"n\": 1,\n  \"m\": ]\n}");
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
  SUBCASE("missing field") {
    CHECK(parse_error_message(R"({"n": 1, "m": 1, "p": 1})").find("tau") != std::string::npos);
  }
  SUBCASE("wrong shape") {
    const auto msg = parse_error_message(R"({
      "n": 2, "m": 1, "p": 1, "tau": 0,
      "F": [[1]], "H": [[1, 0]], "S": [[1]], "R": [[1]]})");
    CHECK(msg.find("F_0") != std::string::npos);
  }
  SUBCASE("wrong sequence length") {
    const auto msg = parse_error_message(R"({
      "n": 1, "m": 1, "p": 1, "tau": 2,
      "F": [[[1]], [[1]]], "C": [[1]], "H": [[1]], "S": [[1]], "R": [[1]]})");
    CHECK(msg.find("expected 3") != std::string::npos);
  }
  SUBCASE("non-positive-definite weight") {
    const auto msg = parse_error_message(R"({
      "n": 1, "m": 1, "p": 1, "tau": 0,
      "F": [[1]], "H": [[1]], "S": [[0]], "R": [[1]]})");
    CHECK(msg.find("S_0") != std::string::npos);
  }
  SUBCASE("non-numeric entry") {
    CHECK_THROWS_AS(parse_model_spec(R"({
      "n": 1, "m": 1, "p": 1, "tau": 0,
      "F": [["a"]], "H": [[1]], "S": [[1]], "R": [[1]]})"),
                    ParseError);
  }
  SUBCASE("unknown generator") {
    const auto spec = parse_model_spec(kScalarSpec);
    CHECK_THROWS_AS(generate_inputs("nope", spec.model), ParseError);
    CHECK_THROWS_AS(generate_inputs("oscillator", spec.model), ParseError);
  }
}

TEST_CASE("dump and parse round-trip exactly") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mdl = random_model(rng);
    const auto inputs = zero_inputs(mdl);
    const auto spec = parse_model_spec(dump_model_spec(mdl, &inputs));
    CHECK(spec.model.n == mdl.n);
    CHECK(spec.model.tau == mdl.tau);
    for (std::size_t k = 0; k < mdl.F.size(); ++k) {
      CHECK(spec.model.F[k] == mdl.F[k]);
      CHECK(spec.model.H[k] == mdl.H[k]);
      CHECK(spec.model.S[k] == mdl.S[k]);
      CHECK(spec.model.R[k] == mdl.R[k]);
    }
    for (std::size_t k = 0; k < mdl.C.size(); ++k) CHECK(spec.model.C[k] == mdl.C[k]);
    REQUIRE(spec.inputs.has_value());
  }
}

TEST_CASE("oscillator generator matches the reference inputs") {
  const auto mdl = reference::oscillator_model(10, reference::kR0Substitute);
  const auto gen = generate_inputs("oscillator", mdl);
  const auto ref = reference::oscillator_inputs(10);
  for (std::size_t k = 0; k < ref.f.size(); ++k) {
    CHECK(gen.f[k] == ref.f[k]);
    CHECK(gen.w[k] == ref.w[k]);
  }
}

TEST_CASE("CSV parsing") {
  const auto t = parse_csv("k,y0\r\n0,1.5\n\n1,inf\n2,-inf\n3,nan\n");
  CHECK(t.header == std::vector<std::string>{"k", "y0"});
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0][1] == 1.5);
  CHECK(std::isinf(t.rows[1][1]));
  CHECK(t.rows[2][1] < 0);
  CHECK(std::isnan(t.rows[3][1]));
  CHECK(t.column("y0") == 1);
  CHECK(t.column("z") == -1);

  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("a\nx\n"), ParseError);
  CHECK_THROWS_AS(parse_csv(""), ParseError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.123456789}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("measurement CSV round-trip") {
  VecSeq ys;
  for (int k = 0; k < 4; ++k) ys.push_back(Vec::Constant(2, 0.1 * k));
  std::ostringstream os;
  write_measurements_csv(os, ys);
  CHECK(os.str().find('\r') == std::string::npos);
  const auto back = measurements_from_csv(parse_csv(os.str()), 2, 4);
  for (std::size_t k = 0; k < ys.size(); ++k) CHECK(back[k] == ys[k]);

  SUBCASE("unnamed value columns") {
    const auto t = parse_csv("k,a\n0,1\n1,2\n");
    CHECK(measurements_from_csv(t, 1, 2)[1](0) == 2.0);
  }
  SUBCASE("too few rows") {
    CHECK_THROWS_AS(measurements_from_csv(parse_csv("k,y0\n0,1\n"), 1, 2), ParseError);
  }
  SUBCASE("out-of-order k") {
    CHECK_THROWS_AS(measurements_from_csv(parse_csv("k,y0\n1,1\n0,1\n"), 1, 2), ParseError);
  }
  SUBCASE("non-finite measurement") {
    CHECK_THROWS_AS(measurements_from_csv(parse_csv("k,y0\n0,inf\n"), 1, 1), ParseError);
  }
}

TEST_CASE("trajectory CSV layout") {
  const auto mdl = reference::oscillator_model(3, reference::kR0Substitute);
  const auto traj = simulate(mdl, reference::oscillator_inputs(3));
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  const auto t = parse_csv(os.str());
  CHECK(t.header.size() == 1 + 4 + 2 + 1 + 1);
  CHECK(t.header[1] == "x0");
  CHECK(t.header.back() == "y0");
  CHECK(t.rows.size() == 4);
}
