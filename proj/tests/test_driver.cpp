#include <catch_amalgamated.hpp>

#include <sstream>

#include "cqtl/driver.hpp"
#include "support/fixtures.hpp"

using namespace cqtl;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run check(CheckOptions opt) {
  std::ostringstream out, err;
  int code = cmd_check(opt, out, err);
  return {code, out.str(), err.str()};
}

CheckOptions base(const std::string& fixture, const std::string& ctx, const std::string& formula) {
  CheckOptions opt;
  opt.model_path = cqtl_test::fixture_path(fixture);
  opt.context_text = ctx;
  opt.formula_text = formula;
  return opt;
}

}  // namespace

TEST_CASE("validate command") {
  std::ostringstream out, err;
  CHECK(cmd_validate(cqtl_test::fixture_path("running.cm"), out, err) == 0);
  CHECK(out.str().find("3 worlds") != std::string::npos);

  std::ostringstream out2, err2;
  CHECK(cmd_validate(cqtl_test::fixture_path("no_such_file.cm"), out2, err2) == 2);
  CHECK(err2.str().find("IoError") != std::string::npos);
}

TEST_CASE("check command produces the published values") {
  Run r = check(base("running.cm", "y:node", "exists x:node. (x != y & X[x = y])"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("w0: {y=n0}, {y=n2}") != std::string::npos);
  CHECK(r.out.find("w1: {y=n3}, {y=n4}") != std::string::npos);
  CHECK(r.out.find("w2: (empty)") != std::string::npos);
}

TEST_CASE("check --json is byte-deterministic") {
  CheckOptions opt = base("running.cm", "x:edge", "present(x) & WX[false]");
  opt.json = true;
  Run r1 = check(opt);
  Run r2 = check(opt);
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(r1.out.find("\"perWorld\":[{\"assignments\":[{\"x\":\"e2\"}],\"world\":\"w0\"}") !=
        std::string::npos);
}

TEST_CASE("check --world restricts the report") {
  CheckOptions opt = base("twostate.cm", "x:item", "present(x) & X[X[present(x)]]");
  opt.world = "s0";
  opt.json = true;
  Run r = check(opt);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"world\":\"s0\"") != std::string::npos);
  CHECK(r.out.find("\"world\":\"s1\"") == std::string::npos);
  CHECK(r.out.find("\"assignments\":[]") != std::string::npos);
}

TEST_CASE("check --require-sat sets the exit code") {
  CheckOptions sat = base("running.cm", "x:node", "present(x)");
  sat.require_sat = true;
  CHECK(check(sat).code == 0);

  CheckOptions unsat = base("running.cm", "x:edge", "present(x) & WX[false]");
  unsat.require_sat = true;
  CHECK(check(unsat).code == 1);  // empty at w1 and w2

  unsat.world = "w0";
  CHECK(check(unsat).code == 0);  // nonempty at the only requested world
}

TEST_CASE("oracle engine and comparison mode") {
  CheckOptions opt = base("running.cm", "x:edge", "nextStepPreserved(x)");
  opt.use_oracle = true;
  Run r = check(opt);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("w0: {x=e0}, {x=e1}") != std::string::npos);

  opt.compare = true;
  CHECK(check(opt).code == 0);
}

TEST_CASE("errors exit with code 2 and carry positions") {
  Run r = check(base("running.cm", "y:node", "exists x:node. (x != y & X[x = y]"));
  CHECK(r.code == 2);
  CHECK(r.err.find("SyntaxError") != std::string::npos);

  Run r2 = check(base("running.cm", "y:vertex", "true"));
  CHECK(r2.code == 2);
  CHECK(r2.err.find("UnknownSortReference") != std::string::npos);

  CheckOptions opt = base("running.cm", "y:node", "true");
  opt.world = "w9";
  CHECK(check(opt).code == 2);
}

TEST_CASE("so cap is configurable from the options") {
  CheckOptions opt = base("running.cm", "N:Set(node)", "existsS M:node. (exists x:node. (x in M & x in N))");
  opt.so_cap = 2;
  Run r = check(opt);
  CHECK(r.code == 2);
  CHECK(r.err.find("StateSpaceCap") != std::string::npos);
  opt.so_cap = 16;
  CHECK(check(opt).code == 0);
}

TEST_CASE("trace command") {
  std::ostringstream out, err;
  int code = cmd_trace(cqtl_test::fixture_path("running.cm"), "e0@w0", "f0,f1,f3", out, err);
  REQUIRE(code == 0);
  CHECK(out.str() == "e0@w0 -> e3@w1 -> e5@w2 -> e5@w2\n");

  std::ostringstream out2, err2;
  CHECK(cmd_trace(cqtl_test::fixture_path("running.cm"), "e0@w0", "f0,f2", out2, err2) == 0);
  CHECK(out2.str() == "e0@w0 -> e3@w1 -> Dead\n");

  std::ostringstream out3, err3;
  CHECK(cmd_trace(cqtl_test::fixture_path("running.cm"), "e0@w0", "f1", out3, err3) == 2);
  CHECK(err3.str().find("NonComposablePath") != std::string::npos);

  std::ostringstream out4, err4;
  CHECK(cmd_trace(cqtl_test::fixture_path("running.cm"), "zz@w0", "f0", out4, err4) == 2);
}
