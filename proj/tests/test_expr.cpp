#include <doctest.h>

#include <cmath>
#include <random>

#include "mpbvp/expr.hpp"

using namespace mpbvp;

namespace {

const std::vector<std::string> kT{"t"};
const std::vector<std::string> kTX{"t", "x1", "x2"};

double eval1(const std::string& src, double t) {
  return Expr::parse(src, kT).eval(std::vector<double>{t});
}

}  // namespace

TEST_CASE("single token parses to a variable") {
  Expr e = Expr::parse("t", kT);
  CHECK(e.to_string() == "t");
  CHECK(e.eval(std::vector<double>{3.5}) == 3.5);
}

TEST_CASE("precedence and associativity") {
  CHECK(eval1("2*t+1", 2.0) == 5.0);
  CHECK(Expr::parse("2*t+1", kT).to_string() == "((2*t)+1)");
  CHECK(eval1("1-2-3", 0.0) == -4.0);       // left associative
  CHECK(eval1("2^3^2", 0.0) == 512.0);      // right associative
  CHECK(eval1("-2^2", 0.0) == -4.0);        // ^ binds tighter than unary -
  CHECK(eval1("2^-2", 0.0) == 0.25);
  CHECK(eval1("6/3/2", 0.0) == 1.0);
  CHECK(eval1("1 + 2 * 3 ^ 2", 0.0) == 19.0);
}

TEST_CASE("numbers in decimal and scientific notation") {
  CHECK(eval1("1e-3", 0.0) == 1e-3);
  CHECK(eval1("2.5E+2", 0.0) == 250.0);
  CHECK(eval1(".5", 0.0) == 0.5);
  CHECK(eval1("7.", 0.0) == 7.0);
}

TEST_CASE("unknown identifier reports the byte offset") {
  try {
    Expr::parse("sin(y)", kT);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::UnknownIdentifier);
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("unknown function") {
  CHECK_THROWS_WITH_AS(Expr::parse("foo(t)", kT), doctest::Contains("foo"),
                       ParseError);
}

TEST_CASE("syntax errors carry offsets") {
  try {
    Expr::parse("2*", kT);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::SyntaxError);
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(Expr::parse("", kT), ParseError);
  CHECK_THROWS_AS(Expr::parse("(1+2", kT), ParseError);
  CHECK_THROWS_AS(Expr::parse("1 2", kT), ParseError);
}

TEST_CASE("evaluation edge cases") {
  CHECK(eval1("t^2", 2.0) == 4.0);
  CHECK(eval1("exp(0)", 1.0) == 1.0);
  CHECK_THROWS_AS(eval1("1/t", 0.0), Error);          // pole
  CHECK_THROWS_AS(eval1("log(t)", -1.0), Error);      // domain
  CHECK_THROWS_AS(eval1("sqrt(t)", -4.0), Error);
  CHECK_THROWS_AS(eval1("exp(t)", 1e5), Error);       // overflow to inf
  CHECK_THROWS_AS(eval1("(0-2)^0.5", 0.0), Error);    // negative base, fractional power
  CHECK(eval1("(0-2)^3", 0.0) == -8.0);               // integer power is fine
}

TEST_CASE("map environment checks referenced variables") {
  Expr e = Expr::parse("x1 + t", kTX);
  std::map<std::string, double> env{{"t", 1.0}, {"x1", 2.0}};
  CHECK(e.eval(env) == 3.0);
  env.erase("x1");
  CHECK_THROWS_AS(e.eval(env), Error);
  // unreferenced variables need no binding
  Expr only_t = Expr::parse("t", kTX);
  std::map<std::string, double> just_t{{"t", 5.0}};
  CHECK(only_t.eval(just_t) == 5.0);
}

namespace {

// random tree for the round-trip property; constants kept nonnegative so the
// printer never has to emit a literal minus sign
std::string random_source(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> num(0.0, 10.0);
  switch (pick(rng)) {
    case 0: return std::to_string(num(rng));
    case 1: return "t";
    case 2: return "x1";
    case 3: return "(" + random_source(rng, depth - 1) + "+" + random_source(rng, depth - 1) + ")";
    case 4: return "(" + random_source(rng, depth - 1) + "-" + random_source(rng, depth - 1) + ")";
    case 5: return "(" + random_source(rng, depth - 1) + "*" + random_source(rng, depth - 1) + ")";
    case 6: return "(" + random_source(rng, depth - 1) + "/" + random_source(rng, depth - 1) + ")";
    case 7: return "sin(" + random_source(rng, depth - 1) + ")";
    case 8: return "(-" + random_source(rng, depth - 1) + ")";
    default: return "tanh(" + random_source(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("print/parse round trip is structurally identical") {
  std::mt19937 rng(20240811);
  std::vector<std::string> vars{"t", "x1"};
  for (int i = 0; i < 200; ++i) {
    std::string src = random_source(rng, 4);
    Expr a = Expr::parse(src, vars);
    Expr b = Expr::parse(a.to_string(), vars);
    REQUIRE(a.same_structure(b));
    CHECK(b.same_structure(a));
  }
}

TEST_CASE("binary operations match the host arithmetic bit for bit") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> num(-50.0, 50.0);
  char buf[128];
  for (int i = 0; i < 200; ++i) {
    double a = num(rng), b = num(rng);
    std::snprintf(buf, sizeof buf, "(%.17g)+(%.17g)", a, b);
    CHECK(eval1(buf, 0.0) == a + b);
    std::snprintf(buf, sizeof buf, "(%.17g)*(%.17g)", a, b);
    CHECK(eval1(buf, 0.0) == a * b);
    std::snprintf(buf, sizeof buf, "(%.17g)-(%.17g)", a, b);
    CHECK(eval1(buf, 0.0) == a - b);
    if (b != 0.0) {
      std::snprintf(buf, sizeof buf, "(%.17g)/(%.17g)", a, b);
      CHECK(eval1(buf, 0.0) == a / b);
    }
  }
}

TEST_CASE("deterministic evaluation") {
  Expr e = Expr::parse("sin(t)*exp(t/3)+sqrt(abs(t))^1.5", kT);
  std::vector<double> env{0.7310585786300049};
  double first = e.eval(env);
  for (int i = 0; i < 10; ++i) CHECK(e.eval(env) == first);
}
