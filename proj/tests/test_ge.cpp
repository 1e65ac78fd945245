#include "fixtures.hpp"
#include "ge_samples.hpp"
#include "support.hpp"

#include "statcert/ge.hpp"
#include "statcert/mpcc.hpp"
#include "statcert/oracle.hpp"

#include <doctest.h>

using namespace statcert;
using namespace statcert::model;
using testsupport::Rng;
using testsupport::vec;

namespace {

GeInstance geFrom(const std::string &text) { return std::get<GeInstance>(parseInstance(text)); }

// Two copies of the constraint y1 <= 0 in R^2 with y* = (1, 0): the
// multipliers form the segment λ1 + λ2 = 1.
GeInstance segment() {
  return geFrom(R"({"kind": "ge", "n": 1, "m": 2, "f_grad": [0, 0, 0],
    "Gx": [[0], [0]], "Gy": [[1, 0], [0, 1]], "G_val": [-1, 0],
    "g": [{"value": 0, "grad": [1, 0]}, {"value": 0, "grad": [1, 0]}]})");
}

// As above in R^3 with curvature e2 e2ᵀ on the first and e3 e3ᵀ on the second
// constraint: the maximizing multiplier depends on the critical direction.
GeInstance splitCurvature() {
  return geFrom(R"({"kind": "ge", "n": 1, "m": 3, "f_grad": [0, 0, 0, 0],
    "Gx": [[0], [0], [0]], "Gy": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "G_val": [-1, 0, 0],
    "g": [{"value": 0, "grad": [1, 0, 0], "hess": [[0, 0, 0], [0, 1, 0], [0, 0, 0]]},
          {"value": 0, "grad": [1, 0, 0], "hess": [[0, 0, 0], [0, 0, 0], [0, 0, 1]]}]})");
}

GeInstance sharedCurvature(const char *extra = "") {
  return geFrom(std::string(R"({"kind": "ge", "n": 1, "m": 2, "f_grad": [0, 0, 0],
    "Gx": [[0], [0]], "Gy": [[1, 0], [0, 1]], "G_val": [-1, 0],
    "g": [{"value": 0, "grad": [1, 0], "hess": [[0, 0], [0, 1]]},
          {"value": 0, "grad": [1, 0], "hess": [[0, 0], [0, -1]]}])") +
            extra + "}");
}


} // namespace

TEST_CASE("scalar line: f = y is neither S- nor B-stationary") {
  auto inst = fixtures::loadAs<GeInstance>("ge_line_up.json");
  auto s = ge::prepare(inst);
  CHECK(s.poly.active == IndexSet{0});
  CHECK(s.poly.iplus.empty());
  CHECK(s.poly.izero == IndexSet{0});
  CHECK(s.poly.singleton());
  auto fam = ge::bgeFamily(inst, s.poly);
  CHECK(fam.members == std::vector<IndexSet>{{}, {0}});
  CHECK(fam.closures.empty());
  CHECK_FALSE(ge::checkS(s).holds());
  auto b = oracle::bStationaryOracle(s);
  REQUIRE_FALSE(b.holds());
  // x = y = -a is feasible for a > 0 and f decreases along it.
  const Vec &u = *findBlock(*b.refutation, "descent_direction");
  CHECK(sgn(dot(inst.fGrad, u)) < 0);
  CHECK(u == vec({-1, -1}));
}

TEST_CASE("scalar line: f = -y is S-stationary") {
  auto inst = fixtures::loadAs<GeInstance>("ge_line_down.json");
  auto s = ge::prepare(inst);
  auto c = ge::checkS(s);
  REQUIRE(c.holds());
  CHECK(*findBlock(*c.lambda, "w") == vec({0}));
  CHECK(*findBlock(*c.lambda, "mu") == vec({1}));
  CHECK(oracle::bStationaryOracle(s).holds());
  for (const auto &pair : ge::admissiblePairs(ge::bgeFamily(inst, s.poly), s.poly.izero))
    CHECK(ge::checkQ(s, pair).holds());
}

TEST_CASE("multiplier polytope of a segment") {
  auto inst = segment();
  auto poly = ge::multiplierPolytope(inst);
  CHECK(poly.lower == vec({0, 0}));
  CHECK(poly.upper == vec({1, 1}));
  CHECK(poly.iplus == IndexSet{0, 1});
  CHECK(poly.izero.empty());
  CHECK_FALSE(poly.singleton());
  CHECK(sgn(poly.lambdaPlus[0]) > 0);
  CHECK(sgn(poly.lambdaPlus[1]) > 0);
  CHECK(poly.lambdaPlus[0] + poly.lambdaPlus[1] == 1);
  CHECK(ge::zeroSumProperty(inst, poly));
}

TEST_CASE("point data errors") {
  // y1 <= 0 and -y1 <= 0 admit no strictly decreasing direction.
  CHECK(fixtures::errorOf([] {
          ge::multiplierPolytope(geFrom(R"({"kind": "ge", "n": 1, "m": 1, "f_grad": [0, 0],
            "Gx": [[0]], "Gy": [[1]], "G_val": [0],
            "g": [{"value": 0, "grad": [1]}, {"value": 0, "grad": [-1]}]})"));
        }) == ErrorKind::MfcqViolated);
  // y* = -1 needs a negative multiplier on y1 <= 0.
  CHECK(fixtures::errorOf([] {
          ge::multiplierPolytope(geFrom(R"({"kind": "ge", "n": 1, "m": 1, "f_grad": [0, 0],
            "Gx": [[0]], "Gy": [[1]], "G_val": [1], "g": [{"value": 0, "grad": [1]}]})"));
        }) == ErrorKind::GeInfeasibleAtPoint);
  CHECK(fixtures::errorOf([] {
          ge::multiplierPolytope(geFrom(R"({"kind": "ge", "n": 1, "m": 1, "f_grad": [0, 0],
            "Gx": [[0]], "Gy": [[1]], "G_val": [1], "g": [{"value": -1, "grad": [1]}]})"));
        }) == ErrorKind::GeInfeasibleAtPoint);
}

TEST_CASE("multiplier choice with curvature") {
  auto s = ge::prepare(sharedCurvature());
  // Critical cone {v1 = 0}; the curvature term (v2², -v2²) is maximized by (1, 0).
  CHECK(s.lambdaBar == vec({1, 0}));
  CHECK(s.constancy.established);
  CHECK(s.shift(1, 1) == 1);
  CHECK(s.shift(0, 0) == 0);
  CHECK(ge::prepare(sharedCurvature(R"(, "lambda_bar": [1, 0])")).lambdaSource ==
        "supplied with the instance");
  CHECK(fixtures::errorOf([] { ge::prepare(sharedCurvature(R"(, "lambda_bar": [0, 1])")); }) ==
        ErrorKind::LambdaBarUnavailable);
  CHECK(fixtures::errorOf([] { ge::prepare(sharedCurvature(R"(, "lambda_bar": [2, 0])")); }) ==
        ErrorKind::LambdaBarUnavailable);
}

TEST_CASE("directional multipliers that depend on the direction") {
  auto inst = splitCurvature();
  auto poly = ge::multiplierPolytope(inst);
  auto d2 = ge::directionalMultipliers(inst, poly, vec({0, 1, 0}));
  auto d3 = ge::directionalMultipliers(inst, poly, vec({0, 0, 1}));
  CHECK(d2.maximizer == vec({1, 0}));
  CHECK(d3.maximizer == vec({0, 1}));
  CHECK_FALSE(ge::sameOptimalFace(inst, poly, vec({0, 1, 0}), vec({0, 0, 1})));
  CHECK(ge::sameOptimalFace(inst, poly, vec({0, 1, 0}), vec({0, 2, 0})));
  auto s = ge::prepare(inst);
  CHECK_FALSE(s.constancy.established);
  CHECK(fixtures::errorOf([&] { ge::qualTheorem9(s); }) == ErrorKind::ConstancyNotEstablished);
  auto rep = ge::certifyGe(inst);
  bool recorded = false;
  for (const auto &q : rep.qualifications)
    if (q.name == "thm9")
      recorded = !q.holds && q.notes.at(0).rfind("ConstancyNotEstablished", 0) == 0;
  CHECK(recorded);
}

TEST_CASE("subset caps") {
  auto inst = fixtures::loadAs<GeInstance>("ge_line_up.json");
  auto poly = ge::multiplierPolytope(inst);
  CHECK(fixtures::errorOf([&] { ge::bgeFamily(inst, poly, 1); }) ==
        ErrorKind::SubsetLimitExceeded);
  CHECK(ge::bgeFamily(inst, poly, 2).members.size() == 2);
}

TEST_CASE("QM needs normal-cone branches") {
  auto s = ge::prepare(fixtures::loadAs<GeInstance>("ge_line_down.json"));
  CHECK(ge::checkQM(s, std::nullopt, std::nullopt).verdict == Verdict::Unavailable);
  auto branches = ge::parseNdBranches(
      fixtures::readText(fixtures::dataPath("ge_line_branches.json")), 1);
  REQUIRE(branches.size() == 3);
  CHECK(ge::checkQM(s, std::nullopt, branches).holds());
  CHECK(fixtures::errorOf([] { ge::parseNdBranches(R"({"branches": [{"eq": [[1]]}]})", 1); }) ==
        ErrorKind::Parse);
  CHECK(fixtures::errorOf([] { ge::parseNdBranches("[", 1); }) == ErrorKind::Parse);
}

TEST_CASE("property: nonnegative dependencies vanish on I0") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto inst = oracle::randomGe(seed);
    CHECK(ge::zeroSumProperty(inst, ge::multiplierPolytope(inst)));
  }
  CHECK(ge::zeroSumProperty(splitCurvature(), ge::multiplierPolytope(splitCurvature())));
}

TEST_CASE("property: the family contains the empty set and I0; closures are members") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto inst = oracle::randomGe(seed);
    auto poly = ge::multiplierPolytope(inst);
    auto fam = ge::bgeFamily(inst, poly);
    CHECK(fam.contains({}));
    CHECK(fam.contains(poly.izero));
    for (const auto &[beta, closure] : fam.closures) {
      CHECK_FALSE(fam.contains(beta));
      CHECK(fam.contains(closure));
      CHECK(std::includes(closure.begin(), closure.end(), beta.begin(), beta.end()));
    }
  }
}

TEST_CASE("property: sampled points of each branch cone lie in the tangent cone and back") {
  Rng rng(11);
  std::size_t covered = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto s = ge::prepare(oracle::randomGe(seed));
    auto subsets = enumeratePartitions(s.poly.izero);
    auto fam = ge::bgeFamily(s.inst, s.poly);
    for (int k = 0; k < 20; ++k) {
      const auto &beta = subsets[rng.index(subsets.size())].beta1;
      Vec p = gesamples::pointOfBranch(rng, s, beta);
      CHECK(ge::inQge(s, beta, p));
      CHECK(ge::inTangentD(s, p));

      Vec p2 = gesamples::pointOfTangent(rng, s);
      REQUIRE(ge::inTangentD(s, p2));
      bool found = false;
      for (const auto &member : fam.members)
        found = found || ge::inQge(s, member, p2);
      CHECK(found);
      covered += found;
    }
  }
  CHECK(covered == 60 * 20);
}

TEST_CASE("property: polar samples have nonpositive products with cone samples") {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto s = ge::prepare(oracle::randomGe(seed));
    const auto &inst = s.inst;
    for (const auto &split : enumeratePartitions(s.poly.izero)) {
      const auto &beta = split.beta1;
      auto q = ge::buildQge(s, beta);
      // Polar element: η ∈ N̂_C, q with ∇g q = 0 on I+ and <= 0 on β,
      // q* = -W q + Σ μ ∇g with μ >= 0 off β ∪ I+.
      polylp::HCone qCone(inst.m);
      for (auto i : s.poly.iplus)
        qCone.eq.appendRow(inst.g[i].grad);
      for (auto i : beta)
        qCone.ineq.appendRow(inst.g[i].grad);
      polylp::GCone mult(inst.m);
      for (auto i : setUnion(s.poly.iplus, beta))
        mult.lin.push_back(inst.g[i].grad);
      for (auto i : setDifference(s.poly.izero, beta))
        mult.rays.push_back(inst.g[i].grad);
      Vec eta = testsupport::pointInGCone(rng, polylp::polar(inst.tangentC));
      Vec qv = testsupport::pointInHCone(rng, qCone);
      Vec qs = testsupport::pointInGCone(rng, mult) - s.shift.apply(qv);
      Vec polarPoint = gesamples::concat3(eta, qs, qv);
      CHECK(ge::inQgePolar(s, beta, polarPoint));
      for (int k = 0; k < 5; ++k) {
        Vec v = testsupport::pointInHCone(rng, q.kBeta);
        Vec p = gesamples::concat3(testsupport::pointInHCone(rng, q.tangentC), v,
                        s.shift.apply(v) + testsupport::pointInGCone(rng, q.kBetaStar));
        CHECK(sgn(dot(polarPoint, p)) <= 0);
      }
    }
  }
}

TEST_CASE("property: both Q decision routes agree") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = ge::prepare(oracle::randomGe(seed));
    auto fam = ge::bgeFamily(s.inst, s.poly);
    for (const auto &pair : ge::admissiblePairs(fam, s.poly.izero)) {
      auto r = ge::qRoutes(s, pair);
      CHECK(r.system == r.memberships);
    }
  }
}

TEST_CASE("property: the complementarity encoding gives the same verdicts") {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    CAPTURE(seed);
    auto inst = oracle::randomGe(seed);
    auto s = ge::prepare(inst);
    auto enc = oracle::encodeGeAsMpcc(inst);
    REQUIRE(activeSets(enc).i00 == s.poly.izero);
    CHECK(ge::checkS(s).holds() == mpcc::checkS(enc).holds());
    CHECK(oracle::bStationaryOracle(s).holds() == oracle::bStationaryOracle(enc).holds());
    auto branches = oracle::orthantNdBranches(inst);
    for (const auto &p : enumeratePartitions(s.poly.izero)) {
      CHECK(ge::checkQ(s, p).holds() == mpcc::checkQ(enc, p).holds());
      CHECK(ge::checkQM(s, p, branches).holds() == mpcc::checkQM(enc, p).holds());
    }
  }
}

TEST_CASE("property: the kernel sign condition agrees with its dual systems") {
  std::size_t fails = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto s = ge::prepare(oracle::randomGe(seed));
    for (const auto &p : enumeratePartitions(s.poly.izero)) {
      auto r = ge::theorem11Routes(s, p);
      CHECK(r.primal == r.dual);
      fails += !r.primal;
    }
  }
  auto s = ge::prepare(sharedCurvature());
  for (const auto &p : enumeratePartitions(s.poly.izero)) {
    auto r = ge::theorem11Routes(s, p);
    CHECK(r.primal == r.dual);
  }
  CHECK(fails > 0);
}

TEST_CASE("property: the sufficient conditions promote Q to S") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto inst = oracle::randomGe(seed);
    auto rep = ge::certifyGe(inst);
    CHECK(rep.auditViolations.empty());
    auto s = ge::prepare(inst);
    bool sHolds = ge::checkS(s).holds();
    for (const auto &p : enumeratePartitions(s.poly.izero))
      if (ge::qualTheorem11(s, p).holds && ge::checkQ(s, p).holds())
        CHECK(sHolds);
    auto t9 = ge::qualTheorem9(s);
    if (t9.holds && oracle::bStationaryOracle(s).holds())
      CHECK(sHolds);
  }
}
