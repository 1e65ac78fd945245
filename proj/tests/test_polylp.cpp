#include "cone_properties.hpp"
#include "support.hpp"

#include "statcert/errors.hpp"

#include <doctest.h>

using namespace statcert;
using namespace statcert::polylp;
using namespace testsupport;

TEST_CASE("rational parsing and formatting") {
  CHECK(parseRational("3/6") == Rational(1, 2));
  CHECK(parseRational("-4") == Rational(-4));
  CHECK(formatRational(parseRational("-10/4")) == "-5/2");
  CHECK_THROWS_AS(parseRational("1.5"), Error);
  CHECK_THROWS_AS(parseRational("1/0"), Error);
  CHECK_THROWS_AS(parseRational(""), Error);
}

TEST_CASE("lpSolve small examples") {
  SUBCASE("min 0 s.t. u = 0") {
    LinearSystem eq(mat({{1}}, 1), vec({0})), in(1);
    auto out = lpSolve(vec({0}), eq, in, Sense::Minimize);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.point == vec({0}));
    CHECK(out.value == 0);
  }
  SUBCASE("min x s.t. x >= 1") {
    LinearSystem eq(1), in(mat({{-1}}, 1), vec({-1}));
    auto out = lpSolve(vec({1}), eq, in, Sense::Minimize);
    REQUIRE(out.status == LpStatus::Optimal);
    CHECK(out.point == vec({1}));
    CHECK(out.value == 1);
  }
  SUBCASE("min -x s.t. x >= 0 is unbounded along e1") {
    LinearSystem eq(1), in(mat({{-1}}, 1), vec({0}));
    auto out = lpSolve(vec({-1}), eq, in, Sense::Minimize);
    REQUIRE(out.status == LpStatus::Unbounded);
    CHECK(out.ray == vec({1}));
  }
  SUBCASE("infeasible system carries a Farkas certificate") {
    LinearSystem eq(1), in(mat({{1}, {-1}}, 1), vec({-1, -1}));
    auto out = lpSolve(vec({0}), eq, in, Sense::Minimize);
    REQUIRE(out.status == LpStatus::Infeasible);
    CHECK(verifyOutcome(out, vec({0}), eq, in, {Sign::Free}, Sense::Minimize));
  }
  SUBCASE("dimension mismatch") {
    LinearSystem eq(2), in(1);
    CHECK_THROWS_AS(lpSolve(vec({0}), eq, in, Sense::Minimize), Error);
  }
}

namespace {

// Brute-force LP oracle on bounded problems: enumerate every square subsystem of
// active rows, keep feasible vertices, return the best objective value.
std::optional<Rational> bruteForceMin(const Vec &c, const LinearSystem &in) {
  const std::size_t d = c.size();
  const std::size_t m = in.rows();
  std::optional<Rational> best;
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(std::min(d, m)), true);
  std::sort(mask.begin(), mask.end());
  do {
    Matrix sys(0, d);
    Vec rhs;
    for (std::size_t i = 0; i < m; ++i)
      if (mask[i]) {
        sys.appendRow(in.a.row(i));
        rhs.push_back(in.b[i]);
      }
    if (rank(sys) != d)
      continue;
    auto x = solveLinear(sys, rhs);
    if (!x)
      continue;
    Vec ax = in.a.apply(*x);
    bool ok = true;
    for (std::size_t i = 0; i < m; ++i)
      ok = ok && ax[i] <= in.b[i];
    if (!ok)
      continue;
    Rational v = dot(c, *x);
    if (!best || v < *best)
      best = v;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return best;
}

} // namespace

TEST_CASE("lpSolve agrees with vertex enumeration on boxed random LPs") {
  Rng rng(7);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t d = 1 + rng.index(3);
    LinearSystem in(d);
    for (std::size_t k = 0; k < d; ++k) {
      in.add(unitVector(d, k), 4);
      in.add(-unitVector(d, k), 4);
    }
    std::size_t extra = rng.index(4);
    for (std::size_t k = 0; k < extra; ++k)
      in.add(rng.nonzeroVector(d, -3, 3), rng.integer(-4, 3));
    Vec c = rng.vector(d, -3, 3);
    auto out = lpSolve(c, LinearSystem(d), in, Sense::Minimize);
    auto expected = bruteForceMin(c, in);
    if (expected) {
      REQUIRE(out.status == LpStatus::Optimal);
      CHECK(out.value == *expected);
      ++optimal;
    } else {
      CHECK(out.status == LpStatus::Infeasible);
      ++infeasible;
    }
    auto maxOut = lpSolve(c, LinearSystem(d), in, Sense::Maximize);
    auto expectedMax = bruteForceMin(-c, in);
    if (expectedMax) {
      REQUIRE(maxOut.status == LpStatus::Optimal);
      CHECK(maxOut.value == -*expectedMax);
    }
  }
  CHECK(optimal > 20);
  CHECK(infeasible > 5);
}

TEST_CASE("LpModel sign handling") {
  LpModel lp;
  auto x = lp.addVariable(Sign::NonPos);
  auto y = lp.addVariable(Sign::Zero);
  auto z = lp.addVariable(Sign::Free);
  lp.addEquality({{x, 1}, {y, 5}, {z, 1}}, 2);
  lp.addLessEqual({{z, 1}}, 5);
  lp.setObjective({{z, 1}}, Sense::Maximize);
  auto r = lp.solve();
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.values[x] == -3);
  CHECK(r.values[y] == 0);
  CHECK(r.values[z] == 5);
}

TEST_CASE("strictFeasible examples") {
  SUBCASE("x <= 0 strictly") {
    LinearSystem eq(1), in(mat({{1}}, 1), vec({0}));
    auto r = strictFeasible(eq, in, {0});
    REQUIRE(r.feasible);
    CHECK(r.witness[0] < 0);
  }
  SUBCASE("x <= 0 and -x <= 0, first strict") {
    LinearSystem eq(1), in(mat({{1}, {-1}}, 1), vec({0, 0}));
    auto r = strictFeasible(eq, in, {0});
    CHECK_FALSE(r.feasible);
    CHECK(verifyStrict(r, eq, in, {0}));
  }
  SUBCASE("MFCQ for g(y) = y") {
    LinearSystem eq(1), in(mat({{1}}, 1), vec({0}));
    auto r = strictFeasible(eq, in, {0});
    REQUIRE(r.feasible);
    CHECK(r.witness == vec({-1}));
  }
  SUBCASE("inconsistent base system") {
    LinearSystem eq(mat({{1}}, 1), vec({1})), in(mat({{1}}, 1), vec({0}));
    auto r = strictFeasible(eq, in, {});
    CHECK_FALSE(r.feasible);
    CHECK(r.baseInfeasible);
  }
}

TEST_CASE("polar examples") {
  HCone whole(3);
  auto p = polar(whole);
  CHECK(p.rays.empty());
  CHECK(p.lin.empty());

  HCone origin(2);
  origin.eq = Matrix::identity(2);
  auto po = polar(origin);
  CHECK(po.lin.size() == 2);
  CHECK(memberGCone(vec({5, -7}), po).member);

  HCone quadrant(2);
  quadrant.ineq = Matrix::identity(2);
  auto pq = polar(quadrant);
  CHECK(pq.rays == std::vector<Vec>{vec({1, 0}), vec({0, 1})});
}

TEST_CASE("memberGCone examples") {
  GCone c(1);
  c.rays.push_back(vec({1}));
  auto zero = memberGCone(vec({0}), c);
  CHECK(zero.member);
  CHECK(zero.rayCoeffs == vec({0}));
  auto e1 = memberGCone(vec({1}), c);
  CHECK(e1.member);
  CHECK(e1.rayCoeffs == vec({1}));
  auto neg = memberGCone(vec({-1}), c);
  CHECK_FALSE(neg.member);
  CHECK(neg.separator == vec({-1}));
}

TEST_CASE("linealitySpace examples") {
  CHECK(linealitySpace(HCone(2)) == std::vector<Vec>{vec({1, 0}), vec({0, 1})});
  HCone half(2);
  half.ineq = mat({{1, 0}}, 2);
  CHECK(linealitySpace(half) == std::vector<Vec>{vec({0, 1})});
  HCone orthant(2);
  orthant.ineq = mat({{-1, 0}, {0, -1}}, 2);
  CHECK(linealitySpace(orthant).empty());
}

TEST_CASE("relativeInteriorMember examples") {
  HCone half(1);
  half.ineq = mat({{1}}, 1);
  CHECK(relativeInteriorMember(half).point == vec({-1}));

  HCone point(1);
  point.eq = mat({{1}}, 1);
  CHECK(relativeInteriorMember(point).point == vec({0}));

  HCone line(2);
  line.ineq = mat({{1, 0}, {-1, 0}}, 2);
  auto ri = relativeInteriorMember(line);
  CHECK(ri.point[0] == 0);
  CHECK(ri.implicitRows == std::vector<std::size_t>{0, 1});
}

TEST_CASE("extremeDirections of a pointed cone and a half plane") {
  HCone orthant(2);
  orthant.ineq = mat({{-1, 0}, {0, -1}}, 2);
  auto dirs = extremeDirections(orthant);
  CHECK(dirs.size() == 2);
  HCone half(2);
  half.ineq = mat({{1, 0}}, 2);
  auto hd = extremeDirections(half);
  // +-e2 from the lineality space and -e1 from the pointed part.
  CHECK(hd.size() == 3);
}

TEST_CASE("property: double polar, linear image identity, polar of preimage, product rule") {
  Rng rng(11);
  std::size_t checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    auto r1 = coneprops::checkDoublePolar(rng, 6);
    auto r2 = coneprops::checkImageIntersection(rng, 6);
    auto r3 = coneprops::checkPreimagePolar(rng, 6);
    auto r4 = coneprops::checkProductPolar(rng, 6);
    CHECK(r1.failures == 0);
    CHECK(r2.failures == 0);
    CHECK(r3.failures == 0);
    CHECK(r4.failures == 0);
    checked += r1.samples + r2.samples + r3.samples + r4.samples;
  }
  CHECK(checked >= 12 * 4 * 6);
}
