// Acceptance runner: one PASS/FAIL line per criterion. With --criterion N only
// that criterion runs; the exit status is nonzero if any run criterion fails.

#include "cone_properties.hpp"
#include "fixtures.hpp"
#include "ge_samples.hpp"
#include "naive.hpp"

#include "statcert/ge.hpp"
#include "statcert/mpcc.hpp"
#include "statcert/mpvc.hpp"
#include "statcert/oracle.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace statcert;
using namespace statcert::model;
using testsupport::Rng;
using testsupport::vec;

namespace {

// Pinned limits. All comparisons are exact; only wall-clock time has a bound.
constexpr double kGoldenSeconds = 1.0;
constexpr double kMpccSweepSeconds = 60.0;
constexpr std::uint64_t kSweepInstances = 200;
constexpr std::uint64_t kGeInstances = 60;
constexpr std::size_t kConeSamples = 500;
constexpr std::size_t kConeCount = 50;
constexpr std::size_t kCoverSamples = 100;

struct Outcome {
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> facts;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
  void fact(const std::string &what) { facts.push_back(what); }
};

template <class... Args> std::string fmt(const char *f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double secondsSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Coordinate-wise min and max of the M-multipliers, one LP pair per limiting
// piece (λ_H = 0, λ_G = 0, or both >= 0 at each biactive pair), written from
// the sign rules without the library's pattern builders.
std::optional<std::pair<Vec, Vec>> mpccMultiplierRange(const MpccInstance &inst) {
  auto S = activeSets(inst);
  const std::size_t nh = inst.h.size(), ng = inst.g.size(), np = inst.pairs();
  const std::size_t total = nh + ng + 2 * np;
  std::optional<Vec> lo, hi;
  std::size_t pieces = 1;
  for (std::size_t k = 0; k < S.i00.size(); ++k)
    pieces *= 3;
  for (std::size_t code = 0; code < pieces; ++code) {
    for (std::size_t k = 0; k < total; ++k) {
      for (auto sense : {polylp::Sense::Minimize, polylp::Sense::Maximize}) {
        polylp::LpModel lp;
        std::size_t x = lp.addVariables(total, polylp::Sign::Free);
        auto fix = [&](std::size_t j, char how) {
          if (how == '0')
            lp.addEquality({{x + j, 1}}, 0);
          else if (how == '+')
            lp.addGreaterEqual({{x + j, 1}}, 0);
        };
        for (std::size_t i = 0; i < ng; ++i)
          fix(nh + i, sgn(inst.g[i].value) == 0 ? '+' : '0');
        std::size_t c = code;
        for (std::size_t i = 0; i < np; ++i) {
          std::size_t jg = nh + ng + i, jh = nh + ng + np + i;
          bool g0 = sgn(inst.G[i].value) == 0, h0 = sgn(inst.H[i].value) == 0;
          if (g0 && !h0)
            fix(jh, '0');
          else if (!g0 && h0)
            fix(jg, '0');
          else if (!g0 && !h0) {
            fix(jg, '0');
            fix(jh, '0');
          } else {
            std::size_t piece = c % 3;
            c /= 3;
            if (piece == 0)
              fix(jh, '0');
            else if (piece == 1)
              fix(jg, '0');
            else {
              fix(jg, '+');
              fix(jh, '+');
            }
          }
        }
        // Σ λ_h ∇h + Σ λ_g ∇g - Σ λ_G ∇G - Σ λ_H ∇H = -∇f.
        for (std::size_t d = 0; d < inst.n; ++d) {
          polylp::LpModel::Terms row;
          for (std::size_t i = 0; i < nh; ++i)
            row.push_back({x + i, inst.h[i].grad[d]});
          for (std::size_t i = 0; i < ng; ++i)
            row.push_back({x + nh + i, inst.g[i].grad[d]});
          for (std::size_t i = 0; i < np; ++i) {
            row.push_back({x + nh + ng + i, -inst.G[i].grad[d]});
            row.push_back({x + nh + ng + np + i, -inst.H[i].grad[d]});
          }
          lp.addEquality(row, -inst.fGrad[d]);
        }
        lp.setObjective({{x + k, 1}}, sense);
        auto r = lp.solve();
        if (!r.feasible())
          break;
        if (r.status != polylp::LpStatus::Optimal)
          return std::nullopt;
        if (!lo) {
          lo = Vec(r.values.begin() + x, r.values.begin() + x + total);
          hi = lo;
        }
        if (sense == polylp::Sense::Minimize)
          (*lo)[k] = std::min((*lo)[k], r.objective);
        else
          (*hi)[k] = std::max((*hi)[k], r.objective);
      }
    }
  }
  if (!lo)
    return std::nullopt;
  return std::make_pair(*lo, *hi);
}

Outcome degenerateExample() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto inst = fixtures::loadAs<MpccInstance>("degenerate_mpcc.json");
  auto m = mpcc::checkM(inst);
  o.require(m.holds(), "M-stationarity not certified");
  if (m.holds()) {
    Blocks expected{{"h", {}}, {"g", vec({1, 3})}, {"G", vec({0})}, {"H", vec({-2})}};
    o.require(*m.lambda == expected, "M multiplier differs from (1, 3, 0, -2)");
    o.require(naive::gradientImage(inst, *m.lambda, false) == -inst.fGrad &&
                  naive::mpccLimitingNormal(inst, *m.lambda),
              "M multiplier does not re-verify");
  }
  auto range = mpccMultiplierRange(inst);
  o.require(range && range->first == vec({1, 3, 0, -2}) && range->second == vec({1, 3, 0, -2}),
            "min/max LPs do not pin the multiplier");
  auto unique = mpcc::uniqueMMultiplier(inst);
  o.require(unique && *unique == vec({1, 3, 0, -2}), "library uniqueness check disagrees");
  for (const auto &p : enumeratePartitions(activeSets(inst).i00))
    o.require(!mpcc::checkQM(inst, p).holds(), "QM certified for " + formatPartition(p));
  o.require(!mpcc::checkQM(inst, std::nullopt).holds(), "QM certified");
  o.require(!mpcc::checkS(inst).holds(), "S certified");
  auto b = oracle::bStationaryOracle(inst);
  o.require(!b.holds(), "oracle reports B-stationarity");
  if (!b.holds()) {
    const Vec &u = naive::block(*b.refutation, "descent_direction");
    bool inPiece = false;
    for (const auto &p : enumeratePartitions(activeSets(inst).i00))
      inPiece = inPiece || naive::satisfies(naive::mpccCone(inst, p), u);
    o.require(inPiece && sgn(dot(inst.fGrad, u)) < 0, "descent direction does not verify");
    o.fact("descent direction " + formatVec(u));
  }
  double secs = secondsSince(t0);
  o.require(secs < kGoldenSeconds, fmt("took %.3f s", secs));
  o.fact(fmt("%.3f s (limit %.0f s)", secs, kGoldenSeconds));
  return o;
}

Outcome nonsingularExample() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto inst = fixtures::loadAs<MpccInstance>("nonsingular_mpcc.json");
  auto sets = mpcc::nonsingularSets(inst);
  o.require(sets.betaG == IndexSet{0, 1}, "betaG is " + formatIndexSet(sets.betaG));
  o.require(sets.betaH == IndexSet{1}, "betaH is " + formatIndexSet(sets.betaH));
  o.require(sets.betaGH == IndexSet{1}, "betaGH is " + formatIndexSet(sets.betaGH));
  const Vec claimed = vec({1, 1, 1, -1, 1, 1});
  const Vec corrected = vec({1, 1, 1, -1, 1, -1});
  for (const auto &p : {Partition{{1}, {}}, Partition{{}, {1}}}) {
    std::string name = formatPartition(p);
    o.require(mpcc::qualCorollary5(inst, p).holds, "weaker sign condition fails for " + name);
    o.require(!mpcc::qualPangFukushimaA3(inst, p).holds, "A3 holds for " + name);
    auto conds = mpcc::a3Conditions(inst, sets, p);
    o.require(mpcc::isProductViolation(inst, conds, claimed),
              "claimed violator (1,1,1,-1,1,1) rejected for " + name);
    if (mpcc::isProductViolation(inst, conds, corrected))
      o.fact("(1,1,1,-1,1,-1) accepted for " + name);
  }
  double secs = secondsSince(t0);
  o.require(secs < kGoldenSeconds, fmt("took %.3f s", secs));
  o.fact(fmt("%.3f s (limit %.0f s)", secs, kGoldenSeconds));
  return o;
}

Outcome mpccSweep() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::size_t edges = 0, sTrue = 0, bFalse = 0;
  auto edge = [&](bool premise, bool conclusion, const std::string &name, std::uint64_t seed) {
    ++edges;
    if (premise && !conclusion)
      o.require(false, name + " violated at seed " + std::to_string(seed));
  };
  for (std::uint64_t seed = 0; seed < kSweepInstances; ++seed) {
    auto inst = oracle::randomMpcc(seed);
    auto S = activeSets(inst);
    o.require(inst.n <= 6 && S.i00.size() <= 3, "shape out of range");
    bool b = oracle::bStationaryOracle(inst).holds();
    bool s = mpcc::checkS(inst).holds();
    bool qm = mpcc::checkQM(inst, std::nullopt).holds();
    bool m = mpcc::checkM(inst).holds();
    bool licq = mpcc::checkLicq(inst).holds;
    bool allQ = true, anyQ = false;
    for (const auto &p : enumeratePartitions(S.i00)) {
      bool q = mpcc::checkQ(inst, p).holds();
      allQ = allQ && q;
      anyQ = anyQ || q;
      edge(q, mpcc::checkQ(inst, naive::swapped(p)).holds(), "Q swap symmetry", seed);
    }
    edge(b, allQ && qm, "B => Q for every partition and QM", seed);
    edge(s, allQ, "S => Q for every partition", seed);
    edge(qm, m, "QM => M", seed);
    edge(licq && anyQ, s, "LICQ and Q => S", seed);
    sTrue += s;
    bFalse += !b;
  }
  double secs = secondsSince(t0);
  o.require(secs < kMpccSweepSeconds, fmt("took %.1f s", secs));
  o.fact(fmt("%llu instances, %zu edge checks, S true %zu, B false %zu, %.1f s (limit %.0f s)",
             static_cast<unsigned long long>(kSweepInstances), edges, sTrue, bFalse, secs,
             kMpccSweepSeconds));
  return o;
}

Outcome mpvcSweep() {
  Outcome o;
  std::size_t pairs = 0, partDisagreements = 0, promotions = 0;
  for (std::uint64_t seed = 0; seed < kSweepInstances; ++seed) {
    auto inst = oracle::randomMpvc(seed);
    auto i00 = activeSets(inst).i00;
    std::string at = " at seed " + std::to_string(seed);
    bool b = oracle::bStationaryOracle(inst).holds();
    bool q = mpvc::checkQ(inst, {i00, {}}).holds();
    bool qm = mpvc::checkQM(inst, std::nullopt).holds();
    o.require(!b || q, "B => Q for (I00, {}) violated" + at);
    o.require(!q || qm, "Q for (I00, {}) => QM violated" + at);
    bool s = mpvc::checkS(inst).holds();
    for (const auto &p : enumeratePartitions(i00)) {
      auto r = mpvc::theorem7Routes(inst, p);
      ++pairs;
      o.require(r.primal == r.dual, "primal and dual kernel conditions disagree" + at);
      for (std::size_t k = 0; k < std::min(r.primalParts.size(), r.dualParts.size()); ++k)
        partDisagreements += r.primalParts[k].second != r.dualParts[k].second;
      if (mpvc::qualTheorem7(inst, p).holds && mpvc::checkQ(inst, p).holds()) {
        ++promotions;
        o.require(s, "promotion to S fails" + at);
      }
    }
  }
  o.require(partDisagreements == 0, fmt("%zu per-LP disagreements", partDisagreements));
  o.fact(fmt("%llu instances, %zu instance-partition pairs, %zu promotions checked",
             static_cast<unsigned long long>(kSweepInstances), pairs, promotions));
  return o;
}

Outcome conePropertySuite() {
  Outcome o;
  Rng rng(2024);
  struct Suite {
    const char *name;
    std::function<coneprops::Tally(Rng &)> run;
  };
  const Suite suites[] = {
      {"double polar", [](Rng &r) { return coneprops::checkDoublePolar(r, 6); }},
      {"image intersection", [](Rng &r) { return coneprops::checkImageIntersection(r, 6); }},
      {"polar of a preimage", [](Rng &r) { return coneprops::checkPreimagePolar(r, 6); }},
      {"polar of a product", [](Rng &r) { return coneprops::checkProductPolar(r, 6); }},
  };
  for (const auto &suite : suites) {
    coneprops::Tally total;
    while (total.samples < kConeSamples || total.cones < kConeCount)
      total.add(suite.run(rng));
    o.require(total.failures == 0, fmt("%s: %zu failures", suite.name, total.failures));
    o.require(total.certificateFailures == 0,
              fmt("%s: %zu certificates fail", suite.name, total.certificateFailures));
    o.fact(fmt("%s %zu/%zu", suite.name, total.samples, total.cones));
  }
  // LP certificates on random systems with free and nonnegative variables.
  std::size_t lps = 0, bad = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t d = 1 + rng.index(4);
    polylp::LinearSystem eq(d), in(d);
    for (std::size_t k = rng.index(2); k > 0; --k)
      eq.add(rng.nonzeroVector(d, -3, 3), rng.integer(-3, 3));
    for (std::size_t k = 1 + rng.index(4); k > 0; --k)
      in.add(rng.nonzeroVector(d, -3, 3), rng.integer(-4, 3));
    std::vector<polylp::Sign> signs(d);
    for (auto &s : signs)
      s = rng.coin() ? polylp::Sign::Free : polylp::Sign::NonNeg;
    Vec c = rng.vector(d, -3, 3);
    for (auto sense : {polylp::Sense::Minimize, polylp::Sense::Maximize}) {
      auto out = polylp::lpSolveSigned(c, eq, in, signs, sense);
      ++lps;
      bad += !polylp::verifyOutcome(out, c, eq, in, signs, sense);
    }
  }
  o.require(bad == 0, fmt("%zu of %zu LP certificates fail", bad, lps));
  o.fact(fmt("%zu LP certificates", lps));
  return o;
}

Outcome geCrossEncoding() {
  Outcome o;
  std::size_t comparisons = 0, routeCalls = 0;
  for (std::uint64_t seed = 0; seed < kGeInstances; ++seed) {
    auto inst = oracle::randomGe(seed);
    std::string at = " at seed " + std::to_string(seed);
    o.require(inst.zeroCurvature(), "curvature present" + at);
    auto s = ge::prepare(inst);
    auto enc = oracle::encodeGeAsMpcc(inst);
    o.require(ge::checkS(s).holds() == mpcc::checkS(enc).holds(), "S differs" + at);
    ++comparisons;
    for (const auto &p : enumeratePartitions(s.poly.izero)) {
      o.require(ge::checkQ(s, p).holds() == mpcc::checkQ(enc, p).holds(),
                "Q differs for " + formatPartition(p) + at);
      ++comparisons;
    }
    for (const auto &pair : ge::admissiblePairs(ge::bgeFamily(inst, s.poly), s.poly.izero)) {
      auto r = ge::qRoutes(s, pair);
      ++routeCalls;
      o.require(r.system == r.memberships, "Q routes differ for " + formatPartition(pair) + at);
    }
  }
  o.fact(fmt("%llu instances, %zu verdict comparisons, %zu route checks",
             static_cast<unsigned long long>(kGeInstances), comparisons, routeCalls));
  return o;
}

Outcome geStructure() {
  Outcome o;
  Rng rng(77);
  std::size_t samples = 0;
  for (std::uint64_t seed = 0; seed < kGeInstances; ++seed) {
    auto inst = oracle::randomGe(seed);
    std::string at = " at seed " + std::to_string(seed);
    auto s = ge::prepare(inst);
    o.require(ge::zeroSumProperty(inst, s.poly), "zero-sum property fails" + at);
    auto fam = ge::bgeFamily(inst, s.poly);
    o.require(fam.contains({}) && fam.contains(s.poly.izero), "family misses {} or I0" + at);
    auto subsets = enumeratePartitions(s.poly.izero);
    std::size_t uncovered = 0, outside = 0;
    for (std::size_t k = 0; k < kCoverSamples; ++k) {
      Vec t = gesamples::pointOfTangent(rng, s);
      bool found = false;
      for (const auto &member : fam.members)
        found = found || ge::inQge(s, member, t);
      uncovered += !(ge::inTangentD(s, t) && found);
      const auto &beta = subsets[rng.index(subsets.size())].beta1;
      outside += !ge::inTangentD(s, gesamples::pointOfBranch(rng, s, beta));
      samples += 2;
    }
    o.require(uncovered == 0, fmt("%zu tangent samples not covered", uncovered) + at);
    o.require(outside == 0, fmt("%zu branch samples outside the tangent cone", outside) + at);
  }
  o.fact(fmt("%llu instances, %zu cover samples",
             static_cast<unsigned long long>(kGeInstances), samples));
  return o;
}

struct Criterion {
  int id;
  const char *name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "degenerate MPCC example (unique M multiplier, not QM)", degenerateExample},
    {2, "nonsingular-set MPCC example (weaker sign condition vs A3)", nonsingularExample},
    {3, "MPCC implication sweep", mpccSweep},
    {4, "MPVC chain, promotion and primal/dual sweep", mpvcSweep},
    {5, "polyhedral cone identities and LP certificates", conePropertySuite},
    {6, "equation vs complementarity encoding", geCrossEncoding},
    {7, "equation structure: zero sums, subset family, cover", geStructure},
};

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  bool allPass = true;
  for (const auto &c : kCriteria) {
    if (only != 0 && c.id != only)
      continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name;
    std::string sep = " [";
    for (const auto &f : o.failures) {
      line << sep << f;
      sep = "; ";
    }
    for (const auto &f : o.facts) {
      line << sep << f;
      sep = "; ";
    }
    if (sep == "; ")
      line << "]";
    std::printf("%s\n", line.str().c_str());
    allPass = allPass && o.pass;
  }
  return allPass ? 0 : 1;
}
