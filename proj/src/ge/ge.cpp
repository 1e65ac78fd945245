#include "statcert/ge.hpp"

#include "statcert/errors.hpp"
#include "statcert/oracle.hpp"

#include <json.hpp>

#include <algorithm>

namespace statcert::ge {

using polylp::LinearSystem;
using polylp::LpModel;
using polylp::LpStatus;
using polylp::Sense;
using polylp::Sign;
using Terms = LpModel::Terms;

namespace {

const Vec &grad(const GeInstance &inst, std::size_t i) { return inst.g[i].grad; }

Vec slice(const Vec &v, std::size_t first, std::size_t count) {
  return Vec(v.begin() + static_cast<std::ptrdiff_t>(first),
             v.begin() + static_cast<std::ptrdiff_t>(first + count));
}

Vec lowerStar(const GeInstance &inst) { return -inst.gValue; }

// Variables λ_a >= 0 over the active set with Σ λ_a ∇g_a = ȳ*.
std::size_t addPolytope(LpModel &lp, const GeInstance &inst, const IndexSet &active) {
  std::size_t first = lp.addVariables(active.size(), Sign::NonNeg);
  Vec ystar = lowerStar(inst);
  for (std::size_t r = 0; r < inst.m; ++r) {
    Terms t;
    for (std::size_t a = 0; a < active.size(); ++a)
      t.emplace_back(first + a, grad(inst, active[a])[r]);
    lp.addEquality(t, ystar[r]);
  }
  return first;
}

Vec expand(const GeInstance &inst, const IndexSet &active, const Vec &values, std::size_t first) {
  Vec full = zeros(inst.g.size());
  for (std::size_t a = 0; a < active.size(); ++a)
    full[active[a]] = values[first + a];
  return full;
}

// Terms Σ_r coeff_r ∇g_{set[r]}[row] for multiplier variables starting at first.
void addGradTerms(Terms &t, const GeInstance &inst, const IndexSet &set, std::size_t first,
                  std::size_t row, const Rational &scale) {
  for (std::size_t a = 0; a < set.size(); ++a)
    t.emplace_back(first + a, scale * grad(inst, set[a])[row]);
}

// η = Eᵀa + Bᵀb with a free, b >= 0: the regular normal cone of C.
struct NormalC {
  std::size_t a = 0, b = 0;
  void terms(Terms &t, const HCone &tc, std::size_t k, const Rational &scale) const {
    for (std::size_t r = 0; r < tc.eq.rows(); ++r)
      t.emplace_back(a + r, scale * tc.eq(r, k));
    for (std::size_t r = 0; r < tc.ineq.rows(); ++r)
      t.emplace_back(b + r, scale * tc.ineq(r, k));
  }
  Vec value(const HCone &tc, const Vec &vals) const {
    Vec eta = zeros(tc.dim);
    for (std::size_t r = 0; r < tc.eq.rows(); ++r)
      eta = eta + vals[a + r] * tc.eq.row(r);
    for (std::size_t r = 0; r < tc.ineq.rows(); ++r)
      eta = eta + vals[b + r] * tc.ineq.row(r);
    return eta;
  }
};

NormalC addNormalC(LpModel &lp, const HCone &tc) {
  NormalC nc;
  nc.a = lp.addVariables(tc.eq.rows(), Sign::Free);
  nc.b = lp.addVariables(tc.ineq.rows(), Sign::NonNeg);
  return nc;
}

// Rows ∇g_i x (= or <=) 0 for x variables starting at first.
void addGradRows(LpModel &lp, const GeInstance &inst, const IndexSet &set, std::size_t first,
                 bool equality) {
  for (auto i : set) {
    Terms t = polylp::termsFrom(first, grad(inst, i));
    if (equality)
      lp.addEquality(t, 0);
    else
      lp.addLessEqual(t, 0);
  }
}

IndexSet subsetOf(const IndexSet &base, const std::vector<std::size_t> &positions) {
  IndexSet out;
  for (auto p : positions)
    out.push_back(base[p]);
  return out;
}

void requireSubset(const IndexSet &beta, const IndexSet &base, const char *what) {
  if (!std::includes(base.begin(), base.end(), beta.begin(), beta.end()) ||
      !std::is_sorted(beta.begin(), beta.end()))
    fail(ErrorKind::Parse, std::string(what) + " " + formatIndexSet(beta) +
                               " is not a sorted subset of " + formatIndexSet(base));
}

} // namespace

// ---------------------------------------------------------------------------
// Multiplier polytope and cones.

MultiplierPolytope multiplierPolytope(const GeInstance &inst) {
  MultiplierPolytope P;
  for (std::size_t i = 0; i < inst.g.size(); ++i)
    (sgn(inst.g[i].value) == 0 ? P.active : P.inactive).push_back(i);

  if (!P.active.empty()) {
    LinearSystem eq(inst.m), ineq(inst.m);
    std::vector<std::size_t> strict;
    for (auto i : P.active) {
      strict.push_back(ineq.rows());
      ineq.add(grad(inst, i), 0);
    }
    if (!polylp::strictFeasible(eq, ineq, strict).feasible)
      fail(ErrorKind::MfcqViolated, "no direction makes every active lower-level constraint "
                                    "strictly decrease");
  }

  const std::size_t l = inst.g.size();
  P.lower = zeros(l);
  P.upper = zeros(l);
  P.lambdaPlus = zeros(l);
  {
    LpModel feas;
    addPolytope(feas, inst, P.active);
    if (!feas.solve().feasible())
      fail(ErrorKind::GeInfeasibleAtPoint, "no multiplier represents -G(x, y)");
  }
  std::size_t maximizers = 0;
  for (std::size_t a = 0; a < P.active.size(); ++a) {
    for (Sense sense : {Sense::Maximize, Sense::Minimize}) {
      LpModel lp;
      std::size_t first = addPolytope(lp, inst, P.active);
      lp.setObjective({{first + a, 1}}, sense);
      auto r = lp.solve();
      if (r.status != LpStatus::Optimal)
        fail(ErrorKind::Internal, "multiplier set is unbounded despite MFCQ");
      (sense == Sense::Maximize ? P.upper : P.lower)[P.active[a]] = r.objective;
      if (sense == Sense::Maximize && sgn(r.objective) > 0) {
        P.lambdaPlus = P.lambdaPlus + expand(inst, P.active, r.values, first);
        ++maximizers;
      }
    }
  }
  for (auto i : P.active)
    (sgn(P.upper[i]) > 0 ? P.iplus : P.izero).push_back(i);
  if (maximizers > 0)
    P.lambdaPlus = Rational(1, static_cast<long>(maximizers)) * P.lambdaPlus;
  if (!zeroSumProperty(inst, P))
    fail(ErrorKind::Internal, "a nonnegative dependency is positive on I0");
  return P;
}

bool zeroSumProperty(const GeInstance &inst, const MultiplierPolytope &P) {
  if (P.izero.empty())
    return true;
  LpModel lp;
  std::size_t plus = lp.addVariables(P.iplus.size(), Sign::Free);
  std::size_t zero = lp.addVariables(P.izero.size(), Sign::NonNeg);
  for (std::size_t r = 0; r < inst.m; ++r) {
    Terms t;
    addGradTerms(t, inst, P.iplus, plus, r, 1);
    addGradTerms(t, inst, P.izero, zero, r, 1);
    lp.addEquality(t, 0);
  }
  Terms sum;
  for (std::size_t a = 0; a < P.izero.size(); ++a)
    sum.emplace_back(zero + a, 1);
  lp.addLessEqual(sum, 1);
  lp.setObjective(sum, Sense::Maximize);
  auto r = lp.solve();
  return r.status == LpStatus::Optimal && sgn(r.objective) == 0;
}

HCone branchCone(const GeInstance &inst, const MultiplierPolytope &P, const IndexSet &beta) {
  HCone c(inst.m);
  for (auto i : model::setUnion(P.iplus, beta))
    c.eq.appendRow(grad(inst, i));
  for (auto i : model::setDifference(P.izero, beta))
    c.ineq.appendRow(grad(inst, i));
  return c;
}

HCone criticalCone(const GeInstance &inst, const MultiplierPolytope &P) {
  return branchCone(inst, P, {});
}

GCone criticalConePolar(const GeInstance &inst, const MultiplierPolytope &P) {
  GCone c(inst.m);
  for (auto i : P.iplus)
    c.lin.push_back(grad(inst, i));
  for (auto i : P.izero)
    c.rays.push_back(grad(inst, i));
  return c;
}

GCone branchConeDual(const GeInstance &inst, const MultiplierPolytope &P, const IndexSet &beta) {
  GCone c(inst.m);
  for (auto i : P.iplus)
    c.lin.push_back(grad(inst, i));
  for (auto i : beta)
    c.rays.push_back(grad(inst, i));
  return c;
}

Matrix hessianShift(const GeInstance &inst, const Vec &lambda) {
  Matrix w(inst.m, inst.m);
  for (std::size_t i = 0; i < inst.g.size(); ++i)
    if (sgn(lambda[i]) != 0)
      for (std::size_t r = 0; r < inst.m; ++r)
        for (std::size_t c = 0; c < inst.m; ++c)
          w(r, c) += lambda[i] * inst.g[i].hess(r, c);
  return w;
}

Vec curvatureObjective(const GeInstance &inst, const Vec &v) {
  Vec c(inst.g.size());
  for (std::size_t i = 0; i < inst.g.size(); ++i)
    c[i] = dot(v, inst.g[i].hess.apply(v));
  return c;
}

DirectionalMultipliers directionalMultipliers(const GeInstance &inst, const MultiplierPolytope &P,
                                              const Vec &v) {
  DirectionalMultipliers d;
  d.objective = curvatureObjective(inst, v);
  LpModel lp;
  std::size_t first = addPolytope(lp, inst, P.active);
  Terms t;
  for (std::size_t a = 0; a < P.active.size(); ++a)
    t.emplace_back(first + a, d.objective[P.active[a]]);
  lp.setObjective(t, Sense::Maximize);
  auto r = lp.solve();
  if (r.status != LpStatus::Optimal)
    fail(ErrorKind::Internal, "curvature maximization over the multiplier set failed");
  d.value = r.objective;
  d.maximizer = expand(inst, P.active, r.values, first);
  return d;
}

namespace {

// Whether every point of the optimal face for `a` is optimal for `b`.
bool faceInside(const GeInstance &inst, const MultiplierPolytope &P,
                const DirectionalMultipliers &a, const DirectionalMultipliers &b) {
  LpModel lp;
  std::size_t first = addPolytope(lp, inst, P.active);
  Terms ta, tb;
  for (std::size_t k = 0; k < P.active.size(); ++k) {
    ta.emplace_back(first + k, a.objective[P.active[k]]);
    tb.emplace_back(first + k, b.objective[P.active[k]]);
  }
  lp.addEquality(ta, a.value);
  lp.setObjective(tb, Sense::Minimize);
  auto r = lp.solve();
  return r.status == LpStatus::Optimal && r.objective == b.value;
}

} // namespace

bool sameOptimalFace(const GeInstance &inst, const MultiplierPolytope &P, const Vec &v1,
                     const Vec &v2) {
  auto a = directionalMultipliers(inst, P, v1);
  auto b = directionalMultipliers(inst, P, v2);
  return faceInside(inst, P, a, b) && faceInside(inst, P, b, a);
}

std::optional<Vec> nonzeroCriticalDirection(const GeInstance &inst, const MultiplierPolytope &P) {
  HCone k = criticalCone(inst, P);
  auto ri = polylp::relativeInteriorMember(k);
  if (!isZero(ri.point))
    return ri.point;
  auto lin = polylp::linealitySpace(k);
  if (!lin.empty())
    return polylp::primitive(lin.front());
  return std::nullopt;
}

bool BgeFamily::contains(const IndexSet &beta) const {
  return std::find(members.begin(), members.end(), beta) != members.end();
}

BgeFamily bgeFamily(const GeInstance &inst, const MultiplierPolytope &P, std::size_t cap) {
  const std::size_t k = P.izero.size();
  if (k >= 63 || (std::size_t(1) << k) > cap)
    fail(ErrorKind::SubsetLimitExceeded, "2^" + std::to_string(k) +
                                             " subsets of I0 exceed the cap " + std::to_string(cap));
  BgeFamily fam;
  for (const auto &split : model::enumeratePartitions(P.izero, cap)) {
    const IndexSet &beta = split.beta1;
    HCone c = branchCone(inst, P, beta);
    LinearSystem eq(c.eq, zeros(c.eq.rows()));
    LinearSystem ineq(c.ineq, zeros(c.ineq.rows()));
    std::vector<std::size_t> strict(c.ineq.rows());
    for (std::size_t r = 0; r < strict.size(); ++r)
      strict[r] = r;
    if (polylp::strictFeasible(eq, ineq, strict).feasible) {
      fam.members.push_back(beta);
      continue;
    }
    IndexSet rest = model::setDifference(P.izero, beta);
    auto ri = polylp::relativeInteriorMember(c);
    fam.closures.emplace_back(beta, model::setUnion(beta, subsetOf(rest, ri.implicitRows)));
  }
  if (!fam.contains({}) || !fam.contains(P.izero))
    fail(ErrorKind::Internal, "the empty set and I0 must belong to the family");
  return fam;
}

Constancy directionalConstancy(const GeInstance &inst, const MultiplierPolytope &P) {
  if (P.singleton())
    return {true, "the multiplier set is a single point"};
  if (inst.zeroCurvature())
    return {true, "all lower-level Hessians vanish"};
  auto v0 = nonzeroCriticalDirection(inst, P);
  if (!v0)
    return {true, "the critical cone is {0}"};
  if (inst.constancyAsserted)
    return {true, "asserted by the instance"};
  auto dirs = polylp::extremeDirections(criticalCone(inst, P));
  for (const auto &d : dirs)
    if (!sameOptimalFace(inst, P, *v0, d))
      return {false, "optimal faces differ between directions " + formatVec(*v0) + " and " +
                         formatVec(d)};
  return {true, "necessary test passed: equal optimal faces on " + std::to_string(dirs.size()) +
                    " extreme directions and one relative-interior direction"};
}

Setup prepare(const GeInstance &inst) {
  Setup s;
  s.inst = inst;
  s.poly = multiplierPolytope(inst);
  s.kbar = criticalCone(inst, s.poly);
  s.constancy = directionalConstancy(inst, s.poly);
  auto v = nonzeroCriticalDirection(inst, s.poly);
  const auto &P = s.poly;
  if (inst.lambdaBar) {
    const Vec &lam = *inst.lambdaBar;
    bool ok = lam.size() == inst.g.size();
    if (ok) {
      Vec sum = zeros(inst.m);
      for (std::size_t i = 0; i < lam.size(); ++i) {
        bool active = model::contains(P.active, i);
        ok = ok && (active ? sgn(lam[i]) >= 0 : sgn(lam[i]) == 0);
        sum = sum + lam[i] * grad(inst, i);
      }
      ok = ok && sum == lowerStar(inst);
    }
    if (ok && v) {
      auto d = directionalMultipliers(inst, P, *v);
      ok = dot(d.objective, lam) == d.value;
    }
    if (!ok)
      fail(ErrorKind::LambdaBarUnavailable,
           "the supplied lambda_bar is not a maximizing multiplier at the point");
    s.lambdaBar = lam;
    s.lambdaSource = "supplied with the instance";
  } else if (P.singleton()) {
    s.lambdaBar = P.lower;
    s.lambdaSource = "the unique multiplier";
  } else if (v) {
    s.lambdaBar = directionalMultipliers(inst, P, *v).maximizer;
    s.lambdaSource = "maximizer of the curvature term at critical direction " + formatVec(*v);
  } else {
    s.lambdaBar = directionalMultipliers(inst, P, zeros(inst.m)).maximizer;
    s.lambdaSource = "a vertex of the multiplier set (the critical cone is {0})";
  }
  s.shift = hessianShift(inst, s.lambdaBar);
  return s;
}

// ---------------------------------------------------------------------------
// S-stationarity.

Certificate checkS(const Setup &s) {
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  LpModel lp;
  std::size_t w = lp.addVariables(m, Sign::Free);
  std::size_t muPlus = lp.addVariables(P.iplus.size(), Sign::Free);
  std::size_t muZero = lp.addVariables(P.izero.size(), Sign::NonNeg);
  NormalC nc = addNormalC(lp, inst.tangentC);
  // -∇_x f = -Gxᵀw + c*.
  for (std::size_t k = 0; k < n; ++k) {
    Terms t;
    for (std::size_t r = 0; r < m; ++r)
      t.emplace_back(w + r, -inst.gx(r, k));
    nc.terms(t, inst.tangentC, k, 1);
    lp.addEquality(t, -inst.fGrad[k]);
  }
  // -∇_y f = -Gyᵀw - W w + Σ μ_i ∇g_i.
  for (std::size_t k = 0; k < m; ++k) {
    Terms t;
    for (std::size_t r = 0; r < m; ++r)
      t.emplace_back(w + r, -inst.gy(r, k) - s.shift(k, r));
    addGradTerms(t, inst, P.iplus, muPlus, k, 1);
    addGradTerms(t, inst, P.izero, muZero, k, 1);
    lp.addEquality(t, -inst.fGrad[n + k]);
  }
  addGradRows(lp, inst, P.iplus, w, true);
  addGradRows(lp, inst, P.izero, w, false);
  auto r = lp.solve();
  Certificate c;
  c.stationarity = Stationarity::S;
  c.verdict = verdictOf(r.feasible());
  if (r.feasible()) {
    Vec wv = slice(r.values, w, m);
    Vec mu = zeros(inst.g.size());
    for (std::size_t a = 0; a < P.iplus.size(); ++a)
      mu[P.iplus[a]] = r.values[muPlus + a];
    for (std::size_t a = 0; a < P.izero.size(); ++a)
      mu[P.izero[a]] = r.values[muZero + a];
    Vec wstar = -s.shift.apply(wv);
    for (std::size_t i = 0; i < mu.size(); ++i)
      wstar = wstar + mu[i] * grad(inst, i);
    c.lambda = Blocks{{"w", wv},
                      {"w_star", wstar},
                      {"c_star", nc.value(inst.tangentC, r.values)},
                      {"mu", mu}};
  } else {
    c.refutation = Blocks{{"direction", polylp::primitive(-slice(r.farkasEq, 0, n + m))}};
  }
  return c;
}

// ---------------------------------------------------------------------------
// Q_GE cones.

QgeCone buildQge(const Setup &s, const IndexSet &beta) {
  requireSubset(beta, s.poly.izero, "beta");
  return {beta, s.inst.tangentC, branchCone(s.inst, s.poly, beta),
          branchConeDual(s.inst, s.poly, beta), s.shift};
}

bool inQge(const Setup &s, const IndexSet &beta, const Vec &point) {
  const std::size_t n = s.inst.n, m = s.inst.m;
  QgeCone q = buildQge(s, beta);
  Vec t = slice(point, 0, n), v = slice(point, n, m), vs = slice(point, n + m, m);
  return q.tangentC.contains(t) && q.kBeta.contains(v) &&
         polylp::memberGCone(vs - s.shift.apply(v), q.kBetaStar).member;
}

bool inQgePolar(const Setup &s, const IndexSet &beta, const Vec &point) {
  requireSubset(beta, s.poly.izero, "beta");
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  Vec eta = slice(point, 0, n), qs = slice(point, n, m), q = slice(point, n + m, m);
  if (!polylp::memberGCone(eta, polylp::polar(inst.tangentC)).member)
    return false;
  for (auto i : P.iplus)
    if (sgn(dot(grad(inst, i), q)) != 0)
      return false;
  for (auto i : beta)
    if (sgn(dot(grad(inst, i), q)) > 0)
      return false;
  GCone mult(m);
  for (auto i : model::setUnion(P.iplus, beta))
    mult.lin.push_back(grad(inst, i));
  for (auto i : model::setDifference(P.izero, beta))
    mult.rays.push_back(grad(inst, i));
  return polylp::memberGCone(qs + s.shift.apply(q), mult).member;
}

bool inTangentD(const Setup &s, const Vec &point) {
  const std::size_t n = s.inst.n, m = s.inst.m;
  Vec t = slice(point, 0, n), v = slice(point, n, m), vs = slice(point, n + m, m);
  if (!s.inst.tangentC.contains(t) || !s.kbar.contains(v))
    return false;
  Vec d = vs - s.shift.apply(v);
  return sgn(dot(d, v)) == 0 &&
         polylp::memberGCone(d, criticalConePolar(s.inst, s.poly)).member;
}

namespace {

// Variables of one polar element (η, q*, q) with its multiplier μ^q.
struct PolarVars {
  NormalC eta;
  std::size_t qs = 0, q = 0, mu = 0;
};

// Adds (η, q*, q) with q* + W q = Σ_active μ_i ∇g_i, ∇g_i q = 0 on I+, and the
// image rows -∇f = (η - Gxᵀq, q* - Gyᵀq). Sign rows depending on beta are
// added by the caller.
PolarVars addPolarElement(LpModel &lp, const Setup &s) {
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  PolarVars pv;
  pv.eta = addNormalC(lp, inst.tangentC);
  pv.qs = lp.addVariables(m, Sign::Free);
  pv.q = lp.addVariables(m, Sign::Free);
  pv.mu = lp.addVariables(P.active.size(), Sign::Free);
  for (std::size_t k = 0; k < n; ++k) {
    Terms t;
    pv.eta.terms(t, inst.tangentC, k, 1);
    for (std::size_t r = 0; r < m; ++r)
      t.emplace_back(pv.q + r, -inst.gx(r, k));
    lp.addEquality(t, -inst.fGrad[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    Terms t{{pv.qs + k, 1}};
    for (std::size_t r = 0; r < m; ++r)
      t.emplace_back(pv.q + r, -inst.gy(r, k));
    lp.addEquality(t, -inst.fGrad[n + k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    Terms t{{pv.qs + k, 1}};
    for (std::size_t r = 0; r < m; ++r)
      t.emplace_back(pv.q + r, s.shift(k, r));
    addGradTerms(t, inst, P.active, pv.mu, k, -1);
    lp.addEquality(t, 0);
  }
  addGradRows(lp, inst, P.iplus, pv.q, true);
  return pv;
}

std::size_t activePosition(const MultiplierPolytope &P, std::size_t i) {
  return static_cast<std::size_t>(std::lower_bound(P.active.begin(), P.active.end(), i) -
                                  P.active.begin());
}

Blocks polarBlocks(const Setup &s, const PolarVars &pv, const Vec &vals) {
  const std::size_t m = s.inst.m;
  return {{"eta", pv.eta.value(s.inst.tangentC, vals)},
          {"q_star", slice(vals, pv.qs, m)},
          {"q", slice(vals, pv.q, m)},
          {"mu_q", expand(s.inst, s.poly.active, vals, pv.mu)}};
}

// The explicit pair system; branch rows on (q*, q) optional.
struct PairSystem {
  LpModel lp;
  PolarVars pv;
  std::size_t r = 0, muR = 0;
  NormalC shifted;
};

void buildPairSystem(PairSystem &ps, const Setup &s, const Partition &pair) {
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  LpModel &lp = ps.lp;
  ps.pv = addPolarElement(lp, s);
  const PolarVars &pv = ps.pv;
  ps.r = lp.addVariables(m, Sign::Free);
  ps.muR = lp.addVariables(P.active.size(), Sign::Free);
  ps.shifted = addNormalC(lp, inst.tangentC);
  // First polar: ∇g_i q <= 0 on beta1, μ^q >= 0 on I0 \ beta1.
  addGradRows(lp, inst, pair.beta1, pv.q, false);
  for (auto i : model::setDifference(P.izero, pair.beta1))
    lp.addGreaterEqual({{pv.mu + activePosition(P, i), 1}}, 0);
  // Kernel shift r: ∇g_i r = 0 on I+, ∇g_i (q - r) <= 0 on beta2, μ^q >= μ^r off beta2.
  addGradRows(lp, inst, P.iplus, ps.r, true);
  for (auto i : pair.beta2) {
    Terms t = polylp::termsFrom(pv.q, grad(inst, i));
    for (std::size_t k = 0; k < m; ++k)
      t.emplace_back(ps.r + k, -grad(inst, i)[k]);
    lp.addLessEqual(t, 0);
  }
  for (auto i : model::setDifference(P.izero, pair.beta2)) {
    std::size_t a = activePosition(P, i);
    lp.addGreaterEqual({{pv.mu + a, 1}, {ps.muR + a, -1}}, 0);
  }
  // Gyᵀ r + W r = Σ μ^r_i ∇g_i.
  for (std::size_t k = 0; k < m; ++k) {
    Terms t;
    for (std::size_t j = 0; j < m; ++j)
      t.emplace_back(ps.r + j, inst.gy(j, k) + s.shift(k, j));
    addGradTerms(t, inst, P.active, ps.muR, k, -1);
    lp.addEquality(t, 0);
  }
  // η - Gxᵀ r ∈ N̂_C.
  for (std::size_t k = 0; k < n; ++k) {
    Terms t;
    pv.eta.terms(t, inst.tangentC, k, 1);
    for (std::size_t j = 0; j < m; ++j)
      t.emplace_back(ps.r + j, -inst.gx(j, k));
    ps.shifted.terms(t, inst.tangentC, k, -1);
    lp.addEquality(t, 0);
  }
}

void addBranchRows(LpModel &lp, const HCone &branch, std::size_t qs, std::size_t q, std::size_t m) {
  auto terms = [&](const Vec &row) {
    Terms t;
    for (std::size_t k = 0; k < m; ++k) {
      t.emplace_back(qs + k, row[k]);
      t.emplace_back(q + k, row[m + k]);
    }
    return t;
  };
  for (std::size_t r = 0; r < branch.eq.rows(); ++r)
    lp.addEquality(terms(branch.eq.row(r)), 0);
  for (std::size_t r = 0; r < branch.ineq.rows(); ++r)
    lp.addLessEqual(terms(branch.ineq.row(r)), 0);
}

void requirePair(const Setup &s, const Partition &pair) {
  requireSubset(pair.beta1, s.poly.izero, "beta1");
  requireSubset(pair.beta2, s.poly.izero, "beta2");
  if (model::setUnion(pair.beta1, pair.beta2) != s.poly.izero)
    fail(ErrorKind::Parse, "pair " + formatPartition(pair) + " does not cover I0 " +
                               formatIndexSet(s.poly.izero));
}

} // namespace

paired::ImageMembership memberQgePolarImage(const Setup &s, const IndexSet &beta) {
  requireSubset(beta, s.poly.izero, "beta");
  const auto &P = s.poly;
  const std::size_t n = s.inst.n, m = s.inst.m;
  LpModel lp;
  PolarVars pv = addPolarElement(lp, s);
  addGradRows(lp, s.inst, beta, pv.q, false);
  for (auto i : model::setDifference(P.izero, beta))
    lp.addGreaterEqual({{pv.mu + activePosition(P, i), 1}}, 0);
  auto r = lp.solve();
  paired::ImageMembership out;
  out.member = r.feasible();
  if (out.member) {
    for (const auto &b : polarBlocks(s, pv, r.values))
      out.lambda = concat(out.lambda, b.values);
  } else {
    out.direction = -slice(r.farkasEq, 0, n + m);
    if (sgn(dot(out.direction, -s.inst.fGrad)) <= 0)
      fail(ErrorKind::Internal, "polar membership refutation does not separate");
  }
  return out;
}

QRoutes qRoutes(const Setup &s, const Partition &pair) {
  requirePair(s, pair);
  PairSystem ps;
  buildPairSystem(ps, s, pair);
  QRoutes q;
  q.system = ps.lp.solve().feasible();
  q.memberships = memberQgePolarImage(s, pair.beta1).member &&
                  memberQgePolarImage(s, pair.beta2).member;
  return q;
}

Certificate checkQ(const Setup &s, const Partition &pair) {
  requirePair(s, pair);
  PairSystem ps;
  buildPairSystem(ps, s, pair);
  auto r = ps.lp.solve();
  auto m1 = memberQgePolarImage(s, pair.beta1);
  auto m2 = memberQgePolarImage(s, pair.beta2);
  if (r.feasible() != (m1.member && m2.member))
    fail(ErrorKind::Internal, "Q decision routes disagree for pair " + formatPartition(pair));
  Certificate c;
  c.stationarity = Stationarity::Q;
  c.partition = pair;
  c.verdict = verdictOf(r.feasible());
  if (r.feasible()) {
    c.lambda = polarBlocks(s, ps.pv, r.values);
    c.mu = Blocks{{"r", slice(r.values, ps.r, s.inst.m)},
                  {"mu_r", expand(s.inst, s.poly.active, r.values, ps.muR)}};
  } else {
    Blocks ref;
    if (!m1.member)
      ref.push_back({"direction[beta1]", polylp::primitive(m1.direction)});
    if (!m2.member)
      ref.push_back({"direction[beta2]", polylp::primitive(m2.direction)});
    c.refutation = ref;
  }
  return c;
}

NdBranches parseNdBranches(const std::string &text, std::size_t m) {
  using nlohmann::json;
  NdBranches out;
  try {
    json j = json::parse(text);
    const json &list = j.is_object() ? j.at("branches") : j;
    auto rows = [&](const json &a, Matrix &into) {
      for (const auto &row : a) {
        if (row.size() != 2 * m)
          fail(ErrorKind::Parse, "branch rows must have length 2m = " + std::to_string(2 * m));
        Vec v;
        for (const auto &x : row)
          v.push_back(x.is_string() ? parseRational(x.get<std::string>())
                                    : Rational(x.get<long>()));
        into.appendRow(v);
      }
    };
    for (const auto &b : list) {
      HCone c(2 * m);
      if (b.contains("eq"))
        rows(b["eq"], c.eq);
      if (b.contains("ineq"))
        rows(b["ineq"], c.ineq);
      out.push_back(std::move(c));
    }
  } catch (const json::exception &e) {
    fail(ErrorKind::Parse, std::string("malformed nd_branches: ") + e.what());
  }
  return out;
}

std::vector<Partition> admissiblePairs(const BgeFamily &family, const IndexSet &izero,
                                       std::size_t cap) {
  std::vector<Partition> out;
  for (const auto &a : family.members)
    for (const auto &b : family.members)
      if (model::setUnion(a, b) == izero) {
        if (out.size() == cap)
          fail(ErrorKind::PartitionLimitExceeded,
               "admissible pairs exceed the cap " + std::to_string(cap));
        out.push_back({a, b});
      }
  return out;
}

Certificate checkQM(const Setup &s, const std::optional<Partition> &pair,
                    const std::optional<NdBranches> &branches, const Limits &limits) {
  Certificate c;
  c.stationarity = Stationarity::QM;
  if (pair)
    c.partition = *pair;
  if (!branches) {
    c.verdict = Verdict::Unavailable;
    c.notes.push_back("the limiting normal cone to the graph of the lower-level normal cone "
                      "is not computed from point data; supply its branches to decide QM");
    return c;
  }
  for (const auto &b : *branches)
    if (b.dim != 2 * s.inst.m)
      fail(ErrorKind::DimensionMismatch, "branch cones must live in R^{2m}");
  if (branches->size() > limits.branchCap)
    fail(ErrorKind::BranchLimitExceeded, "too many supplied branches");

  auto solveFor = [&](const Partition &p, std::optional<std::pair<Certificate, std::size_t>> &hit) {
    for (std::size_t k = 0; k < branches->size(); ++k) {
      PairSystem ps;
      buildPairSystem(ps, s, p);
      addBranchRows(ps.lp, (*branches)[k], ps.pv.qs, ps.pv.q, s.inst.m);
      auto r = ps.lp.solve();
      if (r.feasible()) {
        Certificate found;
        found.lambda = polarBlocks(s, ps.pv, r.values);
        found.mu = Blocks{{"r", slice(r.values, ps.r, s.inst.m)},
                          {"mu_r", expand(s.inst, s.poly.active, r.values, ps.muR)}};
        hit = std::make_pair(found, k);
        return true;
      }
    }
    return false;
  };
  auto accept = [&](const Partition &p, const std::pair<Certificate, std::size_t> &hit) {
    c.partition = p;
    c.lambda = hit.first.lambda;
    c.mu = hit.first.mu;
    c.notes.push_back("normal-cone branch " + std::to_string(hit.second + 1) + " of " +
                      std::to_string(branches->size()));
  };

  if (pair) {
    requirePair(s, *pair);
    std::optional<std::pair<Certificate, std::size_t>> hit;
    c.verdict = verdictOf(solveFor(*pair, hit));
    if (hit)
      accept(*pair, *hit);
    return c;
  }
  auto fam = bgeFamily(s.inst, s.poly, limits.subsetCap);
  auto pairs = admissiblePairs(fam, s.poly.izero, limits.subsetCap);
  std::size_t certifying = 0;
  for (const auto &p : pairs) {
    std::optional<std::pair<Certificate, std::size_t>> hit;
    if (solveFor(p, hit) && certifying++ == 0)
      accept(p, *hit);
  }
  c.verdict = verdictOf(certifying > 0);
  c.notes.push_back("certifying pairs: " + std::to_string(certifying) + " of " +
                    std::to_string(pairs.size()));
  return c;
}

// ---------------------------------------------------------------------------
// Sufficient conditions for S-stationarity of B-stationary points.

namespace {

struct KernelSystem {
  LpModel lp;
  NormalC eta, shifted;
  std::size_t q = 0, r = 0, muQ = 0, muR = 0;
};

// The homogeneous system whose multipliers must keep their signs.
void buildKernelSystem(KernelSystem &ks, const Setup &s, const Partition &p) {
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  LpModel &lp = ks.lp;
  ks.eta = addNormalC(lp, inst.tangentC);
  ks.shifted = addNormalC(lp, inst.tangentC);
  ks.q = lp.addVariables(m, Sign::Free);
  ks.r = lp.addVariables(m, Sign::Free);
  ks.muQ = lp.addVariables(P.active.size(), Sign::Free);
  ks.muR = lp.addVariables(P.active.size(), Sign::Free);
  auto gradTerms = [&](std::size_t i, std::size_t first, const Rational &scale) {
    Terms t;
    for (std::size_t k = 0; k < m; ++k)
      t.emplace_back(first + k, scale * grad(inst, i)[k]);
    return t;
  };
  auto diff = [&](std::size_t i) {
    Terms t = gradTerms(i, ks.q, 1);
    Terms u = gradTerms(i, ks.r, -1);
    t.insert(t.end(), u.begin(), u.end());
    return t;
  };
  for (auto i : P.iplus) {
    lp.addEquality(diff(i), 0);
    lp.addEquality(gradTerms(i, ks.r, 1), 0);
  }
  for (auto i : p.beta1) {
    lp.addLessEqual(gradTerms(i, ks.q, 1), 0);
    std::size_t a = activePosition(P, i);
    lp.addGreaterEqual({{ks.muQ + a, 1}, {ks.muR + a, -1}}, 0);
  }
  for (auto i : p.beta2) {
    lp.addLessEqual(diff(i), 0);
    lp.addGreaterEqual({{ks.muQ + activePosition(P, i), 1}}, 0);
  }
  for (std::size_t k = 0; k < m; ++k) {
    Terms t;
    for (std::size_t j = 0; j < m; ++j)
      t.emplace_back(ks.r + j, inst.gy(j, k) + s.shift(k, j));
    addGradTerms(t, inst, P.active, ks.muR, k, -1);
    lp.addEquality(t, 0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    Terms t;
    ks.eta.terms(t, inst.tangentC, k, 1);
    for (std::size_t j = 0; j < m; ++j)
      t.emplace_back(ks.r + j, -inst.gx(j, k));
    ks.shifted.terms(t, inst.tangentC, k, -1);
    lp.addEquality(t, 0);
  }
}

// Dual systems in (α on I+, z, coefficients of a lineality basis of T_C).
bool dualSystem(const Setup &s, const std::optional<std::size_t> &j,
                const std::optional<std::size_t> &k) {
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  auto lin = polylp::linealitySpace(inst.tangentC);
  LpModel lp;
  std::size_t alpha = lp.addVariables(P.iplus.size(), Sign::Free);
  std::size_t z = lp.addVariables(m, Sign::Free);
  std::size_t l = lp.addVariables(lin.size(), Sign::Free);
  // sign * (Σ α ∇g + (Gy + W) z - Gx l) = rhs
  const Rational sign = j ? -1 : 1;
  for (std::size_t row = 0; row < m; ++row) {
    Terms t;
    addGradTerms(t, inst, P.iplus, alpha, row, sign);
    for (std::size_t c = 0; c < m; ++c)
      t.emplace_back(z + c, sign * (inst.gy(row, c) + s.shift(row, c)));
    for (std::size_t b = 0; b < lin.size(); ++b) {
      Rational gl = 0;
      for (std::size_t c = 0; c < n; ++c)
        gl += inst.gx(row, c) * lin[b][c];
      t.emplace_back(l + b, -sign * gl);
    }
    lp.addEquality(t, j ? Rational(-grad(inst, *j)[row]) : Rational(0));
  }
  for (auto i : P.active)
    lp.addEquality(polylp::termsFrom(z, grad(inst, i)), k && *k == i ? -1 : 0);
  (void)n;
  return lp.solve().feasible();
}

} // namespace

Theorem11Routes theorem11Routes(const Setup &s, const Partition &p) {
  if (!model::isPartitionOf(p, s.poly.izero))
    fail(ErrorKind::Parse, formatPartition(p) + " does not partition I0 " +
                               formatIndexSet(s.poly.izero));
  Theorem11Routes out;
  auto record = [&](const std::string &label, bool primal, bool dual) {
    out.primalParts.emplace_back(label, primal);
    out.dualParts.emplace_back(label, dual);
    out.primal = out.primal && primal;
    out.dual = out.dual && dual;
  };
  for (auto j : p.beta2) {
    KernelSystem ks;
    buildKernelSystem(ks, s, p);
    ks.lp.setObjective(polylp::termsFrom(ks.r, grad(s.inst, j)), Sense::Maximize);
    bool primal = ks.lp.solve().status == LpStatus::Optimal;
    record("grad g_" + std::to_string(j + 1) + " r <= 0", primal,
           dualSystem(s, j, std::nullopt));
  }
  for (auto k : p.beta1) {
    KernelSystem ks;
    buildKernelSystem(ks, s, p);
    ks.lp.setObjective({{ks.muR + activePosition(s.poly, k), 1}}, Sense::Minimize);
    bool primal = ks.lp.solve().status == LpStatus::Optimal;
    record("mu_r " + std::to_string(k + 1) + " >= 0", primal, dualSystem(s, std::nullopt, k));
  }
  return out;
}

QualResult qualTheorem11(const Setup &s, const Partition &p) {
  auto routes = theorem11Routes(s, p);
  QualResult q;
  q.name = "thm11";
  q.partition = p;
  for (std::size_t k = 0; k < routes.primalParts.size(); ++k) {
    if (routes.primalParts[k].second != routes.dualParts[k].second)
      fail(ErrorKind::Internal, "primal and dual disagree on " + routes.primalParts[k].first);
    if (!routes.primalParts[k].second)
      q.notes.push_back("violated: " + routes.primalParts[k].first);
  }
  q.holds = routes.primal;
  return q;
}

Theorem9Parts theorem9Parts(const Setup &s) {
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  Theorem9Parts out;
  Matrix M = inst.gy + s.shift;

  // Z = {z : ∇g_i z = 0 on I+, Gxᵀz ⊥ lin T_C}; span of the critical cone.
  auto lin = polylp::linealitySpace(inst.tangentC);
  Matrix zRows(0, m);
  for (auto i : P.iplus)
    zRows.appendRow(grad(inst, i));
  for (const auto &l : lin)
    zRows.appendRow(inst.gx.apply(l));
  auto zBasis = polylp::nullspace(zRows);
  auto ri = polylp::relativeInteriorMember(s.kbar);
  Matrix spanRows = s.kbar.eq;
  for (auto r : ri.implicitRows)
    spanRows.appendRow(s.kbar.ineq.row(r));
  auto wBasis = polylp::nullspace(spanRows);
  out.curvature = true;
  for (const auto &z : zBasis)
    for (const auto &w : wBasis)
      if (sgn(dot(z, M.apply(w))) != 0)
        out.curvature = false;

  // ũ ∈ ri T_C, w̃ ∈ K̄, μ̃ >= 1 on I0 with Gx ũ + M w̃ + Σ μ̃ ∇g = 0.
  auto tcRi = polylp::relativeInteriorMember(inst.tangentC);
  LpModel lp;
  std::size_t u = lp.addVariables(n, Sign::Free);
  std::size_t w = lp.addVariables(m, Sign::Free);
  std::size_t muPlus = lp.addVariables(P.iplus.size(), Sign::Free);
  std::size_t muZero = lp.addVariables(P.izero.size(), Sign::NonNeg);
  for (std::size_t r = 0; r < inst.tangentC.eq.rows(); ++r)
    lp.addEquality(polylp::termsFrom(u, inst.tangentC.eq.row(r)), 0);
  for (std::size_t r = 0; r < inst.tangentC.ineq.rows(); ++r) {
    bool implicit = std::find(tcRi.implicitRows.begin(), tcRi.implicitRows.end(), r) !=
                    tcRi.implicitRows.end();
    if (implicit)
      lp.addEquality(polylp::termsFrom(u, inst.tangentC.ineq.row(r)), 0);
    else
      lp.addLessEqual(polylp::termsFrom(u, inst.tangentC.ineq.row(r)), -1);
  }
  addGradRows(lp, inst, P.iplus, w, true);
  addGradRows(lp, inst, P.izero, w, false);
  for (std::size_t a = 0; a < P.izero.size(); ++a)
    lp.addGreaterEqual({{muZero + a, 1}}, 1);
  for (std::size_t row = 0; row < m; ++row) {
    Terms t;
    for (std::size_t c = 0; c < n; ++c)
      t.emplace_back(u + c, inst.gx(row, c));
    for (std::size_t c = 0; c < m; ++c)
      t.emplace_back(w + c, M(row, c));
    addGradTerms(t, inst, P.iplus, muPlus, row, 1);
    addGradTerms(t, inst, P.izero, muZero, row, 1);
    lp.addEquality(t, 0);
  }
  out.interior = lp.solve().feasible();
  return out;
}

QualResult qualTheorem9(const Setup &s) {
  if (!s.constancy.established)
    fail(ErrorKind::ConstancyNotEstablished, s.constancy.reason);
  auto parts = theorem9Parts(s);
  QualResult q;
  q.name = "thm9";
  q.holds = parts.curvature && parts.interior;
  q.notes.push_back(std::string("curvature condition on the critical span: ") +
                    (parts.curvature ? "holds" : "fails"));
  q.notes.push_back(std::string("strict solvability with positive multipliers on I0: ") +
                    (parts.interior ? "holds" : "fails"));
  q.notes.push_back("constant directional multipliers: " + s.constancy.reason);
  return q;
}

// ---------------------------------------------------------------------------

Report certifyGe(const GeInstance &inst, const CertifyOptions &options) {
  Setup s = prepare(inst);
  const auto &P = s.poly;
  Report rep;
  rep.kind = model::ProblemKind::Ge;
  rep.digest = model::instanceDigest(inst);
  if (inst.affine)
    rep.assumptions.push_back("GGCQ: asserted (affine data)");
  else if (inst.ggcqAsserted)
    rep.assumptions.push_back("GGCQ: asserted by user");
  else
    rep.assumptions.push_back(
        "GGCQ: not asserted; the oracle decides B-stationarity of the linearized problem");
  rep.assumptions.push_back("MFCQ for the lower-level constraints: verified");
  rep.assumptions.push_back("fixed multiplier " + formatVec(s.lambdaBar) + ": " + s.lambdaSource);
  rep.assumptions.push_back(std::string("constant directional multipliers: ") +
                            (s.constancy.established ? "" : "NOT established; ") +
                            s.constancy.reason);
  rep.activeSets = {{"active", P.active}, {"I+", P.iplus}, {"I0", P.izero},
                    {"inactive", P.inactive}};

  auto fam = bgeFamily(inst, P, options.limits.subsetCap);
  std::string members;
  for (const auto &b : fam.members)
    members += (members.empty() ? "" : ", ") + formatIndexSet(b);
  rep.notes.push_back("subset family: " + members);
  for (const auto &[beta, closure] : fam.closures)
    rep.notes.push_back("subset " + formatIndexSet(beta) + " is discarded in favour of " +
                        formatIndexSet(closure));

  if (options.runOracle)
    rep.certificates.push_back(oracle::bStationaryOracle(s, options.limits.subsetCap));
  rep.certificates.push_back(checkS(s));
  for (const auto &pair : admissiblePairs(fam, P.izero, options.limits.subsetCap))
    rep.certificates.push_back(checkQ(s, pair));
  rep.certificates.push_back(checkQM(s, std::nullopt, options.ndBranches, options.limits));

  for (const auto &p : model::enumeratePartitions(P.izero, options.limits.subsetCap))
    rep.qualifications.push_back(qualTheorem11(s, p));
  if (s.constancy.established) {
    rep.qualifications.push_back(qualTheorem9(s));
  } else {
    QualResult q;
    q.name = "thm9";
    q.notes.push_back("ConstancyNotEstablished: " + s.constancy.reason);
    rep.qualifications.push_back(q);
  }
  rep.auditViolations = oracle::auditReport(rep);
  return rep;
}

} // namespace statcert::ge
