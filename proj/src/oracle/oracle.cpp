#include "statcert/oracle.hpp"

#include "statcert/errors.hpp"
#include "statcert/mpcc.hpp"
#include "statcert/mpvc.hpp"

#include <algorithm>
#include <random>

namespace statcert::oracle {

using model::IndexSet;
using model::Partition;
using polylp::LpModel;
using polylp::LpStatus;
using polylp::Sense;
using polylp::Sign;

namespace {

Vec padded(const Vec &row, std::size_t width) {
  Vec out = row;
  out.resize(width, Rational(0));
  return out;
}

Branch pairedBranch(std::size_t n, const std::string &label) {
  Branch b;
  b.label = label;
  b.dim = n;
  b.eq = Matrix(0, n);
  b.ineq = Matrix(0, n);
  return b;
}

std::string branchLabel(const Partition &p) { return "branch " + formatPartition(p); }

} // namespace

std::vector<Branch> linearizedBranches(const MpccInstance &inst, std::size_t cap) {
  auto S = model::activeSets(inst);
  std::vector<Branch> out;
  for (const auto &p : model::enumeratePartitions(S.i00, cap)) {
    Branch b = pairedBranch(inst.n, branchLabel(p));
    for (const auto &h : inst.h)
      b.eq.appendRow(h.grad);
    for (auto i : S.ig)
      b.ineq.appendRow(inst.g[i].grad);
    for (auto i : model::setUnion(S.i0plus, p.beta1))
      b.eq.appendRow(inst.G[i].grad);
    for (auto i : p.beta1)
      b.ineq.appendRow(-inst.H[i].grad);
    for (auto i : model::setUnion(S.iplus0, p.beta2))
      b.eq.appendRow(inst.H[i].grad);
    for (auto i : p.beta2)
      b.ineq.appendRow(-inst.G[i].grad);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Branch> linearizedBranches(const MpvcInstance &inst, std::size_t cap) {
  auto S = model::activeSets(inst);
  std::vector<Branch> out;
  for (const auto &p : model::enumeratePartitions(S.i00, cap)) {
    Branch b = pairedBranch(inst.n, branchLabel(p));
    for (const auto &h : inst.h)
      b.eq.appendRow(h.grad);
    for (auto i : S.ig)
      b.ineq.appendRow(inst.g[i].grad);
    for (auto i : model::setUnion(S.i0plus, p.beta1))
      b.eq.appendRow(inst.H[i].grad);
    for (auto i : model::setUnion(S.i0minus, p.beta2))
      b.ineq.appendRow(-inst.H[i].grad);
    for (auto i : model::setUnion(S.iplus0, p.beta2))
      b.ineq.appendRow(inst.G[i].grad);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<Branch> linearizedBranches(const ge::Setup &s, std::size_t cap) {
  const auto &inst = s.inst;
  const auto &P = s.poly;
  const std::size_t n = inst.n, m = inst.m;
  std::vector<Branch> out;
  for (const auto &split : model::enumeratePartitions(P.izero, cap)) {
    const IndexSet &beta = split.beta1;
    // Columns: u (n), v (m), μ on beta (>= 0), μ on iplus (free).
    Branch b;
    b.label = "branch beta=" + formatIndexSet(beta);
    b.dim = n + m;
    b.aux = beta.size() + P.iplus.size();
    b.auxNonNeg = beta.size();
    const std::size_t width = b.dim + b.aux;
    b.eq = Matrix(0, width);
    b.ineq = Matrix(0, width);
    for (std::size_t r = 0; r < inst.tangentC.eq.rows(); ++r)
      b.eq.appendRow(padded(inst.tangentC.eq.row(r), width));
    for (std::size_t r = 0; r < inst.tangentC.ineq.rows(); ++r)
      b.ineq.appendRow(padded(inst.tangentC.ineq.row(r), width));
    auto vRow = [&](std::size_t i) {
      Vec row(width, Rational(0));
      for (std::size_t k = 0; k < m; ++k)
        row[n + k] = inst.g[i].grad[k];
      return row;
    };
    for (auto i : model::setUnion(P.iplus, beta))
      b.eq.appendRow(vRow(i));
    for (auto i : model::setDifference(P.izero, beta))
      b.ineq.appendRow(vRow(i));
    // -Gx u - Gy v - W v - Σ μ_i ∇g_i = 0.
    std::vector<std::size_t> muIndex = beta;
    muIndex.insert(muIndex.end(), P.iplus.begin(), P.iplus.end());
    for (std::size_t r = 0; r < m; ++r) {
      Vec row(width, Rational(0));
      for (std::size_t k = 0; k < n; ++k)
        row[k] = -inst.gx(r, k);
      for (std::size_t k = 0; k < m; ++k)
        row[n + k] = -inst.gy(r, k) - s.shift(r, k);
      for (std::size_t a = 0; a < muIndex.size(); ++a)
        row[n + m + a] = -inst.g[muIndex[a]].grad[r];
      b.eq.appendRow(row);
    }
    out.push_back(std::move(b));
  }
  return out;
}

bool inBranch(const Branch &b, const Vec &point) {
  if (point.size() != b.dim + b.aux)
    return false;
  for (std::size_t r = 0; r < b.eq.rows(); ++r)
    if (sgn(dot(b.eq.row(r), point)) != 0)
      return false;
  for (std::size_t r = 0; r < b.ineq.rows(); ++r)
    if (sgn(dot(b.ineq.row(r), point)) > 0)
      return false;
  for (std::size_t a = 0; a < b.auxNonNeg; ++a)
    if (sgn(point[b.dim + a]) < 0)
      return false;
  return true;
}

BranchOutcome minimizeOnBranch(const Branch &b, const Vec &fGrad) {
  LpModel lp;
  lp.addVariables(b.dim, Sign::Free);
  lp.addVariables(b.auxNonNeg, Sign::NonNeg);
  lp.addVariables(b.aux - b.auxNonNeg, Sign::Free);
  for (std::size_t r = 0; r < b.eq.rows(); ++r)
    lp.addEquality(polylp::termsFrom(0, b.eq.row(r)), 0);
  for (std::size_t r = 0; r < b.ineq.rows(); ++r)
    lp.addLessEqual(polylp::termsFrom(0, b.ineq.row(r)), 0);
  lp.setObjective(polylp::termsFrom(0, fGrad), Sense::Minimize);
  auto r = lp.solve();
  BranchOutcome out;
  if (r.status == LpStatus::Optimal) {
    if (sgn(r.objective) != 0)
      fail(ErrorKind::Internal, "conic branch LP has nonzero optimum");
    return out;
  }
  if (r.status != LpStatus::Unbounded)
    fail(ErrorKind::Internal, "conic branch LP is infeasible");
  if (!inBranch(b, r.ray))
    fail(ErrorKind::Internal, "descent ray leaves its branch");
  out.descent = true;
  out.direction = polylp::primitive(Vec(r.ray.begin(), r.ray.begin() + static_cast<std::ptrdiff_t>(b.dim)));
  if (sgn(dot(fGrad, out.direction)) >= 0)
    fail(ErrorKind::Internal, "descent ray is not a descent direction");
  return out;
}

namespace {

Certificate runOracle(const std::vector<Branch> &branches, const Vec &fGrad) {
  Certificate c;
  c.stationarity = Stationarity::B;
  c.verdict = Verdict::True;
  for (const auto &b : branches) {
    auto o = minimizeOnBranch(b, fGrad);
    if (o.descent) {
      c.verdict = Verdict::False;
      c.refutation = Blocks{{"descent_direction", o.direction}};
      c.notes.push_back("descent on " + b.label + ", <grad f, u> = " +
                        formatRational(dot(fGrad, o.direction)));
      break;
    }
  }
  c.notes.push_back("branches of the linearized cone: " + std::to_string(branches.size()));
  c.notes.push_back("verdict is relative to the linearized cone; it is B-stationarity under GGCQ");
  return c;
}

} // namespace

Certificate bStationaryOracle(const MpccInstance &inst, std::size_t cap) {
  return runOracle(linearizedBranches(inst, cap), inst.fGrad);
}

Certificate bStationaryOracle(const MpvcInstance &inst, std::size_t cap) {
  return runOracle(linearizedBranches(inst, cap), inst.fGrad);
}

Certificate bStationaryOracle(const ge::Setup &s, std::size_t cap) {
  Certificate c = runOracle(linearizedBranches(s, cap), s.inst.fGrad);
  if (!s.constancy.established)
    c.notes.push_back("branch cover uses the fixed multiplier; constancy of directional "
                      "multipliers was not established");
  return c;
}

// ---------------------------------------------------------------------------
// Implication audit.

namespace {

struct Verdicts {
  const Report &r;
  std::vector<std::string> out;

  const Certificate *first(Stationarity s) const {
    for (const auto &c : r.certificates)
      if (c.stationarity == s && c.verdict != Verdict::Unavailable)
        return &c;
    return nullptr;
  }
  std::vector<const Certificate *> all(Stationarity s) const {
    std::vector<const Certificate *> v;
    for (const auto &c : r.certificates)
      if (c.stationarity == s && c.verdict != Verdict::Unavailable)
        v.push_back(&c);
    return v;
  }
  const Certificate *q(const Partition &p) const {
    for (const auto *c : all(Stationarity::Q))
      if (c->partition && *c->partition == p)
        return c;
    return nullptr;
  }
  const IndexSet *set(const std::string &name) const {
    for (const auto &s : r.activeSets)
      if (s.name == name)
        return &s.indices;
    return nullptr;
  }
  void edge(bool premise, bool conclusion, const std::string &what) {
    if (premise && !conclusion)
      out.push_back(what);
  }
};

} // namespace

std::vector<std::string> auditReport(const Report &report) {
  Verdicts v{report, {}};
  const bool paired = report.kind != model::ProblemKind::Ge;
  const auto *S = v.first(Stationarity::S);
  const auto *B = v.first(Stationarity::B);
  const auto *M = v.first(Stationarity::M);
  const auto *QM = v.first(Stationarity::QM);
  auto Qs = v.all(Stationarity::Q);
  bool anyQ = std::any_of(Qs.begin(), Qs.end(), [](auto *c) { return c->holds(); });

  if (S && B)
    v.edge(S->holds(), B->holds(), "S => B");
  if (S && M)
    v.edge(S->holds(), M->holds(), "S => M");
  for (const auto *q : Qs) {
    std::string at = q->partition ? " " + formatPartition(*q->partition) : "";
    if (S)
      v.edge(S->holds(), q->holds(), "S => Q" + at);
    if (B)
      v.edge(B->holds(), q->holds(), "B => Q" + at);
    if (q->partition) {
      Partition swapped{q->partition->beta2, q->partition->beta1};
      if (const auto *other = v.q(swapped))
        v.edge(q->holds() != other->holds(), false, "Q symmetric under swap" + at);
    }
  }
  if (paired && B && QM)
    v.edge(B->holds(), QM->holds(), "B => QM");
  if (S && QM)
    v.edge(S->holds(), QM->holds(), "S => QM");
  if (QM && QM->holds()) {
    if (M)
      v.edge(true, M->holds(), "QM => M");
    if (QM->partition)
      if (const auto *q = v.q(*QM->partition))
        v.edge(true, q->holds(), "QM => Q " + formatPartition(*QM->partition));
    if (!Qs.empty())
      v.edge(true, anyQ, "QM => Q for some pair");
  }

  for (const auto &qual : report.qualifications) {
    if (!qual.holds)
      continue;
    std::string at = qual.partition ? " " + formatPartition(*qual.partition) : "";
    if (qual.name == "licq" && S)
      v.edge(anyQ, S->holds(), "licq and Q => S");
    if ((qual.name == "thm5" || qual.name == "thm7" || qual.name == "thm11") && S &&
        qual.partition)
      if (const auto *q = v.q(*qual.partition))
        v.edge(q->holds(), S->holds(), qual.name + at + " and Q => S");
    if (qual.name == "cor5" && S && B)
      v.edge(B->holds(), S->holds(), "cor5" + at + " and B => S");
    if (qual.name == "a3") {
      bool cor5 = false;
      for (const auto &other : report.qualifications)
        if (other.name == "cor5" && other.partition == qual.partition)
          cor5 = other.holds;
      v.edge(true, cor5, "a3" + at + " => cor5");
    }
  }

  if (report.kind == model::ProblemKind::Mpvc) {
    if (const auto *i00 = v.set("I00")) {
      const auto *allFirst = v.q({*i00, {}});
      if (B && allFirst)
        v.edge(B->holds(), allFirst->holds(), "B => Q (I00, {})");
      if (allFirst && QM)
        v.edge(allFirst->holds(), QM->holds(), "Q (I00, {}) => QM");
      const auto *allSecond = v.q({{}, *i00});
      for (const auto &qual : report.qualifications)
        if (qual.name == "biactive_nonneg_multiplier" && allSecond)
          v.edge(allSecond->holds(), qual.holds,
                 "Q ({}, I00) => multiplier nonnegative on biactive pairs");
    }
  }
  return v.out;
}

std::vector<std::string> implicationAudit(const model::Instance &inst) {
  return std::visit(
      [](const auto &i) -> std::vector<std::string> {
        using T = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<T, MpccInstance>)
          return auditReport(mpcc::certifyMpcc(i));
        else if constexpr (std::is_same_v<T, MpvcInstance>)
          return auditReport(mpvc::certifyMpvc(i));
        else
          return auditReport(ge::certifyGe(i));
      },
      inst);
}

// ---------------------------------------------------------------------------
// Random instances.

namespace {

// Portable draws from a fixed engine (distribution objects are not portable).
class Draw {
public:
  explicit Draw(std::uint64_t seed) : gen_(seed * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull) {}
  long integer(long lo, long hi) {
    return lo + static_cast<long>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::size_t index(std::size_t count) { return static_cast<std::size_t>(gen_() % count); }
  Vec vector(std::size_t n, long lo, long hi) {
    Vec v(n);
    for (auto &x : v)
      x = integer(lo, hi);
    return v;
  }
  Vec nonzero(std::size_t n, long lo, long hi) {
    for (;;) {
      Vec v = vector(n, lo, hi);
      if (!isZero(v))
        return v;
    }
  }
  Rational entry(Sign s) {
    switch (s) {
    case Sign::Free: return integer(-2, 2);
    case Sign::NonNeg: return integer(0, 2);
    case Sign::NonPos: return integer(-2, 0);
    default: return 0;
    }
  }

private:
  std::mt19937_64 gen_;
};

RandomShape drawShape(Draw &d) {
  RandomShape s;
  s.n = static_cast<std::size_t>(d.integer(1, 6));
  s.equalities = static_cast<std::size_t>(d.integer(0, std::min<long>(2, static_cast<long>(s.n) - 1)));
  s.inequalities = static_cast<std::size_t>(d.integer(0, 3));
  s.pairs = static_cast<std::size_t>(d.integer(1, 4));
  s.biactive = static_cast<std::size_t>(d.integer(0, std::min<long>(3, static_cast<long>(s.pairs))));
  return s;
}

void checkShape(const RandomShape &s) {
  if (s.n == 0 || s.n > 6 || s.equalities > 4 || s.inequalities > 4 || s.pairs > 4 ||
      s.biactive > 3 || s.biactive > s.pairs)
    fail(ErrorKind::DimensionMismatch, "random instance shape outside n <= 6, families <= 4, "
                                       "biactive <= 3");
}

// Classes for the non-biactive pairs are drawn from `choices`; biactive
// positions are drawn without replacement.
std::vector<int> pairClasses(Draw &d, const RandomShape &s, int biactiveClass,
                             const std::vector<int> &choices) {
  std::vector<int> cls(s.pairs, -1);
  std::size_t placed = 0;
  while (placed < s.biactive) {
    std::size_t k = d.index(s.pairs);
    if (cls[k] == -1) {
      cls[k] = biactiveClass;
      ++placed;
    }
  }
  for (auto &c : cls)
    if (c == -1)
      c = choices[d.index(choices.size())];
  return cls;
}

void fillCommon(Draw &d, const RandomShape &s, model::PairedProgram &p) {
  p.n = s.n;
  p.affine = true;
  for (std::size_t i = 0; i < s.equalities; ++i)
    p.h.push_back({0, d.nonzero(s.n, -2, 2)});
  for (std::size_t i = 0; i < s.inequalities; ++i)
    p.g.push_back({d.integer(0, 2) == 0 ? Rational(-d.integer(1, 3)) : Rational(0),
                   d.nonzero(s.n, -2, 2)});
}

// The objective is -(image of a random multiplier) for some draws so that
// stationary instances are well represented.
Vec drawObjective(Draw &d, const paired::Layout &L, const std::vector<paired::SignPattern> &patterns) {
  long mode = d.integer(0, 5);
  if (mode == 0)
    return d.vector(L.n, -3, 3);
  if (mode == 1)
    return zeros(L.n);
  const auto &pat = patterns[d.index(patterns.size())];
  Vec lambda(pat.size());
  for (std::size_t k = 0; k < pat.size(); ++k)
    lambda[k] = d.entry(pat[k]);
  return -paired::image(L, lambda);
}

} // namespace

MpccInstance randomMpcc(std::uint64_t seed, std::optional<RandomShape> shape) {
  Draw d(seed);
  RandomShape s = shape ? *shape : drawShape(d);
  checkShape(s);
  MpccInstance inst;
  fillCommon(d, s, inst);
  // 0: G = 0 < H, 1: biactive, 2: G > 0 = H.
  for (int c : pairClasses(d, s, 1, {0, 2})) {
    Rational gv = c == 2 ? Rational(d.integer(1, 3)) : Rational(0);
    Rational hv = c == 0 ? Rational(d.integer(1, 3)) : Rational(0);
    inst.G.push_back({gv, d.nonzero(s.n, -2, 2)});
    inst.H.push_back({hv, d.nonzero(s.n, -2, 2)});
  }
  auto L = paired::mpccLayout(inst);
  std::vector<paired::SignPattern> patterns{mpcc::regularNormalPattern(inst)};
  std::size_t k = model::activeSets(inst).i00.size();
  paired::forEachBranch(k, 3, paired::kDefaultBranchCap, [&](const std::vector<std::size_t> &ch) {
    patterns.push_back(mpcc::limitingBranchPattern(inst, ch));
    return false;
  });
  for (const auto &p : model::enumeratePartitions(model::activeSets(inst).i00))
    patterns.push_back(mpcc::buildQccPair(inst, p).firstPolar);
  inst.fGrad = drawObjective(d, L, patterns);
  return inst;
}

MpvcInstance randomMpvc(std::uint64_t seed, std::optional<RandomShape> shape) {
  Draw d(seed);
  RandomShape s = shape ? *shape : drawShape(d);
  checkShape(s);
  MpvcInstance inst;
  fillCommon(d, s, inst);
  // 0: H = 0 > G, 1: biactive, 2: H = 0 < G, 3: H > 0 = G, 4: H > 0 > G.
  for (int c : pairClasses(d, s, 1, {0, 2, 3, 4})) {
    Rational hv = c >= 3 ? Rational(d.integer(1, 3)) : Rational(0);
    Rational gv = 0;
    if (c == 0 || c == 4)
      gv = -d.integer(1, 3);
    else if (c == 2)
      gv = d.integer(1, 3);
    inst.H.push_back({hv, d.nonzero(s.n, -2, 2)});
    inst.G.push_back({gv, d.nonzero(s.n, -2, 2)});
  }
  auto L = paired::mpvcLayout(inst);
  std::vector<paired::SignPattern> patterns{mpvc::regularNormalPattern(inst)};
  std::size_t k = model::activeSets(inst).i00.size();
  paired::forEachBranch(k, 2, paired::kDefaultBranchCap, [&](const std::vector<std::size_t> &ch) {
    patterns.push_back(mpvc::limitingBranchPattern(inst, ch));
    return false;
  });
  for (const auto &p : model::enumeratePartitions(model::activeSets(inst).i00))
    patterns.push_back(mpvc::buildQvcPair(inst, p).firstPolar);
  inst.fGrad = drawObjective(d, L, patterns);
  return inst;
}

GeInstance randomGe(std::uint64_t seed) {
  Draw d(seed);
  GeInstance inst;
  inst.n = static_cast<std::size_t>(d.integer(1, 3));
  inst.m = static_cast<std::size_t>(d.integer(1, 3));
  const std::size_t n = inst.n, m = inst.m;
  inst.affine = true;
  inst.gx = Matrix(m, n);
  inst.gy = Matrix(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k < n; ++k)
      inst.gx(r, k) = d.integer(-2, 2);
    for (std::size_t k = 0; k < m; ++k)
      inst.gy(r, k) = d.integer(-2, 2);
  }
  // 0: inactive, 1: strictly complementary, 2: biactive.
  std::vector<int> cls(m);
  inst.gValue = zeros(m);
  for (std::size_t i = 0; i < m; ++i) {
    cls[i] = static_cast<int>(d.integer(0, 2));
    model::GeConstraint g;
    g.value = cls[i] == 0 ? Rational(-d.integer(1, 3)) : Rational(0);
    g.grad = unitVector(m, i);
    g.hess = Matrix(m, m);
    inst.g.push_back(g);
    if (cls[i] == 1)
      inst.gValue[i] = -d.integer(1, 3);
  }
  inst.tangentC = polylp::HCone(n);
  std::size_t eqRows = static_cast<std::size_t>(d.integer(0, n > 1 ? 1 : 0));
  std::size_t ineqRows = static_cast<std::size_t>(d.integer(0, 2));
  for (std::size_t r = 0; r < eqRows; ++r)
    inst.tangentC.eq.appendRow(d.nonzero(n, -2, 2));
  for (std::size_t r = 0; r < ineqRows; ++r)
    inst.tangentC.ineq.appendRow(d.nonzero(n, -2, 2));

  // Objective: random, zero, or -∇Fᵀ(η, q*, q) for a regular or limiting normal.
  long mode = d.integer(0, 4);
  if (mode == 0) {
    inst.fGrad = d.vector(n + m, -3, 3);
  } else if (mode == 1) {
    inst.fGrad = zeros(n + m);
  } else {
    Vec eta = zeros(n);
    for (std::size_t r = 0; r < inst.tangentC.eq.rows(); ++r)
      eta = eta + Rational(d.integer(-2, 2)) * inst.tangentC.eq.row(r);
    for (std::size_t r = 0; r < inst.tangentC.ineq.rows(); ++r)
      eta = eta + Rational(d.integer(0, 2)) * inst.tangentC.ineq.row(r);
    Vec qs(m), q(m);
    for (std::size_t i = 0; i < m; ++i) {
      switch (cls[i]) {
      case 0: qs[i] = 0; q[i] = d.integer(-2, 2); break;
      case 1: qs[i] = d.integer(-2, 2); q[i] = 0; break;
      default:
        if (mode == 2) {
          qs[i] = d.integer(0, 2);
          q[i] = -d.integer(0, 2);
        } else if (d.integer(0, 1) == 0) {
          qs[i] = 0;
          q[i] = d.integer(-2, 2);
        } else {
          qs[i] = d.integer(-2, 2);
          q[i] = 0;
        }
      }
    }
    Vec x = eta - inst.gx.applyTranspose(q);
    Vec y = qs - inst.gy.applyTranspose(q);
    inst.fGrad = -concat(x, y);
  }
  return inst;
}

namespace {

void requireOrthantForm(const GeInstance &inst) {
  if (!inst.zeroCurvature() || inst.g.size() != inst.m)
    fail(ErrorKind::DimensionMismatch,
         "complementarity encoding needs zero curvature and g_i(y) = y_i");
  for (std::size_t i = 0; i < inst.m; ++i)
    if (inst.g[i].grad != unitVector(inst.m, i))
      fail(ErrorKind::DimensionMismatch,
           "complementarity encoding needs g_i(y) = y_i");
}

} // namespace

MpccInstance encodeGeAsMpcc(const GeInstance &inst) {
  requireOrthantForm(inst);
  const std::size_t n = inst.n, m = inst.m, N = n + m;
  MpccInstance out;
  out.n = N;
  out.fGrad = inst.fGrad;
  out.affine = true;
  for (std::size_t r = 0; r < inst.tangentC.eq.rows(); ++r)
    out.h.push_back({0, padded(inst.tangentC.eq.row(r), N)});
  for (std::size_t r = 0; r < inst.tangentC.ineq.rows(); ++r)
    out.g.push_back({0, padded(inst.tangentC.ineq.row(r), N)});
  for (std::size_t i = 0; i < m; ++i) {
    Vec gGrad(N, Rational(0));
    gGrad[n + i] = -1;
    out.G.push_back({-inst.g[i].value, gGrad});
    Vec hGrad(N);
    for (std::size_t k = 0; k < n; ++k)
      hGrad[k] = -inst.gx(i, k);
    for (std::size_t k = 0; k < m; ++k)
      hGrad[n + k] = -inst.gy(i, k);
    out.H.push_back({-inst.gValue[i], hGrad});
  }
  return out;
}

ge::NdBranches orthantNdBranches(const GeInstance &inst) {
  requireOrthantForm(inst);
  const std::size_t m = inst.m;
  auto poly = ge::multiplierPolytope(inst);
  auto qs = [&](std::size_t i) { return unitVector(2 * m, i); };
  auto q = [&](std::size_t i) { return unitVector(2 * m, m + i); };
  ge::NdBranches out;
  paired::forEachBranch(poly.izero.size(), 3, paired::kDefaultBranchCap,
                        [&](const std::vector<std::size_t> &choice) {
                          polylp::HCone c(2 * m);
                          for (auto i : poly.inactive)
                            c.eq.appendRow(qs(i));
                          for (auto i : poly.iplus)
                            c.eq.appendRow(q(i));
                          for (std::size_t j = 0; j < choice.size(); ++j) {
                            std::size_t i = poly.izero[j];
                            if (choice[j] == 0) {
                              c.ineq.appendRow(-qs(i));
                              c.ineq.appendRow(q(i));
                            } else if (choice[j] == 1) {
                              c.eq.appendRow(qs(i));
                            } else {
                              c.eq.appendRow(q(i));
                            }
                          }
                          out.push_back(std::move(c));
                          return false;
                        });
  return out;
}

} // namespace statcert::oracle
