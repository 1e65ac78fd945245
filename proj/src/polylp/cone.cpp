#include "statcert/errors.hpp"
#include "statcert/polylp.hpp"

#include <algorithm>
#include <set>

namespace statcert::polylp {

StrictResult strictFeasible(const LinearSystem &eq, const LinearSystem &ineq,
                            const std::vector<std::size_t> &strict) {
  const std::size_t n = eq.dim();
  if (ineq.dim() != n)
    fail(ErrorKind::DimensionMismatch, "strictFeasible: systems of different width");
  std::vector<bool> isStrict(ineq.rows(), false);
  for (auto i : strict) {
    if (i >= ineq.rows())
      fail(ErrorKind::DimensionMismatch, "strict row index out of range");
    isStrict[i] = true;
  }
  // Variables (x, t): maximize t, strict rows a x + t <= b, t <= 1.
  LinearSystem e(n + 1), in(n + 1);
  for (std::size_t i = 0; i < eq.rows(); ++i) {
    Vec row = eq.a.row(i);
    row.push_back(0);
    e.add(row, eq.b[i]);
  }
  for (std::size_t i = 0; i < ineq.rows(); ++i) {
    Vec row = ineq.a.row(i);
    row.push_back(isStrict[i] ? 1 : 0);
    in.add(row, ineq.b[i]);
  }
  in.add(unitVector(n + 1, n), 1);
  LpOutcome out = lpSolve(unitVector(n + 1, n), e, in, Sense::Maximize);

  StrictResult r;
  const std::size_t m = eq.rows() + ineq.rows();
  if (out.status == LpStatus::Infeasible) {
    r.baseInfeasible = true;
    r.refutation.assign(out.farkas.begin(), out.farkas.begin() + static_cast<std::ptrdiff_t>(m));
  } else if (out.status == LpStatus::Optimal && sgn(out.value) > 0) {
    r.feasible = true;
    r.witness.assign(out.point.begin(), out.point.end() - 1);
  } else if (out.status == LpStatus::Optimal) {
    r.refutation.assign(out.dual.begin(), out.dual.begin() + static_cast<std::ptrdiff_t>(m));
  } else {
    fail(ErrorKind::Internal, "strictFeasible: bounded LP reported unbounded");
  }
  if (!verifyStrict(r, eq, ineq, strict))
    fail(ErrorKind::Internal, "strictFeasible: certificate failed verification");
  return r;
}

bool verifyStrict(const StrictResult &r, const LinearSystem &eq, const LinearSystem &ineq,
                  const std::vector<std::size_t> &strict) {
  if (r.feasible) {
    if (eq.a.apply(r.witness) != eq.b)
      return false;
    Vec ax = ineq.a.apply(r.witness);
    for (std::size_t i = 0; i < ax.size(); ++i)
      if (ax[i] > ineq.b[i])
        return false;
    for (auto i : strict)
      if (!(ax[i] < ineq.b[i]))
        return false;
    return true;
  }
  const Vec &y = r.refutation;
  if (y.size() != eq.rows() + ineq.rows())
    return false;
  Vec yEq(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(eq.rows()));
  Vec yIn(y.begin() + static_cast<std::ptrdiff_t>(eq.rows()), y.end());
  for (const auto &v : yIn)
    if (sgn(v) < 0)
      return false;
  if (!isZero(eq.a.applyTranspose(yEq) + ineq.a.applyTranspose(yIn)))
    return false;
  Rational rhs = dot(eq.b, yEq) + dot(ineq.b, yIn);
  if (sgn(rhs) < 0)
    return true;
  Rational strictMass = 0;
  for (auto i : strict)
    strictMass += yIn[i];
  return sgn(strictMass) > 0 && sgn(rhs) <= 0;
}

bool HCone::contains(const Vec &u) const {
  if (u.size() != dim)
    fail(ErrorKind::DimensionMismatch, "HCone membership");
  if (!isZero(eq.apply(u)))
    return false;
  for (const auto &v : ineq.apply(u))
    if (sgn(v) > 0)
      return false;
  return true;
}

GCone polar(const HCone &cone) {
  GCone p(cone.dim);
  for (std::size_t i = 0; i < cone.ineq.rows(); ++i)
    p.rays.push_back(cone.ineq.row(i));
  for (std::size_t i = 0; i < cone.eq.rows(); ++i)
    p.lin.push_back(cone.eq.row(i));
  return p;
}

HCone polar(const GCone &cone) {
  HCone p(cone.dim);
  for (const auto &r : cone.rays)
    p.ineq.appendRow(r);
  for (const auto &l : cone.lin)
    p.eq.appendRow(l);
  return p;
}

Membership memberGCone(const Vec &x, const GCone &cone) {
  if (x.size() != cone.dim)
    fail(ErrorKind::DimensionMismatch, "memberGCone: point and cone dimensions differ");
  LpModel lp;
  std::size_t a0 = lp.addVariables(cone.rays.size(), Sign::NonNeg);
  std::size_t b0 = lp.addVariables(cone.lin.size(), Sign::Free);
  for (std::size_t d = 0; d < cone.dim; ++d) {
    LpModel::Terms t;
    for (std::size_t k = 0; k < cone.rays.size(); ++k)
      if (sgn(cone.rays[k][d]) != 0)
        t.emplace_back(a0 + k, cone.rays[k][d]);
    for (std::size_t k = 0; k < cone.lin.size(); ++k)
      if (sgn(cone.lin[k][d]) != 0)
        t.emplace_back(b0 + k, cone.lin[k][d]);
    lp.addEquality(t, x[d]);
  }
  auto res = lp.solve();
  Membership m;
  if (res.feasible()) {
    m.member = true;
    m.rayCoeffs.assign(res.values.begin() + static_cast<std::ptrdiff_t>(a0),
                       res.values.begin() + static_cast<std::ptrdiff_t>(b0));
    m.linCoeffs.assign(res.values.begin() + static_cast<std::ptrdiff_t>(b0), res.values.end());
  } else {
    m.separator = -res.farkasEq;
  }
  if (!verifyMembership(m, x, cone))
    fail(ErrorKind::Internal, "memberGCone: certificate failed verification");
  return m;
}

bool verifyMembership(const Membership &m, const Vec &x, const GCone &cone) {
  if (m.member) {
    if (m.rayCoeffs.size() != cone.rays.size() || m.linCoeffs.size() != cone.lin.size())
      return false;
    Vec s = zeros(cone.dim);
    for (std::size_t k = 0; k < cone.rays.size(); ++k) {
      if (sgn(m.rayCoeffs[k]) < 0)
        return false;
      s = s + m.rayCoeffs[k] * cone.rays[k];
    }
    for (std::size_t k = 0; k < cone.lin.size(); ++k)
      s = s + m.linCoeffs[k] * cone.lin[k];
    return s == x;
  }
  if (m.separator.size() != cone.dim || sgn(dot(m.separator, x)) <= 0)
    return false;
  for (const auto &r : cone.rays)
    if (sgn(dot(m.separator, r)) > 0)
      return false;
  for (const auto &l : cone.lin)
    if (sgn(dot(m.separator, l)) != 0)
      return false;
  return true;
}

std::vector<Vec> linealitySpace(const HCone &cone) {
  return nullspace(stack(cone.eq, cone.ineq));
}

RelativeInterior relativeInteriorMember(const HCone &cone) {
  LinearSystem eq(cone.eq, zeros(cone.eq.rows()));
  LinearSystem ineq(cone.ineq, zeros(cone.ineq.rows()));
  const std::size_t rows = cone.ineq.rows();
  std::vector<int> state(rows, 0);  // 0 unknown, 1 strictly satisfiable, -1 implicit
  for (std::size_t i = 0; i < rows; ++i) {
    if (state[i] != 0)
      continue;
    auto r = strictFeasible(eq, ineq, {i});
    if (!r.feasible) {
      state[i] = -1;
      continue;
    }
    Vec ax = cone.ineq.apply(r.witness);
    for (std::size_t k = i; k < rows; ++k)
      if (sgn(ax[k]) < 0)
        state[k] = 1;
  }
  RelativeInterior ri;
  std::vector<std::size_t> strict;
  for (std::size_t i = 0; i < rows; ++i) {
    if (state[i] < 0)
      ri.implicitRows.push_back(i);
    else
      strict.push_back(i);
  }
  if (strict.empty()) {
    ri.point = zeros(cone.dim);
    return ri;
  }
  auto r = strictFeasible(eq, ineq, strict);
  if (!r.feasible)
    fail(ErrorKind::Internal, "relative interior: rows strictly satisfiable one by one "
                              "but not jointly");
  ri.point = primitive(r.witness);
  return ri;
}

std::vector<Vec> extremeDirections(const HCone &cone, std::size_t cap) {
  const std::size_t d = cone.dim;
  auto lin = linealitySpace(cone);
  std::vector<Vec> out;
  for (const auto &l : lin) {
    out.push_back(primitive(l));
    out.push_back(primitive(-l));
  }
  Matrix base = cone.eq;
  for (const auto &l : lin)
    base.appendRow(l);
  const std::size_t baseRank = rank(base);
  if (baseRank + 1 > d)
    return out;
  const std::size_t need = d - 1 - baseRank;  // extra independent active rows
  const std::size_t m = cone.ineq.rows();
  if (need > m)
    return out;
  std::set<std::vector<std::string>> seen;
  std::size_t visited = 0;
  std::vector<std::size_t> pick(need);
  for (std::size_t k = 0; k < need; ++k)
    pick[k] = k;
  for (;;) {
    if (++visited > cap)
      fail(ErrorKind::SubsetLimitExceeded, "extreme direction enumeration exceeded cap " +
                                               std::to_string(cap));
    Matrix sys = base;
    for (auto i : pick)
      sys.appendRow(cone.ineq.row(i));
    auto ns = nullspace(sys);
    if (ns.size() == 1) {
      for (int s : {1, -1}) {
        Vec v = primitive(Rational(s) * ns[0]);
        if (!cone.contains(v))
          continue;
        std::vector<std::string> key;
        for (const auto &x : v)
          key.push_back(x.get_str());
        if (seen.insert(key).second)
          out.push_back(v);
      }
    }
    // next combination
    if (need == 0)
      break;
    std::size_t k = need;
    while (k > 0 && pick[k - 1] == m - need + (k - 1))
      --k;
    if (k == 0)
      break;
    ++pick[k - 1];
    for (std::size_t j = k; j < need; ++j)
      pick[j] = pick[j - 1] + 1;
  }
  return out;
}

} // namespace statcert::polylp
