#pragma once

// Random points of the branch cones Q^β and of the tangent cone of the
// equation's constraint set, built from generators rather than from the
// library's membership tests.

#include "support.hpp"

#include "statcert/ge.hpp"

namespace gesamples {

using namespace statcert;

inline Vec concat3(const Vec &a, const Vec &b, const Vec &c) { return concat(concat(a, b), c); }

/// (t, v, Wv + w) with t ∈ T_C, v ∈ K_β, w ∈ K_β*.
inline Vec pointOfBranch(testsupport::Rng &rng, const ge::Setup &s, const model::IndexSet &beta) {
  auto q = ge::buildQge(s, beta);
  Vec t = testsupport::pointInHCone(rng, q.tangentC);
  Vec v = testsupport::pointInHCone(rng, q.kBeta);
  Vec w = testsupport::pointInGCone(rng, q.kBetaStar);
  return concat3(t, v, s.shift.apply(v) + w);
}

/// (t, v, Wv + d) with v critical and d a normal of the critical cone
/// orthogonal to v.
inline Vec pointOfTangent(testsupport::Rng &rng, const ge::Setup &s) {
  const auto &inst = s.inst;
  Vec v = testsupport::pointInHCone(rng, s.kbar);
  polylp::GCone normals(inst.m);
  for (auto i : s.poly.iplus)
    normals.lin.push_back(inst.g[i].grad);
  for (auto i : s.poly.izero)
    if (sgn(dot(inst.g[i].grad, v)) == 0)
      normals.rays.push_back(inst.g[i].grad);
  Vec d = testsupport::pointInGCone(rng, normals);
  return concat3(testsupport::pointInHCone(rng, inst.tangentC), v, s.shift.apply(v) + d);
}

} // namespace gesamples
