#pragma once

// Stationarity for programs constrained by a generalized equation
// 0 ∈ G(x,y) + N̂_Γ(y), x ∈ C, with Γ = {y : g(y) <= 0} and polyhedral
// tangent cone of C, decided from point data.

#include "statcert/model.hpp"
#include "statcert/paired.hpp"
#include "statcert/report.hpp"

#include <optional>

namespace statcert::ge {

using model::GeInstance;
using model::IndexSet;
using model::Partition;
using polylp::GCone;
using polylp::HCone;

struct Limits {
  std::size_t subsetCap = model::kDefaultCap;
  std::size_t branchCap = paired::kDefaultBranchCap;
};

/// Lagrange multipliers of the lower-level constraints at (ȳ, ȳ* = -G).
struct MultiplierPolytope {
  IndexSet active;
  IndexSet iplus;   // indices positive for some multiplier
  IndexSet izero;   // active \ iplus
  IndexSet inactive;
  Vec lambdaPlus;   // multiplier with positive entries exactly on iplus
  Vec lower, upper; // coordinate-wise range over the polytope
  bool singleton() const { return lower == upper; }
};

/// Throws MfcqViolated or GeInfeasibleAtPoint; Internal if the zero-sum
/// property on izero fails.
MultiplierPolytope multiplierPolytope(const GeInstance &inst);
/// No γ >= 0 on izero with Σ_active γ_i ∇g_i = 0 has a positive izero entry.
bool zeroSumProperty(const GeInstance &inst, const MultiplierPolytope &poly);

HCone criticalCone(const GeInstance &inst, const MultiplierPolytope &poly);
/// Generator form: lin ∇g_i on iplus, rays ∇g_i on izero.
GCone criticalConePolar(const GeInstance &inst, const MultiplierPolytope &poly);
/// {v : ∇g_i v = 0 on iplus ∪ beta, <= 0 on izero \ beta}.
HCone branchCone(const GeInstance &inst, const MultiplierPolytope &poly, const IndexSet &beta);
/// {Σ_{iplus ∪ beta} μ_i ∇g_i : μ_i >= 0 on beta}.
GCone branchConeDual(const GeInstance &inst, const MultiplierPolytope &poly, const IndexSet &beta);

/// Σ λ_i ∇²g_i.
Matrix hessianShift(const GeInstance &inst, const Vec &lambda);
/// (vᵀ∇²g_i v)_i.
Vec curvatureObjective(const GeInstance &inst, const Vec &v);

struct DirectionalMultipliers {
  Rational value;
  Vec maximizer;
  Vec objective;  // the optimal face is {λ ∈ Λ̄ : objectiveᵀλ = value}
};
DirectionalMultipliers directionalMultipliers(const GeInstance &inst,
                                              const MultiplierPolytope &poly, const Vec &v);
bool sameOptimalFace(const GeInstance &inst, const MultiplierPolytope &poly, const Vec &v1,
                     const Vec &v2);

/// Nonzero point of the critical cone, preferring its relative interior.
std::optional<Vec> nonzeroCriticalDirection(const GeInstance &inst,
                                            const MultiplierPolytope &poly);

struct BgeFamily {
  std::vector<IndexSet> members;
  std::vector<std::pair<IndexSet, IndexSet>> closures;  // (non-member, its closure)
  bool contains(const IndexSet &beta) const;
};
BgeFamily bgeFamily(const GeInstance &inst, const MultiplierPolytope &poly,
                    std::size_t cap = model::kDefaultCap);

struct Constancy {
  bool established = false;
  std::string reason;
};
Constancy directionalConstancy(const GeInstance &inst, const MultiplierPolytope &poly);

struct Setup {
  GeInstance inst;
  MultiplierPolytope poly;
  HCone kbar;
  Vec lambdaBar;
  std::string lambdaSource;
  Matrix shift;  // Hessian of λ̄ᵀg
  Constancy constancy;
};
/// Throws LambdaBarUnavailable when a supplied multiplier is not admissible.
Setup prepare(const GeInstance &inst);

Certificate checkS(const Setup &s);

/// Q_GE^β and its polar. Points of the ambient space are (t, v, v*) of length
/// n + 2m; polar points are (η, q*, q).
struct QgeCone {
  IndexSet beta;
  HCone tangentC;
  HCone kBeta;
  GCone kBetaStar;
  Matrix shift;
};
QgeCone buildQge(const Setup &s, const IndexSet &beta);
bool inQge(const Setup &s, const IndexSet &beta, const Vec &point);
/// Membership in the polar of Q_GE^β (η, q*, q).
bool inQgePolar(const Setup &s, const IndexSet &beta, const Vec &polarPoint);
/// Tangent cone of the constraint set in its constant-multiplier description.
bool inTangentD(const Setup &s, const Vec &point);

/// -∇f ∈ ∇Fᵀ(Q_GE^β)°.
paired::ImageMembership memberQgePolarImage(const Setup &s, const IndexSet &beta);

struct QRoutes {
  bool system = false;
  bool memberships = false;
};
QRoutes qRoutes(const Setup &s, const Partition &pair);
/// Pair (beta1, beta2) with beta1 ∪ beta2 = I0, both in the family; the
/// explicit system and the two polar memberships must agree.
Certificate checkQ(const Setup &s, const Partition &pair);

/// Branch cones of the limiting normal cone to gph N̂_Γ over (q*, q) ∈ R^{2m}.
using NdBranches = std::vector<HCone>;
NdBranches parseNdBranches(const std::string &text, std::size_t m);
/// Verdict Unavailable without branches.
Certificate checkQM(const Setup &s, const std::optional<Partition> &pair,
                    const std::optional<NdBranches> &branches, const Limits &limits = {});

/// Admissible pairs (beta1, beta2) ∈ family², beta1 ∪ beta2 = I0.
std::vector<Partition> admissiblePairs(const BgeFamily &family, const IndexSet &izero,
                                       std::size_t cap = model::kDefaultCap);

struct Theorem11Routes {
  bool primal = true;
  bool dual = true;
  std::vector<std::pair<std::string, bool>> primalParts;
  std::vector<std::pair<std::string, bool>> dualParts;
};
Theorem11Routes theorem11Routes(const Setup &s, const Partition &p);
QualResult qualTheorem11(const Setup &s, const Partition &p);

struct Theorem9Parts {
  bool curvature = false;  // bilinear condition on the critical span
  bool interior = false;   // strict solvability with multipliers > 0 on I0
};
Theorem9Parts theorem9Parts(const Setup &s);
/// Throws ConstancyNotEstablished when the directional multiplier set is not
/// known to be constant.
QualResult qualTheorem9(const Setup &s);

struct CertifyOptions {
  Limits limits;
  bool runOracle = true;
  std::optional<NdBranches> ndBranches;
};
Report certifyGe(const GeInstance &inst, const CertifyOptions &options = {});

} // namespace statcert::ge
