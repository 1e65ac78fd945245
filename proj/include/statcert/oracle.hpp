#pragma once

// Independent checks: branch-wise B-stationarity over the linearized cone,
// implication audits over computed reports, and seeded random instances.

#include "statcert/ge.hpp"
#include "statcert/model.hpp"
#include "statcert/report.hpp"

#include <cstdint>

namespace statcert::oracle {

using model::GeInstance;
using model::MpccInstance;
using model::MpvcInstance;

/// One polyhedral piece of the linearized cone: rows over (u, aux) with aux
/// auxiliary variables (GE pieces carry multipliers). aux signs are NonNeg
/// for the first auxNonNeg entries and free otherwise.
struct Branch {
  std::string label;
  std::size_t dim = 0;   // primal direction length
  std::size_t aux = 0;
  std::size_t auxNonNeg = 0;
  Matrix eq;             // (dim + aux) columns, = 0
  Matrix ineq;           // <= 0
};

std::vector<Branch> linearizedBranches(const MpccInstance &inst, std::size_t cap = model::kDefaultCap);
std::vector<Branch> linearizedBranches(const MpvcInstance &inst, std::size_t cap = model::kDefaultCap);
std::vector<Branch> linearizedBranches(const ge::Setup &s, std::size_t cap = model::kDefaultCap);

/// Whether (u, aux) satisfies the branch rows and aux signs.
bool inBranch(const Branch &b, const Vec &point);

struct BranchOutcome {
  bool descent = false;
  Vec direction;   // primal part, <∇f, u> < 0
};
BranchOutcome minimizeOnBranch(const Branch &b, const Vec &fGrad);

/// B-stationarity relative to the linearized cone: every branch LP has
/// optimum 0. Refutation: a re-verified descent direction.
Certificate bStationaryOracle(const MpccInstance &inst, std::size_t cap = model::kDefaultCap);
Certificate bStationaryOracle(const MpvcInstance &inst, std::size_t cap = model::kDefaultCap);
Certificate bStationaryOracle(const ge::Setup &s, std::size_t cap = model::kDefaultCap);

/// Violated implication edges among the report's verdicts.
std::vector<std::string> auditReport(const Report &report);
/// Certifies the instance and returns the audit.
std::vector<std::string> implicationAudit(const model::Instance &inst);

struct RandomShape {
  std::size_t n = 0;
  std::size_t equalities = 0;
  std::size_t inequalities = 0;
  std::size_t pairs = 0;
  std::size_t biactive = 0;
};

/// Affine instances with the origin feasible; the shape is drawn from the seed
/// unless given. n <= 6, each family <= 4, biactive <= 3.
MpccInstance randomMpcc(std::uint64_t seed, std::optional<RandomShape> shape = std::nullopt);
MpvcInstance randomMpvc(std::uint64_t seed, std::optional<RandomShape> shape = std::nullopt);
/// Zero-curvature instance with Γ = nonpositive orthant (g_i(y) = y_i) and
/// polyhedral C.
GeInstance randomGe(std::uint64_t seed);

/// The complementarity reformulation of a zero-curvature orthant GE:
/// 0 <= -y ⊥ -G(x,y) >= 0 with the linearization of C as h and g rows.
MpccInstance encodeGeAsMpcc(const GeInstance &inst);
/// Limiting normal branches of gph N̂_Γ for the orthant, one per biactive
/// choice (q = 0, q* = 0, or q* >= 0 >= q).
ge::NdBranches orthantNdBranches(const GeInstance &inst);

} // namespace statcert::oracle
