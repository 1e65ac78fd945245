#pragma once

// Exact polyhedral calculus: rational simplex with certificates, strict
// feasibility, cone polarity and membership, lineality and relative interior.

#include "statcert/rational.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace statcert::polylp {

/// Rows a_i x (= or <=) b_i depending on where the system is used.
struct LinearSystem {
  Matrix a;
  Vec b;

  LinearSystem() = default;
  explicit LinearSystem(std::size_t dim) : a(0, dim) {}
  LinearSystem(Matrix a, Vec b);
  std::size_t rows() const { return a.rows(); }
  std::size_t dim() const { return a.cols(); }
  void add(const Vec &row, const Rational &rhs);
};

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

/// Sign restriction on an LP variable or multiplier coordinate.
enum class Sign { Free, NonNeg, NonPos, Zero };

/// Result of an exact LP solve. Exactly one certificate group is populated.
///
/// Optimal: point, value and dual. For minimization A_free^T y = c_free,
/// (c - A^T y) >= 0 on nonnegative variables, y_ineq <= 0 and b^T y = value;
/// for maximization the inequalities flip to (A^T y - c) >= 0, y_ineq >= 0.
///
/// Infeasible: farkas f = (f_eq, f_ineq) with f_ineq >= 0, (A^T f) = 0 on free
/// variables, (A^T f) >= 0 on nonnegative variables and b^T f < 0.
///
/// Unbounded: ray d with A_eq d = 0, A_ineq d <= 0, d >= 0 on nonnegative
/// variables and c^T d < 0 (minimize) or > 0 (maximize).
struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  Vec point;
  Rational value;
  Vec dual;
  Vec farkas;
  Vec ray;
};

/// Solves optimize c^T x s.t. eq (=), ineq (<=) with all variables free.
LpOutcome lpSolve(const Vec &objective, const LinearSystem &eq, const LinearSystem &ineq,
                  Sense sense);

/// Same as lpSolve but with per-variable sign (Free or NonNeg only).
LpOutcome lpSolveSigned(const Vec &objective, const LinearSystem &eq,
                        const LinearSystem &ineq, const std::vector<Sign> &signs,
                        Sense sense);

/// Exact re-verification of every certificate in an outcome.
bool verifyOutcome(const LpOutcome &outcome, const Vec &objective, const LinearSystem &eq,
                   const LinearSystem &ineq, const std::vector<Sign> &signs, Sense sense);

/// Number of LPs solved by this thread so far.
std::size_t lpSolveCount();

/// Incremental LP builder with named sign restrictions. NonPos variables are
/// stored negated, Zero variables are never passed to the solver.
class LpModel {
public:
  using Term = std::pair<std::size_t, Rational>;
  using Terms = std::vector<Term>;

  std::size_t addVariable(Sign sign);
  /// Returns the index of the first of count new variables.
  std::size_t addVariables(std::size_t count, Sign sign);
  std::size_t variables() const { return signs_.size(); }
  Sign sign(std::size_t var) const { return signs_[var]; }

  std::size_t addEquality(const Terms &terms, const Rational &rhs);
  std::size_t addLessEqual(const Terms &terms, const Rational &rhs);
  std::size_t addGreaterEqual(const Terms &terms, const Rational &rhs);
  std::size_t equalities() const { return eqTerms_.size(); }
  std::size_t inequalities() const { return leTerms_.size(); }

  void setObjective(const Terms &terms, Sense sense);

  struct Result {
    LpStatus status = LpStatus::Infeasible;
    Vec values;           // per model variable (Optimal)
    Rational objective;   // Optimal
    Vec ray;              // per model variable (Unbounded)
    Vec farkasEq;         // per model equality (Infeasible)
    Vec farkasLe;         // per model <= row, >= 0 (Infeasible)
    bool feasible() const { return status != LpStatus::Infeasible; }
  };

  Result solve() const;

private:
  std::vector<Sign> signs_;
  std::vector<Terms> eqTerms_;
  Vec eqRhs_;
  std::vector<Terms> leTerms_;
  Vec leRhs_;
  Terms objective_;
  Sense sense_ = Sense::Minimize;
};

/// Helper to write sum_k coeffs[k] * x_{first + k} as model terms.
LpModel::Terms termsFrom(std::size_t first, const Vec &coeffs);

// ---------------------------------------------------------------------------
// Exact linear algebra.

std::size_t rank(const Matrix &m);
/// Basis of {x : m x = 0}, one vector per column of the result list.
std::vector<Vec> nullspace(const Matrix &m);
/// Solves m x = rhs exactly if consistent.
std::optional<Vec> solveLinear(const Matrix &m, const Vec &rhs);

// ---------------------------------------------------------------------------
// Strict feasibility.

struct StrictResult {
  bool feasible = false;
  Vec witness;
  /// When not feasible: multipliers (eq, ineq) with ineq part >= 0, summing the
  /// rows to zero, strict part summing to 1 and rhs combination <= 0. If the
  /// non-strict system itself is infeasible, the multipliers form a Farkas
  /// certificate (strict part may be zero, rhs combination < 0).
  Vec refutation;
  bool baseInfeasible = false;
};

/// Decides whether some x satisfies eq, ineq, with the rows listed in strict
/// holding with strict inequality.
StrictResult strictFeasible(const LinearSystem &eq, const LinearSystem &ineq,
                            const std::vector<std::size_t> &strict);

bool verifyStrict(const StrictResult &r, const LinearSystem &eq, const LinearSystem &ineq,
                  const std::vector<std::size_t> &strict);

// ---------------------------------------------------------------------------
// Cones.

/// {u : eq u = 0, ineq u <= 0}.
struct HCone {
  std::size_t dim = 0;
  Matrix eq;
  Matrix ineq;

  HCone() = default;
  explicit HCone(std::size_t d) : dim(d), eq(0, d), ineq(0, d) {}
  bool contains(const Vec &u) const;
};

/// cone(rays) + span(lin).
struct GCone {
  std::size_t dim = 0;
  std::vector<Vec> rays;
  std::vector<Vec> lin;

  GCone() = default;
  explicit GCone(std::size_t d) : dim(d) {}
};

GCone polar(const HCone &cone);
HCone polar(const GCone &cone);

struct Membership {
  bool member = false;
  Vec rayCoeffs;  // >= 0
  Vec linCoeffs;
  Vec separator;  // <h,x> > 0, <h,ray> <= 0, <h,lin> = 0
};

Membership memberGCone(const Vec &x, const GCone &cone);
bool verifyMembership(const Membership &m, const Vec &x, const GCone &cone);

/// Basis of eq u = 0, ineq u = 0 (the largest subspace inside the cone).
std::vector<Vec> linealitySpace(const HCone &cone);

struct RelativeInterior {
  Vec point;
  std::vector<std::size_t> implicitRows;  // rows of ineq that are = 0 on the cone
};

RelativeInterior relativeInteriorMember(const HCone &cone);

/// Extreme rays of the cone intersected with the orthogonal complement of its
/// lineality space, plus +-lineality basis vectors. Brute force over active row
/// subsets; intended for small dimensions. Throws SubsetLimitExceeded past cap.
std::vector<Vec> extremeDirections(const HCone &cone, std::size_t cap = 1u << 16);

/// Scales v by a positive rational so that its entries are coprime integers.
Vec primitive(const Vec &v);

} // namespace statcert::polylp
