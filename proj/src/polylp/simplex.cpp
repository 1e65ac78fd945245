// Dense two-phase tableau simplex over the rationals with Bland's rule.
// Every outcome carries a certificate that is checked exactly before return.

#include "statcert/errors.hpp"
#include "statcert/polylp.hpp"

#include <cassert>
#include <limits>

namespace statcert::polylp {

namespace {

thread_local std::size_t solveCounter = 0;

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Column {
  std::size_t var;  // original variable, or kNone for slack/artificial
  int factor;       // +1 or -1 for structural columns
};

class Tableau {
public:
  Tableau(const Vec &objective, const LinearSystem &eq, const LinearSystem &ineq,
          const std::vector<Sign> &signs, Sense sense);
  LpOutcome run();

private:
  void pivot(std::size_t r, std::size_t c);
  // Returns entering column with negative reduced cost that would be unbounded,
  // or kNone when optimal.
  std::size_t iterate(bool allowArtificial);
  void priceOut(const Vec &cost);
  Vec rowDuals(const Vec &cost) const;
  Vec originalPoint() const;

  std::size_t nOrig_;
  std::size_t mEq_, mIn_;
  std::vector<Column> cols_;
  std::vector<bool> artificial_;
  std::vector<std::size_t> idCol_;  // per original row: column that started as e_i
  std::vector<bool> flipped_;
  std::vector<Vec> t_;      // m rows of width cols+1 (last = rhs)
  Vec obj_;                 // reduced costs, last entry = -objective value
  std::vector<std::size_t> basis_;
  std::vector<bool> live_;  // rows not removed as redundant
  Vec structCost_;
};

Tableau::Tableau(const Vec &objective, const LinearSystem &eq, const LinearSystem &ineq,
                 const std::vector<Sign> &signs, Sense sense)
    : nOrig_(objective.size()), mEq_(eq.rows()), mIn_(ineq.rows()) {
  for (std::size_t j = 0; j < nOrig_; ++j) {
    cols_.push_back({j, 1});
    if (signs[j] == Sign::Free)
      cols_.push_back({j, -1});
  }
  const std::size_t nStruct = cols_.size();
  const std::size_t m = mEq_ + mIn_;
  std::vector<std::size_t> slackCol(m, kNone);
  for (std::size_t i = 0; i < mIn_; ++i) {
    slackCol[mEq_ + i] = cols_.size();
    cols_.push_back({kNone, 1});
  }
  artificial_.assign(cols_.size(), false);
  flipped_.assign(m, false);
  idCol_.assign(m, kNone);
  for (std::size_t i = 0; i < m; ++i) {
    const Rational &rhs = i < mEq_ ? eq.b[i] : ineq.b[i - mEq_];
    flipped_[i] = sgn(rhs) < 0;
    if (i >= mEq_ && !flipped_[i]) {
      idCol_[i] = slackCol[i];
    } else {
      idCol_[i] = cols_.size();
      cols_.push_back({kNone, 1});
      artificial_.push_back(true);
    }
  }
  const std::size_t width = cols_.size() + 1;
  t_.assign(m, Vec(width, Rational(0)));
  for (std::size_t i = 0; i < m; ++i) {
    const bool isEq = i < mEq_;
    const Matrix &a = isEq ? eq.a : ineq.a;
    const std::size_t r = isEq ? i : i - mEq_;
    const int s = flipped_[i] ? -1 : 1;
    for (std::size_t c = 0; c < nStruct; ++c) {
      const Rational &v = a(r, cols_[c].var);
      if (sgn(v) != 0)
        t_[i][c] = (s * cols_[c].factor) * v;
    }
    if (!isEq)
      t_[i][slackCol[i]] = s;
    if (artificial_[idCol_[i]])
      t_[i][idCol_[i]] = 1;
    t_[i][width - 1] = s * (isEq ? eq.b[r] : ineq.b[r]);
  }
  basis_ = idCol_;
  live_.assign(m, true);
  structCost_ = zeros(cols_.size());
  for (std::size_t c = 0; c < nStruct; ++c) {
    Rational v = cols_[c].factor * objective[cols_[c].var];
    structCost_[c] = sense == Sense::Minimize ? v : Rational(-v);
  }
}

void Tableau::pivot(std::size_t r, std::size_t c) {
  Vec &pr = t_[r];
  const std::size_t width = pr.size();
  Rational inv = 1 / pr[c];
  std::vector<std::size_t> nz;
  for (std::size_t k = 0; k < width; ++k)
    if (sgn(pr[k]) != 0) {
      pr[k] *= inv;
      nz.push_back(k);
    }
  auto eliminate = [&](Vec &row) {
    if (sgn(row[c]) == 0)
      return;
    Rational f = row[c];
    for (std::size_t k : nz)
      row[k] -= f * pr[k];
  };
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (i != r && live_[i])
      eliminate(t_[i]);
  eliminate(obj_);
  basis_[r] = c;
}

void Tableau::priceOut(const Vec &cost) {
  const std::size_t width = cols_.size() + 1;
  obj_.assign(width, Rational(0));
  for (std::size_t c = 0; c < cols_.size(); ++c)
    obj_[c] = cost[c];
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!live_[i] || sgn(cost[basis_[i]]) == 0)
      continue;
    const Rational &cb = cost[basis_[i]];
    for (std::size_t k = 0; k < width; ++k)
      if (sgn(t_[i][k]) != 0)
        obj_[k] -= cb * t_[i][k];
  }
}

std::size_t Tableau::iterate(bool allowArtificial) {
  const std::size_t rhs = cols_.size();
  for (;;) {
    std::size_t enter = kNone;
    for (std::size_t c = 0; c < cols_.size(); ++c)
      if ((allowArtificial || !artificial_[c]) && sgn(obj_[c]) < 0) {
        enter = c;
        break;
      }
    if (enter == kNone)
      return kNone;
    std::size_t leave = kNone;
    Rational best;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (!live_[i] || sgn(t_[i][enter]) <= 0)
        continue;
      Rational ratio = t_[i][rhs] / t_[i][enter];
      if (leave == kNone || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == kNone)
      return enter;
    pivot(leave, enter);
  }
}

Vec Tableau::rowDuals(const Vec &cost) const {
  // y_i = c_{id} - reduced cost of the column that started as e_i, in the
  // orientation of the original (unflipped) row.
  Vec y(idCol_.size());
  for (std::size_t i = 0; i < idCol_.size(); ++i) {
    Rational v = cost[idCol_[i]] - obj_[idCol_[i]];
    y[i] = flipped_[i] ? Rational(-v) : v;
  }
  return y;
}

Vec Tableau::originalPoint() const {
  Vec x = zeros(nOrig_);
  const std::size_t rhs = cols_.size();
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!live_[i])
      continue;
    const Column &col = cols_[basis_[i]];
    if (col.var != kNone)
      x[col.var] += col.factor * t_[i][rhs];
  }
  return x;
}

LpOutcome Tableau::run() {
  LpOutcome out;
  const std::size_t rhs = cols_.size();
  // Phase 1.
  Vec cost1 = zeros(cols_.size());
  bool needPhase1 = false;
  for (std::size_t c = 0; c < cols_.size(); ++c)
    if (artificial_[c]) {
      cost1[c] = 1;
      needPhase1 = true;
    }
  if (needPhase1) {
    priceOut(cost1);
    std::size_t unb = iterate(false);
    assert(unb == kNone);
    (void)unb;
    if (sgn(obj_[rhs]) != 0) {
      // w = -obj_[rhs] > 0. y^T A <= 0, y^T b = w > 0; farkas = -y.
      out.status = LpStatus::Infeasible;
      out.farkas = -rowDuals(cost1);
      return out;
    }
    // Drive zero-level artificials out of the basis or drop redundant rows.
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (!artificial_[basis_[i]])
        continue;
      std::size_t c = kNone;
      for (std::size_t k = 0; k < cols_.size(); ++k)
        if (!artificial_[k] && sgn(t_[i][k]) != 0) {
          c = k;
          break;
        }
      if (c == kNone)
        live_[i] = false;
      else
        pivot(i, c);
    }
  }
  // Phase 2.
  priceOut(structCost_);
  std::size_t enter = iterate(false);
  if (enter != kNone) {
    out.status = LpStatus::Unbounded;
    out.ray = zeros(nOrig_);
    if (cols_[enter].var != kNone)
      out.ray[cols_[enter].var] += cols_[enter].factor;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (!live_[i] || sgn(t_[i][enter]) == 0)
        continue;
      const Column &col = cols_[basis_[i]];
      if (col.var != kNone)
        out.ray[col.var] -= col.factor * t_[i][enter];
    }
    return out;
  }
  out.status = LpStatus::Optimal;
  out.point = originalPoint();
  Vec y = rowDuals(structCost_);
  // rowDuals is for minimizing structCost_; for maximize, structCost_ = -c
  // and the user-facing dual is -y.
  out.dual = y;
  return out;
}

bool signedColumnsCheck(const Vec &ata, const std::vector<Sign> &signs, int direction) {
  // direction * ata must be = 0 on free variables and >= 0 on nonnegative ones.
  for (std::size_t j = 0; j < ata.size(); ++j) {
    int s = direction * sgn(ata[j]);
    if (signs[j] == Sign::Free ? s != 0 : s < 0)
      return false;
  }
  return true;
}

} // namespace

LinearSystem::LinearSystem(Matrix a_, Vec b_) : a(std::move(a_)), b(std::move(b_)) {
  if (a.rows() != b.size())
    fail(ErrorKind::DimensionMismatch, "system with " + std::to_string(a.rows()) +
                                           " rows and " + std::to_string(b.size()) +
                                           " right-hand sides");
}

void LinearSystem::add(const Vec &row, const Rational &rhs) {
  a.appendRow(row);
  b.push_back(rhs);
}

std::size_t lpSolveCount() { return solveCounter; }

bool verifyOutcome(const LpOutcome &out, const Vec &c, const LinearSystem &eq,
                   const LinearSystem &ineq, const std::vector<Sign> &signs, Sense sense) {
  const std::size_t n = c.size();
  switch (out.status) {
  case LpStatus::Optimal: {
    const Vec &x = out.point;
    if (x.size() != n)
      return false;
    for (std::size_t j = 0; j < n; ++j)
      if (signs[j] == Sign::NonNeg && sgn(x[j]) < 0)
        return false;
    if (eq.a.apply(x) != eq.b)
      return false;
    Vec ax = ineq.a.apply(x);
    for (std::size_t i = 0; i < ax.size(); ++i)
      if (ax[i] > ineq.b[i])
        return false;
    if (dot(c, x) != out.value)
      return false;
    const Vec &y = out.dual;
    if (y.size() != eq.rows() + ineq.rows())
      return false;
    Vec yEq(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(eq.rows()));
    Vec yIn(y.begin() + static_cast<std::ptrdiff_t>(eq.rows()), y.end());
    int dir = sense == Sense::Minimize ? 1 : -1;
    for (const auto &v : yIn)
      if (dir * sgn(v) > 0)
        return false;
    Vec reduced = c - (eq.a.applyTranspose(yEq) + ineq.a.applyTranspose(yIn));
    if (!signedColumnsCheck(reduced, signs, dir))
      return false;
    return dot(eq.b, yEq) + dot(ineq.b, yIn) == out.value;
  }
  case LpStatus::Infeasible: {
    const Vec &f = out.farkas;
    if (f.size() != eq.rows() + ineq.rows())
      return false;
    Vec fEq(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(eq.rows()));
    Vec fIn(f.begin() + static_cast<std::ptrdiff_t>(eq.rows()), f.end());
    for (const auto &v : fIn)
      if (sgn(v) < 0)
        return false;
    Vec ata = eq.a.applyTranspose(fEq) + ineq.a.applyTranspose(fIn);
    if (!signedColumnsCheck(ata, signs, 1))
      return false;
    return sgn(dot(eq.b, fEq) + dot(ineq.b, fIn)) < 0;
  }
  case LpStatus::Unbounded: {
    const Vec &d = out.ray;
    if (d.size() != n)
      return false;
    for (std::size_t j = 0; j < n; ++j)
      if (signs[j] == Sign::NonNeg && sgn(d[j]) < 0)
        return false;
    if (!isZero(eq.a.apply(d)))
      return false;
    for (const auto &v : ineq.a.apply(d))
      if (sgn(v) > 0)
        return false;
    int s = sgn(dot(c, d));
    return sense == Sense::Minimize ? s < 0 : s > 0;
  }
  }
  return false;
}

LpOutcome lpSolveSigned(const Vec &objective, const LinearSystem &eq,
                        const LinearSystem &ineq, const std::vector<Sign> &signs,
                        Sense sense) {
  const std::size_t n = objective.size();
  if (eq.dim() != n || ineq.dim() != n || signs.size() != n)
    fail(ErrorKind::DimensionMismatch,
         "objective has " + std::to_string(n) + " entries, constraints have " +
             std::to_string(eq.dim()) + " and " + std::to_string(ineq.dim()) + " columns");
  for (Sign s : signs)
    if (s != Sign::Free && s != Sign::NonNeg)
      fail(ErrorKind::Internal, "lpSolveSigned accepts only Free and NonNeg variables");
  ++solveCounter;
  Tableau tab(objective, eq, ineq, signs, sense);
  LpOutcome out = tab.run();
  if (out.status == LpStatus::Optimal) {
    out.value = dot(objective, out.point);
    if (sense == Sense::Maximize)
      out.dual = -out.dual;
  }
  if (!verifyOutcome(out, objective, eq, ineq, signs, sense))
    fail(ErrorKind::Internal, "LP certificate failed exact verification");
  return out;
}

LpOutcome lpSolve(const Vec &objective, const LinearSystem &eq, const LinearSystem &ineq,
                  Sense sense) {
  return lpSolveSigned(objective, eq, ineq, std::vector<Sign>(objective.size(), Sign::Free),
                       sense);
}

} // namespace statcert::polylp
