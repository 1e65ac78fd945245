#include "statcert/errors.hpp"
#include "statcert/polylp.hpp"

namespace statcert::polylp {

LpModel::Terms termsFrom(std::size_t first, const Vec &coeffs) {
  LpModel::Terms t;
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    if (sgn(coeffs[k]) != 0)
      t.emplace_back(first + k, coeffs[k]);
  return t;
}

std::size_t LpModel::addVariable(Sign sign) {
  signs_.push_back(sign);
  return signs_.size() - 1;
}

std::size_t LpModel::addVariables(std::size_t count, Sign sign) {
  std::size_t first = signs_.size();
  signs_.insert(signs_.end(), count, sign);
  return first;
}

std::size_t LpModel::addEquality(const Terms &terms, const Rational &rhs) {
  eqTerms_.push_back(terms);
  eqRhs_.push_back(rhs);
  return eqTerms_.size() - 1;
}

std::size_t LpModel::addLessEqual(const Terms &terms, const Rational &rhs) {
  leTerms_.push_back(terms);
  leRhs_.push_back(rhs);
  return leTerms_.size() - 1;
}

std::size_t LpModel::addGreaterEqual(const Terms &terms, const Rational &rhs) {
  Terms neg;
  neg.reserve(terms.size());
  for (const auto &[v, c] : terms)
    neg.emplace_back(v, -c);
  return addLessEqual(neg, -rhs);
}

void LpModel::setObjective(const Terms &terms, Sense sense) {
  objective_ = terms;
  sense_ = sense;
}

LpModel::Result LpModel::solve() const {
  constexpr std::size_t kDropped = static_cast<std::size_t>(-1);
  std::vector<std::size_t> column(signs_.size(), kDropped);
  std::vector<Sign> solverSigns;
  for (std::size_t v = 0; v < signs_.size(); ++v) {
    if (signs_[v] == Sign::Zero)
      continue;
    column[v] = solverSigns.size();
    solverSigns.push_back(signs_[v] == Sign::Free ? Sign::Free : Sign::NonNeg);
  }
  const std::size_t n = solverSigns.size();
  auto dense = [&](const Terms &terms) {
    Vec row = zeros(n);
    for (const auto &[v, c] : terms) {
      if (v >= signs_.size())
        fail(ErrorKind::Internal, "LP term references unknown variable");
      if (column[v] == kDropped)
        continue;
      row[column[v]] += signs_[v] == Sign::NonPos ? Rational(-c) : c;
    }
    return row;
  };
  LinearSystem eq(n), le(n);
  for (std::size_t i = 0; i < eqTerms_.size(); ++i)
    eq.add(dense(eqTerms_[i]), eqRhs_[i]);
  for (std::size_t i = 0; i < leTerms_.size(); ++i)
    le.add(dense(leTerms_[i]), leRhs_[i]);
  Vec c = dense(objective_);

  LpOutcome out = lpSolveSigned(c, eq, le, solverSigns, sense_);
  Result r;
  r.status = out.status;
  auto lift = [&](const Vec &x) {
    Vec values = zeros(signs_.size());
    for (std::size_t v = 0; v < signs_.size(); ++v)
      if (column[v] != kDropped)
        values[v] = signs_[v] == Sign::NonPos ? Rational(-x[column[v]]) : x[column[v]];
    return values;
  };
  switch (out.status) {
  case LpStatus::Optimal:
    r.values = lift(out.point);
    r.objective = out.value;
    break;
  case LpStatus::Unbounded:
    r.ray = lift(out.ray);
    break;
  case LpStatus::Infeasible:
    r.farkasEq.assign(out.farkas.begin(),
                      out.farkas.begin() + static_cast<std::ptrdiff_t>(eqTerms_.size()));
    r.farkasLe.assign(out.farkas.begin() + static_cast<std::ptrdiff_t>(eqTerms_.size()),
                      out.farkas.end());
    break;
  }
  return r;
}

} // namespace statcert::polylp
