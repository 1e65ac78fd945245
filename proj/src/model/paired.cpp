#include "statcert/paired.hpp"

#include "statcert/errors.hpp"

namespace statcert::paired {

using polylp::LpModel;

std::string Layout::coordinateName(std::size_t k) const {
  std::size_t block, idx;
  if (k < mE) {
    block = 0;
    idx = k;
  } else if (k < mE + mI) {
    block = 1;
    idx = k - mE;
  } else if (k < mE + mI + mC) {
    block = 2;
    idx = k - mE - mI;
  } else {
    block = 3;
    idx = k - mE - mI - mC;
  }
  return names[block] + std::to_string(idx + 1);
}

static Layout baseLayout(const model::PairedProgram &p) {
  Layout l;
  l.n = p.n;
  l.mE = p.h.size();
  l.mI = p.g.size();
  l.mC = p.pairs();
  for (const auto &d : p.h)
    l.columns.push_back(d.grad);
  for (const auto &d : p.g)
    l.columns.push_back(d.grad);
  return l;
}

Layout mpccLayout(const model::PairedProgram &p) {
  Layout l = baseLayout(p);
  l.names = {"h", "g", "G", "H"};
  for (const auto &d : p.G)
    l.columns.push_back(-d.grad);
  for (const auto &d : p.H)
    l.columns.push_back(-d.grad);
  return l;
}

Layout mpvcLayout(const model::PairedProgram &p) {
  Layout l = baseLayout(p);
  l.names = {"h", "g", "H", "G"};
  for (const auto &d : p.H)
    l.columns.push_back(-d.grad);
  for (const auto &d : p.G)
    l.columns.push_back(d.grad);
  return l;
}

Vec image(const Layout &layout, const Vec &lambda) {
  Vec out = zeros(layout.n);
  for (std::size_t k = 0; k < layout.size(); ++k)
    if (sgn(lambda[k]) != 0)
      out = out + lambda[k] * layout.columns[k];
  return out;
}

Blocks toBlocks(const Layout &layout, const Vec &lambda) {
  Blocks b;
  const std::size_t starts[5] = {0, layout.mE, layout.mE + layout.mI,
                                 layout.mE + layout.mI + layout.mC, layout.size()};
  for (std::size_t blk = 0; blk < 4; ++blk)
    b.push_back({layout.names[blk],
                 Vec(lambda.begin() + static_cast<std::ptrdiff_t>(starts[blk]),
                     lambda.begin() + static_cast<std::ptrdiff_t>(starts[blk + 1]))});
  return b;
}

Vec fromBlocks(const Layout &layout, const Blocks &blocks) {
  Vec out;
  const std::size_t sizes[4] = {layout.mE, layout.mI, layout.mC, layout.mC};
  for (std::size_t blk = 0; blk < 4; ++blk) {
    const Vec *v = findBlock(blocks, layout.names[blk]);
    if (!v || v->size() != sizes[blk])
      fail(ErrorKind::DimensionMismatch, "multiplier block " + layout.names[blk]);
    out.insert(out.end(), v->begin(), v->end());
  }
  return out;
}

bool satisfies(const Vec &lambda, const SignPattern &pattern) {
  for (std::size_t k = 0; k < pattern.size(); ++k) {
    int s = sgn(lambda[k]);
    switch (pattern[k]) {
    case Sign::Free: break;
    case Sign::NonNeg: if (s < 0) return false; break;
    case Sign::NonPos: if (s > 0) return false; break;
    case Sign::Zero: if (s != 0) return false; break;
    }
  }
  return true;
}

polylp::GCone imageCone(const Layout &layout, const SignPattern &pattern) {
  polylp::GCone c(layout.n);
  for (std::size_t k = 0; k < layout.size(); ++k) {
    switch (pattern[k]) {
    case Sign::Free: c.lin.push_back(layout.columns[k]); break;
    case Sign::NonNeg: c.rays.push_back(layout.columns[k]); break;
    case Sign::NonPos: c.rays.push_back(-layout.columns[k]); break;
    case Sign::Zero: break;
    }
  }
  return c;
}

ImageMembership memberImage(const Layout &layout, const Vec &target, const SignPattern &pattern) {
  LpModel lp;
  std::size_t first = addMultipliers(lp, pattern);
  addImageRows(lp, layout, first, target);
  auto r = lp.solve();
  ImageMembership m;
  if (r.feasible()) {
    m.member = true;
    m.lambda = r.values;
  } else {
    m.direction = -r.farkasEq;
  }
  // Independent check: coefficients reproduce the target, or the direction
  // separates the target from every generator of the image cone.
  if (m.member) {
    if (!satisfies(m.lambda, pattern) || image(layout, m.lambda) != target)
      fail(ErrorKind::Internal, "image membership coefficients do not verify");
  } else {
    polylp::Membership sep;
    sep.separator = m.direction;
    if (!polylp::verifyMembership(sep, target, imageCone(layout, pattern)))
      fail(ErrorKind::Internal, "image membership separator does not verify");
  }
  return m;
}

std::size_t addMultipliers(LpModel &lp, const SignPattern &pattern) {
  std::size_t first = lp.variables();
  for (Sign s : pattern)
    lp.addVariable(s);
  return first;
}

void addImageRows(LpModel &lp, const Layout &layout, std::size_t first, const Vec &rhs) {
  for (std::size_t d = 0; d < layout.n; ++d) {
    LpModel::Terms t;
    for (std::size_t k = 0; k < layout.size(); ++k)
      if (sgn(layout.columns[k][d]) != 0)
        t.emplace_back(first + k, layout.columns[k][d]);
    lp.addEquality(t, rhs[d]);
  }
}

static polylp::LinearSystem kernelSystem(const Layout &layout, const SignPattern &support) {
  const std::size_t k = layout.size();
  polylp::LinearSystem eq(k);
  for (std::size_t d = 0; d < layout.n; ++d) {
    Vec row(k);
    for (std::size_t j = 0; j < k; ++j)
      row[j] = layout.columns[j][d];
    eq.add(row, 0);
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (support[j] == Sign::Zero)
      eq.add(unitVector(k, j), 0);
    else if (support[j] != Sign::Free)
      fail(ErrorKind::Internal, "kernel support pattern must be Free or Zero");
  }
  return eq;
}

ProductTest signProductTest(const Layout &layout, const SignPattern &support,
                            const std::vector<ProductCondition> &conditions) {
  const std::size_t k = layout.size();
  polylp::LinearSystem eq = kernelSystem(layout, support);
  ProductTest out;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    const auto &cond = conditions[c];
    polylp::LinearSystem ineq(k);
    ineq.add(-unitVector(k, cond.a), 0);  // μ_a > 0
    ineq.add(unitVector(k, cond.b), 0);   // μ_b < 0
    auto r = polylp::strictFeasible(eq, ineq, {0, 1});
    if (r.feasible) {
      out.holds = false;
      out.violator = polylp::primitive(r.witness);
      out.failed = c;
      return out;
    }
  }
  return out;
}

bool inKernel(const Layout &layout, const SignPattern &support, const Vec &mu) {
  if (mu.size() != layout.size())
    return false;
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (support[j] == Sign::Zero && sgn(mu[j]) != 0)
      return false;
  return isZero(image(layout, mu));
}

std::string describeCondition(const Layout &layout, const ProductCondition &c) {
  return layout.coordinateName(c.a) + "*" + layout.coordinateName(c.b) + " >= 0";
}

bool forEachBranch(std::size_t count, std::size_t choices, std::size_t cap,
                   const std::function<bool(const std::vector<std::size_t> &)> &fn) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < count; ++i) {
    total *= choices;
    if (total > cap)
      fail(ErrorKind::BranchLimitExceeded, std::to_string(choices) + "^" +
                                               std::to_string(count) +
                                               " branches exceed the cap " +
                                               std::to_string(cap));
  }
  std::vector<std::size_t> choice(count, 0);
  for (;;) {
    if (fn(choice))
      return true;
    std::size_t pos = count;
    while (pos > 0 && choice[pos - 1] + 1 == choices)
      choice[--pos] = 0;
    if (pos == 0)
      return false;
    ++choice[pos - 1];
  }
}

} // namespace statcert::paired
