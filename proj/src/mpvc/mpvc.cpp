#include "statcert/mpvc.hpp"

#include "statcert/errors.hpp"
#include "statcert/oracle.hpp"

#include <algorithm>

namespace statcert::mpvc {

using paired::Layout;
using polylp::LpModel;
using polylp::LpStatus;
using polylp::Sense;
using polylp::Sign;

namespace {

struct Context {
  const MpvcInstance &inst;
  Layout layout;
  model::MpvcActiveSets sets;
  Vec target;

  explicit Context(const MpvcInstance &i)
      : inst(i), layout(paired::mpvcLayout(i)), sets(model::activeSets(i)), target(-i.fGrad) {}

  // Indices where the H-multiplier may be nonzero.
  IndexSet hSupport() const {
    return model::setUnion(model::setUnion(sets.i0minus, sets.i00), sets.i0plus);
  }
};

std::string describeBranch(const Context &ctx, const std::vector<std::size_t> &choice) {
  std::string s;
  for (std::size_t j = 0; j < choice.size(); ++j) {
    if (!s.empty())
      s += ", ";
    s += "pair " + std::to_string(ctx.sets.i00[j] + 1) +
         (choice[j] == 0 ? ": G-multiplier=0" : ": H-multiplier=0, G-multiplier>=0");
  }
  return s.empty() ? "no biactive pairs" : s;
}

void requirePartitionOf(const IndexSet &base, const Partition &p) {
  if (!model::isPartitionOf(p, base))
    fail(ErrorKind::Parse, "partition " + formatPartition(p) + " does not partition " +
                               formatIndexSet(base));
}

// Explicit system: λ, μ with supports in R_VC, Σ λ column = -∇f, Σ μ column = 0
// and the per-index inequalities tying λ to μ.
std::optional<std::pair<Vec, Vec>> solveQSystem(const Context &ctx, const Partition &p,
                                                const std::vector<std::size_t> *branch) {
  const Layout &L = ctx.layout;
  const auto &S = ctx.sets;
  SignPattern support = kernelSupport(ctx.inst);
  LpModel lp;
  std::size_t lam = paired::addMultipliers(lp, support);
  std::size_t mu = paired::addMultipliers(lp, support);
  paired::addImageRows(lp, L, lam, ctx.target);
  paired::addImageRows(lp, L, mu, zeros(L.n));
  auto lamGe0 = [&](std::size_t k) { lp.addGreaterEqual({{lam + k, 1}}, 0); };
  auto lamGeMu = [&](std::size_t k) { lp.addGreaterEqual({{lam + k, 1}, {mu + k, -1}}, 0); };
  for (auto i : S.ig) {
    lamGe0(L.g(i));
    lamGeMu(L.g(i));
  }
  for (auto i : S.i0minus) {
    lamGe0(L.first(i));
    lamGeMu(L.first(i));
  }
  for (auto i : S.iplus0) {
    lamGe0(L.second(i));
    lamGeMu(L.second(i));
  }
  for (auto i : p.beta1) {
    lamGeMu(L.first(i));
    lp.addLessEqual({{mu + L.second(i), 1}}, 0);
    lp.addEquality({{lam + L.second(i), 1}}, 0);
  }
  for (auto i : p.beta2) {
    lamGe0(L.first(i));
    lp.addEquality({{lam + L.second(i), 1}, {mu + L.second(i), -1}}, 0);
    lp.addGreaterEqual({{mu + L.second(i), 1}}, 0);
  }
  if (branch) {
    for (std::size_t j = 0; j < S.i00.size(); ++j) {
      std::size_t i = S.i00[j];
      if ((*branch)[j] == 0) {
        lp.addEquality({{lam + L.second(i), 1}}, 0);
      } else {
        lp.addEquality({{lam + L.first(i), 1}}, 0);
        lamGe0(L.second(i));
      }
    }
  }
  auto r = lp.solve();
  if (!r.feasible())
    return std::nullopt;
  Vec l(r.values.begin() + static_cast<std::ptrdiff_t>(lam),
        r.values.begin() + static_cast<std::ptrdiff_t>(mu));
  Vec m(r.values.begin() + static_cast<std::ptrdiff_t>(mu), r.values.end());
  return std::make_pair(l, m);
}

Certificate membershipCertificate(Stationarity kind, const Context &ctx,
                                  const paired::ImageMembership &m) {
  Certificate c;
  c.stationarity = kind;
  c.verdict = verdictOf(m.member);
  if (m.member)
    c.lambda = paired::toBlocks(ctx.layout, m.lambda);
  else
    c.refutation = Blocks{{"direction", polylp::primitive(m.direction)}};
  return c;
}

} // namespace

SignPattern regularNormalPattern(const MpvcInstance &inst) {
  Layout L = paired::mpvcLayout(inst);
  auto S = model::activeSets(inst);
  SignPattern p(L.size(), Sign::Zero);
  for (std::size_t i = 0; i < L.mE; ++i)
    p[L.h(i)] = Sign::Free;
  for (auto i : S.ig)
    p[L.g(i)] = Sign::NonNeg;
  for (auto i : S.i0minus)
    p[L.first(i)] = Sign::NonNeg;
  for (auto i : S.i00)
    p[L.first(i)] = Sign::NonNeg;
  for (auto i : S.i0plus)
    p[L.first(i)] = Sign::Free;
  for (auto i : S.iplus0)
    p[L.second(i)] = Sign::NonNeg;
  return p;
}

SignPattern kernelSupport(const MpvcInstance &inst) {
  Layout L = paired::mpvcLayout(inst);
  auto S = model::activeSets(inst);
  SignPattern p(L.size(), Sign::Zero);
  for (std::size_t i = 0; i < L.mE; ++i)
    p[L.h(i)] = Sign::Free;
  for (auto i : S.ig)
    p[L.g(i)] = Sign::Free;
  for (auto i : model::setUnion(model::setUnion(S.i0minus, S.i00), S.i0plus))
    p[L.first(i)] = Sign::Free;
  for (auto i : model::setUnion(S.iplus0, S.i00))
    p[L.second(i)] = Sign::Free;
  return p;
}

SignPattern limitingBranchPattern(const MpvcInstance &inst, const std::vector<std::size_t> &choice) {
  Layout L = paired::mpvcLayout(inst);
  auto S = model::activeSets(inst);
  SignPattern p = regularNormalPattern(inst);
  for (std::size_t j = 0; j < S.i00.size(); ++j) {
    std::size_t i = S.i00[j];
    if (choice[j] == 0) {
      p[L.first(i)] = Sign::Free;
      p[L.second(i)] = Sign::Zero;
    } else {
      p[L.first(i)] = Sign::Zero;
      p[L.second(i)] = Sign::NonNeg;
    }
  }
  return p;
}

QvcPair buildQvcPair(const MpvcInstance &inst, const Partition &p) {
  auto S = model::activeSets(inst);
  requirePartitionOf(S.i00, p);
  Layout L = paired::mpvcLayout(inst);
  QvcPair q{p, regularNormalPattern(inst), regularNormalPattern(inst)};
  // {0}×ℝ has polar ℝ×{0}; ℝ₋×ℝ₋ has polar ℝ₊×ℝ₊ (coordinates (-H, G)).
  auto setPiece = [&](SignPattern &pat, std::size_t i, bool line) {
    pat[L.first(i)] = line ? Sign::Free : Sign::NonNeg;
    pat[L.second(i)] = line ? Sign::Zero : Sign::NonNeg;
  };
  for (auto i : p.beta1) {
    setPiece(q.firstPolar, i, true);
    setPiece(q.secondPolar, i, false);
  }
  for (auto i : p.beta2) {
    setPiece(q.firstPolar, i, false);
    setPiece(q.secondPolar, i, true);
  }
  return q;
}

Certificate checkS(const MpvcInstance &inst) {
  Context ctx(inst);
  return membershipCertificate(
      Stationarity::S, ctx,
      paired::memberImage(ctx.layout, ctx.target, regularNormalPattern(inst)));
}

Certificate checkM(const MpvcInstance &inst, const Limits &limits) {
  Context ctx(inst);
  Certificate c;
  c.stationarity = Stationarity::M;
  Blocks refutations;
  std::size_t branches = 0;
  bool found = paired::forEachBranch(
      ctx.sets.i00.size(), 2, limits.branchCap, [&](const std::vector<std::size_t> &choice) {
        ++branches;
        auto m = paired::memberImage(ctx.layout, ctx.target, limitingBranchPattern(inst, choice));
        if (m.member) {
          c.lambda = paired::toBlocks(ctx.layout, m.lambda);
          c.notes.push_back("limiting branch: " + describeBranch(ctx, choice));
          return true;
        }
        refutations.push_back({"direction[" + describeBranch(ctx, choice) + "]",
                               polylp::primitive(m.direction)});
        return false;
      });
  c.verdict = verdictOf(found);
  if (!found)
    c.refutation = refutations;
  c.notes.push_back("branches examined: " + std::to_string(branches));
  return c;
}

QMemberships qMemberships(const MpvcInstance &inst, const Partition &p) {
  Context ctx(inst);
  QvcPair q = buildQvcPair(inst, p);
  return {paired::memberImage(ctx.layout, ctx.target, q.firstPolar),
          paired::memberImage(ctx.layout, ctx.target, q.secondPolar)};
}

Certificate checkQ(const MpvcInstance &inst, const Partition &p) {
  Context ctx(inst);
  QMemberships mem = qMemberships(inst, p);
  auto joint = solveQSystem(ctx, p, nullptr);
  if (joint.has_value() != mem.both())
    fail(ErrorKind::Internal, "Q decision routes disagree for partition " + formatPartition(p));
  Certificate c;
  c.stationarity = Stationarity::Q;
  c.partition = p;
  c.verdict = verdictOf(mem.both());
  if (joint) {
    c.lambda = paired::toBlocks(ctx.layout, joint->first);
    c.mu = paired::toBlocks(ctx.layout, joint->second);
  } else {
    Blocks ref;
    if (!mem.first.member)
      ref.push_back({"direction[first cone]", polylp::primitive(mem.first.direction)});
    if (!mem.second.member)
      ref.push_back({"direction[swapped cone]", polylp::primitive(mem.second.direction)});
    c.refutation = ref;
  }
  return c;
}

Certificate checkQM(const MpvcInstance &inst, const std::optional<Partition> &fixed,
                    const Limits &limits) {
  Context ctx(inst);
  Certificate c;
  c.stationarity = Stationarity::QM;
  auto forPartition = [&](const Partition &p, std::string &note) {
    std::optional<std::pair<Vec, Vec>> found;
    paired::forEachBranch(ctx.sets.i00.size(), 2, limits.branchCap,
                          [&](const std::vector<std::size_t> &choice) {
                            found = solveQSystem(ctx, p, &choice);
                            if (found)
                              note = describeBranch(ctx, choice);
                            return found.has_value();
                          });
    return found;
  };
  auto accept = [&](const Partition &p, const std::pair<Vec, Vec> &lm, const std::string &note) {
    c.partition = p;
    c.lambda = paired::toBlocks(ctx.layout, lm.first);
    c.mu = paired::toBlocks(ctx.layout, lm.second);
    c.notes.push_back("limiting branch: " + note);
  };

  if (fixed) {
    requirePartitionOf(ctx.sets.i00, *fixed);
    std::string note;
    auto r = forPartition(*fixed, note);
    c.verdict = verdictOf(r.has_value());
    c.partition = *fixed;
    if (r)
      accept(*fixed, *r, note);
    return c;
  }

  Partition allFirst{ctx.sets.i00, {}};
  if (auto q = solveQSystem(ctx, allFirst, nullptr)) {
    // With every biactive index in the first part, the multiplier has zero
    // G-components there and lies in the limiting normal cone directly.
    c.verdict = Verdict::True;
    accept(allFirst, *q, "G-multiplier=0 on every biactive pair");
    c.notes.push_back("certified by Q-stationarity for the partition (I00, {})");
    return c;
  }
  std::size_t certifying = 0;
  auto partitions = model::enumeratePartitions(ctx.sets.i00, limits.partitionCap);
  for (const auto &p : partitions) {
    std::string note;
    auto r = forPartition(p, note);
    if (r && certifying++ == 0)
      accept(p, *r, note);
  }
  c.verdict = verdictOf(certifying > 0);
  c.notes.push_back("certifying partitions: " + std::to_string(certifying) + " of " +
                    std::to_string(partitions.size()));
  return c;
}

QualResult biactiveNonnegMultiplier(const MpvcInstance &inst) {
  Context ctx(inst);
  SignPattern pat = regularNormalPattern(inst);
  for (auto i : ctx.sets.i00)
    pat[ctx.layout.second(i)] = Sign::NonNeg;
  auto m = paired::memberImage(ctx.layout, ctx.target, pat);
  QualResult q;
  q.name = "biactive_nonneg_multiplier";
  q.holds = m.member;
  if (m.member)
    q.witness = paired::toBlocks(ctx.layout, m.lambda);
  else
    q.witness.push_back({"direction", polylp::primitive(m.direction)});
  return q;
}

Theorem7Routes theorem7Routes(const MpvcInstance &inst, const Partition &p) {
  Context ctx(inst);
  requirePartitionOf(ctx.sets.i00, p);
  const Layout &L = ctx.layout;
  Theorem7Routes out;

  auto kernelLp = [&](LpModel &lp) {
    std::size_t mu = paired::addMultipliers(lp, kernelSupport(inst));
    paired::addImageRows(lp, L, mu, zeros(L.n));
    for (auto i : p.beta1)
      lp.addLessEqual({{mu + L.second(i), 1}}, 0);
    for (auto i : p.beta2)
      lp.addGreaterEqual({{mu + L.second(i), 1}}, 0);
    return mu;
  };

  // Dual systems in z ∈ R^n.
  auto dualFeasible = [&](std::optional<std::size_t> j) {
    LpModel lp;
    std::size_t z = lp.addVariables(L.n, Sign::Free);
    for (const auto &h : inst.h)
      lp.addEquality(polylp::termsFrom(z, h.grad), 0);
    for (auto i : ctx.sets.ig)
      lp.addEquality(polylp::termsFrom(z, inst.g[i].grad), 0);
    for (auto i : ctx.sets.iplus0)
      lp.addEquality(polylp::termsFrom(z, inst.G[i].grad), 0);
    for (auto i : p.beta1)
      lp.addGreaterEqual(polylp::termsFrom(z, inst.G[i].grad), 0);
    for (auto i : p.beta2)
      lp.addLessEqual(polylp::termsFrom(z, inst.G[i].grad), j ? 0 : -1);
    for (auto i : ctx.hSupport())
      lp.addEquality(polylp::termsFrom(z, inst.H[i].grad), j && *j == i ? -1 : 0);
    return lp.solve().feasible();
  };

  for (auto j : p.beta1) {
    LpModel lp;
    std::size_t mu = kernelLp(lp);
    lp.setObjective({{mu + L.first(j), 1}}, Sense::Minimize);
    auto r = lp.solve();
    bool bounded = r.status == LpStatus::Optimal;
    std::string label = "H-multiplier " + std::to_string(j + 1) + " >= 0";
    out.primalParts.emplace_back(label, bounded);
    if (!bounded && out.primal) {
      out.primal = false;
      out.violator = polylp::primitive(Vec(r.ray.begin() + static_cast<std::ptrdiff_t>(mu),
                                           r.ray.begin() + static_cast<std::ptrdiff_t>(mu + L.size())));
    }
    bool dual = dualFeasible(j);
    out.dualParts.emplace_back(label, dual);
    out.dual = out.dual && dual;
  }
  {
    LpModel lp;
    std::size_t mu = kernelLp(lp);
    LpModel::Terms obj;
    for (auto i : p.beta2)
      obj.emplace_back(mu + L.second(i), 1);
    lp.setObjective(obj, Sense::Maximize);
    auto r = lp.solve();
    bool bounded = r.status == LpStatus::Optimal;
    out.primalParts.emplace_back("G-multipliers on beta2 vanish", bounded);
    if (!bounded && out.primal) {
      out.primal = false;
      out.violator = polylp::primitive(Vec(r.ray.begin() + static_cast<std::ptrdiff_t>(mu),
                                           r.ray.begin() + static_cast<std::ptrdiff_t>(mu + L.size())));
    }
    bool dual = dualFeasible(std::nullopt);
    out.dualParts.emplace_back("G-multipliers on beta2 vanish", dual);
    out.dual = out.dual && dual;
  }
  return out;
}

QualResult qualTheorem7(const MpvcInstance &inst, const Partition &p) {
  auto routes = theorem7Routes(inst, p);
  if (routes.primal != routes.dual)
    fail(ErrorKind::Internal, "primal and dual kernel sign tests disagree for partition " +
                                  formatPartition(p));
  QualResult q;
  q.name = "thm7";
  q.partition = p;
  q.holds = routes.primal;
  for (std::size_t k = 0; k < routes.primalParts.size(); ++k) {
    if (routes.primalParts[k].second != routes.dualParts[k].second)
      fail(ErrorKind::Internal, "primal and dual disagree on " + routes.primalParts[k].first);
    if (!routes.primalParts[k].second)
      q.notes.push_back("violated: " + routes.primalParts[k].first);
  }
  if (!q.holds)
    q.witness = paired::toBlocks(paired::mpvcLayout(inst), routes.violator);
  return q;
}

Report certifyMpvc(const MpvcInstance &inst, const CertifyOptions &options) {
  Context ctx(inst);
  Report rep;
  rep.kind = model::ProblemKind::Mpvc;
  rep.digest = model::instanceDigest(inst);
  if (inst.affine)
    rep.assumptions.push_back("GGCQ: asserted (affine data)");
  else if (inst.ggcqAsserted)
    rep.assumptions.push_back("GGCQ: asserted by user");
  else
    rep.assumptions.push_back(
        "GGCQ: not asserted; the oracle decides B-stationarity of the linearized problem");
  rep.activeSets = {{"Ig", ctx.sets.ig},         {"I0-", ctx.sets.i0minus},
                    {"I00", ctx.sets.i00},       {"I0+", ctx.sets.i0plus},
                    {"I+0", ctx.sets.iplus0},    {"I+-", ctx.sets.iplusminus}};
  if (options.runOracle)
    rep.certificates.push_back(oracle::bStationaryOracle(inst, options.limits.partitionCap));
  rep.certificates.push_back(checkS(inst));
  rep.certificates.push_back(checkM(inst, options.limits));
  auto partitions = model::enumeratePartitions(ctx.sets.i00, options.limits.partitionCap);
  for (const auto &p : partitions)
    rep.certificates.push_back(checkQ(inst, p));
  rep.certificates.push_back(checkQM(inst, std::nullopt, options.limits));
  rep.qualifications.push_back(biactiveNonnegMultiplier(inst));
  for (const auto &p : partitions)
    rep.qualifications.push_back(qualTheorem7(inst, p));
  rep.auditViolations = oracle::auditReport(rep);
  return rep;
}

} // namespace statcert::mpvc
