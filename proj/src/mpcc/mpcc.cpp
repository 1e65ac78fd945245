#include "statcert/mpcc.hpp"

#include "statcert/errors.hpp"
#include "statcert/oracle.hpp"

#include <map>

namespace statcert::mpcc {

using model::contains;
using model::setDifference;
using paired::Layout;
using paired::ProductCondition;
using polylp::LpModel;
using polylp::Sign;

namespace {

struct Context {
  const MpccInstance &inst;
  Layout layout;
  model::MpccActiveSets sets;
  Vec target;  // -∇f

  explicit Context(const MpccInstance &i)
      : inst(i), layout(paired::mpccLayout(i)), sets(model::activeSets(i)), target(-i.fGrad) {}
};

const char *branchLabel(std::size_t c) {
  switch (c) {
  case 0: return "both>=0";
  case 1: return "G=0";
  default: return "H=0";
  }
}

std::string describeBranch(const Context &ctx, const std::vector<std::size_t> &choice) {
  std::string s;
  for (std::size_t j = 0; j < choice.size(); ++j) {
    if (!s.empty())
      s += ", ";
    s += "pair " + std::to_string(ctx.sets.i00[j] + 1) + ": " + branchLabel(choice[j]);
  }
  return s.empty() ? "no biactive pairs" : s;
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

// Joint system: λ in the first polar, λ - μ in the second polar, μ in the
// kernel set, Σ λ column = -∇f. Optional biactive branch restricts λ further.
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
  auto geq0 = [&](std::size_t k) { lp.addGreaterEqual({{lam + k, 1}}, 0); };
  auto geqMu = [&](std::size_t k) { lp.addGreaterEqual({{lam + k, 1}, {mu + k, -1}}, 0); };
  for (auto i : S.ig) {
    geq0(L.g(i));
    geqMu(L.g(i));
  }
  for (auto i : p.beta1) {
    geqMu(L.first(i));
    geq0(L.second(i));
  }
  for (auto i : p.beta2) {
    geq0(L.first(i));
    geqMu(L.second(i));
  }
  if (branch) {
    for (std::size_t j = 0; j < S.i00.size(); ++j) {
      std::size_t i = S.i00[j];
      switch ((*branch)[j]) {
      case 0:
        geq0(L.first(i));
        geq0(L.second(i));
        break;
      case 1: lp.addEquality({{lam + L.first(i), 1}}, 0); break;
      default: lp.addEquality({{lam + L.second(i), 1}}, 0); break;
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

void requirePartitionOf(const IndexSet &base, const Partition &p) {
  if (!model::isPartitionOf(p, base))
    fail(ErrorKind::Parse, "partition " + formatPartition(p) + " does not partition " +
                               formatIndexSet(base));
}

} // namespace

SignPattern regularNormalPattern(const MpccInstance &inst) {
  Layout L = paired::mpccLayout(inst);
  auto S = model::activeSets(inst);
  SignPattern p(L.size(), Sign::Zero);
  for (std::size_t i = 0; i < L.mE; ++i)
    p[L.h(i)] = Sign::Free;
  for (auto i : S.ig)
    p[L.g(i)] = Sign::NonNeg;
  for (auto i : S.i0plus)
    p[L.first(i)] = Sign::Free;
  for (auto i : S.iplus0)
    p[L.second(i)] = Sign::Free;
  for (auto i : S.i00) {
    p[L.first(i)] = Sign::NonNeg;
    p[L.second(i)] = Sign::NonNeg;
  }
  return p;
}

SignPattern kernelSupport(const MpccInstance &inst) {
  SignPattern p = regularNormalPattern(inst);
  for (auto &s : p)
    if (s == Sign::NonNeg)
      s = Sign::Free;
  return p;
}

SignPattern limitingBranchPattern(const MpccInstance &inst, const std::vector<std::size_t> &choice) {
  Layout L = paired::mpccLayout(inst);
  auto S = model::activeSets(inst);
  SignPattern p = regularNormalPattern(inst);
  for (std::size_t j = 0; j < S.i00.size(); ++j) {
    std::size_t i = S.i00[j];
    if (choice[j] == 1) {
      p[L.first(i)] = Sign::Zero;
      p[L.second(i)] = Sign::Free;
    } else if (choice[j] == 2) {
      p[L.first(i)] = Sign::Free;
      p[L.second(i)] = Sign::Zero;
    }
  }
  return p;
}

QccPair buildQccPair(const MpccInstance &inst, const Partition &p) {
  auto S = model::activeSets(inst);
  requirePartitionOf(S.i00, p);
  Layout L = paired::mpccLayout(inst);
  QccPair q{p, regularNormalPattern(inst), regularNormalPattern(inst)};
  // First cone: tangent {0}×ℝ₋ on beta1 (polar ℝ×ℝ₊), ℝ₋×{0} on beta2 (polar ℝ₊×ℝ).
  for (auto i : p.beta1) {
    q.firstPolar[L.first(i)] = Sign::Free;
    q.secondPolar[L.second(i)] = Sign::Free;
  }
  for (auto i : p.beta2) {
    q.firstPolar[L.second(i)] = Sign::Free;
    q.secondPolar[L.first(i)] = Sign::Free;
  }
  return q;
}

Certificate checkS(const MpccInstance &inst) {
  Context ctx(inst);
  auto m = paired::memberImage(ctx.layout, ctx.target, regularNormalPattern(inst));
  return membershipCertificate(Stationarity::S, ctx, m);
}

Certificate checkM(const MpccInstance &inst, const Limits &limits) {
  Context ctx(inst);
  Certificate c;
  c.stationarity = Stationarity::M;
  Blocks refutations;
  std::size_t branches = 0;
  bool found = paired::forEachBranch(
      ctx.sets.i00.size(), 3, limits.branchCap, [&](const std::vector<std::size_t> &choice) {
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

std::optional<Vec> uniqueMMultiplier(const MpccInstance &inst, const Limits &limits) {
  Context ctx(inst);
  std::optional<Vec> point;
  bool unique = true;
  bool any = false;
  paired::forEachBranch(
      ctx.sets.i00.size(), 3, limits.branchCap, [&](const std::vector<std::size_t> &choice) {
        SignPattern pat = limitingBranchPattern(inst, choice);
        if (!paired::memberImage(ctx.layout, ctx.target, pat).member)
          return false;
        any = true;
        Vec here(ctx.layout.size());
        for (std::size_t k = 0; k < ctx.layout.size() && unique; ++k) {
          Rational bounds[2];
          for (int s = 0; s < 2 && unique; ++s) {
            LpModel lp;
            std::size_t lam = paired::addMultipliers(lp, pat);
            paired::addImageRows(lp, ctx.layout, lam, ctx.target);
            lp.setObjective({{lam + k, 1}},
                            s == 0 ? polylp::Sense::Minimize : polylp::Sense::Maximize);
            auto r = lp.solve();
            if (r.status != polylp::LpStatus::Optimal)
              unique = false;
            else
              bounds[s] = r.objective;
          }
          if (unique && bounds[0] != bounds[1])
            unique = false;
          here[k] = bounds[0];
        }
        if (unique && point && *point != here)
          unique = false;
        if (unique)
          point = here;
        return !unique;
      });
  if (!any || !unique)
    return std::nullopt;
  return point;
}

QMemberships qMemberships(const MpccInstance &inst, const Partition &p) {
  Context ctx(inst);
  QccPair q = buildQccPair(inst, p);
  return {paired::memberImage(ctx.layout, ctx.target, q.firstPolar),
          paired::memberImage(ctx.layout, ctx.target, q.secondPolar)};
}

Certificate checkQ(const MpccInstance &inst, const Partition &p) {
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

namespace {

std::optional<std::pair<Vec, Vec>> qmForPartition(const Context &ctx, const Partition &p,
                                                  const Limits &limits, std::string &branchNote) {
  std::optional<std::pair<Vec, Vec>> found;
  paired::forEachBranch(ctx.sets.i00.size(), 3, limits.branchCap,
                        [&](const std::vector<std::size_t> &choice) {
                          found = solveQSystem(ctx, p, &choice);
                          if (found)
                            branchNote = describeBranch(ctx, choice);
                          return found.has_value();
                        });
  return found;
}

} // namespace

Certificate checkQM(const MpccInstance &inst, const std::optional<Partition> &fixed,
                    const Limits &limits) {
  Context ctx(inst);
  Certificate c;
  c.stationarity = Stationarity::QM;
  if (fixed) {
    requirePartitionOf(ctx.sets.i00, *fixed);
    std::string note;
    auto r = qmForPartition(ctx, *fixed, limits, note);
    c.partition = *fixed;
    c.verdict = verdictOf(r.has_value());
    if (r) {
      c.lambda = paired::toBlocks(ctx.layout, r->first);
      c.mu = paired::toBlocks(ctx.layout, r->second);
      c.notes.push_back("limiting branch: " + note);
    }
    return c;
  }

  // Candidate partitions from the sign of each limiting-branch multiplier.
  std::vector<Partition> candidates;
  paired::forEachBranch(
      ctx.sets.i00.size(), 3, limits.branchCap, [&](const std::vector<std::size_t> &choice) {
        auto m = paired::memberImage(ctx.layout, ctx.target, limitingBranchPattern(inst, choice));
        if (!m.member)
          return false;
        Partition p;
        for (auto i : ctx.sets.i00)
          (sgn(m.lambda[ctx.layout.second(i)]) >= 0 ? p.beta1 : p.beta2).push_back(i);
        if (std::find(candidates.begin(), candidates.end(), p) == candidates.end())
          candidates.push_back(p);
        return false;
      });
  if (candidates.empty())
    c.notes.push_back("no M-multiplier exists, so no partition can certify QM");
  for (const auto &p : candidates) {
    std::string note;
    bool ok = qmForPartition(ctx, p, limits, note).has_value();
    c.notes.push_back("candidate partition from an M-multiplier " + formatPartition(p) +
                      (ok ? " certifies QM" : " does not certify QM"));
  }

  std::size_t certifying = 0;
  auto partitions = model::enumeratePartitions(ctx.sets.i00, limits.partitionCap);
  if (!candidates.empty()) {
    for (const auto &p : partitions) {
      std::string note;
      auto r = qmForPartition(ctx, p, limits, note);
      if (!r)
        continue;
      if (certifying++ == 0) {
        c.partition = p;
        c.lambda = paired::toBlocks(ctx.layout, r->first);
        c.mu = paired::toBlocks(ctx.layout, r->second);
        c.notes.push_back("limiting branch: " + note);
      }
    }
  }
  c.verdict = verdictOf(certifying > 0);
  c.notes.push_back("certifying partitions: " + std::to_string(certifying) + " of " +
                    std::to_string(partitions.size()));
  return c;
}

NonsingularSets nonsingularSets(const MpccInstance &inst) {
  Context ctx(inst);
  const auto &S = ctx.sets;
  polylp::LinearSystem eq(inst.n), ineq(inst.n);
  for (const auto &h : inst.h)
    eq.add(h.grad, 0);
  for (auto i : S.i0plus)
    eq.add(-inst.G[i].grad, 0);
  for (auto i : S.iplus0)
    eq.add(-inst.H[i].grad, 0);
  for (auto i : S.ig)
    ineq.add(inst.g[i].grad, 0);
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> rowOf;
  for (auto i : S.i00) {
    rowOf[i].first = ineq.rows();
    ineq.add(-inst.G[i].grad, 0);
    rowOf[i].second = ineq.rows();
    ineq.add(-inst.H[i].grad, 0);
  }
  NonsingularSets out;
  for (auto i : S.i00) {
    if (polylp::strictFeasible(eq, ineq, {rowOf[i].first}).feasible)
      out.betaG.push_back(i);
    if (polylp::strictFeasible(eq, ineq, {rowOf[i].second}).feasible)
      out.betaH.push_back(i);
  }
  std::set_intersection(out.betaG.begin(), out.betaG.end(), out.betaH.begin(), out.betaH.end(),
                        std::back_inserter(out.betaGH));
  return out;
}

std::vector<ProductCondition> theorem5Conditions(const MpccInstance &inst, const Partition &p) {
  Layout L = paired::mpccLayout(inst);
  std::vector<ProductCondition> out;
  for (auto i : p.beta1)
    for (auto j : p.beta2) {
      out.push_back({L.first(i), L.first(j)});
      out.push_back({L.second(i), L.second(j)});
    }
  for (auto i : p.beta1)
    for (auto j : p.beta1)
      out.push_back({L.first(i), L.second(j)});
  for (auto i : p.beta2)
    for (auto j : p.beta2)
      out.push_back({L.first(i), L.second(j)});
  return out;
}

std::vector<ProductCondition> a3Conditions(const MpccInstance &inst, const NonsingularSets &sets,
                                           const Partition &p) {
  Layout L = paired::mpccLayout(inst);
  IndexSet gRest = setDifference(sets.betaG, p.beta1);
  IndexSet hRest = setDifference(sets.betaH, p.beta2);
  std::vector<ProductCondition> out;
  for (auto i : p.beta1)
    for (auto j : gRest)
      out.push_back({L.first(i), L.first(j)});
  for (auto i : p.beta1)
    for (auto j : hRest)
      out.push_back({L.first(i), L.second(j)});
  for (auto i : p.beta2)
    for (auto j : hRest)
      out.push_back({L.second(i), L.second(j)});
  for (auto i : gRest)
    for (auto j : p.beta2)
      out.push_back({L.first(i), L.second(j)});
  return out;
}

namespace {

QualResult productQual(const MpccInstance &inst, const char *name, const Partition &p,
                       const std::vector<ProductCondition> &conds) {
  Layout L = paired::mpccLayout(inst);
  auto test = paired::signProductTest(L, kernelSupport(inst), conds);
  QualResult q;
  q.name = name;
  q.partition = p;
  q.holds = test.holds;
  q.notes.push_back("sign conditions checked: " + std::to_string(conds.size()));
  if (!test.holds) {
    q.witness = paired::toBlocks(L, test.violator);
    q.notes.push_back("violated: " + paired::describeCondition(L, conds[test.failed]));
  }
  return q;
}

} // namespace

QualResult qualTheorem5(const MpccInstance &inst, const Partition &p) {
  requirePartitionOf(model::activeSets(inst).i00, p);
  return productQual(inst, "thm5", p, theorem5Conditions(inst, p));
}

QualResult qualCorollary5(const MpccInstance &inst, const Partition &p) {
  requirePartitionOf(nonsingularSets(inst).betaGH, p);
  return productQual(inst, "cor5", p, theorem5Conditions(inst, p));
}

QualResult qualPangFukushimaA3(const MpccInstance &inst, const Partition &p) {
  auto sets = nonsingularSets(inst);
  requirePartitionOf(sets.betaGH, p);
  return productQual(inst, "a3", p, a3Conditions(inst, sets, p));
}

bool isProductViolation(const MpccInstance &inst, const std::vector<ProductCondition> &conditions,
                        const Vec &mu) {
  Layout L = paired::mpccLayout(inst);
  if (!paired::inKernel(L, kernelSupport(inst), mu))
    return false;
  for (const auto &c : conditions)
    if (sgn(mu[c.a]) * sgn(mu[c.b]) < 0)
      return true;
  return false;
}

QualResult checkLicq(const MpccInstance &inst) {
  auto S = model::activeSets(inst);
  Matrix rows(0, inst.n);
  std::vector<std::string> names;
  auto add = [&](const model::PointData &d, const std::string &name) {
    rows.appendRow(d.grad);
    names.push_back(name);
  };
  for (std::size_t i = 0; i < inst.h.size(); ++i)
    add(inst.h[i], "h" + std::to_string(i + 1));
  for (auto i : S.ig)
    add(inst.g[i], "g" + std::to_string(i + 1));
  for (auto i : model::setUnion(S.i0plus, S.i00))
    add(inst.G[i], "G" + std::to_string(i + 1));
  for (auto i : model::setUnion(S.iplus0, S.i00))
    add(inst.H[i], "H" + std::to_string(i + 1));
  QualResult q;
  q.name = "licq";
  std::size_t r = polylp::rank(rows);
  q.holds = r == rows.rows();
  q.notes.push_back("active gradients: " + std::to_string(rows.rows()) +
                    ", rank: " + std::to_string(r));
  if (!q.holds) {
    auto dep = polylp::nullspace(rows.transpose());
    Vec d = polylp::primitive(dep.front());
    std::string combo;
    for (std::size_t k = 0; k < d.size(); ++k)
      if (sgn(d[k]) != 0)
        combo += (combo.empty() ? "" : ", ") + names[k];
    q.witness.push_back({"dependency", d});
    q.notes.push_back("dependent gradients: " + combo);
  }
  return q;
}

Report certifyMpcc(const MpccInstance &inst, const CertifyOptions &options) {
  Context ctx(inst);
  Report rep;
  rep.kind = model::ProblemKind::Mpcc;
  rep.digest = model::instanceDigest(inst);
  if (inst.affine)
    rep.assumptions.push_back("GGCQ: asserted (affine data)");
  else if (inst.ggcqAsserted)
    rep.assumptions.push_back("GGCQ: asserted by user");
  else
    rep.assumptions.push_back(
        "GGCQ: not asserted; the oracle decides B-stationarity of the linearized problem");
  rep.activeSets = {{"Ig", ctx.sets.ig},
                    {"I0+", ctx.sets.i0plus},
                    {"I00", ctx.sets.i00},
                    {"I+0", ctx.sets.iplus0}};
  auto ns = nonsingularSets(inst);
  rep.activeSets.push_back({"betaG", ns.betaG});
  rep.activeSets.push_back({"betaH", ns.betaH});
  rep.activeSets.push_back({"betaGH", ns.betaGH});

  if (options.runOracle)
    rep.certificates.push_back(oracle::bStationaryOracle(inst, options.limits.partitionCap));
  rep.certificates.push_back(checkS(inst));
  rep.certificates.push_back(checkM(inst, options.limits));
  auto partitions = model::enumeratePartitions(ctx.sets.i00, options.limits.partitionCap);
  for (const auto &p : partitions)
    rep.certificates.push_back(checkQ(inst, p));
  rep.certificates.push_back(checkQM(inst, std::nullopt, options.limits));

  rep.qualifications.push_back(checkLicq(inst));
  for (const auto &p : partitions)
    rep.qualifications.push_back(qualTheorem5(inst, p));
  for (const auto &p : model::enumeratePartitions(ns.betaGH, options.limits.partitionCap)) {
    rep.qualifications.push_back(qualCorollary5(inst, p));
    rep.qualifications.push_back(qualPangFukushimaA3(inst, p));
  }
  rep.auditViolations = oracle::auditReport(rep);
  return rep;
}

} // namespace statcert::mpcc
