#pragma once

// Stationarity and constraint qualifications for programs with complementarity
// constraints 0 <= G(x) ⊥ H(x) >= 0, decided exactly from point data.

#include "statcert/model.hpp"
#include "statcert/paired.hpp"
#include "statcert/report.hpp"

#include <optional>

namespace statcert::mpcc {

using model::IndexSet;
using model::MpccInstance;
using model::Partition;
using paired::SignPattern;

struct Limits {
  std::size_t partitionCap = model::kDefaultCap;
  std::size_t branchCap = paired::kDefaultBranchCap;
};

/// Coordinate patterns of multiplier cones at the point.
SignPattern regularNormalPattern(const MpccInstance &inst);   // N̂_D
SignPattern kernelSupport(const MpccInstance &inst);          // R_CC
/// One pattern per biactive choice vector: 0 = both >= 0, 1 = G-multiplier 0,
/// 2 = H-multiplier 0.
SignPattern limitingBranchPattern(const MpccInstance &inst, const std::vector<std::size_t> &choice);

/// Polars of the two product cones of a partition and of its swap.
struct QccPair {
  Partition partition;
  SignPattern firstPolar;
  SignPattern secondPolar;
};
QccPair buildQccPair(const MpccInstance &inst, const Partition &p);

Certificate checkS(const MpccInstance &inst);
Certificate checkM(const MpccInstance &inst, const Limits &limits = {});

/// Returns the M-multiplier if the M-multiplier set is a single point.
std::optional<Vec> uniqueMMultiplier(const MpccInstance &inst, const Limits &limits = {});

struct QMemberships {
  paired::ImageMembership first;
  paired::ImageMembership second;
  bool both() const { return first.member && second.member; }
};
/// The two image memberships of -∇f for a partition.
QMemberships qMemberships(const MpccInstance &inst, const Partition &p);

/// Q-stationarity for one partition; both decision routes are run and must agree.
Certificate checkQ(const MpccInstance &inst, const Partition &p);
/// QM for a fixed partition, or over all partitions when p is empty.
Certificate checkQM(const MpccInstance &inst, const std::optional<Partition> &p,
                    const Limits &limits = {});

struct NonsingularSets {
  IndexSet betaG, betaH, betaGH;
};
NonsingularSets nonsingularSets(const MpccInstance &inst);

/// Sign-product families.
std::vector<paired::ProductCondition> theorem5Conditions(const MpccInstance &inst,
                                                         const Partition &p);
std::vector<paired::ProductCondition> a3Conditions(const MpccInstance &inst,
                                                   const NonsingularSets &sets,
                                                   const Partition &p);

QualResult qualTheorem5(const MpccInstance &inst, const Partition &p);
QualResult qualCorollary5(const MpccInstance &inst, const Partition &p);
QualResult qualPangFukushimaA3(const MpccInstance &inst, const Partition &p);
QualResult checkLicq(const MpccInstance &inst);

/// Whether mu is in the kernel set and violates one of the conditions.
bool isProductViolation(const MpccInstance &inst,
                        const std::vector<paired::ProductCondition> &conditions,
                        const Vec &mu);

struct CertifyOptions {
  Limits limits;
  bool runOracle = true;
};

Report certifyMpcc(const MpccInstance &inst, const CertifyOptions &options = {});

} // namespace statcert::mpcc
