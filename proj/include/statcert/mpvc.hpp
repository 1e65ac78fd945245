#pragma once

// Stationarity and constraint qualifications for programs with vanishing
// constraints H(x) >= 0, G(x) H(x) <= 0, decided exactly from point data.

#include "statcert/model.hpp"
#include "statcert/paired.hpp"
#include "statcert/report.hpp"

#include <optional>

namespace statcert::mpvc {

using model::IndexSet;
using model::MpvcInstance;
using model::Partition;
using paired::SignPattern;

struct Limits {
  std::size_t partitionCap = model::kDefaultCap;
  std::size_t branchCap = paired::kDefaultBranchCap;
};

SignPattern regularNormalPattern(const MpvcInstance &inst);  // N̂_D
SignPattern kernelSupport(const MpvcInstance &inst);         // R_VC
/// Biactive choice 0: H-multiplier free, G-multiplier 0; 1: H-multiplier 0,
/// G-multiplier >= 0.
SignPattern limitingBranchPattern(const MpvcInstance &inst, const std::vector<std::size_t> &choice);

struct QvcPair {
  Partition partition;
  SignPattern firstPolar;
  SignPattern secondPolar;
};
QvcPair buildQvcPair(const MpvcInstance &inst, const Partition &p);

Certificate checkS(const MpvcInstance &inst);
Certificate checkM(const MpvcInstance &inst, const Limits &limits = {});

struct QMemberships {
  paired::ImageMembership first;
  paired::ImageMembership second;
  bool both() const { return first.member && second.member; }
};
QMemberships qMemberships(const MpvcInstance &inst, const Partition &p);

/// Q-stationarity for one partition; the explicit multiplier system and the
/// two image memberships must agree.
Certificate checkQ(const MpvcInstance &inst, const Partition &p);
/// QM for a fixed partition, or automatic: (I00, ∅) first, then all partitions.
Certificate checkQM(const MpvcInstance &inst, const std::optional<Partition> &p,
                    const Limits &limits = {});

/// Existence of a multiplier with nonnegative biactive components (both blocks).
QualResult biactiveNonnegMultiplier(const MpvcInstance &inst);

/// Sign condition on the kernel set for a partition, decided per biactive
/// index by LPs on the kernel set (primal) and by their dual systems.
struct Theorem7Routes {
  bool primal = true;
  bool dual = true;
  std::vector<std::pair<std::string, bool>> primalParts;  // per LP
  std::vector<std::pair<std::string, bool>> dualParts;
  Vec violator;  // kernel ray when primal fails
};
Theorem7Routes theorem7Routes(const MpvcInstance &inst, const Partition &p);
QualResult qualTheorem7(const MpvcInstance &inst, const Partition &p);

struct CertifyOptions {
  Limits limits;
  bool runOracle = true;
};

Report certifyMpvc(const MpvcInstance &inst, const CertifyOptions &options = {});

} // namespace statcert::mpvc
