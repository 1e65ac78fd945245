#pragma once

// Problem instances (first-order point data), JSON I/O, feasibility checks,
// active-set classification and biactive partition enumeration.

#include "statcert/polylp.hpp"
#include "statcert/rational.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace statcert::model {

/// Sorted 0-based indices.
using IndexSet = std::vector<std::size_t>;

struct Partition {
  IndexSet beta1;
  IndexSet beta2;
  bool operator==(const Partition &) const = default;
};

enum class ProblemKind { Mpcc, Mpvc, Ge };
const char *kindName(ProblemKind kind);

/// Value and gradient of one scalar constraint function at the point.
struct PointData {
  Rational value;
  Vec grad;
  bool operator==(const PointData &) const = default;
};

/// Shared layout of MPCC and MPVC instances.
struct PairedProgram {
  std::size_t n = 0;
  Vec fGrad;
  std::vector<PointData> h, g, G, H;
  bool affine = false;
  bool ggcqAsserted = false;

  std::size_t pairs() const { return G.size(); }
  bool ggcq() const { return affine || ggcqAsserted; }
  bool operator==(const PairedProgram &) const = default;
};

struct MpccInstance : PairedProgram {
  bool operator==(const MpccInstance &) const = default;
};
struct MpvcInstance : PairedProgram {
  bool operator==(const MpvcInstance &) const = default;
};

struct GeConstraint {
  Rational value;
  Vec grad;       // length m
  Matrix hess;    // m x m, symmetric
  bool operator==(const GeConstraint &) const = default;
};

/// 0 ∈ G(x,y) + N̂_Γ(y), x ∈ C, with Γ = {y : g(y) <= 0}; only the data at the
/// point is stored. tangentC is the tangent cone of C at x.
struct GeInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  Vec fGrad;       // length n + m
  Matrix gx;       // m x n
  Matrix gy;       // m x m
  Vec gValue;      // G(x,y), length m
  std::vector<GeConstraint> g;
  polylp::HCone tangentC;
  std::optional<Vec> lambdaBar;
  bool affine = false;
  bool ggcqAsserted = false;
  bool constancyAsserted = false;

  bool ggcq() const { return affine || ggcqAsserted; }
  bool zeroCurvature() const;
  bool operator==(const GeInstance &other) const;
};

using Instance = std::variant<MpccInstance, MpvcInstance, GeInstance>;
ProblemKind kindOf(const Instance &inst);

/// Parses and validates; throws ParseError or InfeasiblePoint.
Instance parseInstance(const std::string &text);
std::string serializeInstance(const Instance &inst);
/// Hex SHA-256 of the serialized instance.
std::string instanceDigest(const Instance &inst);

void checkFeasible(const MpccInstance &inst);
void checkFeasible(const MpvcInstance &inst);
void checkFeasible(const GeInstance &inst);

struct MpccActiveSets {
  IndexSet ig;      // active inequalities
  IndexSet i0plus;  // G = 0 < H
  IndexSet i00;     // G = 0 = H
  IndexSet iplus0;  // G > 0 = H
};

struct MpvcActiveSets {
  IndexSet ig;
  IndexSet i0minus;    // H = 0 > G
  IndexSet i00;        // H = 0 = G
  IndexSet i0plus;     // H = 0 < G
  IndexSet iplus0;     // H > 0 = G
  IndexSet iplusminus; // H > 0 > G
};

MpccActiveSets activeSets(const MpccInstance &inst);
MpvcActiveSets activeSets(const MpvcInstance &inst);

constexpr std::size_t kDefaultCap = std::size_t(1) << 16;

/// All 2^|biactive| partitions (beta1, complement), ordered lexicographically by
/// beta1. Throws PartitionLimitExceeded when 2^|biactive| > cap.
std::vector<Partition> enumeratePartitions(const IndexSet &biactive,
                                           std::size_t cap = kDefaultCap);

bool contains(const IndexSet &set, std::size_t i);
IndexSet setDifference(const IndexSet &a, const IndexSet &b);
IndexSet setUnion(const IndexSet &a, const IndexSet &b);
IndexSet setIntersection(const IndexSet &a, const IndexSet &b);
/// Both parts sorted, disjoint, and covering base exactly.
bool isPartitionOf(const Partition &p, const IndexSet &base);

/// Parses a 1-based comma list into a partition of biactive (beta2 = rest).
Partition partitionFromList(const std::string &list, const IndexSet &biactive);

} // namespace statcert::model
