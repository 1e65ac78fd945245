#pragma once

// Certificates, qualification results and the aggregate report, with JSON
// round-tripping and a plain-text rendering.

#include "statcert/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace statcert {

enum class Stationarity { B, S, M, Q, QM };
enum class Verdict { False, True, Unavailable };

const char *stationarityName(Stationarity s);
const char *verdictName(Verdict v);
inline Verdict verdictOf(bool b) { return b ? Verdict::True : Verdict::False; }

struct NamedVector {
  std::string name;
  Vec values;
  bool operator==(const NamedVector &) const = default;
};
using Blocks = std::vector<NamedVector>;

const Vec *findBlock(const Blocks &blocks, const std::string &name);

struct Certificate {
  Stationarity stationarity = Stationarity::S;
  Verdict verdict = Verdict::False;
  std::optional<model::Partition> partition;
  std::optional<Blocks> lambda;
  std::optional<Blocks> mu;
  /// Data refuting the concept (separating directions, descent rays).
  std::optional<Blocks> refutation;
  std::vector<std::string> notes;

  bool holds() const { return verdict == Verdict::True; }
  bool operator==(const Certificate &) const = default;
};

struct QualResult {
  std::string name;
  std::optional<model::Partition> partition;
  bool holds = false;
  Blocks witness;
  std::vector<std::string> notes;
  bool operator==(const QualResult &) const = default;
};

struct NamedIndexSet {
  std::string name;
  model::IndexSet indices;
  bool operator==(const NamedIndexSet &) const = default;
};

inline constexpr const char *kToolVersion = "statcert 0.1.0";

struct Report {
  std::string toolVersion = kToolVersion;
  model::ProblemKind kind = model::ProblemKind::Mpcc;
  std::string digest;
  std::vector<std::string> assumptions;
  std::vector<NamedIndexSet> activeSets;
  std::vector<Certificate> certificates;
  std::vector<QualResult> qualifications;
  std::vector<std::string> auditViolations;
  std::vector<std::string> notes;
  bool operator==(const Report &) const = default;
};

std::string reportToJson(const Report &report);
Report reportFromJson(const std::string &text);
/// Implication-diagram style table; timing (seconds) is appended when given.
std::string renderText(const Report &report, std::optional<double> seconds = std::nullopt);

std::string formatIndexSet(const model::IndexSet &set);  // 1-based "{1,3}"
std::string formatPartition(const model::Partition &p);
std::string formatVec(const Vec &v);

} // namespace statcert
