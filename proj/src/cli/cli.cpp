#include "statcert/cli.hpp"

#include "statcert/errors.hpp"
#include "statcert/ge.hpp"
#include "statcert/mpcc.hpp"
#include "statcert/mpvc.hpp"
#include "statcert/oracle.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

namespace statcert::cli {

namespace {

using model::Instance;
using model::Partition;

struct Options {
  std::string input;
  std::string concept_ = "all";
  std::string partition;
  std::string qual;
  std::string ndBranches;
  std::string format = "text";
  std::string kind = "mpcc";
  std::uint64_t seed = 0;
  std::size_t cap = model::kDefaultCap;
};

std::string readFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorKind::Parse, "cannot read file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int exitCodeFor(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Parse:
  case ErrorKind::DimensionMismatch: return 2;
  case ErrorKind::InfeasiblePoint:
  case ErrorKind::MfcqViolated:
  case ErrorKind::GeInfeasibleAtPoint:
  case ErrorKind::LambdaBarUnavailable:
  case ErrorKind::ConstancyNotEstablished: return 3;
  case ErrorKind::PartitionLimitExceeded:
  case ErrorKind::BranchLimitExceeded:
  case ErrorKind::SubsetLimitExceeded: return 4;
  case ErrorKind::Internal: return 1;
  }
  return 1;
}

model::IndexSet biactiveOf(const Instance &inst) {
  if (auto *p = std::get_if<model::MpccInstance>(&inst))
    return model::activeSets(*p).i00;
  if (auto *p = std::get_if<model::MpvcInstance>(&inst))
    return model::activeSets(*p).i00;
  return ge::multiplierPolytope(std::get<model::GeInstance>(inst)).izero;
}

std::optional<Partition> partitionOption(const Options &o, const Instance &inst) {
  if (o.partition.empty())
    return std::nullopt;
  return model::partitionFromList(o.partition == "-" ? "" : o.partition, biactiveOf(inst));
}

Report fullReport(const Instance &inst, const Options &o, bool runOracle) {
  if (auto *p = std::get_if<model::MpccInstance>(&inst)) {
    mpcc::CertifyOptions opt;
    opt.limits.partitionCap = o.cap;
    opt.runOracle = runOracle;
    return mpcc::certifyMpcc(*p, opt);
  }
  if (auto *p = std::get_if<model::MpvcInstance>(&inst)) {
    mpvc::CertifyOptions opt;
    opt.limits.partitionCap = o.cap;
    opt.runOracle = runOracle;
    return mpvc::certifyMpvc(*p, opt);
  }
  const auto &g = std::get<model::GeInstance>(inst);
  ge::CertifyOptions opt;
  opt.limits.subsetCap = o.cap;
  opt.runOracle = runOracle;
  if (!o.ndBranches.empty())
    opt.ndBranches = ge::parseNdBranches(readFile(o.ndBranches), g.m);
  return ge::certifyGe(g, opt);
}

Certificate checkQFor(const Instance &inst, const Partition &p) {
  if (auto *x = std::get_if<model::MpccInstance>(&inst))
    return mpcc::checkQ(*x, p);
  if (auto *x = std::get_if<model::MpvcInstance>(&inst))
    return mpvc::checkQ(*x, p);
  return ge::checkQ(ge::prepare(std::get<model::GeInstance>(inst)), p);
}

Certificate checkQMFor(const Instance &inst, const Partition &p, const Options &o) {
  if (auto *x = std::get_if<model::MpccInstance>(&inst)) {
    mpcc::Limits l;
    l.partitionCap = o.cap;
    return mpcc::checkQM(*x, p, l);
  }
  if (auto *x = std::get_if<model::MpvcInstance>(&inst)) {
    mpvc::Limits l;
    l.partitionCap = o.cap;
    return mpvc::checkQM(*x, p, l);
  }
  const auto &g = std::get<model::GeInstance>(inst);
  std::optional<ge::NdBranches> branches;
  if (!o.ndBranches.empty())
    branches = ge::parseNdBranches(readFile(o.ndBranches), g.m);
  ge::Limits l;
  l.subsetCap = o.cap;
  return ge::checkQM(ge::prepare(g), p, branches, l);
}

Stationarity conceptOf(const std::string &c) {
  if (c == "b") return Stationarity::B;
  if (c == "s") return Stationarity::S;
  if (c == "m") return Stationarity::M;
  if (c == "q") return Stationarity::Q;
  return Stationarity::QM;
}

Report checkReport(const Instance &inst, const Options &o) {
  const bool all = o.concept_ == "all";
  if (!all && o.concept_ == "m" && model::kindOf(inst) == model::ProblemKind::Ge)
    fail(ErrorKind::Parse, "M-stationarity is not decided for ge instances");
  Report rep = fullReport(inst, o, all || o.concept_ == "b");
  auto partition = partitionOption(o, inst);
  if (all && !partition)
    return rep;
  std::vector<Certificate> kept;
  for (auto &c : rep.certificates) {
    bool wanted = all || c.stationarity == conceptOf(o.concept_);
    bool partitioned = c.stationarity == Stationarity::Q || c.stationarity == Stationarity::QM;
    if (wanted && !(partition && partitioned))
      kept.push_back(std::move(c));
  }
  if (partition) {
    if (all || o.concept_ == "q")
      kept.push_back(checkQFor(inst, *partition));
    if (all || o.concept_ == "qm")
      kept.push_back(checkQMFor(inst, *partition, o));
  }
  rep.certificates = std::move(kept);
  if (!all)
    rep.qualifications.clear();
  rep.auditViolations = oracle::auditReport(rep);
  return rep;
}

Report qualReport(const Instance &inst, const Options &o) {
  Report rep = fullReport(inst, o, false);
  rep.certificates.clear();
  auto partition = partitionOption(o, inst);
  std::vector<QualResult> quals;
  auto partitions = [&](const model::IndexSet &base) {
    return partition ? std::vector<Partition>{*partition}
                     : model::enumeratePartitions(base, o.cap);
  };
  const std::string &q = o.qual;
  if (auto *x = std::get_if<model::MpccInstance>(&inst)) {
    if (q == "licq") {
      quals.push_back(mpcc::checkLicq(*x));
    } else if (q == "thm5") {
      for (const auto &p : partitions(model::activeSets(*x).i00))
        quals.push_back(mpcc::qualTheorem5(*x, p));
    } else if (q == "cor5" || q == "a3") {
      // These conditions split only the doubly nonsingular pairs.
      auto base = mpcc::nonsingularSets(*x).betaGH;
      std::string list = o.partition == "-" ? "" : o.partition;
      auto parts = partition ? std::vector<Partition>{model::partitionFromList(list, base)}
                             : model::enumeratePartitions(base, o.cap);
      for (const auto &p : parts)
        quals.push_back(q == "cor5" ? mpcc::qualCorollary5(*x, p)
                                    : mpcc::qualPangFukushimaA3(*x, p));
    } else {
      fail(ErrorKind::Parse, "condition '" + q + "' does not apply to mpcc instances");
    }
  } else if (auto *x = std::get_if<model::MpvcInstance>(&inst)) {
    if (q != "thm7")
      fail(ErrorKind::Parse, "condition '" + q + "' does not apply to mpvc instances");
    for (const auto &p : partitions(model::activeSets(*x).i00))
      quals.push_back(mpvc::qualTheorem7(*x, p));
  } else {
    ge::Setup s = ge::prepare(std::get<model::GeInstance>(inst));
    if (q == "thm11") {
      for (const auto &p : partitions(s.poly.izero))
        quals.push_back(ge::qualTheorem11(s, p));
    } else if (q == "thm9") {
      quals.push_back(ge::qualTheorem9(s));
    } else {
      fail(ErrorKind::Parse, "condition '" + q + "' does not apply to ge instances");
    }
  }
  rep.qualifications = std::move(quals);
  rep.auditViolations = oracle::auditReport(rep);
  return rep;
}

Report oracleReport(const Instance &inst, const Options &o) {
  Report rep = fullReport(inst, o, true);
  std::vector<Certificate> kept;
  for (auto &c : rep.certificates)
    if (c.stationarity == Stationarity::B)
      kept.push_back(std::move(c));
  rep.certificates = std::move(kept);
  rep.qualifications.clear();
  rep.auditViolations.clear();
  return rep;
}

std::string generate(const Options &o) {
  if (o.kind == "mpcc")
    return model::serializeInstance(oracle::randomMpcc(o.seed));
  if (o.kind == "mpvc")
    return model::serializeInstance(oracle::randomMpvc(o.seed));
  return model::serializeInstance(oracle::randomGe(o.seed));
}

int emit(const Report &rep, const Options &o, double seconds, std::ostream &out,
         std::ostream &err) {
  if (o.format == "json")
    out << reportToJson(rep);
  else
    out << renderText(rep, seconds);
  if (!rep.auditViolations.empty()) {
    err << "implication audit failed with " << rep.auditViolations.size() << " violation(s)\n";
    return 1;
  }
  return 0;
}

} // namespace

int runCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Exact certificates for stationarity of MPCC, MPVC and generalized-equation "
               "constrained programs"};
  app.require_subcommand(1);
  Options o;

  auto addInput = [&](CLI::App *sub) {
    sub->add_option("--input", o.input, "instance JSON file")->required();
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--cap", o.cap, "limit on enumerated partitions or subsets")
        ->check(CLI::PositiveNumber);
    sub->add_option("--partition", o.partition,
                    "1-based comma list for beta1 ('-' for empty); beta2 is the complement");
  };
  auto *check = app.add_subcommand("check", "decide stationarity concepts");
  addInput(check);
  check->add_option("--concept", o.concept_, "concept to decide")
      ->check(CLI::IsMember({"b", "s", "m", "q", "qm", "all"}));
  check->add_option("--nd-branches", o.ndBranches,
                    "ge only: JSON file with branch cones of the limiting normal cone");
  auto *qual = app.add_subcommand("qual", "check a sufficient condition for S-stationarity");
  addInput(qual);
  qual->add_option("--qual", o.qual, "condition")
      ->required()
      ->check(CLI::IsMember({"thm5", "cor5", "a3", "licq", "thm7", "thm11", "thm9"}));
  auto *orc = app.add_subcommand("oracle", "B-stationarity relative to the linearized cone");
  addInput(orc);
  auto *gen = app.add_subcommand("generate", "print a seeded random affine instance");
  gen->add_option("--kind", o.kind, "instance kind")
      ->check(CLI::IsMember({"mpcc", "mpvc", "ge"}));
  gen->add_option("--seed", o.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      out << generate(o);
      return 0;
    }
    auto start = std::chrono::steady_clock::now();
    Instance inst = model::parseInstance(readFile(o.input));
    Report rep = check->parsed() ? checkReport(inst, o)
                 : qual->parsed() ? qualReport(inst, o)
                                  : oracleReport(inst, o);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return emit(rep, o, elapsed.count(), out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exitCodeFor(e.kind());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace statcert::cli
