#include "statcert/report.hpp"

#include "statcert/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace statcert {

using nlohmann::json;

const char *stationarityName(Stationarity s) {
  switch (s) {
  case Stationarity::B: return "B";
  case Stationarity::S: return "S";
  case Stationarity::M: return "M";
  case Stationarity::Q: return "Q";
  case Stationarity::QM: return "QM";
  }
  return "?";
}

const char *verdictName(Verdict v) {
  switch (v) {
  case Verdict::False: return "false";
  case Verdict::True: return "true";
  case Verdict::Unavailable: return "unavailable";
  }
  return "?";
}

const Vec *findBlock(const Blocks &blocks, const std::string &name) {
  for (const auto &b : blocks)
    if (b.name == name)
      return &b.values;
  return nullptr;
}

std::string formatIndexSet(const model::IndexSet &set) {
  std::string s = "{";
  for (std::size_t k = 0; k < set.size(); ++k)
    s += (k ? "," : "") + std::to_string(set[k] + 1);
  return s + "}";
}

std::string formatPartition(const model::Partition &p) {
  return "(" + formatIndexSet(p.beta1) + ", " + formatIndexSet(p.beta2) + ")";
}

std::string formatVec(const Vec &v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k)
    s += (k ? ", " : "") + formatRational(v[k]);
  return s + ")";
}

namespace {

template <class T> T parseEnum(const std::string &text, std::initializer_list<T> values,
                               const char *(*name)(T)) {
  for (T v : values)
    if (text == name(v))
      return v;
  fail(ErrorKind::Parse, "unknown value '" + text + "'");
}

json indicesToJson(const model::IndexSet &set) {
  json a = json::array();
  for (auto i : set)
    a.push_back(i + 1);
  return a;
}

model::IndexSet indicesFromJson(const json &a) {
  model::IndexSet set;
  for (const auto &x : a) {
    auto k = x.get<std::size_t>();
    if (k == 0)
      fail(ErrorKind::Parse, "indices are 1-based");
    set.push_back(k - 1);
  }
  return set;
}

json vecToJson(const Vec &v) {
  json a = json::array();
  for (const auto &x : v)
    a.push_back(formatRational(x));
  return a;
}

Vec vecFromJson(const json &a) {
  Vec v;
  for (const auto &x : a)
    v.push_back(parseRational(x.get<std::string>()));
  return v;
}

json blocksToJson(const Blocks &blocks) {
  json a = json::array();
  for (const auto &b : blocks)
    a.push_back({{"name", b.name}, {"values", vecToJson(b.values)}});
  return a;
}

Blocks blocksFromJson(const json &a) {
  Blocks blocks;
  for (const auto &b : a)
    blocks.push_back({b.at("name").get<std::string>(), vecFromJson(b.at("values"))});
  return blocks;
}

json partitionToJson(const model::Partition &p) {
  return {{"beta1", indicesToJson(p.beta1)}, {"beta2", indicesToJson(p.beta2)}};
}

model::Partition partitionFromJson(const json &j) {
  return {indicesFromJson(j.at("beta1")), indicesFromJson(j.at("beta2"))};
}

} // namespace

std::string reportToJson(const Report &r) {
  json j;
  j["tool_version"] = r.toolVersion;
  j["kind"] = model::kindName(r.kind);
  j["digest"] = r.digest;
  j["assumptions"] = r.assumptions;
  json sets = json::array();
  for (const auto &s : r.activeSets)
    sets.push_back({{"name", s.name}, {"indices", indicesToJson(s.indices)}});
  j["active_sets"] = sets;
  json certs = json::array();
  for (const auto &c : r.certificates) {
    json e;
    e["stationarity"] = stationarityName(c.stationarity);
    e["verdict"] = verdictName(c.verdict);
    if (c.partition)
      e["partition"] = partitionToJson(*c.partition);
    if (c.lambda)
      e["lambda"] = blocksToJson(*c.lambda);
    if (c.mu)
      e["mu"] = blocksToJson(*c.mu);
    if (c.refutation)
      e["refutation"] = blocksToJson(*c.refutation);
    e["notes"] = c.notes;
    certs.push_back(e);
  }
  j["certificates"] = certs;
  json quals = json::array();
  for (const auto &q : r.qualifications) {
    json e;
    e["name"] = q.name;
    if (q.partition)
      e["partition"] = partitionToJson(*q.partition);
    e["holds"] = q.holds;
    e["witness"] = blocksToJson(q.witness);
    e["notes"] = q.notes;
    quals.push_back(e);
  }
  j["qualifications"] = quals;
  j["audit_violations"] = r.auditViolations;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

Report reportFromJson(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    fail(ErrorKind::Parse, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    Report r;
    r.kind = parseEnum<model::ProblemKind>(
        j.at("kind").get<std::string>(),
        {model::ProblemKind::Mpcc, model::ProblemKind::Mpvc, model::ProblemKind::Ge},
        model::kindName);
    r.toolVersion = j.at("tool_version").get<std::string>();
    r.digest = j.at("digest").get<std::string>();
    r.assumptions = j.at("assumptions").get<std::vector<std::string>>();
    for (const auto &s : j.at("active_sets"))
      r.activeSets.push_back({s.at("name").get<std::string>(), indicesFromJson(s.at("indices"))});
    for (const auto &e : j.at("certificates")) {
      Certificate c;
      c.stationarity = parseEnum<Stationarity>(
          e.at("stationarity").get<std::string>(),
          {Stationarity::B, Stationarity::S, Stationarity::M, Stationarity::Q, Stationarity::QM},
          stationarityName);
      c.verdict = parseEnum<Verdict>(e.at("verdict").get<std::string>(),
                                     {Verdict::False, Verdict::True, Verdict::Unavailable},
                                     verdictName);
      if (e.contains("partition"))
        c.partition = partitionFromJson(e["partition"]);
      if (e.contains("lambda"))
        c.lambda = blocksFromJson(e["lambda"]);
      if (e.contains("mu"))
        c.mu = blocksFromJson(e["mu"]);
      if (e.contains("refutation"))
        c.refutation = blocksFromJson(e["refutation"]);
      c.notes = e.at("notes").get<std::vector<std::string>>();
      r.certificates.push_back(c);
    }
    for (const auto &e : j.at("qualifications")) {
      QualResult q;
      q.name = e.at("name").get<std::string>();
      if (e.contains("partition"))
        q.partition = partitionFromJson(e["partition"]);
      q.holds = e.at("holds").get<bool>();
      q.witness = blocksFromJson(e.at("witness"));
      q.notes = e.at("notes").get<std::vector<std::string>>();
      r.qualifications.push_back(q);
    }
    r.auditViolations = j.at("audit_violations").get<std::vector<std::string>>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception &e) {
    fail(ErrorKind::Parse, std::string("malformed report: ") + e.what());
  }
}

namespace {

const char *mark(Verdict v) {
  switch (v) {
  case Verdict::True: return "✓";
  case Verdict::False: return "✗";
  default: return "unavailable";
  }
}

std::string label(const Certificate &c) {
  std::string s = c.stationarity == Stationarity::B ? "B(oracle)" : stationarityName(c.stationarity);
  if (c.stationarity == Stationarity::Q && c.partition)
    s += " " + formatPartition(*c.partition);
  return s;
}

std::string pad(const std::string &s, std::size_t width) {
  // Count code points so the check marks align.
  std::size_t len = 0;
  for (unsigned char ch : s)
    len += (ch & 0xC0) != 0x80;
  return s + std::string(len < width ? width - len : 1, ' ');
}

void renderBlocks(std::ostringstream &out, const char *title, const Blocks &blocks) {
  for (const auto &b : blocks)
    out << "      " << title << " " << b.name << " = " << formatVec(b.values) << "\n";
}

} // namespace

std::string renderText(const Report &r, std::optional<double> seconds) {
  std::ostringstream out;
  out << "report for " << model::kindName(r.kind) << " instance " << r.digest.substr(0, 16)
      << " (" << r.toolVersion << ")\n";
  out << "assumptions:\n";
  for (const auto &a : r.assumptions)
    out << "  - " << a << "\n";
  out << "index sets (1-based):\n";
  for (const auto &s : r.activeSets)
    out << "  " << pad(s.name, 10) << formatIndexSet(s.indices) << "\n";

  // Aggregate row per concept, strongest first; Q holds if it holds for some pair.
  const Stationarity order[] = {Stationarity::S, Stationarity::B, Stationarity::QM,
                                Stationarity::Q, Stationarity::M};
  if (!r.certificates.empty())
    out << "stationarity (S => B => QM => M, B => Q for every pair, QM => Q):\n";
  std::string summary;
  for (auto kind : order) {
    bool seen = false, anyTrue = false, allUnavailable = true;
    for (const auto &c : r.certificates) {
      if (c.stationarity != kind)
        continue;
      seen = true;
      anyTrue = anyTrue || c.holds();
      allUnavailable = allUnavailable && c.verdict == Verdict::Unavailable;
    }
    if (!seen)
      continue;
    Verdict agg = allUnavailable ? Verdict::Unavailable : verdictOf(anyTrue);
    std::string name = kind == Stationarity::B ? "B(oracle)" : stationarityName(kind);
    out << "  " << pad(name, 28) << mark(agg) << "\n";
    summary += (summary.empty() ? "" : "  ") + name + ":" + mark(agg);
  }
  if (!r.certificates.empty())
    out << "summary: " << summary << "\n"
        << "certificates:\n";
  for (const auto &c : r.certificates) {
    out << "  " << pad(label(c), 28) << mark(c.verdict) << "\n";
    if (c.lambda)
      renderBlocks(out, "multiplier", *c.lambda);
    if (c.mu)
      renderBlocks(out, "kernel part", *c.mu);
    if (c.refutation)
      renderBlocks(out, "refutation", *c.refutation);
    for (const auto &n : c.notes)
      out << "      note: " << n << "\n";
  }
  if (!r.qualifications.empty()) {
    out << "qualification conditions:\n";
    for (const auto &q : r.qualifications) {
      std::string name = q.name;
      if (q.partition)
        name += " " + formatPartition(*q.partition);
      out << "  " << pad(name, 28) << (q.holds ? "✓" : "✗") << "\n";
      renderBlocks(out, "witness", q.witness);
      for (const auto &n : q.notes)
        out << "      note: " << n << "\n";
    }
  }
  for (const auto &n : r.notes)
    out << "note: " << n << "\n";
  if (r.auditViolations.empty()) {
    out << "implication audit: no violations\n";
  } else {
    out << "implication audit: " << r.auditViolations.size() << " violation(s)\n";
    for (const auto &v : r.auditViolations)
      out << "  ! " << v << "\n";
  }
  if (seconds) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", *seconds);
    out << "time: " << buf << " s\n";
  }
  return out.str();
}

} // namespace statcert
