#include "statcert/model.hpp"

#include "statcert/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace statcert::model {

using nlohmann::json;

const char *kindName(ProblemKind kind) {
  switch (kind) {
  case ProblemKind::Mpcc: return "mpcc";
  case ProblemKind::Mpvc: return "mpvc";
  case ProblemKind::Ge: return "ge";
  }
  return "?";
}

ProblemKind kindOf(const Instance &inst) {
  switch (inst.index()) {
  case 0: return ProblemKind::Mpcc;
  case 1: return ProblemKind::Mpvc;
  default: return ProblemKind::Ge;
  }
}

bool GeInstance::zeroCurvature() const {
  for (const auto &c : g)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (sgn(c.hess(i, j)) != 0)
          return false;
  return true;
}

bool GeInstance::operator==(const GeInstance &o) const {
  return n == o.n && m == o.m && fGrad == o.fGrad && gx == o.gx && gy == o.gy &&
         gValue == o.gValue && g == o.g && tangentC.dim == o.tangentC.dim &&
         tangentC.eq == o.tangentC.eq && tangentC.ineq == o.tangentC.ineq &&
         lambdaBar == o.lambdaBar && affine == o.affine && ggcqAsserted == o.ggcqAsserted &&
         constancyAsserted == o.constancyAsserted;
}

// ---------------------------------------------------------------------------
// JSON reading.

namespace {

[[noreturn]] void parseError(const std::string &path, const std::string &what) {
  fail(ErrorKind::Parse, path + ": " + what);
}

const json &field(const json &obj, const char *key, const std::string &path) {
  if (!obj.is_object() || !obj.contains(key))
    parseError(path, std::string("missing key \"") + key + "\"");
  return obj.at(key);
}

Rational readRational(const json &j, const std::string &path) {
  if (j.is_string()) {
    try {
      return parseRational(j.get<std::string>());
    } catch (const Error &e) {
      parseError(path, e.what());
    }
  }
  if (j.is_number_integer())
    return Rational(j.get<long>());
  parseError(path, "expected a rational string \"p/q\" or an integer");
}

Vec readVec(const json &j, std::size_t len, const std::string &path) {
  if (!j.is_array())
    parseError(path, "expected an array");
  if (j.size() != len)
    parseError(path, "expected " + std::to_string(len) + " entries, got " +
                         std::to_string(j.size()));
  Vec v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(readRational(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

Matrix readMatrix(const json &j, std::size_t rows, std::size_t cols, const std::string &path) {
  if (!j.is_array() || j.size() != rows)
    parseError(path, "expected " + std::to_string(rows) + " rows");
  Matrix mat(0, cols);
  for (std::size_t i = 0; i < rows; ++i)
    mat.appendRow(readVec(j[i], cols, path + "[" + std::to_string(i) + "]"));
  return mat;
}

Matrix readRows(const json &j, std::size_t cols, const std::string &path) {
  if (!j.is_array())
    parseError(path, "expected an array of rows");
  return readMatrix(j, j.size(), cols, path);
}

std::size_t readSize(const json &j, const std::string &path) {
  if (!j.is_number_integer() || j.get<long>() < 0)
    parseError(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

bool readFlag(const json &obj, const char *key, const std::string &path) {
  if (!obj.contains(key))
    return false;
  if (!obj.at(key).is_boolean())
    parseError(path + "." + key, "expected true or false");
  return obj.at(key).get<bool>();
}

std::vector<PointData> readPointData(const json &obj, const char *key, std::size_t n) {
  std::vector<PointData> out;
  if (!obj.contains(key))
    return out;
  const json &arr = obj.at(key);
  if (!arr.is_array())
    parseError(key, "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string path = std::string(key) + "[" + std::to_string(i) + "]";
    out.push_back({readRational(field(arr[i], "value", path), path + ".value"),
                   readVec(field(arr[i], "grad", path), n, path + ".grad")});
  }
  return out;
}

void readPaired(const json &j, PairedProgram &p) {
  p.n = readSize(field(j, "n", "instance"), "n");
  p.fGrad = readVec(field(j, "f_grad", "instance"), p.n, "f_grad");
  p.h = readPointData(j, "h", p.n);
  p.g = readPointData(j, "g", p.n);
  p.G = readPointData(j, "G", p.n);
  p.H = readPointData(j, "H", p.n);
  if (p.G.size() != p.H.size())
    parseError("instance", "G and H must have the same number of entries");
  p.affine = readFlag(j, "affine", "instance");
  p.ggcqAsserted = readFlag(j, "ggcq_asserted", "instance");
}

GeInstance readGe(const json &j) {
  GeInstance ge;
  ge.n = readSize(field(j, "n", "instance"), "n");
  ge.m = readSize(field(j, "m", "instance"), "m");
  ge.fGrad = readVec(field(j, "f_grad", "instance"), ge.n + ge.m, "f_grad");
  ge.gx = readMatrix(field(j, "Gx", "instance"), ge.m, ge.n, "Gx");
  ge.gy = readMatrix(field(j, "Gy", "instance"), ge.m, ge.m, "Gy");
  ge.gValue = readVec(field(j, "G_val", "instance"), ge.m, "G_val");
  const json &gs = field(j, "g", "instance");
  if (!gs.is_array())
    parseError("g", "expected an array");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    std::string path = "g[" + std::to_string(i) + "]";
    GeConstraint c;
    c.value = readRational(field(gs[i], "value", path), path + ".value");
    c.grad = readVec(field(gs[i], "grad", path), ge.m, path + ".grad");
    if (gs[i].contains("hess"))
      c.hess = readMatrix(gs[i].at("hess"), ge.m, ge.m, path + ".hess");
    else
      c.hess = Matrix(ge.m, ge.m);
    ge.g.push_back(std::move(c));
  }
  ge.tangentC = polylp::HCone(ge.n);
  if (j.contains("TC")) {
    const json &tc = j.at("TC");
    if (tc.contains("eq"))
      ge.tangentC.eq = readRows(tc.at("eq"), ge.n, "TC.eq");
    if (tc.contains("ineq"))
      ge.tangentC.ineq = readRows(tc.at("ineq"), ge.n, "TC.ineq");
  }
  if (j.contains("lambda_bar"))
    ge.lambdaBar = readVec(j.at("lambda_bar"), ge.g.size(), "lambda_bar");
  ge.affine = readFlag(j, "affine", "instance");
  ge.ggcqAsserted = readFlag(j, "ggcq_asserted", "instance");
  ge.constancyAsserted = readFlag(j, "constancy_asserted", "instance");
  if (ge.affine && !ge.zeroCurvature())
    parseError("affine", "instance is marked affine but has nonzero Hessians");
  return ge;
}

// ---------------------------------------------------------------------------
// JSON writing.

json writeVec(const Vec &v) {
  json a = json::array();
  for (const auto &x : v)
    a.push_back(formatRational(x));
  return a;
}

json writeMatrix(const Matrix &m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    a.push_back(writeVec(m.row(i)));
  return a;
}

json writePointData(const std::vector<PointData> &ds) {
  json a = json::array();
  for (const auto &d : ds)
    a.push_back({{"value", formatRational(d.value)}, {"grad", writeVec(d.grad)}});
  return a;
}

json writePaired(const PairedProgram &p, const char *kind) {
  json j;
  j["kind"] = kind;
  j["n"] = p.n;
  j["f_grad"] = writeVec(p.fGrad);
  j["h"] = writePointData(p.h);
  j["g"] = writePointData(p.g);
  j["G"] = writePointData(p.G);
  j["H"] = writePointData(p.H);
  j["affine"] = p.affine;
  j["ggcq_asserted"] = p.ggcqAsserted;
  return j;
}

json writeGe(const GeInstance &ge) {
  json j;
  j["kind"] = "ge";
  j["n"] = ge.n;
  j["m"] = ge.m;
  j["f_grad"] = writeVec(ge.fGrad);
  j["Gx"] = writeMatrix(ge.gx);
  j["Gy"] = writeMatrix(ge.gy);
  j["G_val"] = writeVec(ge.gValue);
  json gs = json::array();
  for (const auto &c : ge.g)
    gs.push_back({{"value", formatRational(c.value)},
                  {"grad", writeVec(c.grad)},
                  {"hess", writeMatrix(c.hess)}});
  j["g"] = gs;
  j["TC"] = {{"eq", writeMatrix(ge.tangentC.eq)}, {"ineq", writeMatrix(ge.tangentC.ineq)}};
  if (ge.lambdaBar)
    j["lambda_bar"] = writeVec(*ge.lambdaBar);
  j["affine"] = ge.affine;
  j["ggcq_asserted"] = ge.ggcqAsserted;
  j["constancy_asserted"] = ge.constancyAsserted;
  return j;
}

std::string label(const char *family, std::size_t i) {
  return std::string(family) + "[" + std::to_string(i + 1) + "]";
}

[[noreturn]] void infeasible(const std::string &what) { fail(ErrorKind::InfeasiblePoint, what); }

void checkPairedCommon(const PairedProgram &p) {
  for (std::size_t i = 0; i < p.h.size(); ++i)
    if (sgn(p.h[i].value) != 0)
      infeasible(label("h", i) + " = " + formatRational(p.h[i].value) + " is not 0");
  for (std::size_t i = 0; i < p.g.size(); ++i)
    if (sgn(p.g[i].value) > 0)
      infeasible(label("g", i) + " = " + formatRational(p.g[i].value) + " is positive");
}

} // namespace

Instance parseInstance(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    fail(ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
  }
  const json &kind = field(j, "kind", "instance");
  if (!kind.is_string())
    parseError("kind", "expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "mpcc") {
    MpccInstance inst;
    readPaired(j, inst);
    checkFeasible(inst);
    return inst;
  }
  if (k == "mpvc") {
    MpvcInstance inst;
    readPaired(j, inst);
    checkFeasible(inst);
    return inst;
  }
  if (k == "ge") {
    GeInstance inst = readGe(j);
    checkFeasible(inst);
    return inst;
  }
  parseError("kind", "unknown kind \"" + k + "\" (expected mpcc, mpvc or ge)");
}

std::string serializeInstance(const Instance &inst) {
  json j;
  switch (kindOf(inst)) {
  case ProblemKind::Mpcc: j = writePaired(std::get<MpccInstance>(inst), "mpcc"); break;
  case ProblemKind::Mpvc: j = writePaired(std::get<MpvcInstance>(inst), "mpvc"); break;
  case ProblemKind::Ge: j = writeGe(std::get<GeInstance>(inst)); break;
  }
  return j.dump(2) + "\n";
}

std::string instanceDigest(const Instance &inst) {
  std::string text = serializeInstance(inst);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::Internal, "SHA-256 computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

void checkFeasible(const MpccInstance &p) {
  checkPairedCommon(p);
  for (std::size_t i = 0; i < p.pairs(); ++i) {
    const Rational &gv = p.G[i].value, &hv = p.H[i].value;
    if (sgn(gv) < 0)
      infeasible(label("G", i) + " = " + formatRational(gv) + " is negative");
    if (sgn(hv) < 0)
      infeasible(label("H", i) + " = " + formatRational(hv) + " is negative");
    if (sgn(gv) != 0 && sgn(hv) != 0)
      infeasible("complementarity fails for pair " + std::to_string(i + 1) + ": G = " +
                 formatRational(gv) + ", H = " + formatRational(hv));
  }
}

void checkFeasible(const MpvcInstance &p) {
  checkPairedCommon(p);
  for (std::size_t i = 0; i < p.pairs(); ++i) {
    const Rational &gv = p.G[i].value, &hv = p.H[i].value;
    if (sgn(hv) < 0)
      infeasible(label("H", i) + " = " + formatRational(hv) + " is negative");
    if (sgn(gv) > 0 && sgn(hv) > 0)
      infeasible("vanishing constraint fails for pair " + std::to_string(i + 1) +
                 ": G*H = " + formatRational(gv * hv) + " is positive");
  }
}

void checkFeasible(const GeInstance &ge) {
  for (std::size_t i = 0; i < ge.g.size(); ++i) {
    const Matrix &hs = ge.g[i].hess;
    if (!(hs == hs.transpose()))
      fail(ErrorKind::Parse, label("g", i) + ".hess is not symmetric");
    if (sgn(ge.g[i].value) > 0)
      infeasible(label("g", i) + " = " + formatRational(ge.g[i].value) + " is positive");
  }
}

MpccActiveSets activeSets(const MpccInstance &p) {
  MpccActiveSets s;
  for (std::size_t i = 0; i < p.g.size(); ++i)
    if (sgn(p.g[i].value) == 0)
      s.ig.push_back(i);
  for (std::size_t i = 0; i < p.pairs(); ++i) {
    bool g0 = sgn(p.G[i].value) == 0, h0 = sgn(p.H[i].value) == 0;
    if (g0 && h0)
      s.i00.push_back(i);
    else if (g0)
      s.i0plus.push_back(i);
    else
      s.iplus0.push_back(i);
  }
  return s;
}

MpvcActiveSets activeSets(const MpvcInstance &p) {
  MpvcActiveSets s;
  for (std::size_t i = 0; i < p.g.size(); ++i)
    if (sgn(p.g[i].value) == 0)
      s.ig.push_back(i);
  for (std::size_t i = 0; i < p.pairs(); ++i) {
    int h = sgn(p.H[i].value), g = sgn(p.G[i].value);
    if (h == 0 && g < 0)
      s.i0minus.push_back(i);
    else if (h == 0 && g == 0)
      s.i00.push_back(i);
    else if (h == 0)
      s.i0plus.push_back(i);
    else if (g == 0)
      s.iplus0.push_back(i);
    else
      s.iplusminus.push_back(i);
  }
  return s;
}

std::vector<Partition> enumeratePartitions(const IndexSet &biactive, std::size_t cap) {
  const std::size_t k = biactive.size();
  if (k >= 63 || (std::size_t(1) << k) > cap)
    fail(ErrorKind::PartitionLimitExceeded,
         "2^" + std::to_string(k) + " partitions exceed the cap " + std::to_string(cap));
  std::vector<Partition> out;
  for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
    Partition p;
    for (std::size_t b = 0; b < k; ++b)
      ((mask >> b) & 1 ? p.beta1 : p.beta2).push_back(biactive[b]);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(),
            [](const Partition &a, const Partition &b) { return a.beta1 < b.beta1; });
  return out;
}

bool contains(const IndexSet &set, std::size_t i) {
  return std::binary_search(set.begin(), set.end(), i);
}

IndexSet setDifference(const IndexSet &a, const IndexSet &b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet setUnion(const IndexSet &a, const IndexSet &b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet setIntersection(const IndexSet &a, const IndexSet &b) {
  IndexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool isPartitionOf(const Partition &p, const IndexSet &base) {
  return std::is_sorted(p.beta1.begin(), p.beta1.end()) &&
         std::is_sorted(p.beta2.begin(), p.beta2.end()) &&
         setIntersection(p.beta1, p.beta2).empty() && setUnion(p.beta1, p.beta2) == base;
}

Partition partitionFromList(const std::string &list, const IndexSet &biactive) {
  Partition p;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty())
      continue;
    std::size_t idx = 0;
    try {
      std::size_t used = 0;
      long v = std::stol(item, &used);
      if (used != item.size() || v < 1)
        throw std::invalid_argument(item);
      idx = static_cast<std::size_t>(v - 1);
    } catch (const std::exception &) {
      fail(ErrorKind::Parse, "partition entry \"" + item + "\" is not a positive index");
    }
    if (!contains(biactive, idx))
      fail(ErrorKind::Parse, "partition entry " + item + " is not a biactive index");
    p.beta1.push_back(idx);
  }
  std::sort(p.beta1.begin(), p.beta1.end());
  p.beta1.erase(std::unique(p.beta1.begin(), p.beta1.end()), p.beta1.end());
  p.beta2 = setDifference(biactive, p.beta1);
  return p;
}

} // namespace statcert::model
