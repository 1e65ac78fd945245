#pragma once

// Instance files under data/instances and error-kind capture.

#include "statcert/errors.hpp"
#include "statcert/model.hpp"

#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

namespace fixtures {

inline std::string dataPath(const std::string &name) {
  return std::string(STATCERT_DATA_DIR) + "/" + name;
}

inline std::string readText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline statcert::model::Instance load(const std::string &name) {
  return statcert::model::parseInstance(readText(dataPath(name)));
}

template <class T> T loadAs(const std::string &name) { return std::get<T>(load(name)); }

inline std::optional<statcert::ErrorKind> errorOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const statcert::Error &e) {
    return e.kind();
  }
  return std::nullopt;
}

} // namespace fixtures
