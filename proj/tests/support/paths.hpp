#pragma once

#include <string>

#ifndef LASP_SOURCE_DIR
#error "LASP_SOURCE_DIR must be defined by the build"
#endif

namespace lasp::testutil {

inline std::string source_dir() { return LASP_SOURCE_DIR; }
inline std::string scenario_dir(const std::string& id) { return source_dir() + "/scenarios/" + id; }
inline std::string golden_path(const std::string& name) {
  return source_dir() + "/tests/golden/" + name;
}

}  // namespace lasp::testutil
