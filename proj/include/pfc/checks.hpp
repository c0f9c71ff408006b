#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pfc::expcli {

struct CheckReport {
  std::string suite;
  bool passed = false;
  std::vector<std::pair<std::string, double>> stats;
  std::string detail;

  double stat(const std::string& name) const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& check_suites();

/// Runs one named invariant suite at its documented size. Throws UnknownSuite.
CheckReport run_checks(const std::string& suite, std::uint64_t seed, int threads = 1);

}  // namespace pfc::expcli
