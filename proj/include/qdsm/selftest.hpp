#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qdsm {

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::vector<std::string> messages;

  bool ok() const { return failures == 0; }
};

/// Property suites mirroring each module's invariants, sized to run in
/// seconds. `extra_design`, when set, is loaded and certified at its
/// claimed strength as part of the designs suite.
SuiteResult selftest_qcore(std::uint64_t seed);
SuiteResult selftest_designs(
    std::uint64_t seed,
    const std::optional<std::filesystem::path>& extra_design = std::nullopt);
SuiteResult selftest_design_search(std::uint64_t seed);
SuiteResult selftest_eur(std::uint64_t seed);
SuiteResult selftest_entdetect(std::uint64_t seed);
SuiteResult selftest_auxops(std::uint64_t seed);

std::vector<SuiteResult> selftest_all(
    std::uint64_t seed,
    const std::optional<std::filesystem::path>& extra_design = std::nullopt);

/// Run one named suite ("qcore", "designs", "design_search", "eur",
/// "entdetect", "aux").
SuiteResult selftest_suite(
    const std::string& name, std::uint64_t seed,
    const std::optional<std::filesystem::path>& extra_design = std::nullopt);

}  // namespace qdsm
