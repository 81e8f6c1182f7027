#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace martinq {

enum class CheckStatus { pass, fail, soft };
std::string status_name(CheckStatus s);

struct CheckResult {
  std::string id;         ///< e.g. "sigma.concatenation"
  std::string reference;  ///< the identity or property checked
  CheckStatus status = CheckStatus::pass;
  std::string details;
};

struct ConformanceReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool ok() const;
};

enum class Suite { exact, mc, all };
Suite parse_suite(const std::string& text);
std::string suite_name(Suite s);

struct VerifyOptions {
  /// Replace the Z profile by x^2 in the harmonic-profile check (forced failure path).
  bool corrupt_phi = false;
};

/// Runs the invariant checks. `exact` uses no randomness; `mc` draws every
/// stream from `seed`.
ConformanceReport verify_suite(Suite suite, std::uint64_t seed, const VerifyOptions& options = {});

/// Check ids with their references, in report order.
std::vector<std::pair<std::string, std::string>> check_catalog();

}  // namespace martinq
