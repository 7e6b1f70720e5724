#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "hackint/svm.hpp"
#include "hackint/types.hpp"

namespace hackint {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

json interval_to_json(const HackingInterval& iv);
json svm_result_to_json(const SvmIntervalResult& res);

// FNV-1a over the canonical config string; stable across runs.
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

// Provenance block. The timestamp is omitted entirely when deterministic.
json provenance_json(std::uint64_t seed, const std::string& config_canonical, bool deterministic);

json report_skeleton(const std::string& command, std::uint64_t seed,
                     const std::string& config_canonical, bool deterministic);

} // namespace hackint
