#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dperc/animals.hpp"
#include "dperc/convolution.hpp"
#include "dperc/estimator.hpp"
#include "dperc/observables.hpp"
#include "dperc/sampler.hpp"

namespace dperc {

using Json = nlohmann::json;

inline constexpr const char* kCurveFormat = "dperc-microcanonical/1";
inline constexpr const char* kCanonicalFormat = "dperc-canonical/1";
inline constexpr const char* kEstimateFormat = "dperc-estimate/1";
inline constexpr const char* kClusterFormat = "dperc-cluster/1";
inline constexpr const char* kDecayFormat = "dperc-decay/1";
inline constexpr const char* kAuditFormat = "dperc-audit/1";
inline constexpr const char* kAnimalsFormat = "dperc-animals/1";

/// Execution details kept beside the results. Never hashed.
struct RunInfo {
    int workers = 1;
    std::string timestamp;
};

std::string utc_timestamp();

Json spec_to_json(const LatticeSpec& spec);
LatticeSpec spec_from_json(const Json& j);

Json meta_to_json(const CurveMeta& meta);
CurveMeta meta_from_json(const Json& j);

/// 16 hex digits of FNV-1a over the compact dump of `j`.
std::string config_hash(const Json& j);

Json curve_to_json(const MicrocanonicalCurve& curve, const RunInfo& run);
/// Validates the format tag, counts length and monotonicity.
MicrocanonicalCurve curve_from_json(const Json& j, RunInfo* run = nullptr);

Json canonical_to_json(const CanonicalCurve& curve);
CanonicalCurve canonical_from_json(const Json& j);
/// Columns: <variable>,Q,stderr
std::string canonical_csv(const CanonicalCurve& curve);

Json waist_to_json(const WaistEstimate& w);
Json estimate_to_json(const CriticalEstimate& e);

Json distribution_to_json(const ClusterDistribution& dist, const RunInfo& run);
ClusterDistribution distribution_from_json(const Json& j);
/// Columns: n,count_vertices,count_edges
std::string distribution_csv(const ClusterDistribution& dist);

Json decay_fit_to_json(const DecayFit& fit);
Json audit_to_json(const AuditReport& report);
Json identity_audit_to_json(const IdentityAudit& audit);

std::string read_text(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_text(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace dperc
