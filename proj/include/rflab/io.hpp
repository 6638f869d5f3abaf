#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rflab/collapse.hpp"
#include "rflab/dilation.hpp"
#include "rflab/flow.hpp"
#include "rflab/gh.hpp"
#include "rflab/metric_space.hpp"
#include "rflab/pinching.hpp"
#include "rflab/profile.hpp"
#include "rflab/virtual_limit.hpp"

namespace rflab::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double x);

json to_json(const RadialProfile::Options& o);
RadialProfile::Options options_from_json(const json& j);
json to_json(const DilationRecord& r);
DilationRecord dilation_record_from_json(const json& j);
json to_json(const PinchingReport& r);
json to_json(const OriginKind& k);
json to_json(const SequenceVerdict& v);
json to_json(const LocalModel& m);
json to_json(const SingularReport& r);
json to_json(const CigarReport& r);
json to_json(const OverlapFit& f);
json to_json(const GhBounds& b);
json to_json(const DimensionEstimate& d);
json to_json(const SamplingWindow& w);

/// `<stem>.csv` with header r,phi,f and `<stem>.json` with the options.
void write_profile(const RadialProfile& p, const fs::path& csv);
RadialProfile read_profile(const fs::path& csv);

/// Directory of profile_NNNNN.csv/.json files plus index.json.
void write_solution(const SurfaceSolution& sol, const fs::path& dir,
                    const json& provenance = nullptr);
SurfaceSolution read_solution(const fs::path& dir);

/// n x n CSV plus `<stem>.json` metadata.
void write_space(const FiniteMetricSpace& A, const fs::path& csv, const json& meta);
FiniteMetricSpace read_space(const fs::path& csv);

void write_json(const json& j, const fs::path& path);
json read_json(const fs::path& path);

/// Two-column CSV with the given header.
void write_columns(const std::vector<std::pair<double, double>>& rows, const std::string& header,
                   const fs::path& path);

std::string sha256_file(const fs::path& path);

/// manifest.json at the root listing every other regular file with its hash,
/// sorted by relative path.
void write_manifest(const fs::path& root);

}  // namespace rflab::io
