#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "easrn/pipeline/dataset.hpp"

namespace easrn::pipeline {

inline constexpr int kManifestSchema = 1;
inline constexpr const char* kManifestName = "manifest.jsonl";
inline constexpr const char* kPartialManifestName = "manifest.partial.jsonl";

// Manifests are JSON lines. Line 1 is {"type":"header","schema":1,"policy":{...}},
// every further line is {"type":"item",...} for one pair.

std::string header_line(const DatasetPolicy& policy);
std::string record_line(const ItemRecord& record);

struct Manifest {
  DatasetPolicy policy;
  std::vector<ItemRecord> records;
};

/// Parses a manifest. A partial manifest may lack trailing records and may end
/// in a torn line, which is ignored.
Manifest read_manifest(const std::filesystem::path& path);

/// Canonical JSON text of the policy fields that affect the output.
std::string policy_fingerprint(const DatasetPolicy& policy);

}  // namespace easrn::pipeline
