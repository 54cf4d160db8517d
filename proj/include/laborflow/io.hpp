#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "laborflow/community.hpp"
#include "laborflow/complexity.hpp"
#include "laborflow/flows.hpp"
#include "laborflow/structure.hpp"

namespace laborflow::io {

/// Shortest round-trip decimal rendering of a double; deterministic across
/// runs and platforms.
std::string format_double(double value);

/// Flow CSV: header `origin,destination,count[,group]`, UTF-8, sentinel codes
/// ENTRY/EXIT. Parse errors raise InputError with the 1-based line number.
std::vector<FlowRecord> read_flow_records(const std::filesystem::path& path);
FlowCounts read_flows_csv(const std::filesystem::path& path);
void write_flows_csv(const std::filesystem::path& path, const FlowCounts& counts);

/// Matrix CSV (one row per destination, columns are origins) plus a JSON
/// sidecar carrying {occupations, theta, self_loops, dangling, degenerate}.
void write_matrix(const std::filesystem::path& csv_path,
                  const std::filesystem::path& meta_path,
                  const TransitionMatrix& matrix);
TransitionMatrix read_matrix(const std::filesystem::path& csv_path,
                             const std::filesystem::path& meta_path);

/// Membership CSV: `occupation,community`. Loading recomputes the Barber
/// modularity against the given flows so the assignment invariant holds.
void write_communities_csv(const std::filesystem::path& path,
                           const CommunityAssignment& communities);
CommunityAssignment read_communities_csv(const std::filesystem::path& path,
                                         const FlowCounts& flows);

/// Scores CSV: `occupation,accessibility,transferability,label`, empty cells
/// for undefined values.
void write_scores_csv(const std::filesystem::path& path,
                      const AccessTransferScores& scores,
                      const TaxonomyLabels* labels = nullptr);
TaxonomyLabels read_labels_csv(const std::filesystem::path& path);

/// Skill CSV: `occupation,skill,weight`; mapping CSV: `source,target`.
SkillMatrix read_skills_csv(const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> read_mapping_csv(
    const std::filesystem::path& path);

/// Per-occupation value CSV: `occupation,<name>`.
std::vector<std::pair<std::string, double>> read_value_csv(
    const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace laborflow::io
