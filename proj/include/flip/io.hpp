#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "flip/bench.hpp"
#include "flip/metatrain.hpp"
#include "flip/problems.hpp"

namespace flip::io {

// --- JSON plumbing ----------------------------------------------------------

nlohmann::json load_json(const std::filesystem::path& path);

// Field accessors that report the JSON-pointer path of the offending field,
// so schema violations surface before any compute starts.
const nlohmann::json& require(const nlohmann::json& root, const std::string& ptr);
bool has(const nlohmann::json& root, const std::string& ptr);
double get_double(const nlohmann::json& root, const std::string& ptr);
double get_double_or(const nlohmann::json& root, const std::string& ptr, double fallback);
std::uint64_t get_u64(const nlohmann::json& root, const std::string& ptr);
std::uint64_t get_u64_or(const nlohmann::json& root, const std::string& ptr,
                         std::uint64_t fallback);
std::uint32_t get_u32(const nlohmann::json& root, const std::string& ptr);
std::uint32_t get_u32_or(const nlohmann::json& root, const std::string& ptr,
                         std::uint32_t fallback);
std::string get_string(const nlohmann::json& root, const std::string& ptr);
std::string get_string_or(const nlohmann::json& root, const std::string& ptr,
                          const std::string& fallback);
IntRange get_int_range(const nlohmann::json& root, const std::string& ptr);
RealRange get_real_range(const nlohmann::json& root, const std::string& ptr);

// --- problem specs and graphs ------------------------------------------------

nlohmann::json graph_to_json(const Graph& graph);
Graph graph_from_json(const nlohmann::json& j);

nlohmann::json spec_to_json(Family family, const ProblemSpec& spec);
ProblemSpec spec_from_json(Family family, const nlohmann::json& j);

// --- parsed CLI configs -------------------------------------------------------

struct TrainConfig {
    std::uint64_t seed = 0;
    Family family = Family::StatePrep;
    DistributionConfig dist;
    MetaConfig meta;
    std::vector<std::size_t> decoder_dims; // empty -> family default
    double divisor = kDefaultDivisor;
    std::string checkpoint_name = "checkpoint.json";
    std::string log_name = "train_log.jsonl";
    std::uint32_t checkpoint_every = 0; // epochs between snapshots; 0 = off
};

TrainConfig parse_train_config(const nlohmann::json& j);

// Manifest paths are resolved relative to base_dir.
Manifest parse_manifest(const nlohmann::json& j,
                        const std::filesystem::path& base_dir);

struct DiagnoseConfig {
    std::uint64_t seed = 0;
    Family family = Family::StatePrep;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sizes;
    std::uint32_t repeats = 250;
    InitKind init = InitKind::Random;
    std::filesystem::path checkpoint; // required for flip
};

DiagnoseConfig parse_diagnose_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir);

struct BaselineConfig {
    std::uint64_t seed = 0;
    DistributionConfig dist;
    std::uint32_t m = 0;
    TestConfig opt;
    std::string model_name = "heuristics.json";
};

BaselineConfig parse_baseline_config(const nlohmann::json& j);

struct PatternsConfig {
    std::filesystem::path checkpoint;
    IntRange depths{1, 12};
};

PatternsConfig parse_patterns_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir);

struct ExportConfig {
    std::filesystem::path input;
    std::filesystem::path output;
};

ExportConfig parse_export_config(const nlohmann::json& j,
                                 const std::filesystem::path& base_dir);

// --- results ------------------------------------------------------------------

void write_train_log(const std::filesystem::path& path,
                     const std::vector<TrainLogEntry>& log);

void write_trace_records(const std::filesystem::path& path,
                         const std::vector<TraceRecord>& records);
std::vector<TraceRecord> load_trace_records(const std::filesystem::path& path);

void write_aggregate_csv(const std::filesystem::path& path,
                         const std::vector<AggregateRow>& rows, Family family);
void write_variance_csv(const std::filesystem::path& path,
                        const VarianceReport& report);
void write_patterns_csv(const std::filesystem::path& path,
                        const PatternReport& report);

// Flattens a traces JSONL file into one long-format CSV row per iteration.
void export_traces_csv(const std::filesystem::path& input,
                       const std::filesystem::path& output);

// Shortest round-trip decimal representation used in all CSV output.
std::string format_double(double v);

} // namespace flip::io
