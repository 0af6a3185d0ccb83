#pragma once

// Stage-wise pipeline: ingest -> reduce -> cluster -> net-isn -> net-ssn ->
// project -> metrics -> report. Every stage reads and writes files in one
// working directory; those files are the only contract between stages.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "influence/netbuild.hpp"

namespace influence::pipeline {

inline constexpr std::string_view kToolName = "influence-graph";
inline constexpr std::string_view kToolVersion = "1.0.0";

struct PipelineConfig {
    std::filesystem::path metadata;
    std::filesystem::path features;
    std::filesystem::path out;

    int min_year = 1500;
    int max_year = 2100;
    std::size_t min_works = 100;
    std::size_t pca_k = 100;
    std::size_t kmeans_k = 20;
    int kmeans_max_iter = 300;
    double kmeans_tol = 1e-6;
    std::size_t min_cluster_size = 3;
    double percentile = 90.0;
    std::uint64_t seed = 42;
    SsnMode ssn_mode = SsnMode::pairs;
    bool ssn_threshold = true;
    std::optional<int> d5_window;
    unsigned threads = 1;
};

/// Throws ValidationError when a parameter is outside its operation's domain.
void validate(const PipelineConfig& config);

/// Reads a JSON config file. Relative paths inside it are resolved against
/// the file's directory. A run manifest is accepted too (its "config" block
/// is used), so any finished run can be repeated from its manifest.
PipelineConfig load_config(const std::filesystem::path& path);

/// Config echo written to the manifest. Excludes `out` and `threads`, which
/// do not affect results.
nlohmann::json to_json(const PipelineConfig& config);

enum class Stage { ingest, reduce, cluster, net_isn, net_ssn, project, metrics, report };

std::string_view stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);
const std::vector<Stage>& all_stages();

/// A stage failure. `cause_is_validation` selects the CLI exit status.
class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& message, bool validation)
        : std::runtime_error("[" + std::string(stage_name(stage)) + "] " + message),
          stage_(stage),
          validation_(validation) {}

    Stage stage() const noexcept { return stage_; }
    bool cause_is_validation() const noexcept { return validation_; }

private:
    Stage stage_;
    bool validation_;
};

/// Runs one stage inside `dir`, then refreshes the manifest. Outputs are
/// only written once the stage has fully succeeded.
void run_stage(Stage stage, const PipelineConfig& config, const std::filesystem::path& dir);

/// Runs every stage in a scratch directory next to config.out and moves the
/// results into config.out on success. On failure nothing is left behind.
void run_pipeline(const PipelineConfig& config);

/// Every file a complete run produces, manifest included, sorted.
std::vector<std::string> expected_outputs();

std::string sha256_file(const std::filesystem::path& path);

}  // namespace influence::pipeline
