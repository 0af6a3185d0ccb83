// influence-graph: command line front end for the influence network pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "influence/error.hpp"
#include "pipeline.hpp"

namespace fs = std::filesystem;
using namespace influence;
using namespace influence::pipeline;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

/// Flag values; unset flags leave the config file (or defaults) alone.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> metadata;
    std::optional<std::string> features;
    std::optional<std::string> out;
    std::optional<double> percentile;
    std::optional<std::size_t> kmeans_k;
    std::optional<std::size_t> pca_k;
    std::optional<std::size_t> min_cluster_size;
    std::optional<std::size_t> min_works;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> ssn_mode;
    bool ssn_no_threshold = false;
    std::optional<int> d5_window;
    std::optional<unsigned> threads;
};

void add_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON config file (a previous run's manifest.json also works)");
    cmd->add_option("--metadata", o.metadata, "metadata CSV: artwork_id,artist_id,year");
    cmd->add_option("--features", o.features, "features CSV: artwork_id,f0,...,f{d-1}");
    cmd->add_option("--out", o.out, "output / working directory");
    cmd->add_option("--percentile", o.percentile, "similarity percentile threshold (default 90)");
    cmd->add_option("--kmeans-k", o.kmeans_k, "number of k-means clusters (default 20)");
    cmd->add_option("--pca-k", o.pca_k, "PCA output dimension (default 100)");
    cmd->add_option("--min-cluster-size", o.min_cluster_size,
                    "clusters with at most this many works become OTHER (default 3)");
    cmd->add_option("--min-works", o.min_works, "keep artists with at least this many works (default 100)");
    cmd->add_option("--seed", o.seed, "random seed (default 42)");
    cmd->add_option("--ssn-mode", o.ssn_mode, "pairs | chain")->check(CLI::IsMember({"pairs", "chain"}));
    cmd->add_flag("--ssn-no-threshold", o.ssn_no_threshold, "keep every same-cluster SSN pair");
    cmd->add_option("--d5-window", o.d5_window, "restrict D5 successor sets to this many years");
    cmd->add_option("--threads", o.threads, "worker threads (outputs do not depend on this)");
}

PipelineConfig resolve(const Overrides& o) {
    PipelineConfig c = o.config ? load_config(*o.config) : PipelineConfig{};
    if (o.metadata) c.metadata = *o.metadata;
    if (o.features) c.features = *o.features;
    if (o.out) c.out = *o.out;
    if (o.percentile) c.percentile = *o.percentile;
    if (o.kmeans_k) c.kmeans_k = *o.kmeans_k;
    if (o.pca_k) c.pca_k = *o.pca_k;
    if (o.min_cluster_size) c.min_cluster_size = *o.min_cluster_size;
    if (o.min_works) c.min_works = *o.min_works;
    if (o.seed) c.seed = *o.seed;
    if (o.ssn_mode) c.ssn_mode = *o.ssn_mode == "chain" ? SsnMode::chain : SsnMode::pairs;
    if (o.ssn_no_threshold) c.ssn_threshold = false;
    if (o.d5_window) c.d5_window = *o.d5_window;
    if (o.threads) c.threads = *o.threads;
    if (c.out.empty()) throw ValidationError("invalid configuration: --out is required");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Builds artwork influence networks and computes influence metrics."};
    app.require_subcommand(1);
    Overrides o;

    CLI::App* run = app.add_subcommand("run", "run every stage in order");
    add_options(run, o);
    std::vector<std::pair<CLI::App*, Stage>> stages;
    for (Stage s : all_stages()) {
        CLI::App* cmd = app.add_subcommand(std::string(stage_name(s)), "run the " + std::string(stage_name(s)) + " stage");
        if (s == Stage::net_isn) cmd->alias("net-csn");
        if (s == Stage::net_ssn) cmd->alias("net-cbn");
        add_options(cmd, o);
        stages.emplace_back(cmd, s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        const PipelineConfig config = resolve(o);
        if (run->parsed()) {
            run_pipeline(config);
        } else {
            for (const auto& [cmd, stage] : stages)
                if (cmd->parsed()) run_stage(stage, config, config.out);
        }
        return EXIT_SUCCESS;
    } catch (const CorpusError& e) {
        for (const auto& issue : e.issues()) std::cerr << "ERROR " << issue.row << ": " << issue.message << '\n';
        return kExitValidation;
    } catch (const StageError& e) {
        std::cerr << "error " << e.what() << '\n';
        return e.cause_is_validation() ? kExitValidation : kExitComputation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ComputationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    }
}
