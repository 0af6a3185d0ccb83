#include "pipeline.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "influence/influence.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace influence::pipeline {

namespace {

// Stage files.
constexpr const char* kCorpusMetadata = "corpus_metadata.csv";
constexpr const char* kCorpusFeatures = "corpus_features.csv";
constexpr const char* kReduced = "reduced_features.csv";
constexpr const char* kPcaVariance = "pca_variance.csv";
constexpr const char* kClusters = "clusters.csv";
constexpr const char* kExemplars = "cluster_exemplars.csv";
constexpr const char* kManifest = "manifest.json";

// Graph slugs; file names are <slug>_edges.csv, <slug>.graphml, <slug>.dot.
constexpr std::array<const char*, 4> kGraphSlugs = {"isn", "ssn", "artist_isn", "artist_ssn"};
constexpr std::array<const char*, 2> kArtworkSlugs = {"isn", "ssn"};
constexpr std::array<const char*, 2> kDecadeMetrics = {"betweenness", "d5"};

std::string edges_file(std::string_view slug) { return std::string(slug) + "_edges.csv"; }
std::string metrics_file(std::string_view slug) { return "metrics_" + std::string(slug) + ".csv"; }

using Outputs = std::map<std::string, std::string>;

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path require(const fs::path& dir, const std::string& name, Stage producer) {
    const fs::path p = dir / name;
    if (!fs::exists(p))
        throw ValidationError("missing " + name + " in " + dir.string() + "; run the `" +
                              std::string(stage_name(producer)) + "` stage first");
    return p;
}

void stale(const std::string& what, Stage producer) {
    throw ValidationError(what + " is stale or inconsistent with the corpus; re-run the `" +
                          std::string(stage_name(producer)) + "` stage");
}

/// Writes every output through a temporary name, then renames. If any write
/// fails the temporaries are removed and nothing is renamed.
void commit(const fs::path& dir, const Outputs& outputs) {
    fs::create_directories(dir);
    std::vector<fs::path> temps;
    try {
        for (const auto& [name, content] : outputs) {
            const fs::path tmp = dir / (name + ".tmp");
            temps.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
        }
    } catch (...) {
        for (const auto& t : temps) fs::remove(t);
        throw;
    }
    for (const auto& [name, content] : outputs) fs::rename(dir / (name + ".tmp"), dir / name);
}

CorpusOptions corpus_options(const PipelineConfig& c) { return {c.min_year, c.max_year}; }

Corpus load_stage_corpus(const PipelineConfig& config, const fs::path& dir) {
    const auto meta = require(dir, kCorpusMetadata, Stage::ingest);
    const auto feats = require(dir, kCorpusFeatures, Stage::ingest);
    return load_corpus(meta.string(), feats.string(), corpus_options(config));
}

std::string format_matrix(const FeatureMatrix& m, std::string_view prefix) {
    std::ostringstream out;
    out << "artwork_id";
    for (std::size_t j = 0; j < m.dim(); ++j) out << ',' << prefix << j;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << csv::escape(m.row_ids[i]);
        for (double v : m.row(i)) out << ',' << csv::format_exact(v);
        out << '\n';
    }
    return out.str();
}

FeatureMatrix load_reduced(const fs::path& dir, const Corpus& corpus) {
    const auto path = require(dir, kReduced, Stage::reduce);
    std::ifstream in(path, std::ios::binary);
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row) || row.fields.size() < 2 || row.fields[0] != "artwork_id") stale(kReduced, Stage::reduce);
    const std::size_t k = row.fields.size() - 1;
    for (std::size_t j = 0; j < k; ++j)
        if (row.fields[j + 1] != "pc" + std::to_string(j)) stale(kReduced, Stage::reduce);
    FeatureMatrix m;
    m.rows.resize(static_cast<Eigen::Index>(corpus.size()), static_cast<Eigen::Index>(k));
    std::size_t i = 0;
    while (reader.next(row)) {
        if (i >= corpus.size() || row.fields.size() != k + 1 || row.fields[0] != corpus[i].artwork_id)
            stale(kReduced, Stage::reduce);
        for (std::size_t j = 0; j < k; ++j) {
            const auto v = csv::parse_real(row.fields[j + 1]);
            if (!v || !std::isfinite(*v)) stale(kReduced, Stage::reduce);
            m.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
        }
        m.row_ids.push_back(row.fields[0]);
        ++i;
    }
    if (i != corpus.size()) stale(kReduced, Stage::reduce);
    return m;
}

ClusterAssignment load_clusters(const fs::path& dir, const Corpus& corpus) {
    const auto path = require(dir, kClusters, Stage::cluster);
    std::ifstream in(path, std::ios::binary);
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row) || row.fields != std::vector<std::string>{"artwork_id", "cluster_label"})
        stale(kClusters, Stage::cluster);
    ClusterAssignment a;
    int max_label = -1;
    while (reader.next(row)) {
        const std::size_t i = a.labels.size();
        if (i >= corpus.size() || row.fields.size() != 2 || row.fields[0] != corpus[i].artwork_id)
            stale(kClusters, Stage::cluster);
        if (row.fields[1] == "other") {
            a.labels.push_back(kOtherCluster);
            continue;
        }
        const auto l = csv::parse_integer(row.fields[1]);
        if (!l || *l < 0) stale(kClusters, Stage::cluster);
        a.labels.push_back(static_cast<int>(*l));
        max_label = std::max(max_label, static_cast<int>(*l));
    }
    if (a.labels.size() != corpus.size()) stale(kClusters, Stage::cluster);
    a.centroids.resize(max_label + 1, 0);
    return a;
}

std::vector<Node> artist_nodes(const Corpus& corpus) {
    std::vector<Node> nodes;
    for (const auto& [artist, idx] : corpus.artist_index()) nodes.push_back({artist, NodeKind::artist, artist, std::nullopt});
    return nodes;
}

std::vector<Node> artwork_nodes(const Corpus& corpus) { return detail::artwork_nodes(corpus); }

InfluenceGraph load_graph(const fs::path& dir, const Corpus& corpus, std::string_view slug) {
    const bool artist = slug.rfind("artist_", 0) == 0;
    const Stage producer = artist ? Stage::project : (slug == "isn" ? Stage::net_isn : Stage::net_ssn);
    const std::string name = edges_file(slug);
    const auto path = require(dir, name, producer);
    std::ifstream in(path, std::ios::binary);
    const GraphKind kind = artist ? GraphKind::artist : (slug == "isn" ? GraphKind::isn : GraphKind::ssn);
    try {
        return read_edge_csv(in, kind, artist ? artist_nodes(corpus) : artwork_nodes(corpus), name);
    } catch (const ValidationError& e) {
        stale(name + " (" + e.what() + ")", producer);
    }
    return {};
}

void add_graph_outputs(Outputs& out, std::string_view slug, const InfluenceGraph& g) {
    std::ostringstream edges, graphml, dot;
    write_edge_csv(edges, g);
    write_graphml(graphml, g);
    write_dot(dot, g);
    out[edges_file(slug)] = edges.str();
    out[std::string(slug) + ".graphml"] = graphml.str();
    out[std::string(slug) + ".dot"] = dot.str();
}

std::string real_or_empty(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? csv::format_real(*v, kExportDigits) : std::string();
}

NetworkOptions network_options(const PipelineConfig& c) {
    NetworkOptions o;
    o.percentile = c.percentile;
    o.apply_threshold = c.ssn_threshold;
    o.ssn_mode = c.ssn_mode;
    o.threads = c.threads;
    return o;
}

// --- stages ----------------------------------------------------------------

Outputs stage_ingest(const PipelineConfig& config, const fs::path&) {
    if (!fs::exists(config.metadata)) throw ValidationError("metadata file not found: " + config.metadata.string());
    if (!fs::exists(config.features)) throw ValidationError("features file not found: " + config.features.string());
    const Corpus corpus = load_corpus(config.metadata.string(), config.features.string(), corpus_options(config));
    const Corpus kept = filter_by_min_works(corpus, config.min_works);
    if (kept.empty())
        throw ComputationError("no artist has at least " + std::to_string(config.min_works) +
                               " artworks; lower min_works");
    std::ostringstream meta, feats;
    write_corpus(kept, meta, feats);
    return {{kCorpusMetadata, meta.str()}, {kCorpusFeatures, feats.str()}};
}

Outputs stage_reduce(const PipelineConfig& config, const fs::path& dir) {
    const Corpus corpus = load_stage_corpus(config, dir);
    const FeatureMatrix raw = corpus.feature_matrix();
    const PcaModel model = fit_pca(raw, config.pca_k);
    const FeatureMatrix reduced = transform_pca(model, raw);

    std::ostringstream var;
    var << "component,explained_variance,explained_ratio\n";
    for (Eigen::Index i = 0; i < model.explained_variance.size(); ++i)
        var << i << ',' << csv::format_real(model.explained_variance(i), kExportDigits) << ','
            << csv::format_real(model.explained_variance(i) / model.total_variance, kExportDigits) << '\n';
    return {{kReduced, format_matrix(reduced, "pc")}, {kPcaVariance, var.str()}};
}

Outputs stage_cluster(const PipelineConfig& config, const fs::path& dir) {
    const Corpus corpus = load_stage_corpus(config, dir);
    const FeatureMatrix reduced = load_reduced(dir, corpus);
    KMeansOptions km;
    km.seed = config.seed;
    km.max_iter = config.kmeans_max_iter;
    km.tol = config.kmeans_tol;
    const auto assignment = consolidate_small(kmeans(reduced, config.kmeans_k, km), config.min_cluster_size);

    std::ostringstream labels, exemplars;
    labels << "artwork_id,cluster_label\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        labels << csv::escape(corpus[i].artwork_id) << ',';
        if (assignment.labels[i] == kOtherCluster) labels << "other";
        else labels << assignment.labels[i];
        labels << '\n';
    }
    exemplars << "cluster,rank,artwork_id\n";
    for (const auto& e : cluster_exemplars(reduced, assignment, 3))
        exemplars << e.cluster << ',' << e.rank << ',' << csv::escape(corpus[e.row].artwork_id) << '\n';
    return {{kClusters, labels.str()}, {kExemplars, exemplars.str()}};
}

Outputs stage_net_isn(const PipelineConfig& config, const fs::path& dir) {
    const Corpus corpus = load_stage_corpus(config, dir);
    const FeatureMatrix reduced = load_reduced(dir, corpus);
    Outputs out;
    add_graph_outputs(out, "isn", build_isn(corpus, reduced, network_options(config)));
    return out;
}

Outputs stage_net_ssn(const PipelineConfig& config, const fs::path& dir) {
    const Corpus corpus = load_stage_corpus(config, dir);
    const ClusterAssignment clusters = load_clusters(dir, corpus);
    const FeatureMatrix reduced = load_reduced(dir, corpus);
    Outputs out;
    add_graph_outputs(out, "ssn", build_ssn(corpus, reduced, clusters, network_options(config)));
    return out;
}

Outputs stage_project(const PipelineConfig& config, const fs::path& dir) {
    const Corpus corpus = load_stage_corpus(config, dir);
    Outputs out;
    for (const char* slug : kArtworkSlugs)
        add_graph_outputs(out, "artist_" + std::string(slug), project_to_artists(load_graph(dir, corpus, slug)));
    return out;
}

Outputs stage_metrics(const PipelineConfig& config, const fs::path& dir) {
    const Corpus corpus = load_stage_corpus(config, dir);
    MetricOptions opts;
    opts.d5_window = config.d5_window;
    opts.seed = config.seed;
    opts.threads = config.threads;
    Outputs out;
    for (const char* slug : kGraphSlugs) {
        const InfluenceGraph g = load_graph(dir, corpus, slug);
        std::ostringstream table;
        table << "node_id,betweenness,d5,c5,community\n";
        for (const auto& m : node_metrics(g, opts)) {
            table << csv::escape(m.node_id) << ',' << csv::format_real(m.betweenness, kExportDigits) << ','
                  << real_or_empty(m.d5) << ',' << m.c5 << ',';
            if (m.community) table << *m.community;
            table << '\n';
        }
        out[metrics_file(slug)] = table.str();
    }
    return out;
}

/// Per-node betweenness and d5 columns of an artwork metric table.
std::array<std::vector<std::optional<double>>, 2> load_metric_columns(const fs::path& dir, const Corpus& corpus,
                                                                     std::string_view slug) {
    const std::string name = metrics_file(slug);
    const auto path = require(dir, name, Stage::metrics);
    std::ifstream in(path, std::ios::binary);
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row) ||
        row.fields != std::vector<std::string>{"node_id", "betweenness", "d5", "c5", "community"})
        stale(name, Stage::metrics);
    std::array<std::vector<std::optional<double>>, 2> cols;
    while (reader.next(row)) {
        const std::size_t i = cols[0].size();
        if (i >= corpus.size() || row.fields.size() != 5 || row.fields[0] != corpus[i].artwork_id)
            stale(name, Stage::metrics);
        const auto bc = csv::parse_real(row.fields[1]);
        if (!bc) stale(name, Stage::metrics);
        cols[0].push_back(bc);
        if (row.fields[2].empty()) {
            cols[1].push_back(std::nullopt);
        } else {
            const auto d5 = csv::parse_real(row.fields[2]);
            if (!d5) stale(name, Stage::metrics);
            cols[1].push_back(d5);
        }
    }
    if (cols[0].size() != corpus.size()) stale(name, Stage::metrics);
    return cols;
}

Outputs stage_report(const PipelineConfig& config, const fs::path& dir) {
    const Corpus corpus = load_stage_corpus(config, dir);
    Outputs out;
    for (const char* slug : kArtworkSlugs) {
        const InfluenceGraph g = load_graph(dir, corpus, slug);
        const auto cols = load_metric_columns(dir, corpus, slug);
        for (std::size_t m = 0; m < kDecadeMetrics.size(); ++m) {
            const DecadeMetric metric = parse_decade_metric(kDecadeMetrics[m]);
            const auto bins = decadal_report(g, corpus, metric, cols[m]);
            std::ostringstream summary, values, hist;
            summary << "decade,count,mean,variance,undefined_count\n";
            values << "decade,value\n";
            hist << "decade,bin_lo,bin_hi,count\n";
            for (const auto& b : bins) {
                summary << b.decade_start << ',' << b.count << ','
                        << (b.count ? csv::format_real(b.mean, kExportDigits) : "") << ','
                        << (b.count ? csv::format_real(b.variance, kExportDigits) : "") << ',' << b.undefined_count
                        << '\n';
                for (double v : b.values) values << b.decade_start << ',' << csv::format_real(v, kExportDigits) << '\n';
                for (std::size_t h = 0; h < b.histogram.size(); ++h)
                    hist << b.decade_start << ',' << csv::format_real(b.bin_edges[h], kExportDigits) << ','
                         << csv::format_real(b.bin_edges[h + 1], kExportDigits) << ',' << b.histogram[h] << '\n';
            }
            const std::string base = "decades_" + std::string(slug) + "_" + kDecadeMetrics[m];
            out[base + ".csv"] = summary.str();
            out[base + "_values.csv"] = values.str();
            out[base + "_hist.csv"] = hist.str();
        }
        std::ostringstream diff;
        diff << "year_diff,count\n";
        for (const auto& [d, count] : year_difference_distribution(g)) diff << d << ',' << count << '\n';
        out["year_diff_" + std::string(slug) + ".csv"] = diff.str();
    }
    return out;
}

Outputs dispatch(Stage stage, const PipelineConfig& config, const fs::path& dir) {
    switch (stage) {
        case Stage::ingest: return stage_ingest(config, dir);
        case Stage::reduce: return stage_reduce(config, dir);
        case Stage::cluster: return stage_cluster(config, dir);
        case Stage::net_isn: return stage_net_isn(config, dir);
        case Stage::net_ssn: return stage_net_ssn(config, dir);
        case Stage::project: return stage_project(config, dir);
        case Stage::metrics: return stage_metrics(config, dir);
        case Stage::report: return stage_report(config, dir);
    }
    return {};
}

json file_entry(const fs::path& path) {
    json j;
    j["path"] = fs::absolute(path).lexically_normal().string();
    j["sha256"] = fs::exists(path) ? json(sha256_file(path)) : json(nullptr);
    return j;
}

void write_manifest(const PipelineConfig& config, const fs::path& dir) {
    json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION)}};
    m["config"] = to_json(config);
    m["inputs"] = {{"metadata", file_entry(config.metadata)}, {"features", file_entry(config.features)}};
    json outputs = json::object();
    for (const auto& name : expected_outputs())
        if (name != kManifest && fs::exists(dir / name)) outputs[name] = sha256_file(dir / name);
    m["outputs"] = outputs;
    commit(dir, {{kManifest, m.dump(2) + "\n"}});
}

fs::path normalized_out(const fs::path& out) {
    fs::path p = fs::absolute(out).lexically_normal();
    if (p.filename().empty()) p = p.parent_path();
    return p;
}

}  // namespace

// --- config ------------------------------------------------------------------

void validate(const PipelineConfig& c) {
    auto fail = [](const std::string& msg) { throw ValidationError("invalid configuration: " + msg); };
    if (c.metadata.empty()) fail("metadata path is required");
    if (c.features.empty()) fail("features path is required");
    if (c.min_year > c.max_year) fail("min_year must not exceed max_year");
    if (c.min_works < 1) fail("min_works must be >= 1");
    if (c.pca_k < 1) fail("pca_k must be >= 1");
    if (c.kmeans_k < 1) fail("kmeans_k must be >= 1");
    if (c.kmeans_max_iter < 1) fail("kmeans_max_iter must be >= 1");
    if (!(c.kmeans_tol > 0.0)) fail("kmeans_tol must be > 0");
    if (!(c.percentile > 0.0 && c.percentile < 100.0))
        fail("percentile must lie in (0, 100), got " + csv::format_real(c.percentile));
    if (c.d5_window && *c.d5_window < 1) fail("d5_window must be a positive number of years");
    if (c.threads < 1) fail("threads must be >= 1");
}

namespace {

template <class T>
T get_number(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ValidationError(std::string("config key '") + key + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(std::string("config key '") + key + "' must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_unsigned()) return v.get<T>();
            const auto s = v.get<long long>();
            if (s < 0) throw ValidationError(std::string("config key '") + key + "' must be non-negative");
            return static_cast<T>(s);
        }
    }
    return v.get<T>();
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (j.contains("config") && j.contains("tool")) j = j["config"];
    if (!j.is_object()) throw ValidationError("config '" + path.string() + "' must be a JSON object");

    static const std::set<std::string> known = {
        "metadata", "features", "out", "min_year", "max_year", "min_works", "pca_k", "kmeans_k",
        "kmeans_max_iter", "kmeans_tol", "min_cluster_size", "percentile", "seed", "ssn_mode", "ssn_threshold",
        "d5_window", "threads"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValidationError("config '" + path.string() + "': unknown key '" + key + "'");

    const fs::path base = fs::absolute(path).parent_path();
    auto resolve = [&](const char* key) {
        if (!j[key].is_string()) throw ValidationError(std::string("config key '") + key + "' must be a string");
        fs::path p = j[key].get<std::string>();
        return p.is_absolute() ? p : (base / p).lexically_normal();
    };

    PipelineConfig c;
    try {
        if (j.contains("metadata")) c.metadata = resolve("metadata");
        if (j.contains("features")) c.features = resolve("features");
        if (j.contains("out")) c.out = resolve("out");
        if (j.contains("min_year")) c.min_year = get_number<int>(j, "min_year");
        if (j.contains("max_year")) c.max_year = get_number<int>(j, "max_year");
        if (j.contains("min_works")) c.min_works = get_number<std::size_t>(j, "min_works");
        if (j.contains("pca_k")) c.pca_k = get_number<std::size_t>(j, "pca_k");
        if (j.contains("kmeans_k")) c.kmeans_k = get_number<std::size_t>(j, "kmeans_k");
        if (j.contains("kmeans_max_iter")) c.kmeans_max_iter = get_number<int>(j, "kmeans_max_iter");
        if (j.contains("kmeans_tol")) c.kmeans_tol = get_number<double>(j, "kmeans_tol");
        if (j.contains("min_cluster_size")) c.min_cluster_size = get_number<std::size_t>(j, "min_cluster_size");
        if (j.contains("percentile")) c.percentile = get_number<double>(j, "percentile");
        if (j.contains("seed")) c.seed = get_number<std::uint64_t>(j, "seed");
        if (j.contains("threads")) c.threads = get_number<unsigned>(j, "threads");
        if (j.contains("ssn_mode")) {
            const auto mode = j["ssn_mode"].get<std::string>();
            if (mode == "pairs") c.ssn_mode = SsnMode::pairs;
            else if (mode == "chain") c.ssn_mode = SsnMode::chain;
            else throw ValidationError("config key 'ssn_mode' must be \"pairs\" or \"chain\"");
        }
        if (j.contains("ssn_threshold")) c.ssn_threshold = j["ssn_threshold"].get<bool>();
        if (j.contains("d5_window") && !j["d5_window"].is_null()) c.d5_window = get_number<int>(j, "d5_window");
    } catch (const json::exception& e) {
        throw ValidationError("config '" + path.string() + "': " + e.what());
    }
    return c;
}

json to_json(const PipelineConfig& c) {
    json j;
    j["metadata"] = fs::absolute(c.metadata).lexically_normal().string();
    j["features"] = fs::absolute(c.features).lexically_normal().string();
    j["min_year"] = c.min_year;
    j["max_year"] = c.max_year;
    j["min_works"] = c.min_works;
    j["pca_k"] = c.pca_k;
    j["kmeans_k"] = c.kmeans_k;
    j["kmeans_max_iter"] = c.kmeans_max_iter;
    j["kmeans_tol"] = c.kmeans_tol;
    j["min_cluster_size"] = c.min_cluster_size;
    j["percentile"] = c.percentile;
    j["seed"] = c.seed;
    j["ssn_mode"] = c.ssn_mode == SsnMode::pairs ? "pairs" : "chain";
    j["ssn_threshold"] = c.ssn_threshold;
    j["d5_window"] = c.d5_window ? json(*c.d5_window) : json(nullptr);
    return j;
}

// --- stages ------------------------------------------------------------------

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::reduce: return "reduce";
        case Stage::cluster: return "cluster";
        case Stage::net_isn: return "net-isn";
        case Stage::net_ssn: return "net-ssn";
        case Stage::project: return "project";
        case Stage::metrics: return "metrics";
        case Stage::report: return "report";
    }
    return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
    if (name == "net-csn") return Stage::net_isn;
    if (name == "net-cbn") return Stage::net_ssn;
    for (Stage s : all_stages())
        if (stage_name(s) == name) return s;
    return std::nullopt;
}

const std::vector<Stage>& all_stages() {
    static const std::vector<Stage> stages = {Stage::ingest,  Stage::reduce,  Stage::cluster, Stage::net_isn,
                                              Stage::net_ssn, Stage::project, Stage::metrics, Stage::report};
    return stages;
}

std::vector<std::string> expected_outputs() {
    std::vector<std::string> files = {kCorpusMetadata, kCorpusFeatures, kReduced, kPcaVariance,
                                      kClusters,       kExemplars,      kManifest};
    for (const char* slug : kGraphSlugs) {
        files.push_back(edges_file(slug));
        files.push_back(std::string(slug) + ".graphml");
        files.push_back(std::string(slug) + ".dot");
        files.push_back(metrics_file(slug));
    }
    for (const char* slug : kArtworkSlugs) {
        for (const char* metric : kDecadeMetrics) {
            const std::string base = "decades_" + std::string(slug) + "_" + metric;
            files.push_back(base + ".csv");
            files.push_back(base + "_values.csv");
            files.push_back(base + "_hist.csv");
        }
        files.push_back("year_diff_" + std::string(slug) + ".csv");
    }
    std::sort(files.begin(), files.end());
    return files;
}

void run_stage(Stage stage, const PipelineConfig& config, const fs::path& dir) {
    try {
        validate(config);
        const Outputs outputs = dispatch(stage, config, dir);
        commit(dir, outputs);
        write_manifest(config, dir);
    } catch (const StageError&) {
        throw;
    } catch (const CorpusError&) {
        throw;
    } catch (const ValidationError& e) {
        throw StageError(stage, e.what(), true);
    } catch (const ComputationError& e) {
        throw StageError(stage, e.what(), false);
    } catch (const fs::filesystem_error& e) {
        throw StageError(stage, e.what(), true);
    } catch (const std::exception& e) {
        throw StageError(stage, e.what(), false);
    }
}

void run_pipeline(const PipelineConfig& config) {
    validate(config);
    if (config.out.empty()) throw ValidationError("invalid configuration: output directory is required");
    const fs::path out = normalized_out(config.out);
    const fs::path staging = out.parent_path() / ("." + out.filename().string() + ".partial");
    fs::remove_all(staging);
    fs::create_directories(staging);
    try {
        for (Stage s : all_stages()) run_stage(s, config, staging);
    } catch (...) {
        fs::remove_all(staging);
        throw;
    }
    fs::create_directories(out);
    for (const auto& entry : fs::directory_iterator(staging))
        fs::rename(entry.path(), out / entry.path().filename());
    fs::remove_all(staging);
}

std::string sha256_file(const fs::path& path) {
    const std::string data = read_text(path);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw ComputationError("sha256 failed for '" + path.string() + "'");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

}  // namespace influence::pipeline
