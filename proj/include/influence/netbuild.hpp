#pragma once

// Construction of the two artwork influence networks and their projection
// onto artists.
//
// ISN: every cross-artist pair with distinct years is a candidate; the
// candidate similarities define a nearest-rank percentile threshold and
// pairs at or above it become edges older -> newer weighted by similarity.
// SSN: the same rule restricted to pairs inside one surviving style
// cluster, with the threshold pooled over all clusters.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "influence/clustering.hpp"
#include "influence/corpus.hpp"
#include "influence/embedding.hpp"
#include "influence/error.hpp"
#include "influence/graph.hpp"

namespace influence {

enum class SsnMode {
    pairs,  ///< every ordered same-cluster pair
    chain,  ///< each work links only to the next year's works in its cluster
};

struct NetworkOptions {
    double percentile = 90.0;
    bool apply_threshold = true;  ///< SSN only; ISN always thresholds
    SsnMode ssn_mode = SsnMode::pairs;
    unsigned threads = 1;
};

namespace detail {

inline void check_alignment(const Corpus& corpus, const FeatureMatrix& features) {
    if (features.size() != corpus.size())
        throw ValidationError("feature matrix has " + std::to_string(features.size()) + " rows but the corpus has " +
                              std::to_string(corpus.size()) + " artworks");
    for (std::size_t i = 0; i < corpus.size(); ++i)
        if (features.row_ids[i] != corpus[i].artwork_id)
            throw ValidationError("feature row " + std::to_string(i) + " is '" + features.row_ids[i] +
                                  "' but the corpus expects '" + corpus[i].artwork_id + "'");
    if (features.size() > 0 && !features.rows.allFinite())
        throw ValidationError("feature matrix contains non-finite values");
}

inline std::vector<double> row_norms(const Corpus& corpus, const FeatureMatrix& features) {
    std::vector<double> norms(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        norms[i] = norm(features.row(i));
        if (norms[i] == 0.0)
            throw ComputationError("artwork '" + corpus[i].artwork_id +
                                   "' has a zero-norm feature vector; cosine similarity is undefined");
    }
    return norms;
}

inline std::vector<Node> artwork_nodes(const Corpus& corpus) {
    std::vector<Node> nodes;
    nodes.reserve(corpus.size());
    for (const auto& r : corpus.records()) nodes.push_back({r.artwork_id, NodeKind::artwork, r.artist_id, r.year});
    return nodes;
}

/// Runs `fn(lo, hi, slot)` over contiguous blocks of [0, n) on up to
/// `threads` threads. Each block writes only to its own slot.
template <class Fn>
void parallel_blocks(std::size_t n, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (workers == 1) {
        fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    // Row i has n-1-i partners; balance blocks by pair count, not row count.
    std::vector<std::size_t> bounds{0};
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n && bounds.size() < workers; ++i) {
        acc += static_cast<double>(n - 1 - i);
        if (acc >= total * static_cast<double>(bounds.size()) / static_cast<double>(workers)) bounds.push_back(i + 1);
    }
    bounds.push_back(n);
    std::vector<std::thread> pool;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) pool.emplace_back(fn, bounds[b], bounds[b + 1], b);
    for (auto& t : pool) t.join();
}

/// Candidate pairs (i < j in corpus order) are those accepted by `admit`.
/// Applies the percentile threshold over the candidate similarities when
/// `threshold` is set.
template <class Admit>
InfluenceGraph threshold_network(GraphKind kind, const Corpus& corpus, const FeatureMatrix& features, Admit&& admit,
                                 double percentile, bool threshold, unsigned threads) {
    const auto norms = row_norms(corpus, features);
    const std::size_t n = corpus.size();
    const std::size_t slots = std::max(1u, threads);

    auto similarity = [&](std::size_t i, std::size_t j) {
        return cosine_similarity(features.row(i), features.row(j), norms[i], norms[j]);
    };

    double cutoff = -2.0;
    if (threshold) {
        std::vector<std::vector<double>> parts(slots);
        parallel_blocks(n, threads, [&](std::size_t lo, std::size_t hi, std::size_t slot) {
            auto& out = parts[slot];
            for (std::size_t i = lo; i < hi; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (admit(i, j)) out.push_back(similarity(i, j));
        });
        std::vector<double> population;
        std::size_t total = 0;
        for (const auto& p : parts) total += p.size();
        population.reserve(total);
        for (auto& p : parts) {
            population.insert(population.end(), p.begin(), p.end());
            std::vector<double>().swap(p);
        }
        if (population.empty()) return InfluenceGraph(kind, artwork_nodes(corpus), {});
        cutoff = select_percentile(population, percentile);
    }

    std::vector<std::vector<Edge>> parts(slots);
    parallel_blocks(n, threads, [&](std::size_t lo, std::size_t hi, std::size_t slot) {
        auto& out = parts[slot];
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!admit(i, j)) continue;
                const double s = similarity(i, j);
                // Weights must be positive, so non-positive similarities never form edges.
                if (s >= cutoff && s > 0.0) out.push_back({i, j, s});
            }
    });
    std::vector<Edge> edges;
    for (auto& p : parts) edges.insert(edges.end(), p.begin(), p.end());
    return InfluenceGraph(kind, artwork_nodes(corpus), std::move(edges));
}

inline void check_percentile(double p) {
    if (!(p > 0.0 && p < 100.0))
        throw ValidationError("percentile must lie in (0, 100), got " + std::to_string(p));
}

inline void check_artists(const Corpus& corpus) {
    if (corpus.artist_count() < 2)
        throw ComputationError("influence networks need at least 2 artists, corpus has " +
                               std::to_string(corpus.size()));
}

}  // namespace detail

/// Image-similarity network over all cross-artist, distinct-year pairs.
inline InfluenceGraph build_isn(const Corpus& corpus, const FeatureMatrix& features,
                                const NetworkOptions& options = {}) {
    detail::check_percentile(options.percentile);
    detail::check_alignment(corpus, features);
    detail::check_artists(corpus);
    const auto& recs = corpus.records();
    auto admit = [&](std::size_t i, std::size_t j) {
        return recs[i].year != recs[j].year && recs[i].artist_id != recs[j].artist_id;
    };
    return detail::threshold_network(GraphKind::isn, corpus, features, admit, options.percentile, true,
                                     options.threads);
}

/// Style network: candidates restricted to pairs inside one surviving
/// cluster. OTHER artworks never take part.
inline InfluenceGraph build_ssn(const Corpus& corpus, const FeatureMatrix& features,
                                const ClusterAssignment& assignment, const NetworkOptions& options = {}) {
    detail::check_percentile(options.percentile);
    detail::check_alignment(corpus, features);
    detail::check_artists(corpus);
    if (assignment.labels.size() != corpus.size())
        throw ValidationError("cluster assignment covers " + std::to_string(assignment.labels.size()) +
                              " artworks but the corpus has " + std::to_string(corpus.size()));
    const auto& recs = corpus.records();
    const auto& labels = assignment.labels;
    auto base = [&](std::size_t i, std::size_t j) {
        return labels[i] != kOtherCluster && labels[i] == labels[j] && recs[i].year != recs[j].year &&
               recs[i].artist_id != recs[j].artist_id;
    };

    if (options.ssn_mode == SsnMode::pairs)
        return detail::threshold_network(GraphKind::ssn, corpus, features, base, options.percentile,
                                         options.apply_threshold, options.threads);

    // Chain mode: each work links to the works of the earliest later year,
    // by a different artist, within its cluster.
    std::set<std::pair<std::size_t, std::size_t>> chain;
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        if (labels[i] != kOtherCluster) members[labels[i]].push_back(i);
    for (const auto& [label, idx] : members) {
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const std::size_t u = idx[a];
            int next_year = 0;
            bool found = false;
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                const std::size_t v = idx[b];
                if (!base(u, v)) continue;
                if (found && recs[v].year != next_year) break;
                found = true;
                next_year = recs[v].year;
                chain.emplace(u, v);
            }
        }
    }
    auto admit = [&](std::size_t i, std::size_t j) { return chain.count({i, j}) > 0; };
    return detail::threshold_network(GraphKind::ssn, corpus, features, admit, options.percentile,
                                     options.apply_threshold, options.threads);
}

/// Collapses an artwork graph onto artists: the weight of A -> B is the sum
/// of the weights of all artwork edges from A's works to B's works.
inline InfluenceGraph project_to_artists(const InfluenceGraph& g) {
    if (!g.is_artwork_graph()) throw ValidationError("project_to_artists expects an ISN or SSN graph");
    std::map<std::string, std::size_t> artist_ids;
    for (const auto& nd : g.nodes()) artist_ids.emplace(nd.artist_id, 0);
    std::vector<Node> nodes;
    nodes.reserve(artist_ids.size());
    for (auto& [id, idx] : artist_ids) {
        idx = nodes.size();
        nodes.push_back({id, NodeKind::artist, id, std::nullopt});
    }
    std::map<std::pair<std::size_t, std::size_t>, double> sums;
    for (const auto& e : g.edges()) {
        const std::size_t a = artist_ids.at(g.node(e.src).artist_id);
        const std::size_t b = artist_ids.at(g.node(e.dst).artist_id);
        sums[{a, b}] += e.weight;
    }
    std::vector<Edge> edges;
    edges.reserve(sums.size());
    for (const auto& [key, w] : sums) edges.push_back({key.first, key.second, w});
    return InfluenceGraph(GraphKind::artist, std::move(nodes), std::move(edges));
}

}  // namespace influence
