#pragma once

// Influence metrics on an InfluenceGraph: betweenness centrality, the
// disruption index with its influence count, modularity communities and
// decade-level aggregation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "influence/corpus.hpp"
#include "influence/error.hpp"
#include "influence/graph.hpp"

namespace influence {

// ---------------------------------------------------------------------------
// Betweenness

namespace detail {

/// Brandes accumulation from every source in [lo, hi) into `acc`.
inline void brandes_sources(const InfluenceGraph& g, std::size_t lo, std::size_t hi, std::vector<double>& acc) {
    const std::size_t n = g.node_count();
    std::vector<double> sigma(n), delta(n);
    std::vector<long long> dist(n);
    std::vector<std::size_t> order;
    std::vector<std::size_t> queue;
    order.reserve(n);
    queue.reserve(n);
    for (std::size_t s = lo; s < hi; ++s) {
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        std::fill(dist.begin(), dist.end(), -1);
        order.clear();
        queue.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t v = queue[head];
            order.push_back(v);
            for (std::size_t w : g.successors(v)) {
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
            }
        }
        for (std::size_t k = order.size(); k-- > 0;) {
            const std::size_t w = order[k];
            for (std::size_t v : g.predecessors(w))
                if (dist[v] >= 0 && dist[v] + 1 == dist[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) acc[w] += delta[w];
        }
    }
}

}  // namespace detail

/// Unnormalised directed betweenness over unweighted shortest paths,
/// C_B(v) = sum over s != v != t of sigma_st(v) / sigma_st.
///
/// Sources are processed in a fixed set of blocks whose partial sums are
/// combined in block order, so the result does not depend on `threads`.
inline std::vector<double> betweenness(const InfluenceGraph& g, unsigned threads = 1) {
    const std::size_t n = g.node_count();
    constexpr std::size_t kBlocks = 64;
    const std::size_t blocks = std::max<std::size_t>(1, std::min(kBlocks, n));
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
    auto run = [&](std::size_t first_block, std::size_t stride) {
        for (std::size_t b = first_block; b < blocks; b += stride)
            detail::brandes_sources(g, b * n / blocks, (b + 1) * n / blocks, partial[b]);
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, blocks));
    if (workers == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run, t, workers);
        for (auto& t : pool) t.join();
    }
    std::vector<double> out(n, 0.0);
    for (const auto& p : partial)
        for (std::size_t v = 0; v < n; ++v) out[v] += p[v];
    return out;
}

// ---------------------------------------------------------------------------
// Disruption

struct Disruption {
    std::optional<double> d5;  ///< empty when N1 + N4 + N2 == 0
    std::size_t c5 = 0;
    std::size_t n1 = 0;  ///< successors not influenced by any of the focal node's influencers
    std::size_t n4 = 0;  ///< successors also influenced by an influencer
    std::size_t n2 = 0;  ///< nodes influenced by the influencers but not by the focal node

    bool operator==(const Disruption&) const = default;
};

/// Reusable scratch space for disruption queries over one graph.
class DisruptionCalculator {
public:
    explicit DisruptionCalculator(const InfluenceGraph& g) : g_(g), mark_(g.node_count(), 0) {}

    /// Successor sets are limited to nodes with year <= year(focal) + window
    /// when a window is given; artwork graphs only.
    Disruption operator()(std::size_t focal, std::optional<int> window = std::nullopt) {
        if (focal >= g_.node_count()) throw ValidationError("disruption: node index out of range");
        if (window && !g_.is_artwork_graph())
            throw ValidationError("disruption: a year window needs an artwork graph (artist nodes have no year)");
        if (window && *window < 0) throw ValidationError("disruption: window must be non-negative");

        std::optional<long long> horizon;
        if (window) horizon = static_cast<long long>(*g_.node(focal).year) + *window;
        auto in_window = [&](std::size_t w) {
            return !horizon || static_cast<long long>(*g_.node(w).year) <= *horizon;
        };

        // Stamp successors of the influencers (P*), then walk the focal
        // node's own successors.
        if (++stamp_ == 0) {
            std::fill(mark_.begin(), mark_.end(), 0);
            stamp_ = 1;
        }
        std::size_t p_star = 0;
        for (std::size_t p : g_.predecessors(focal))
            for (std::size_t w : g_.successors(p)) {
                if (w == focal || !in_window(w) || mark_[w] == stamp_) continue;
                mark_[w] = stamp_;
                ++p_star;
            }

        Disruption d;
        for (std::size_t w : g_.successors(focal)) {
            if (!in_window(w)) continue;
            if (mark_[w] == stamp_) ++d.n4;
            else ++d.n1;
        }
        d.n2 = p_star - d.n4;
        d.c5 = d.n1 + d.n4;
        const std::size_t denom = d.n1 + d.n4 + d.n2;
        if (denom > 0)
            d.d5 = (static_cast<double>(d.n1) - static_cast<double>(d.n4)) / static_cast<double>(denom);
        return d;
    }

private:
    const InfluenceGraph& g_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
};

inline Disruption disruption(const InfluenceGraph& g, std::size_t focal) {
    DisruptionCalculator calc(g);
    return calc(focal);
}

inline Disruption disruption(const InfluenceGraph& g, std::string_view focal_id) {
    return disruption(g, g.require(focal_id));
}

inline Disruption disruption_windowed(const InfluenceGraph& g, std::size_t focal, std::optional<int> window_years) {
    DisruptionCalculator calc(g);
    return calc(focal, window_years);
}

inline Disruption disruption_windowed(const InfluenceGraph& g, std::string_view focal_id,
                                      std::optional<int> window_years) {
    return disruption_windowed(g, g.require(focal_id), window_years);
}

inline std::vector<Disruption> disruption_all(const InfluenceGraph& g, std::optional<int> window_years = std::nullopt) {
    DisruptionCalculator calc(g);
    std::vector<Disruption> out;
    out.reserve(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) out.push_back(calc(v, window_years));
    return out;
}

// ---------------------------------------------------------------------------
// Communities

namespace detail {

/// Undirected weighted graph used by the modularity optimiser. `self` holds
/// A_ii (sum over ordered pairs inside an aggregated node).
struct UndirectedGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;
    std::vector<double> self;
    std::vector<double> degree;
    double two_m = 0.0;

    std::size_t size() const noexcept { return adj.size(); }

    void finish() {
        degree.assign(size(), 0.0);
        two_m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            degree[i] = self[i];
            for (const auto& [j, w] : adj[i]) degree[i] += w;
            two_m += degree[i];
        }
    }
};

/// Symmetrised adjacency; nodes renumbered into `order`.
inline UndirectedGraph undirected_view(const InfluenceGraph& g, const std::vector<std::size_t>& order) {
    std::vector<std::size_t> pos(g.node_count());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    std::vector<std::map<std::size_t, double>> acc(g.node_count());
    for (const auto& e : g.edges()) {
        acc[pos[e.src]][pos[e.dst]] += e.weight;
        acc[pos[e.dst]][pos[e.src]] += e.weight;
    }
    UndirectedGraph u;
    u.adj.resize(g.node_count());
    u.self.assign(g.node_count(), 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i)
        for (const auto& [j, w] : acc[i]) u.adj[i].emplace_back(j, w);
    u.finish();
    return u;
}

/// One level of local moving. Returns true when any node changed community.
inline bool local_moving(const UndirectedGraph& g, std::vector<std::size_t>& community, std::mt19937_64& rng) {
    const std::size_t n = g.size();
    std::vector<double> tot(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) tot[community[i]] += g.degree[i];

    const double eps = 1e-12 * std::max(1.0, g.two_m);
    std::vector<double> link(n, 0.0);
    std::vector<std::size_t> touched;
    bool any = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t own = community[i];
            const double ki = g.degree[i];
            touched.clear();
            for (const auto& [j, w] : g.adj[i]) {
                const std::size_t c = community[j];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += w;
            }
            tot[own] -= ki;
            auto score = [&](std::size_t c) { return link[c] - ki * tot[c] / g.two_m; };

            const double own_score = score(own);
            double best_score = own_score;
            std::vector<std::size_t> best;
            std::sort(touched.begin(), touched.end());
            for (std::size_t c : touched) {
                if (c == own) continue;
                const double s = score(c);
                if (s > best_score + eps) {
                    best_score = s;
                    best.assign(1, c);
                } else if (!best.empty() && std::abs(s - best_score) <= eps) {
                    best.push_back(c);
                }
            }
            std::size_t target = own;
            if (!best.empty()) target = best.size() == 1 ? best.front() : best[rng() % best.size()];
            tot[target] += ki;
            for (std::size_t c : touched) link[c] = 0.0;
            if (target != own) {
                community[i] = target;
                moved = true;
                any = true;
            }
        }
    }
    return any;
}

/// Renumbers labels densely by first occurrence.
inline std::size_t renumber(std::vector<std::size_t>& labels) {
    std::unordered_map<std::size_t, std::size_t> remap;
    for (auto& l : labels) {
        const auto [it, inserted] = remap.emplace(l, remap.size());
        l = it->second;
    }
    return remap.size();
}

inline UndirectedGraph aggregate(const UndirectedGraph& g, const std::vector<std::size_t>& community, std::size_t k) {
    std::vector<std::map<std::size_t, double>> acc(k);
    UndirectedGraph out;
    out.self.assign(k, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t ci = community[i];
        out.self[ci] += g.self[i];
        for (const auto& [j, w] : g.adj[i]) {
            const std::size_t cj = community[j];
            if (ci == cj) out.self[ci] += w;
            else acc[ci][cj] += w;
        }
    }
    out.adj.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        for (const auto& [d, w] : acc[c]) out.adj[c].emplace_back(d, w);
    out.finish();
    return out;
}

inline std::vector<std::size_t> ascending_id_order(const InfluenceGraph& g) {
    std::vector<std::size_t> order(g.node_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g.node(a).id < g.node(b).id; });
    return order;
}

}  // namespace detail

/// Newman modularity of a partition, treating edges as undirected and
/// weights as strengths.
inline double modularity(const InfluenceGraph& g, std::span<const int> labels) {
    if (labels.size() != g.node_count()) throw ValidationError("modularity: one label per node required");
    std::vector<std::size_t> identity(g.node_count());
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    const auto u = detail::undirected_view(g, identity);
    if (u.two_m == 0.0) return 0.0;
    std::map<int, double> tot;
    double internal = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        tot[labels[i]] += u.degree[i];
        for (const auto& [j, w] : u.adj[i])
            if (labels[i] == labels[j]) internal += w;
    }
    double q = internal / u.two_m;
    for (const auto& [c, t] : tot) q -= (t / u.two_m) * (t / u.two_m);
    return q;
}

/// Louvain-style modularity maximisation: local moving in ascending node_id
/// order, then aggregation, repeated until no node moves. Edge direction is
/// ignored. `seed` breaks exact ties between candidate communities.
///
/// Labels are numbered densely by first appearance in ascending node_id order.
inline std::vector<int> communities(const InfluenceGraph& g, std::uint64_t seed = 42) {
    const std::size_t n = g.node_count();
    if (n == 0) return {};
    const auto order = detail::ascending_id_order(g);
    auto level = detail::undirected_view(g, order);

    // membership[i] = community of order[i] in the current level's numbering.
    std::vector<std::size_t> membership(n);
    std::iota(membership.begin(), membership.end(), std::size_t{0});
    if (level.two_m > 0.0) {
        std::mt19937_64 rng(seed);
        while (true) {
            std::vector<std::size_t> community(level.size());
            std::iota(community.begin(), community.end(), std::size_t{0});
            if (!detail::local_moving(level, community, rng)) break;
            const std::size_t k = detail::renumber(community);
            for (auto& m : membership) m = community[m];
            if (k == level.size()) break;
            level = detail::aggregate(level, community, k);
        }
    }
    detail::renumber(membership);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[order[i]] = static_cast<int>(membership[i]);
    return labels;
}

// ---------------------------------------------------------------------------
// Per-node table

struct NodeMetric {
    std::string node_id;
    double betweenness = 0.0;
    std::optional<double> d5;
    std::size_t c5 = 0;
    std::optional<int> community;
};

struct MetricOptions {
    std::optional<int> d5_window;  ///< ignored for artist graphs
    std::uint64_t seed = 42;
    unsigned threads = 1;
};

inline std::vector<NodeMetric> node_metrics(const InfluenceGraph& g, const MetricOptions& options = {}) {
    const auto bc = betweenness(g, options.threads);
    const auto dis = disruption_all(g, g.is_artwork_graph() ? options.d5_window : std::nullopt);
    const auto comm = communities(g, options.seed);
    std::vector<NodeMetric> out(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        out[v].node_id = g.node(v).id;
        out[v].betweenness = bc[v];
        out[v].d5 = dis[v].d5;
        out[v].c5 = dis[v].c5;
        out[v].community = comm[v];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Decade aggregation

enum class DecadeMetric { betweenness, d5 };

inline DecadeMetric parse_decade_metric(std::string_view name) {
    if (name == "betweenness") return DecadeMetric::betweenness;
    if (name == "d5") return DecadeMetric::d5;
    throw ValidationError("unknown metric '" + std::string(name) + "' (expected betweenness or d5)");
}

inline std::string_view to_string(DecadeMetric m) { return m == DecadeMetric::betweenness ? "betweenness" : "d5"; }

struct DecadeBin {
    int decade_start = 0;
    std::vector<double> values;  ///< defined values, in node order
    std::size_t count = 0;
    std::size_t undefined_count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();      ///< NaN when count == 0
    double variance = std::numeric_limits<double>::quiet_NaN();  ///< population variance; NaN when count == 0
    std::vector<double> bin_edges;                                ///< shared by every bin of a report
    std::vector<std::size_t> histogram;                           ///< bin_edges.size() - 1 counts
};

inline int decade_of(int year) {
    return static_cast<int>(std::floor(static_cast<double>(year) / 10.0)) * 10;
}

/// Index of the histogram bin holding `v`; the last bin is closed.
inline std::size_t histogram_bin(const std::vector<double>& edges, double v) {
    const std::size_t bins = edges.size() - 1;
    if (v <= edges.front()) return 0;
    if (v >= edges.back()) return bins - 1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return std::min<std::size_t>(bins - 1, static_cast<std::size_t>(it - edges.begin()) - 1);
}

/// Bins per-node values by decade over [first_year, last_year]; empty decades
/// inside the span are emitted. Missing values are counted, not binned.
inline std::vector<DecadeBin> bin_by_decade(std::span<const int> years, std::span<const std::optional<double>> values,
                                            int first_year, int last_year, std::vector<double> bin_edges) {
    if (years.size() != values.size()) throw ValidationError("bin_by_decade: years and values differ in length");
    std::vector<DecadeBin> bins;
    if (first_year > last_year) return bins;
    const int lo = decade_of(first_year);
    const int hi = decade_of(last_year);
    for (int d = lo; d <= hi; d += 10) {
        DecadeBin b;
        b.decade_start = d;
        b.bin_edges = bin_edges;
        b.histogram.assign(bin_edges.size() - 1, 0);
        bins.push_back(std::move(b));
    }
    for (std::size_t i = 0; i < years.size(); ++i) {
        const int d = decade_of(years[i]);
        if (d < lo || d > hi) throw ValidationError("bin_by_decade: year " + std::to_string(years[i]) + " outside span");
        DecadeBin& b = bins[static_cast<std::size_t>((d - lo) / 10)];
        if (!values[i]) {
            ++b.undefined_count;
            continue;
        }
        b.values.push_back(*values[i]);
        ++b.histogram[histogram_bin(bin_edges, *values[i])];
    }
    for (auto& b : bins) {
        b.count = b.values.size();
        if (b.count == 0) continue;
        double sum = 0.0;
        for (double v : b.values) sum += v;
        b.mean = sum / static_cast<double>(b.count);
        double ss = 0.0;
        for (double v : b.values) ss += (v - b.mean) * (v - b.mean);
        b.variance = ss / static_cast<double>(b.count);
    }
    return bins;
}

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    return edges;
}

inline constexpr std::size_t kHistogramBins = 20;

/// Histogram edges: [-1, 1] for D5, [0, max] for betweenness.
inline std::vector<double> default_edges(DecadeMetric metric, std::span<const std::optional<double>> values) {
    if (metric == DecadeMetric::d5) return uniform_edges(-1.0, 1.0, kHistogramBins);
    double hi = 0.0;
    for (const auto& v : values)
        if (v) hi = std::max(hi, *v);
    return uniform_edges(0.0, hi > 0.0 ? hi : 1.0, kHistogramBins);
}

/// Decade bins of an already computed per-node metric on an artwork graph.
inline std::vector<DecadeBin> decadal_report(const InfluenceGraph& g, const Corpus& corpus, DecadeMetric metric,
                                             std::span<const std::optional<double>> values) {
    if (!g.is_artwork_graph()) throw ValidationError("decadal_report needs an artwork graph");
    if (values.size() != g.node_count()) throw ValidationError("decadal_report: one value per node required");
    std::vector<int> years;
    years.reserve(g.node_count());
    int first = std::numeric_limits<int>::max();
    int last = std::numeric_limits<int>::min();
    for (const auto& r : corpus.records()) {
        first = std::min(first, r.year);
        last = std::max(last, r.year);
    }
    for (const auto& nd : g.nodes()) {
        years.push_back(*nd.year);
        first = std::min(first, *nd.year);
        last = std::max(last, *nd.year);
    }
    return bin_by_decade(years, values, first, last, default_edges(metric, values));
}

/// Computes the metric on `g` and bins it by decade. UNDEFINED D5 values are
/// excluded from the statistics and counted per decade.
inline std::vector<DecadeBin> decadal_report(const InfluenceGraph& g, const Corpus& corpus, std::string_view metric,
                                             const MetricOptions& options = {}) {
    const DecadeMetric m = parse_decade_metric(metric);
    if (!g.is_artwork_graph()) throw ValidationError("decadal_report needs an artwork graph");
    std::vector<std::optional<double>> values(g.node_count());
    if (m == DecadeMetric::betweenness) {
        const auto bc = betweenness(g, options.threads);
        for (std::size_t v = 0; v < bc.size(); ++v) values[v] = bc[v];
    } else {
        const auto dis = disruption_all(g, options.d5_window);
        for (std::size_t v = 0; v < dis.size(); ++v) values[v] = dis[v].d5;
    }
    return decadal_report(g, corpus, m, values);
}

/// Histogram with 1-year bins of year(dst) - year(src) over all edges.
inline std::map<int, std::size_t> year_difference_distribution(const InfluenceGraph& g) {
    if (!g.is_artwork_graph()) throw ValidationError("year_difference_distribution needs an artwork graph");
    std::map<int, std::size_t> hist;
    for (const auto& e : g.edges()) ++hist[*g.node(e.dst).year - *g.node(e.src).year];
    return hist;
}

}  // namespace influence
