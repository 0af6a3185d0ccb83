#pragma once

// Artwork data model and the metadata/features CSV loader.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "influence/csv.hpp"
#include "influence/error.hpp"
#include "influence/feature_matrix.hpp"

namespace influence {

struct ArtworkRecord {
    std::string artwork_id;
    std::string artist_id;
    int year = 0;
    std::vector<double> features;

    bool operator==(const ArtworkRecord&) const = default;
};

struct CorpusOptions {
    int min_year = 1500;
    int max_year = 2100;
};

/// Immutable, validated set of artworks sorted by (year, artwork_id).
class Corpus {
public:
    Corpus() = default;

    /// Validates the records, sorts them and builds the artist index.
    /// `feature_dim` is only consulted when `records` is empty.
    static Corpus from_records(std::vector<ArtworkRecord> records, std::size_t feature_dim = 0,
                               const CorpusOptions& options = {}) {
        Corpus c;
        c.feature_dim_ = records.empty() ? feature_dim : records.front().features.size();
        if (c.feature_dim_ == 0) throw ValidationError("feature dimension must be positive");

        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            const std::string where = "record " + std::to_string(i) + " ('" + r.artwork_id + "')";
            if (r.artwork_id.empty()) throw ValidationError(where + ": empty artwork_id");
            if (r.artist_id.empty()) throw ValidationError(where + ": empty artist_id");
            if (!seen.emplace(r.artwork_id, i).second)
                throw ValidationError(where + ": duplicate artwork_id");
            if (r.year < options.min_year || r.year > options.max_year)
                throw ValidationError(where + ": year " + std::to_string(r.year) + " outside [" +
                                      std::to_string(options.min_year) + ", " +
                                      std::to_string(options.max_year) + "]");
            if (r.features.size() != c.feature_dim_)
                throw ValidationError(where + ": feature dimension " + std::to_string(r.features.size()) +
                                      " != " + std::to_string(c.feature_dim_));
            for (double v : r.features)
                if (!std::isfinite(v)) throw ValidationError(where + ": non-finite feature value");
        }

        std::sort(records.begin(), records.end(), [](const ArtworkRecord& a, const ArtworkRecord& b) {
            if (a.year != b.year) return a.year < b.year;
            return a.artwork_id < b.artwork_id;
        });
        c.records_ = std::move(records);
        c.rebuild_index();
        return c;
    }

    const std::vector<ArtworkRecord>& records() const noexcept { return records_; }
    const ArtworkRecord& operator[](std::size_t i) const { return records_[i]; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    std::size_t feature_dim() const noexcept { return feature_dim_; }

    /// artist_id -> indices into records(), ascending.
    const std::map<std::string, std::vector<std::size_t>>& artist_index() const noexcept {
        return artist_index_;
    }

    std::size_t artist_count() const noexcept { return artist_index_.size(); }

    /// Index of the record with this artwork id, or size() when absent.
    std::size_t find(const std::string& artwork_id) const {
        const auto it = id_index_.find(artwork_id);
        return it == id_index_.end() ? records_.size() : it->second;
    }

    FeatureMatrix feature_matrix() const {
        FeatureMatrix m;
        m.rows.resize(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(feature_dim_));
        m.row_ids.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = 0; j < feature_dim_; ++j)
                m.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = records_[i].features[j];
            m.row_ids.push_back(records_[i].artwork_id);
        }
        return m;
    }

    bool operator==(const Corpus& other) const {
        return feature_dim_ == other.feature_dim_ && records_ == other.records_;
    }

private:
    void rebuild_index() {
        artist_index_.clear();
        id_index_.clear();
        for (std::size_t i = 0; i < records_.size(); ++i) {
            artist_index_[records_[i].artist_id].push_back(i);
            id_index_.emplace(records_[i].artwork_id, i);
        }
    }

    std::vector<ArtworkRecord> records_;
    std::size_t feature_dim_ = 0;
    std::map<std::string, std::vector<std::size_t>> artist_index_;
    std::unordered_map<std::string, std::size_t> id_index_;
};

namespace detail {

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file '" + path + "'");
    return in;
}

}  // namespace detail

/// Reads the metadata CSV (`artwork_id,artist_id,year`) and the features CSV
/// (`artwork_id,f0,...,f{d-1}`) and joins them on artwork_id.
///
/// Every row is checked before anything is reported; on failure a CorpusError
/// carries one RowIssue per problem, tagged with the offending line number.
inline Corpus load_corpus(std::istream& metadata, std::istream& features, const CorpusOptions& options = {},
                          const std::string& metadata_name = "metadata",
                          const std::string& features_name = "features") {
    std::vector<RowIssue> issues;
    auto fail = [&](std::size_t row, const std::string& file, const std::string& msg) {
        issues.push_back({row, file + ": " + msg});
    };

    struct Meta {
        std::string artist_id;
        int year = 0;
        std::size_t line = 0;
    };
    std::map<std::string, Meta> meta;

    csv::Row row;
    try {
        csv::Reader reader(metadata);
        if (!reader.next(row)) {
            fail(0, metadata_name, "empty file, expected header artwork_id,artist_id,year");
        } else {
            int col_id = -1, col_artist = -1, col_year = -1;
            for (std::size_t i = 0; i < row.fields.size(); ++i) {
                if (row.fields[i] == "artwork_id") col_id = static_cast<int>(i);
                else if (row.fields[i] == "artist_id") col_artist = static_cast<int>(i);
                else if (row.fields[i] == "year") col_year = static_cast<int>(i);
            }
            if (col_id < 0 || col_artist < 0 || col_year < 0) {
                fail(row.line, metadata_name, "header must contain artwork_id, artist_id and year");
            } else {
                const std::size_t width = row.fields.size();
                while (reader.next(row)) {
                    if (row.fields.size() != width) {
                        fail(row.line, metadata_name,
                             "expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(row.fields.size()));
                        continue;
                    }
                    const std::string& id = row.fields[static_cast<std::size_t>(col_id)];
                    const std::string& artist = row.fields[static_cast<std::size_t>(col_artist)];
                    const std::string& year_text = row.fields[static_cast<std::size_t>(col_year)];
                    if (id.empty()) {
                        fail(row.line, metadata_name, "missing artwork_id");
                        continue;
                    }
                    if (artist.empty()) fail(row.line, metadata_name, "missing artist_id for '" + id + "'");
                    const auto year = csv::parse_integer(year_text);
                    if (!year) {
                        fail(row.line, metadata_name, "unparseable year '" + year_text + "' for '" + id + "'");
                    } else if (*year < options.min_year || *year > options.max_year) {
                        fail(row.line, metadata_name,
                             "year " + std::to_string(*year) + " for '" + id + "' outside [" +
                                 std::to_string(options.min_year) + ", " + std::to_string(options.max_year) + "]");
                    }
                    auto [it, inserted] = meta.emplace(id, Meta{artist, year ? static_cast<int>(*year) : 0, row.line});
                    if (!inserted)
                        fail(row.line, metadata_name,
                             "duplicate artwork_id '" + id + "' (first seen on row " +
                                 std::to_string(it->second.line) + ")");
                }
            }
        }
    } catch (const std::runtime_error& e) {
        fail(0, metadata_name, e.what());
    }

    std::vector<ArtworkRecord> records;
    std::map<std::string, std::size_t> feature_lines;
    std::size_t dim = 0;
    try {
        csv::Reader reader(features);
        if (!reader.next(row)) {
            fail(0, features_name, "empty file, expected header artwork_id,f0,...");
        } else {
            bool header_ok = row.fields.size() >= 2 && row.fields[0] == "artwork_id";
            for (std::size_t i = 1; header_ok && i < row.fields.size(); ++i)
                header_ok = row.fields[i] == "f" + std::to_string(i - 1);
            if (!header_ok) {
                fail(row.line, features_name, "header must be artwork_id,f0,...,f{d-1} with d >= 1");
            } else {
                dim = row.fields.size() - 1;
                while (reader.next(row)) {
                    const std::string& id = row.fields[0];
                    if (row.fields.size() - 1 != dim) {
                        fail(row.line, features_name,
                             "dimension mismatch for '" + id + "': expected " + std::to_string(dim) +
                                 " values, found " + std::to_string(row.fields.size() - 1));
                        continue;
                    }
                    if (id.empty()) {
                        fail(row.line, features_name, "missing artwork_id");
                        continue;
                    }
                    auto [fit, inserted] = feature_lines.emplace(id, row.line);
                    if (!inserted) {
                        fail(row.line, features_name,
                             "duplicate artwork_id '" + id + "' (first seen on row " +
                                 std::to_string(fit->second) + ")");
                        continue;
                    }
                    ArtworkRecord rec;
                    rec.artwork_id = id;
                    rec.features.reserve(dim);
                    bool ok = true;
                    for (std::size_t j = 1; j < row.fields.size(); ++j) {
                        const auto v = csv::parse_real(row.fields[j]);
                        if (!v) {
                            fail(row.line, features_name,
                                 "unparseable value '" + row.fields[j] + "' in column f" + std::to_string(j - 1) +
                                     " for '" + id + "'");
                            ok = false;
                            break;
                        }
                        if (!std::isfinite(*v)) {
                            fail(row.line, features_name,
                                 "non-finite value in column f" + std::to_string(j - 1) + " for '" + id + "'");
                            ok = false;
                            break;
                        }
                        rec.features.push_back(*v);
                    }
                    const auto mit = meta.find(id);
                    if (mit == meta.end()) {
                        fail(row.line, features_name, "artwork_id '" + id + "' has no metadata row");
                        continue;
                    }
                    if (!ok) continue;
                    rec.artist_id = mit->second.artist_id;
                    rec.year = mit->second.year;
                    records.push_back(std::move(rec));
                }
            }
        }
    } catch (const std::runtime_error& e) {
        fail(0, features_name, e.what());
    }

    if (dim > 0) {
        for (const auto& [id, m] : meta)
            if (!feature_lines.count(id))
                fail(m.line, metadata_name, "artwork_id '" + id + "' has no features row");
    }

    if (!issues.empty()) {
        throw CorpusError(std::move(issues));
    }
    return Corpus::from_records(std::move(records), dim, options);
}

inline Corpus load_corpus(const std::string& metadata_path, const std::string& features_path,
                          const CorpusOptions& options = {}) {
    auto meta = detail::open_input(metadata_path);
    auto feats = detail::open_input(features_path);
    return load_corpus(meta, feats, options, metadata_path, features_path);
}

/// Keeps only artists with at least `min_count` artworks; order is preserved.
inline Corpus filter_by_min_works(const Corpus& corpus, std::size_t min_count) {
    if (min_count < 1) throw ValidationError("min_count must be >= 1");
    std::vector<ArtworkRecord> kept;
    for (const auto& rec : corpus.records())
        if (corpus.artist_index().at(rec.artist_id).size() >= min_count) kept.push_back(rec);
    return Corpus::from_records(std::move(kept), corpus.feature_dim(),
                                CorpusOptions{std::numeric_limits<int>::min(), std::numeric_limits<int>::max()});
}

/// Writes the two interchange CSVs in record order. Feature values use 17
/// significant digits so that reloading reproduces the same doubles.
inline void write_corpus(const Corpus& corpus, std::ostream& metadata, std::ostream& features) {
    metadata << "artwork_id,artist_id,year\n";
    for (const auto& r : corpus.records())
        metadata << csv::escape(r.artwork_id) << ',' << csv::escape(r.artist_id) << ',' << r.year << '\n';

    features << "artwork_id";
    for (std::size_t j = 0; j < corpus.feature_dim(); ++j) features << ",f" << j;
    features << '\n';
    for (const auto& r : corpus.records()) {
        features << csv::escape(r.artwork_id);
        for (double v : r.features) features << ',' << csv::format_exact(v);
        features << '\n';
    }
}

}  // namespace influence
