#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "influence/corpus.hpp"
#include "influence/csv.hpp"

using namespace influence;

namespace {

Corpus load(const std::string& meta, const std::string& feats, const CorpusOptions& o = {}) {
    std::istringstream m(meta), f(feats);
    return load_corpus(m, f, o);
}

std::vector<RowIssue> issues_of(const std::string& meta, const std::string& feats) {
    try {
        load(meta, feats);
    } catch (const CorpusError& e) {
        return e.issues();
    }
    ADD_FAILURE() << "expected CorpusError";
    return {};
}

bool mentions(const std::vector<RowIssue>& issues, const std::string& needle) {
    for (const auto& i : issues)
        if (i.message.find(needle) != std::string::npos) return true;
    return false;
}

const char* kMeta3 = "artwork_id,artist_id,year\nw1,a,1810\nw2,b,1800\nw3,a,1820\n";
const char* kFeat3 = "artwork_id,f0,f1,f2,f3\nw1,1,2,3,4\nw2,0.5,0,0,1\nw3,-1,2e-3,7,0\n";

Corpus counts_corpus(std::size_t a, std::size_t b) {
    std::vector<ArtworkRecord> recs;
    for (std::size_t i = 0; i < a; ++i) recs.push_back({"A" + std::to_string(i), "A", 1800, {1.0}});
    for (std::size_t i = 0; i < b; ++i) recs.push_back({"B" + std::to_string(i), "B", 1801, {2.0}});
    return Corpus::from_records(recs);
}

}  // namespace

TEST(Corpus, LoadsThreeRows) {
    const Corpus c = load(kMeta3, kFeat3);
    EXPECT_EQ(c.size(), 3u);
    EXPECT_EQ(c.feature_dim(), 4u);
    EXPECT_EQ(c.artist_count(), 2u);
    // Sorted by (year, id).
    EXPECT_EQ(c[0].artwork_id, "w2");
    EXPECT_EQ(c[1].artwork_id, "w1");
    EXPECT_EQ(c[2].artwork_id, "w3");
    EXPECT_DOUBLE_EQ(c[2].features[1], 2e-3);
    EXPECT_EQ(c.artist_index().at("a"), (std::vector<std::size_t>{1, 2}));
}

TEST(Corpus, ColumnsFoundByName) {
    const Corpus c = load("year,artwork_id,artist_id\n1810,w1,a\n1800,w2,b\n", "artwork_id,f0\nw2,1\nw1,2\n");
    EXPECT_EQ(c[0].artwork_id, "w2");
    EXPECT_EQ(c[0].artist_id, "b");
}

TEST(Corpus, OrphanFeatureRowNamed) {
    const auto issues = issues_of("artwork_id,artist_id,year\nw1,a,1800\n", "artwork_id,f0\nw1,1\nghost,2\n");
    ASSERT_FALSE(issues.empty());
    EXPECT_TRUE(mentions(issues, "ghost"));
    EXPECT_EQ(issues.front().row, 3u);
}

TEST(Corpus, DuplicateIdRejected) {
    const auto issues = issues_of("artwork_id,artist_id,year\nx1,a,1800\nx1,b,1801\n", "artwork_id,f0\nx1,1\n");
    ASSERT_FALSE(issues.empty());
    EXPECT_TRUE(mentions(issues, "x1"));
    EXPECT_TRUE(mentions(issues, "duplicate"));
}

TEST(Corpus, AllIssuesReportedWithRows) {
    const auto issues = issues_of("artwork_id,artist_id,year\nw1,a,18x0\nw2,b,1800\nw3,c,3000\n",
                                  "artwork_id,f0,f1\nw1,1,2\nw2,1\nw3,nan,1\n");
    EXPECT_GE(issues.size(), 4u);
    std::set<std::size_t> rows;
    for (const auto& i : issues) rows.insert(i.row);
    EXPECT_TRUE(rows.count(2));
    EXPECT_TRUE(rows.count(3));
    EXPECT_TRUE(rows.count(4));
}

TEST(Corpus, MetadataWithoutFeaturesRejected) {
    const auto issues = issues_of("artwork_id,artist_id,year\nw1,a,1800\nw2,b,1801\n", "artwork_id,f0\nw1,1\n");
    EXPECT_TRUE(mentions(issues, "w2"));
}

TEST(Corpus, BadFeatureHeaderRejected) {
    EXPECT_THROW(load("artwork_id,artist_id,year\nw1,a,1800\n", "artwork_id,g0\nw1,1\n"), ValidationError);
}

TEST(Corpus, QuotedFieldsAndCrlf) {
    const Corpus c = load("artwork_id,artist_id,year\r\n\"w,1\",\"Doe, J.\",1800\r\n", "artwork_id,f0\r\n\"w,1\",3\r\n");
    EXPECT_EQ(c[0].artwork_id, "w,1");
    EXPECT_EQ(c[0].artist_id, "Doe, J.");
}

TEST(Corpus, FilterKeepsArtistsAtThreshold) {
    const Corpus f = filter_by_min_works(counts_corpus(150, 99), 100);
    EXPECT_EQ(f.size(), 150u);
    EXPECT_EQ(f.artist_count(), 1u);
    EXPECT_TRUE(f.artist_index().count("A"));
    EXPECT_EQ(filter_by_min_works(counts_corpus(100, 99), 100).size(), 100u);
}

TEST(Corpus, FilterMinOneIsIdentity) {
    const Corpus c = load(kMeta3, kFeat3);
    EXPECT_EQ(filter_by_min_works(c, 1), c);
}

TEST(Corpus, FilterEverythingGivesEmpty) {
    const Corpus f = filter_by_min_works(counts_corpus(3, 4), 5);
    EXPECT_TRUE(f.empty());
    EXPECT_EQ(f.feature_dim(), 1u);
}

TEST(Corpus, SerializationDeterministicAndRoundTrips) {
    const Corpus a = load(kMeta3, kFeat3);
    const Corpus b = load(kMeta3, kFeat3);
    std::ostringstream ma, fa, mb, fb;
    write_corpus(a, ma, fa);
    write_corpus(b, mb, fb);
    EXPECT_EQ(ma.str(), mb.str());
    EXPECT_EQ(fa.str(), fb.str());
    EXPECT_EQ(load(ma.str(), fa.str()), a);
}

TEST(Corpus, FromRecordsValidates) {
    EXPECT_THROW(Corpus::from_records({{"a", "x", 1800, {1.0}}, {"a", "y", 1801, {1.0}}}), ValidationError);
    EXPECT_THROW(Corpus::from_records({{"a", "x", 1800, {1.0}}, {"b", "y", 1801, {1.0, 2.0}}}), ValidationError);
    EXPECT_THROW(Corpus::from_records({{"a", "x", 1400, {1.0}}}), ValidationError);
}

TEST(Csv, RealFormatting) {
    EXPECT_EQ(csv::format_real(0.5), "0.5");
    EXPECT_EQ(csv::format_real(-0.0), "0");
    EXPECT_EQ(csv::format_real(1.0 / 3.0), "0.333333333");
    const double x = 0.1 + 0.2;
    EXPECT_EQ(*csv::parse_real(csv::format_exact(x)), x);
    EXPECT_FALSE(csv::parse_real("1.5x"));
    EXPECT_FALSE(csv::parse_integer("12.0"));
}
