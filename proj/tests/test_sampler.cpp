#include "oracles/oracles.hpp"

#include "triage/sampler/sampling.hpp"
#include "triage/sampler/session.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

using namespace triage::sampler;
using triage::distance::DistanceMatrix;
using triage::distance::TokenSeq;

namespace {

DistanceMatrix matrix_of(const std::vector<std::vector<std::uint32_t>>& rows) {
    DistanceMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

const TokenSeq kBuggy = {"a", "b", "c", "d", "e"};

PatchSet patch_set(const std::vector<std::pair<std::string, TokenSeq>>& specs, std::vector<int> ranks = {}) {
    std::vector<Patch> ps;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        std::string text;
        for (const auto& t : specs[i].second) text += t + " ";
        const int rank = ranks.empty() ? static_cast<int>(i) + 1 : ranks[i];
        ps.push_back(make_patch(specs[i].first, rank, text, kBuggy));
    }
    return PatchSet(std::move(ps), kBuggy);
}

// Three sequences with pairwise distances 2, 2 and 4.
PatchSet triangle() {
    return patch_set({{"p1", {"a", "b", "c", "d"}}, {"p2", {"x", "y", "c", "d"}}, {"p3", {"x", "y", "z", "w"}}});
}

std::vector<std::vector<std::string>> partition(const ClusterSet& cs) {
    std::vector<std::vector<std::string>> out;
    for (const auto& c : cs.clusters) out.push_back(c.members);
    std::sort(out.begin(), out.end());
    return out;
}

// n random patches as small edits of a few base sequences.
std::vector<Patch> random_corpus(std::mt19937_64& rng, std::size_t n) {
    const std::size_t families = 1 + rng() % 4;
    std::vector<TokenSeq> bases;
    for (std::size_t f = 0; f < families; ++f) {
        TokenSeq b(4 + rng() % 8);
        for (auto& t : b) t = "f" + std::to_string(f) + "_" + std::to_string(rng() % 6);
        bases.push_back(b);
    }
    std::vector<Patch> out;
    for (std::size_t i = 0; i < n; ++i) {
        TokenSeq t = bases[rng() % families];
        const std::size_t edits = rng() % 4;
        for (std::size_t e = 0; e < edits && !t.empty(); ++e) t[rng() % t.size()] = "e" + std::to_string(rng() % 5);
        std::string text;
        for (const auto& s : t) text += s + " ";
        char id[8];
        std::snprintf(id, sizeof id, "c%02zu", i);
        out.push_back(make_patch(id, static_cast<int>(rng() % 20) + 1, text, kBuggy));
    }
    return out;
}

}  // namespace

TEST(Rational, ExactArithmetic) {
    EXPECT_EQ(Rational(2, 6), Rational(1, 3));
    EXPECT_EQ(Rational(2, 6).num(), 1);
    EXPECT_LT(Rational(1, 3), Rational(34, 100));
    EXPECT_EQ(Rational(6, 4).to_string(), "3/2");
    EXPECT_EQ(Rational(4, 2).to_string(), "2");
}

TEST(Cluster, SingleLeaf) {
    const Dendrogram d = cluster(matrix_of({{0}}), {"p1"});
    EXPECT_EQ(d.leaf_count(), 1u);
    EXPECT_TRUE(d.merges().empty());
    const ClusterSet cs = cut(d, CutPolicy{});
    ASSERT_EQ(cs.clusters.size(), 1u);
    EXPECT_EQ(cs.clusters[0].members, std::vector<std::string>{"p1"});
}

TEST(Cluster, HandRunUpgma) {
    const Dendrogram d = cluster(matrix_of({{0, 1, 9}, {1, 0, 9}, {9, 9, 0}}), {"p1", "p2", "p3"});
    ASSERT_EQ(d.merges().size(), 2u);
    EXPECT_EQ(d.members(3), (std::vector<std::string>{"p1", "p2"}));
    EXPECT_EQ(d.merges()[0].height, Rational(1, 1));
    EXPECT_EQ(d.merges()[1].height, Rational(9, 1));
    EXPECT_EQ(d.node_name(3), "node:1");
    EXPECT_EQ(d.node_name(2), "leaf:p3");
    EXPECT_EQ(partition(cut(d, CutPolicy{})), (std::vector<std::vector<std::string>>{{"p1", "p2"}, {"p3"}}));
}

TEST(Cluster, AverageLinkageHeights) {
    // {p1,p2} at 2, then p3 joins at mean(4, 6) = 5.
    const Dendrogram d = cluster(matrix_of({{0, 2, 4}, {2, 0, 6}, {4, 6, 0}}), {"p1", "p2", "p3"});
    EXPECT_EQ(d.merges()[1].height, Rational(5, 1));
}

TEST(Cluster, RepeatedRunsIdentical) {
    std::mt19937_64 rng(1);
    const PatchSet ps(random_corpus(rng, 20), kBuggy);
    const Dendrogram first = cluster(ps.matrix(), ps.ids());
    for (int i = 0; i < 100; ++i) EXPECT_EQ(cluster(ps.matrix(), ps.ids()), first);
}

TEST(Cut, ThreeTightGroups) {
    std::mt19937_64 rng(9);
    std::vector<Patch> patches;
    std::vector<std::vector<std::string>> groups(3);
    for (int g = 0; g < 3; ++g) {
        TokenSeq base(12);
        for (std::size_t k = 0; k < base.size(); ++k) base[k] = "g" + std::to_string(g) + "_" + std::to_string(k);
        for (int m = 0; m < 10; ++m) {
            TokenSeq t = base;
            t[rng() % t.size()] = "x";
            std::string text;
            for (const auto& s : t) text += s + " ";
            const std::string id = "g" + std::to_string(g) + "m" + std::to_string(m);
            patches.push_back(make_patch(id, m + 1, text, kBuggy));
            groups[g].push_back(id);
        }
    }
    const PatchSet ps(patches, kBuggy);
    for (const auto& a : ps.ids()) {
        for (const auto& b : ps.ids()) {
            const bool same = a.substr(0, 2) == b.substr(0, 2);
            if (same) EXPECT_LE(ps.distance(a, b), 2u);
            else EXPECT_GE(ps.distance(a, b), 10u);
        }
    }
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end());
    const SampleResult r = sample(ps);
    EXPECT_EQ(partition(r.clusters), groups);
}

TEST(Cut, PolicyParsing) {
    EXPECT_EQ(CutPolicy::parse("gap").kind, CutPolicy::Kind::Gap);
    EXPECT_EQ(CutPolicy::parse("k=3").k, 3u);
    EXPECT_DOUBLE_EQ(CutPolicy::parse("threshold=2.5").threshold, 2.5);
    EXPECT_THROW(CutPolicy::parse("k=0"), std::invalid_argument);
    EXPECT_THROW(CutPolicy::parse("median"), std::invalid_argument);
    EXPECT_EQ(CutPolicy::parse("threshold=2.5").to_string(), "threshold=2.5");
}

TEST(Cut, FixedKAndThreshold) {
    const Dendrogram d = cluster(matrix_of({{0, 1, 9}, {1, 0, 9}, {9, 9, 0}}), {"p1", "p2", "p3"});
    EXPECT_EQ(cut(d, CutPolicy::parse("k=3")).clusters.size(), 3u);
    EXPECT_EQ(cut(d, CutPolicy::parse("k=1")).clusters.size(), 1u);
    EXPECT_EQ(cut(d, CutPolicy::parse("threshold=1")).clusters.size(), 2u);
    EXPECT_EQ(cut(d, CutPolicy::parse("threshold=0.5")).clusters.size(), 3u);
}

TEST(Representativeness, Examples) {
    const PatchSet ps = triangle();
    const auto r = representativeness({"p1", "p2", "p3"}, ps);
    EXPECT_EQ(r.at("p1"), Rational(3, 1));
    EXPECT_EQ(r.at("p2"), Rational(2, 1));
    EXPECT_EQ(r.at("p3"), Rational(3, 1));
    EXPECT_EQ(representativeness({"p2"}, ps).at("p2"), Rational(0, 1));
    const PatchSet same = patch_set({{"s1", {"q"}}, {"s2", {"q"}}, {"s3", {"q"}}});
    for (const auto& [id, v] : representativeness({"s1", "s2", "s3"}, same)) EXPECT_EQ(v, Rational(0, 1)) << id;
}

TEST(Centroid, Examples) {
    const PatchSet ps = triangle();
    EXPECT_EQ(select_centroid({"p3"}, ps), "p3");
    EXPECT_EQ(select_centroid({"p1", "p2", "p3"}, ps), "p2");
    EXPECT_EQ(select_centroid({"p1", "p3"}, ps), "p1");
    const PatchSet reranked = patch_set({{"p1", {"a"}}, {"p2", {"b"}}}, {5, 2});
    EXPECT_EQ(select_centroid({"p1", "p2"}, reranked), "p2");
}

TEST(Centroid, MatchesBruteForce) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const PatchSet ps(random_corpus(rng, 1 + rng() % 20), kBuggy);
        std::map<std::string, int> ranks;
        for (const auto& p : ps.patches()) ranks[p.id] = p.original_rank;
        const auto dist = [&](const std::string& a, const std::string& b) { return ps.distance(a, b); };
        EXPECT_EQ(select_centroid(ps.ids(), ps), oracle::centroid(ps.ids(), dist, ranks));
        EXPECT_EQ(select_centroid(ps.ids(), ps, CentroidRule::Max), oracle::centroid(ps.ids(), dist, ranks, true));
    }
}

TEST(RankBySimilarity, Examples) {
    // Distances to a b c d e: pA 5, pB 2, pC 2.
    const PatchSet ps = patch_set({{"pA", {}}, {"pB", {"a", "b", "c", "x", "y"}}, {"pC", {"x", "y", "c", "d", "e"}}},
                                  {1, 3, 1});
    ASSERT_EQ(ps.at("pA").distance_to_buggy, 5u);
    ASSERT_EQ(ps.at("pB").distance_to_buggy, 2u);
    ASSERT_EQ(ps.at("pC").distance_to_buggy, 2u);
    const RankedSample r = rank_by_similarity({{"pA", "x"}, {"pB", "y"}, {"pC", "z"}}, ps);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].patch_id, "pC");
    EXPECT_EQ(r[1].patch_id, "pB");
    EXPECT_EQ(r[2].patch_id, "pA");
    EXPECT_EQ(rank_by_similarity({{"pA", "x"}}, ps).size(), 1u);

    const PatchSet with_identity = patch_set({{"pA", {"x"}}, {"pI", kBuggy}});
    EXPECT_EQ(rank_by_similarity({{"pA", "1"}, {"pI", "2"}}, with_identity)[0].patch_id, "pI");
}

TEST(Sample, OnePatch) {
    const PatchSet ps = patch_set({{"only", {"a"}}});
    const SampleResult r = sample(ps);
    ASSERT_EQ(r.ranked.size(), 1u);
    EXPECT_EQ(r.ranked[0].patch_id, "only");
}

TEST(Sample, NoClusterRanksEverything) {
    std::mt19937_64 rng(2);
    const PatchSet ps(random_corpus(rng, 15), kBuggy);
    SampleConfig cfg;
    cfg.clustering = false;
    const SampleResult r = sample(ps, cfg);
    ASSERT_EQ(r.ranked.size(), 15u);
    for (std::size_t i = 1; i < r.ranked.size(); ++i) EXPECT_LE(r.ranked[i - 1].distance, r.ranked[i].distance);
}

TEST(Sample, PermutationInvariant) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        auto patches = random_corpus(rng, 2 + rng() % 30);
        const SampleResult base = sample(patches, kBuggy);
        for (int k = 0; k < 3; ++k) {
            std::shuffle(patches.begin(), patches.end(), rng);
            const SampleResult r = sample(patches, kBuggy);
            EXPECT_EQ(partition(r.clusters), partition(base.clusters));
            EXPECT_EQ(r.ranked, base.ranked);
        }
    }
}

TEST(Sample, ClusterPartitionCoversEveryPatch) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        const PatchSet ps(random_corpus(rng, 1 + rng() % 30), kBuggy);
        const SampleResult r = sample(ps);
        std::vector<std::string> all;
        for (const auto& c : r.clusters.clusters) {
            all.insert(all.end(), c.members.begin(), c.members.end());
            EXPECT_TRUE(std::find(c.members.begin(), c.members.end(), c.centroid) != c.members.end());
        }
        std::sort(all.begin(), all.end());
        EXPECT_EQ(all, ps.ids());
        EXPECT_EQ(r.ranked.size(), r.clusters.clusters.size());
        EXPECT_LE(r.clusters.clusters.size(), 8u);
    }
}

class SessionTest : public ::testing::Test {
  protected:
    // Two families {a1,a2} and {b1,b2} far apart, plus an outlier.
    PatchSet ps = patch_set({{"a1", {"a", "b", "c", "d", "x"}},
                             {"a2", {"a", "b", "c", "d", "y"}},
                             {"b1", {"p", "q", "r", "s", "t", "u", "v"}},
                             {"b2", {"p", "q", "r", "s", "t", "u", "w"}},
                             {"o1", {"m", "n", "o", "k", "l", "h", "i", "j", "g", "f"}}});
    SampleConfig cfg;
    Session start() {
        cfg.cut = CutPolicy::parse("k=3");
        return start_session(ps, sample(ps, cfg), cfg, "corpus");
    }
};

TEST_F(SessionTest, RejectCluster) {
    const Session s = start();
    ASSERT_EQ(s.ranked.size(), 3u);
    const std::string victim = s.cluster_of("b1")->id;
    const Session t = feedback(s, ps, {ActionKind::RejectCluster, victim}, 1);
    EXPECT_EQ(t.ranked.size(), 2u);
    EXPECT_EQ(t.find_cluster(victim), nullptr);
    EXPECT_TRUE(t.rejected_clusters.contains(victim));
    EXPECT_EQ(s.ranked.size(), 3u);  // input untouched
}

TEST_F(SessionTest, RejectCentroidReselects) {
    const PatchSet tri = triangle();
    SampleConfig one;
    one.cut = CutPolicy::parse("k=1");
    const Session s = start_session(tri, sample(tri, one), one, "c");
    ASSERT_EQ(s.active.size(), 1u);
    ASSERT_EQ(s.active[0].centroid, "p2");
    const Session t = feedback(s, tri, {ActionKind::RejectPatch, "p2"}, 1);
    ASSERT_EQ(t.active.size(), 1u);
    EXPECT_EQ(t.active[0].centroid, oracle::centroid({"p1", "p3"},
                                                    [&](const std::string& a, const std::string& b) {
                                                        return tri.distance(a, b);
                                                    },
                                                    {{"p1", 1}, {"p3", 3}}));
    EXPECT_EQ(t.active[0].centroid, "p1");
}

TEST_F(SessionTest, ExpandSplitsIntoChildren) {
    const PatchSet four = patch_set({{"a", {"a", "b", "c", "d", "x"}},
                                     {"b", {"a", "b", "c", "d", "y"}},
                                     {"c", {"p", "q", "r", "s", "t"}},
                                     {"d", {"p", "q", "r", "s", "u"}}});
    SampleConfig one;
    one.cut = CutPolicy::parse("k=1");
    const Session s = start_session(four, sample(four, one), one, "c");
    ASSERT_EQ(s.active.size(), 1u);
    const Session t = feedback(s, four, {ActionKind::ExpandCluster, s.active[0].id}, 1);
    ASSERT_EQ(t.active.size(), 2u);
    EXPECT_EQ(partition(ClusterSet{t.active, {}}), (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}}));
    for (const auto& c : t.active) EXPECT_EQ(c.centroid, select_centroid(c.members, four));
    EXPECT_EQ(t.navigation, std::vector<std::string>{s.active[0].id});
}

TEST_F(SessionTest, AcceptFreezes) {
    const Session s = start();
    const Session t = feedback(s, ps, {ActionKind::AcceptPatch, "a1"}, 1);
    EXPECT_TRUE(t.frozen());
    EXPECT_EQ(t.accepted, "a1");
    try {
        (void)feedback(t, ps, {ActionKind::RejectPatch, "b1"}, 2);
        FAIL();
    } catch (const FeedbackError& e) {
        EXPECT_EQ(e.kind(), FeedbackError::Kind::Frozen);
    }
}

TEST_F(SessionTest, UnknownIds) {
    const Session s = start();
    for (auto kind : {ActionKind::RejectPatch, ActionKind::RejectCluster, ActionKind::ExpandCluster,
                      ActionKind::AcceptPatch}) {
        try {
            (void)feedback(s, ps, {kind, "nope"}, 1);
            FAIL();
        } catch (const FeedbackError& e) {
            EXPECT_EQ(e.kind(), FeedbackError::Kind::UnknownId);
        }
    }
}

TEST_F(SessionTest, LogIsAppendOnlyAndReplays) {
    Session s = start();
    const Session initial = s;
    std::mt19937_64 rng(12);
    for (int i = 0; i < 6 && !s.active.empty() && !s.frozen(); ++i) {
        const auto& c = s.active[rng() % s.active.size()];
        const FeedbackAction a = rng() % 2 ? FeedbackAction{ActionKind::ExpandCluster, c.id}
                                           : FeedbackAction{ActionKind::RejectPatch, c.centroid};
        Session next = feedback(s, ps, a, 100 + i);
        ASSERT_EQ(next.log.size(), s.log.size() + 1);
        EXPECT_TRUE(std::equal(s.log.begin(), s.log.end(), next.log.begin()));
        s = std::move(next);
    }
    EXPECT_EQ(replay(initial, ps, s.log), s);
}

TEST(ActionKind, Names) {
    for (auto k : {ActionKind::RejectPatch, ActionKind::RejectCluster, ActionKind::ExpandCluster,
                   ActionKind::AcceptPatch}) {
        EXPECT_EQ(parse_action_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_action_kind("delete"), std::invalid_argument);
}
