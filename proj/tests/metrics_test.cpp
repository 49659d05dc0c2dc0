#include <gtest/gtest.h>

#include <random>

#include "nal/metrics.hpp"

using namespace nal;

TEST(Metrics, S4LikeCounts) {
    BinaryCounts c{390, 246, 10, 354, 0};
    auto m = binary_metrics(c);
    EXPECT_EQ(m.precision, (Fraction{65, 106}));
    EXPECT_NEAR(m.precision.percent(), 61.3, 0.05);
    EXPECT_NEAR(m.recall.percent(), 97.5, 1e-9);
    EXPECT_NEAR(m.accuracy.percent(), 74.4, 1e-9);
    EXPECT_EQ(m.f1, Fraction::of(780, 1036));
}

TEST(Metrics, AllCorrect) {
    BinaryCounts c;
    for (int i = 0; i < 500; ++i) c.add(true, true);
    for (int i = 0; i < 500; ++i) c.add(false, false);
    auto m = binary_metrics(c);
    for (const auto& f : {m.accuracy, m.precision, m.recall, m.f1}) EXPECT_EQ(f.percent(), 100.0);
}

TEST(Metrics, UndefinedRatiosAreFlagged) {
    BinaryCounts c{0, 0, 0, 10, 0};
    auto m = binary_metrics(c);
    EXPECT_FALSE(m.precision.defined());
    EXPECT_FALSE(m.recall.defined());
    EXPECT_FALSE(m.f1.defined());
    EXPECT_EQ(m.precision.percent(), 0.0);
    EXPECT_EQ(percent_cell(m.precision), "0.0*");
    EXPECT_EQ(percent_cell(m.accuracy), "100.0");
    EXPECT_EQ(to_json(m)["precision"]["defined"], false);
}

TEST(Metrics, Table) {
    auto m = binary_metrics({1, 1, 0, 2, 0});
    auto t = metrics_table({{"s1", m}});
    EXPECT_NE(t.find("Accuracy"), std::string::npos);
    EXPECT_NE(t.find("F1-Score"), std::string::npos);
    EXPECT_NE(t.find("s1"), std::string::npos);
    EXPECT_NE(t.find("75.0"), std::string::npos);
    EXPECT_NE(t.find("66.7"), std::string::npos);
}

TEST(Confusion, OneVsRestAndCsv) {
    ConfusionMatrix cm({"c1", "c2", "c3"});
    cm.add("c1", "c1");
    cm.add("c2", "c1");
    cm.add("c2", "c1");
    cm.add("c3", "c3");
    cm.add("c1", "c2");
    EXPECT_EQ(cm.at("c2", "c1"), 2);
    EXPECT_EQ(cm.total(), 5);
    auto c1 = cm.one_vs_rest(0);
    EXPECT_EQ(c1.tp, 1);
    EXPECT_EQ(c1.fp, 2);
    EXPECT_EQ(c1.fn, 1);
    EXPECT_EQ(c1.tn, 1);
    EXPECT_EQ(cm.accuracy(), Fraction::of(2, 5));
    EXPECT_EQ(cm.to_csv(), "actual\\predicted,c1,c2,c3\nc1,1,1,0\nc2,2,0,0\nc3,0,0,1\n");
    EXPECT_THROW(cm.add("c4", "c1"), std::invalid_argument);
}

// Independent recomputation: cross-multiplied integer identities, so no
// rounding is involved on either side.
TEST(MetricsProperty, RandomConfusionMatricesExact) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::int64_t> count(0, 600);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::int64_t tp = count(rng), fp = count(rng), fn = count(rng), tn = count(rng);
        auto m = binary_metrics({tp, fp, fn, tn, 0});
        const std::int64_t total = tp + fp + fn + tn;

        auto check = [](const Fraction& f, std::int64_t num, std::int64_t den) {
            if (den == 0) return !f.defined() && f.num == 0;
            return f.defined() && f.den > 0 && std::gcd(f.num, f.den) == 1 && f.num * den == num * f.den;
        };
        ASSERT_TRUE(check(m.accuracy, tp + tn, total));
        ASSERT_TRUE(check(m.precision, tp, tp + fp));
        ASSERT_TRUE(check(m.recall, tp, tp + fn));
        ASSERT_TRUE(check(m.f1, 2 * tp, 2 * tp + fp + fn));
        // F1 as the harmonic mean P*R*2/(P+R) when both are positive:
        // 2*tp^2/((tp+fp)(tp+fn)) / (tp/(tp+fp) + tp/(tp+fn)).
        if (tp > 0) {
            const std::int64_t hn = 2 * tp * tp;
            const std::int64_t hd = tp * (tp + fn) + tp * (tp + fp);
            ASSERT_EQ(m.f1.num * hd, hn * m.f1.den);
        }

        // The same counts through a 2-class confusion matrix.
        ConfusionMatrix cm({"pos", "neg"});
        for (std::int64_t i = 0; i < tp; ++i) cm.add("pos", "pos");
        for (std::int64_t i = 0; i < fn; ++i) cm.add("pos", "neg");
        for (std::int64_t i = 0; i < fp; ++i) cm.add("neg", "pos");
        for (std::int64_t i = 0; i < tn; ++i) cm.add("neg", "neg");
        auto ovr = cm.one_vs_rest(0);
        ASSERT_EQ(ovr.tp, tp);
        ASSERT_EQ(ovr.fp, fp);
        ASSERT_EQ(ovr.fn, fn);
        ASSERT_EQ(ovr.tn, tn);
        ASSERT_EQ(cm.accuracy(), m.accuracy);
    }
}

TEST(MetricsProperty, MulticlassSummaryWeights) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix cm({"a", "b", "c"});
        std::int64_t diag = 0, total = 0;
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t p = 0; p < 3; ++p) {
                auto n = std::uniform_int_distribution<int>(0, 30)(rng);
                for (int i = 0; i < n; ++i) cm.add(cm.classes()[r], cm.classes()[p]);
                total += n;
                if (r == p) diag += n;
            }
        auto s = summarize(cm);
        if (total == 0) continue;
        // Support-weighted recall collapses to accuracy.
        ASSERT_NEAR(s.weighted_recall, 100.0 * static_cast<double>(diag) / static_cast<double>(total), 1e-9);
    }
}
