#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "scmkit/metrics.hpp"

#include "oracles.hpp"

using namespace scmkit;

namespace
{

// A word with old senses A..(A+k-1). Each entry of `gold` labels one new usage; a label
// that is not an old sense is a gained sense.
TargetWordRecord word_with(std::size_t k, const std::vector<std::string> &gold)
{
    TargetWordRecord w;
    w.word = "w";
    for (std::size_t s = 0; s < k; ++s) {
        w.old_senses.push_back({std::string(1, char('A' + s)), "w", "g", Period::old_period});
    }
    for (std::size_t i = 0; i < gold.size(); ++i) {
        Usage u;
        u.usage_id = "u" + std::to_string(i);
        u.word = "w";
        u.period = Period::new_period;
        u.gold_sense = gold[i];
        w.new_usages.push_back(u);
    }
    return w;
}

std::vector<Prediction> preds(const std::vector<std::string> &labels, const std::string &word = "w")
{
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.push_back({word, "u" + std::to_string(i), labels[i], Provenance::wsd});
    }
    return out;
}

double f1(const TargetWordRecord &w, const std::vector<std::string> &labels)
{
    return axolotl_f1(w, preds(labels));
}

// Precision and recall at every distinct score, predicting positive at score >= t.
std::vector<PrPoint> sweep(const std::vector<double> &scores, const std::vector<int> &labels)
{
    std::vector<double> thresholds(scores);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    std::vector<PrPoint> out;
    for (double t : thresholds) {
        double tp = 0, flagged = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= t) {
                ++flagged;
                tp += labels[i];
            }
        }
        out.push_back({tp / positives, tp / flagged});
    }
    return out;
}

double ap(const std::vector<double> &s, const std::vector<int> &l)
{
    return average_precision(s, l);
}

Dataset dataset(const std::string &rows)
{
    std::istringstream in("word\tusage_id\tperiod\ttext\tstart\tend\tsense_id\tgloss\n" + rows);
    return parse_dataset(in);
}

} // namespace

TEST_CASE("ARI examples", "[metrics][ari]")
{
    using V = std::vector<int>;
    CHECK(adjusted_rand_index(V{0, 0, 1, 1}, V{1, 1, 0, 0}) == 1.0);
    CHECK(adjusted_rand_index(V{0, 0, 1, 1}, V{0, 0, 0, 0}) == 0.0);
    const V g{0, 0, 1, 2}, p{0, 0, 1, 1};
    // Contingency n_ij: {2,1,1}, rows {2,1,1}, columns {2,2}: index 1, expected 1*2/6, max 1.5
    CHECK(adjusted_rand_index(g, p) == Catch::Approx((1.0 - 1.0 / 3.0) / (1.5 - 1.0 / 3.0)).epsilon(1e-15));
    CHECK(adjusted_rand_index(g, p) == Catch::Approx(oracle::pair_counting_ari(g, p)).epsilon(1e-15));
    CHECK(adjusted_rand_index(V{5}, V{7}) == 1.0);
    CHECK(adjusted_rand_index(V{0, 1, 2}, V{3, 4, 5}) == 1.0);
    CHECK_THROWS_AS(adjusted_rand_index(V{0, 1}, V{0}), Error);
    CHECK_THROWS_AS(adjusted_rand_index(V{}, V{}), Error);
}

TEST_CASE("ARI matches pair counting and is symmetric", "[metrics][ari][oracle][property]")
{
    std::mt19937 rng(1);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        const unsigned kg = 1 + rng() % 4, kp = 1 + rng() % 4;
        std::vector<int> g(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = static_cast<int>(rng() % kg);
            p[i] = static_cast<int>(rng() % kp);
        }
        const double ari = adjusted_rand_index(g, p);
        CHECK(std::abs(ari - oracle::pair_counting_ari(g, p)) <= 1e-12);
        CHECK(ari == Catch::Approx(adjusted_rand_index(p, g)).margin(1e-15));
        std::vector<int> relabeled(p);
        for (auto &x : relabeled) {
            x = 10 - 3 * x;
        }
        CHECK(adjusted_rand_index(g, relabeled) == Catch::Approx(ari).margin(1e-15));
        CHECK(ari <= 1.0 + 1e-15);
        CHECK(ari >= -1.0);
    }
}

TEST_CASE("F1 of words without new usages of old senses", "[metrics][f1]")
{
    const auto w = word_with(2, {"G", "G", "H"});
    CHECK(has_disjoint_senses(w));
    CHECK(f1(w, {"novel:0", "novel:0", "novel:1"}) == 1.0);
    CHECK(f1(w, {"novel:0", "B", "novel:1"}) == 0.0);
}

TEST_CASE("one usage flipped to novel", "[metrics][f1]")
{
    const auto w = word_with(1, {"A", "A", "A", "A"});
    const double all_right = f1(w, {"A", "A", "A", "A"});
    const double one_novel = f1(w, {"A", "A", "A", "novel:0"});
    CHECK(all_right == 1.0);
    // F1_A = 2 * 1 * 3/4 / (1 + 3/4) = 6/7, averaged with the novel class's 0.
    CHECK(one_novel == Catch::Approx(3.0 / 7.0).epsilon(1e-15));
    CHECK(all_right / one_novel > 2.0);
}

TEST_CASE("F1 on a mixed word", "[metrics][f1]")
{
    const auto w = word_with(2, {"A", "A", "B", "G"});
    // Gained-sense usages are outside the scored set, whatever their prediction.
    CHECK(f1(w, {"A", "A", "B", "A"}) == 1.0);
    // A: P 1/2, R 1/2; B: P 0, so 0.
    CHECK(f1(w, {"A", "B", "A", "novel:0"}) == Catch::Approx(0.25).epsilon(1e-15));
    // A sense never seen in gold or predictions still counts in the average.
    const auto lone = word_with(2, {"A", "A"});
    CHECK(f1(lone, {"A", "A"}) == 0.5);
}

TEST_CASE("F1 needs complete predictions and gold", "[metrics][f1]")
{
    const auto w = word_with(1, {"A", "A"});
    CHECK_THROWS_AS(axolotl_f1(w, preds({"A"})), Error);
    CHECK_THROWS_AS(axolotl_f1(w, preds({"A", "A"}, "other")), Error);
    auto missing = w;
    missing.new_usages[1].gold_sense.reset();
    CHECK_THROWS_AS(f1(missing, {"A", "A"}), Error);
}

TEST_CASE("flipping a correct prediction to novel never raises F1", "[metrics][f1][property]")
{
    std::mt19937 rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 1 + rng() % 3;
        const std::size_t n = 1 + rng() % 8;
        std::vector<std::string> gold(n), pred(n);
        auto label = [&](bool allow_gained) {
            const auto r = rng() % (k + (allow_gained ? 1 : 0));
            return r == k ? std::string("G") : std::string(1, char('A' + r));
        };
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = label(true);
            pred[i] = rng() % 4 == 0 ? novel_label(rng() % 2) : label(false);
        }
        const auto w = word_with(k, gold);
        const double before = f1(w, pred);
        CHECK(before >= 0.0);
        CHECK(before <= 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (pred[i] == gold[i] && gold[i] != "G") {
                auto flipped = pred;
                flipped[i] = "novel:0";
                CHECK(f1(w, flipped) <= before);
            }
        }
    }
}

TEST_CASE("average precision examples", "[metrics][ap]")
{
    CHECK(ap({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
    CHECK(ap({0.1, 0.9}, {1, 0}) == 0.5);
    CHECK(ap({0.9, 0.8, 0.8, 0.3}, {1, 0, 1, 0}) == Catch::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(ap({0.5, 0.5, 0.5, 0.5}, {1, 0, 0, 0}) == 0.25);
    CHECK_THROWS_AS(ap({0.1, 0.2}, {1, 1}), DegenerateInput);
    CHECK_THROWS_AS(ap({0.1, 0.2}, {0, 0}), DegenerateInput);
    CHECK_THROWS_AS(ap({0.1}, {0, 1}), Error);
}

TEST_CASE("AP depends only on ranks and hits 1 only for perfect rankings", "[metrics][ap][property]")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coarse(0, 5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 12;
        std::vector<double> s(n);
        std::vector<int> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = coarse(rng);
            l[i] = static_cast<int>(rng() % 2);
        }
        l[0] = 1;
        l[1] = 0;
        const double base = ap(s, l);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0 + 1e-15);
        std::vector<double> t(s);
        for (auto &x : t) {
            x = std::exp(0.7 * x) - 3.0;
        }
        CHECK(ap(t, l) == Catch::Approx(base).epsilon(1e-14));

        double min_pos = 1e9, max_neg = -1e9;
        for (std::size_t i = 0; i < n; ++i) {
            if (l[i]) {
                min_pos = std::min(min_pos, s[i]);
            } else {
                max_neg = std::max(max_neg, s[i]);
            }
        }
        CHECK((std::abs(base - 1.0) < 1e-12) == (min_pos > max_neg));

        const auto curve = pr_curve(s, l);
        const auto expected = sweep(s, l);
        REQUIRE(curve.size() == expected.size());
        double area = 0, prev = 0;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            CHECK(curve[i].recall == Catch::Approx(expected[i].recall).epsilon(1e-15));
            CHECK(curve[i].precision == Catch::Approx(expected[i].precision).epsilon(1e-15));
            if (i > 0) {
                CHECK(curve[i].recall >= curve[i - 1].recall);
            }
            area += (expected[i].recall - prev) * expected[i].precision;
            prev = expected[i].recall;
        }
        CHECK(base == Catch::Approx(area).epsilon(1e-14));
    }
}

TEST_CASE("random scores give AP near the positive rate", "[metrics][ap]")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> s(1000);
    std::vector<int> l(1000);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = unit(rng);
        l[i] = i % 2 == 0 ? 1 : 0;
    }
    CHECK(std::abs(ap(s, l) - 0.5) <= 0.1);
}

TEST_CASE("PR curve of a perfect ranking reaches (1, 1)", "[metrics][ap]")
{
    const auto c = pr_curve(std::vector<double>{3, 2, 1}, std::vector<int>{1, 1, 0});
    REQUIRE(c.size() == 3);
    CHECK(c[1].recall == 1.0);
    CHECK(c[1].precision == 1.0);
    std::ostringstream out;
    write_pr_curve(out, c);
    CHECK(out.str() == "recall\tprecision\n0.5\t1\n1\t1\n1\t0.6666666666666666\n");
    CHECK_THROWS_AS(pr_curve(std::vector<double>{1, 2}, std::vector<int>{0, 0}), DegenerateInput);
}

TEST_CASE("evaluation report", "[metrics][evaluate]")
{
    const auto gold = dataset("cat\tc0\told\tcat\t\t\tA\tfeline\n"
                              "cat\t\told\t\t\t\tB\tjazz fan\n"
                              "cat\tc1\tnew\tcat\t\t\tA\t\n"
                              "cat\tc2\tnew\tcat\t\t\tA\t\n"
                              "cat\tc3\tnew\tcat\t\t\tB\t\n"
                              "cat\tc4\tnew\tcat\t\t\tB\t\n"
                              "dog\td0\told\tdog\t\t\tD\tcanine\n"
                              "dog\td1\tnew\tdog\t\t\tN\tnew thing\n"
                              "dog\td2\tnew\tdog\t\t\tN\t\n"
                              "eel\te0\told\teel\t\t\tE\tfish\n"
                              "eel\te1\tnew\teel\t\t\tE\t\n"
                              "eel\te2\tnew\teel\t\t\tF\tgained\n"
                              "fox\tf0\told\tfox\t\t\tX\tanimal\n");

    SECTION("gold labels as predictions")
    {
        std::vector<Prediction> p;
        for (const auto &w : gold.words) {
            for (const auto &u : w.new_usages) {
                const bool old = w.is_old_sense(*u.gold_sense);
                p.push_back({w.word, u.usage_id, old ? *u.gold_sense : "novel:" + *u.gold_sense, Provenance::wsd});
            }
        }
        const auto r = evaluate(gold, p);
        REQUIRE(r.per_word.size() == 3);
        for (const auto &s : r.per_word) {
            CHECK(s.ari == 1.0);
            CHECK(s.f1 == 1.0);
        }
        CHECK(r.n_disjoint == 1);
        CHECK(r.per_word[1].disjoint);
    }

    SECTION("aggregate is the mean over words")
    {
        std::vector<Prediction> p{{"cat", "c1", "A", Provenance::wsd}, {"cat", "c2", "A", Provenance::wsd},
                                  {"cat", "c3", "A", Provenance::wsd}, {"cat", "c4", "A", Provenance::wsd},
                                  {"dog", "d1", "D", Provenance::wsd}, {"dog", "d2", "novel:0", Provenance::wsd},
                                  {"eel", "e1", "E", Provenance::wsd}, {"eel", "e2", "novel:0", Provenance::wsd}};
        const auto r = evaluate(gold, p);
        // cat: one predicted cluster over two gold senses -> ARI 0; F1: A P 1/2 R 1 -> 2/3, B 0 -> 1/3
        CHECK(r.per_word[0].ari == 0.0);
        CHECK(r.per_word[0].f1 == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
        // dog: gold one cluster, predicted two -> ARI 0; disjoint with an old-sense prediction -> 0
        CHECK(r.per_word[1].ari == 0.0);
        CHECK(r.per_word[1].f1 == 0.0);
        // eel: identical partitions -> ARI 1; F1 1
        CHECK(r.per_word[2].ari == 1.0);
        CHECK(r.per_word[2].f1 == 1.0);
        CHECK(r.mean_ari == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
        CHECK(r.mean_f1 == Catch::Approx((1.0 / 3.0 + 0.0 + 1.0) / 3.0).epsilon(1e-15));

        std::ostringstream out;
        write_report(out, r);
        CHECK(out.str() == "word\tari\tf1\tn_new_usages\tdisjoint\n"
                           "cat\t0\t0.3333333333333333\t4\t0\n"
                           "dog\t0\t0\t2\t1\n"
                           "eel\t1\t1\t2\t0\n"
                           "#aggregate\t0.3333333333333333\t0.4444444444444444\t8\t1\n");

        p.pop_back();
        CHECK_THROWS_AS(evaluate(gold, p), Error);
    }
}
