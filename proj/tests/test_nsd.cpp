#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "scmkit/nsd.hpp"

using namespace scmkit;
using namespace scmkit::nsd;

namespace
{

EmbeddingTable table_with(const std::string &name, const Vector &usage, const Vector &gloss)
{
    EmbeddingTable t(name, usage.size());
    t.insert(EntryKind::usage, "u", usage);
    t.insert(EntryKind::gloss, "s", gloss);
    return t;
}

NsdModel random_model(std::mt19937_64 &rng)
{
    std::normal_distribution<double> nd;
    NsdModel m;
    m.scaler.mean.resize(feature_count);
    m.scaler.std.resize(feature_count);
    for (std::size_t i = 0; i < feature_count; ++i) {
        m.scaler.mean[i] = nd(rng);
        m.scaler.std[i] = 0.1 + std::abs(nd(rng));
        m.weights[i] = nd(rng);
    }
    m.bias = nd(rng);
    m.threshold = 0.1 + 0.2; // not representable in short decimal form
    return m;
}

std::string saved(const NsdModel &m)
{
    std::ostringstream out;
    save_model(out, m);
    return out.str();
}

NsdModel loaded(const std::string &text)
{
    std::istringstream in(text);
    return load_model(in);
}

} // namespace

TEST_CASE("a usage equal to its gloss has zero distances", "[nsd]")
{
    const auto a = table_with("a", {0.3, -1.2, 2.0}, {0.3, -1.2, 2.0});
    const auto b = table_with("b", {5, 5}, {5, 5});
    const auto f = extract_features("u", "s", a, b, {7, 2, 9});
    for (std::size_t i = 0; i < first_count_feature; ++i) {
        CHECK(f[i] == Catch::Approx(0.0).margin(1e-15));
    }
    CHECK(f[10] == 7.0);
    CHECK(f[11] == 2.0);
    CHECK(f[12] == 9.0);
}

TEST_CASE("orthogonal unit vectors", "[nsd]")
{
    const auto a = table_with("a", {1, 0}, {0, 1});
    const auto f = extract_features("u", "s", a, a, {1, 1, 1});
    const double expected[] = {1.0, std::sqrt(2.0), 2.0, 2.0, std::sqrt(2.0)};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(f[i] == Catch::Approx(expected[i]).margin(1e-15));
        CHECK(f[i + 5] == f[i]);
    }
}

TEST_CASE("features come in the canonical order", "[nsd]")
{
    CHECK(feature_names[0] == "a.cos");
    CHECK(feature_names[4] == "a.l2_euclid");
    CHECK(feature_names[5] == "b.cos");
    CHECK(feature_names[12] == "n_new_usages");
    // Only space B differs, so only features 5..9 move.
    const auto a = table_with("a", {1, 0}, {1, 0});
    const auto b = table_with("b", {1, 0}, {0, 2});
    const auto f = extract_features("u", "s", a, b, {0, 0, 0});
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(f[i] == 0.0);
        CHECK(f[i + 5] > 0.0);
    }
    CHECK(f[7] == 3.0);
    CHECK(f[6] == Catch::Approx(std::sqrt(5.0)));
}

TEST_CASE("missing and zero vectors", "[nsd]")
{
    const auto a = table_with("a", {1, 0}, {0, 1});
    CHECK_THROWS_AS(extract_features("v", "s", a, a, {}), MissingEmbedding);
    CHECK_THROWS_AS(extract_features("u", "t", a, a, {}), MissingEmbedding);
    const auto z = table_with("z", {0, 0}, {0, 1});
    CHECK_THROWS_AS(extract_features("u", "s", z, a, {}), DegenerateInput);
}

TEST_CASE("features do not depend on table insertion order", "[nsd][property]")
{
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    std::vector<std::pair<std::string, Vector>> entries;
    for (int i = 0; i < 20; ++i) {
        entries.emplace_back("id" + std::to_string(i), Vector{nd(rng), nd(rng), nd(rng)});
    }
    EmbeddingTable t1("a", 3), t2("a", 3);
    for (const auto &[id, v] : entries) {
        t1.insert(EntryKind::usage, id, v);
        t1.insert(EntryKind::gloss, id, v);
    }
    std::shuffle(entries.begin(), entries.end(), rng);
    for (const auto &[id, v] : entries) {
        t2.insert(EntryKind::gloss, id, v);
        t2.insert(EntryKind::usage, id, v);
    }
    for (int i = 0; i < 20; ++i) {
        const auto u = "id" + std::to_string(i);
        const auto s = "id" + std::to_string((i * 7 + 3) % 20);
        CHECK(extract_features(u, s, t1, t1, {}) == extract_features(u, s, t2, t2, {}));
    }
}

TEST_CASE("scaler on feature rows", "[nsd][scaler]")
{
    FeatureVector lo{}, hi{};
    lo[0] = 1.0;
    hi[0] = 3.0;
    lo[12] = hi[12] = 4.0;
    const std::vector<FeatureVector> rows{lo, hi};
    const auto s = nsd::fit_scaler(rows);
    CHECK(s.mean[0] == 2.0);
    CHECK(s.std[0] == 1.0);
    CHECK(s.std[12] == 1.0);
    CHECK(s.mean[12] == 4.0);
}

TEST_CASE("the threshold comparison is strict", "[nsd]")
{
    NsdModel m;
    m.scaler = {Vector(feature_count, 0.0), Vector(feature_count, 1.0)};
    m.bias = std::log(0.66 / 0.34);
    const FeatureVector f{};
    const auto d = predict_outlier(m, f);
    CHECK(d.probability == Catch::Approx(0.66).margin(1e-12));
    CHECK(d.is_outlier);

    m.threshold = d.probability;
    CHECK_FALSE(predict_outlier(m, f).is_outlier);
    m.threshold = std::nextafter(d.probability, 0.0);
    CHECK(predict_outlier(m, f).is_outlier);

    m.bias = std::log(0.65 / 0.35);
    m.threshold = outlier_probability(m, f);
    CHECK(m.threshold == Catch::Approx(0.65).margin(1e-12));
    CHECK_FALSE(predict_outlier(m, f).is_outlier);

    m.threshold = 1.0;
    m.bias = 800.0;
    CHECK_FALSE(predict_outlier(m, f).is_outlier);
}

TEST_CASE("raising the threshold never adds outliers", "[nsd][property]")
{
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd;
    const auto m0 = random_model(rng);
    std::vector<FeatureVector> rows(200);
    for (auto &r : rows) {
        for (auto &x : r) {
            x = nd(rng);
        }
    }
    std::size_t prev = rows.size() + 1;
    for (int step = 0; step <= 100; ++step) {
        auto m = m0;
        m.threshold = step / 100.0;
        std::size_t count = 0;
        for (const auto &r : rows) {
            count += predict_outlier(m, r).is_outlier ? 1 : 0;
        }
        CHECK(count <= prev);
        prev = count;
    }
    CHECK(prev == 0);
}

TEST_CASE("model files round-trip exactly", "[nsd][io]")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_model(rng);
        const auto text = saved(m);
        const auto back = loaded(text);
        CHECK(back == m);
        CHECK(back.threshold == 0.1 + 0.2);
        CHECK(saved(back) == text);
    }
}

TEST_CASE("malformed model files", "[nsd][io]")
{
    std::mt19937_64 rng(14);
    const auto text = saved(random_model(rng));

    SECTION("twelve weights")
    {
        const auto cut = text.find("feature n_new_usages");
        std::string twelve = text.substr(0, cut) + text.substr(text.find('\n', cut) + 1);
        CHECK_THROWS_AS(loaded(twelve), ParseError);
    }
    SECTION("renamed feature")
    {
        std::string renamed = text;
        renamed.replace(renamed.find("a.manh"), 6, "a.mink");
        try {
            loaded(renamed);
            FAIL("expected ParseError");
        } catch (const ParseError &e) {
            CHECK(e.line() == 3);
        }
    }
    SECTION("missing threshold")
    {
        CHECK_THROWS_AS(loaded(text.substr(0, text.find("threshold"))), ParseError);
    }
    SECTION("extra feature")
    {
        CHECK_THROWS_AS(loaded("feature a.cos mean 0 std 1 weight 0\n" + text), ParseError);
    }
    SECTION("bad number and non-positive std")
    {
        std::string bad = text;
        bad.replace(bad.find("bias ") + 5, 1, "x");
        CHECK_THROWS_AS(loaded(bad), ParseError);
        auto m = random_model(rng);
        m.scaler.std[3] = 0.0;
        CHECK_THROWS_AS(saved(m), Error);
    }
}

TEST_CASE("training separates shifted classes", "[nsd]")
{
    std::mt19937_64 rng(15);
    std::normal_distribution<double> nd(0.0, 0.1);
    std::vector<FeatureVector> rows;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        FeatureVector f;
        const int y = i % 3 == 0 ? 1 : 0;
        for (std::size_t j = 0; j < feature_count; ++j) {
            f[j] = nd(rng) + (j < first_count_feature ? 0.5 * y : 0.0);
        }
        f[10] = 10;
        f[11] = 3;
        f[12] = 20;
        rows.push_back(f);
        labels.push_back(y);
    }
    const auto m = train_nsd(rows, labels, {}, 0.5);
    CHECK(m.threshold == 0.5);
    CHECK(m.scaler.std[11] == 1.0);
    std::size_t right = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        right += predict_outlier(m, rows[i]).is_outlier == (labels[i] == 1) ? 1 : 0;
    }
    CHECK(right == rows.size());
    const std::vector<int> one_class(rows.size(), 0);
    CHECK_THROWS_AS(train_nsd(rows, one_class), DegenerateInput);
}
