#include "agentgraph/embedding.hpp"
#include "agentgraph/errors.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <thread>

using namespace agentgraph;

TEST_CASE("cosine similarity examples") {
    EmbeddingVector x({1.0, 0.0}), y({0.0, 1.0}), d({1.0, 1.0});
    CHECK(cosine_similarity(x, x) == 1.0);
    CHECK(cosine_similarity(x, y) == 0.0);
    CHECK(cosine_similarity(d, x) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(cosine_similarity(EmbeddingVector({-1.0, 0.0}), x) == -1.0);
}

TEST_CASE("cosine similarity errors") {
    CHECK_THROWS_AS(cosine_similarity(EmbeddingVector({1.0, 0.0}), EmbeddingVector({1.0, 0.0, 0.0})),
                    DimensionMismatchError);
    CHECK_THROWS_AS(cosine_similarity(EmbeddingVector({0.0, 0.0}), EmbeddingVector({1.0, 0.0})), ZeroVectorError);
    CHECK_THROWS_AS(EmbeddingVector({1.0, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(EmbeddingVector(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("cosine similarity is symmetric and scale invariant") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> scale(0.01, 100.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> a(16), b(16);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        const double lambda = scale(rng);
        std::vector<double> la = a;
        for (auto& v : la) v *= lambda;
        EmbeddingVector ea(a), eb(b), ela(la);
        CHECK(cosine_similarity(ea, eb) == cosine_similarity(eb, ea));
        CHECK(std::abs(cosine_similarity(ela, eb) - cosine_similarity(ea, eb)) < 1e-9);
        const double c = cosine_similarity(ea, eb);
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("deterministic embedding") {
    auto a = deterministic_embed("boil water", 256);
    CHECK(a == deterministic_embed("boil water", 256));
    CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(a.norm() - 1.0) < 1e-9);
    // punctuation and case do not matter
    CHECK(deterministic_embed("Boil, WATER!", 256) == a);
    const double close = cosine_similarity(a, deterministic_embed("boil the water", 256));
    const double far = cosine_similarity(a, deterministic_embed("chop onions", 256));
    CHECK(far < close);
    // without bucket collisions the hash embedding is the exact bag-of-words cosine
    CHECK(close == doctest::Approx(oracle::bow_cosine("boil water", "boil the water")).epsilon(1e-12));
    CHECK_THROWS_AS(deterministic_embed("  ?! ", 256), EmptyTextError);
    CHECK_THROWS_AS(deterministic_embed("x", 4), std::invalid_argument);
}

TEST_CASE("hash provider outputs are unit norm and stable across threads") {
    HashEmbeddingProvider p;
    CHECK(p.dim() == 256);
    CHECK(p.model_id() == "hash-bow-fnv1a/256");
    std::vector<std::string> texts = {"fetch the weather", "book a hotel", "compare flight prices", "send the report"};
    auto ref = p.embed(texts);
    for (const auto& v : ref) CHECK(std::abs(v.norm() - 1.0) < 1e-9);
    std::vector<std::thread> threads;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&] {
            for (int i = 0; i < 50; ++i)
                if (p.embed(texts) != ref) ++mismatches;
        });
    for (auto& t : threads) t.join();
    CHECK(mismatches == 0);
}

TEST_CASE("embedding config parsing") {
    auto c = parse_embedding_config(R"({"kind":"hash","dim":64})");
    CHECK(c.kind == "hash");
    CHECK(make_embedding_provider(c)->dim() == 64);
    CHECK(parse_embedding_config("{}").kind == "hash");
    CHECK_THROWS_AS(parse_embedding_config(R"({"kind":"hash","colour":1})"), ConfigError);
    CHECK_THROWS_AS(parse_embedding_config(R"({"kind":"quantum"})"), ConfigError);
    CHECK_THROWS_AS(parse_embedding_config(R"({"kind":"http"})"), ConfigError);
}
