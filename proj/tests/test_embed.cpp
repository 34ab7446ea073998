#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stub_server.hpp"
#include "vlbridge/embed.hpp"
#include "vlbridge/error.hpp"
#include "vlbridge/remote.hpp"

using namespace vlb;

namespace {

double norm(const EmbeddingVector& e) {
  double s = 0.0;
  for (double x : e.values()) s += x * x;
  return std::sqrt(s);
}

EmbedderSpec remote_spec(const std::string& endpoint) {
  EmbedderSpec s;
  s.kind = EmbedderSpec::Kind::kRemote;
  s.endpoint = endpoint;
  s.timeout_ms = 2000;
  return s;
}

}  // namespace

TEST(HashEmbedder, DeterministicUnitNorm) {
  const HashEmbedder h(256);
  const auto a = h.embed_text("abc"), b = h.embed_text("abc");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.dim(), 256U);
  EXPECT_NEAR(norm(a), 1.0, 1e-6);
  EXPECT_EQ(HashEmbedder(256).embed_text("abc"), a);
  EXPECT_THROW(HashEmbedder(8), Error);
}

TEST(HashEmbedder, OrderSensitive) {
  const HashEmbedder h;
  const auto a = h.embed_text("dog bites man"), b = h.embed_text("man bites dog");
  EXPECT_NE(a, b);
  EXPECT_LT(cosine_similarity(a.values(), b.values()), 1.0 - 1e-6);
}

TEST(HashEmbedder, BatchEqualsSingle) {
  const HashEmbedder h(64);
  const std::vector<std::string> texts = {"person opens the door", "a red car", "x"};
  const auto batch = h.embed(texts);
  ASSERT_EQ(batch.size(), 3U);
  for (std::size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(batch[i], h.embed_one(texts[i]));
}

TEST(EmbedTexts, RejectsEmptyInputs) {
  const HashEmbedder h;
  EXPECT_THROW(embed_texts(h, std::vector<std::string>{}), Error);
  EXPECT_THROW(embed_texts(h, std::vector<std::string>{"ok", "  "}), Error);
}

TEST(EmbedWithContext, AbsentDropEqualsRenderedSentence) {
  const HashEmbedder h;
  const PromptContext ctx("Rewrite '{text}' at word {index}");
  const std::vector<std::string> tokens = {"person", "opens", "the", "door"};
  EXPECT_EQ(embed_with_context(h, ctx, tokens, std::nullopt, 1), h.embed_text("Rewrite 'person opens the door' at word 2"));
  EXPECT_EQ(embed_with_context(h, ctx, tokens, 2, 1), h.embed_text("Rewrite 'person opens door' at word 2"));
  EXPECT_THROW(embed_with_context(h, ctx, tokens, 4), Error);
  EXPECT_THROW(embed_with_context(h, ctx, std::vector<std::string>{"solo"}, 0), Error);
}

TEST(EmbedWithContext, FeatureNeutralDropGivesCosineOne) {
  // Search short sentences for a token whose removal keeps the feature set,
  // so the hash embedding is unchanged ("a a a" minus one "a" keeps the
  // trigram and bigram sets of the remaining "a a").
  const HashEmbedder h;
  const auto plain = PromptContext::plain();
  const std::vector<std::string> vocab = {"a", "b", "go"};
  bool found = false;
  for (std::size_t n = 2; n <= 4 && !found; ++n) {
    std::vector<std::size_t> idx(n, 0);
    while (!found) {
      std::vector<std::string> tokens;
      for (auto i : idx) tokens.push_back(vocab[i]);
      const auto full = embed_with_context(h, plain, tokens, std::nullopt);
      for (std::size_t d = 0; d < n && !found; ++d) {
        if (embed_with_context(h, plain, tokens, d) == full) {
          found = true;
          EXPECT_NEAR(cosine_similarity(full.values(), embed_with_context(h, plain, tokens, d).values()), 1.0, 1e-12);
        }
      }
      std::size_t k = 0;
      while (k < n && ++idx[k] == vocab.size()) idx[k++] = 0;
      if (k == n) break;
    }
  }
  EXPECT_TRUE(found);
}

TEST(RemoteEmbedder, PassesThroughStubVectorsNormalized) {
  StubServer stub;
  stub.on("/embed", [](const nlohmann::json& body) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < body.at("texts").size(); ++i) {
      out.push_back(i % 2 == 0 ? nlohmann::json::array({0, 2}) : nlohmann::json::array({3, 0}));
    }
    return nlohmann::json{{"embeddings", out}};
  });
  stub.start();
  const RemoteEmbedder e(remote_spec(stub.endpoint()), 2);
  const auto v = e.embed(std::vector<std::string>{"x", "y"});
  ASSERT_EQ(v.size(), 2U);
  EXPECT_EQ(std::vector<double>(v[0].values().begin(), v[0].values().end()), (std::vector<double>{0, 1}));
  EXPECT_EQ(std::vector<double>(v[1].values().begin(), v[1].values().end()), (std::vector<double>{1, 0}));
}

TEST(RemoteEmbedder, BatchesPreserveOrder) {
  StubServer stub;
  stub.on("/embed", [](const nlohmann::json& body) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : body.at("texts")) {
      const double k = std::stod(t.get<std::string>());
      out.push_back({1.0, k});
    }
    return nlohmann::json{{"embeddings", out}};
  });
  stub.start();
  auto spec = remote_spec(stub.endpoint());
  spec.max_batch = 3;
  const RemoteEmbedder e(spec, 3);
  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) texts.push_back(std::to_string(i));
  const auto v = e.embed(texts);
  ASSERT_EQ(v.size(), 10U);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(v[i][1] / v[i][0], i, 1e-12);
  EXPECT_EQ(stub.requests(), 4);
}

TEST(RemoteEmbedder, LengthMismatchAndFailuresAreErrors) {
  StubServer stub;
  stub.on("/embed", [](const nlohmann::json&) { return nlohmann::json{{"embeddings", {{1, 0}}}}; });
  stub.on("/broken", [](const nlohmann::json&) { return nlohmann::json(); });
  stub.start();
  const RemoteEmbedder e(remote_spec(stub.endpoint()), 1);
  try {
    e.embed(std::vector<std::string>{"a", "b"});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kRemote);
  }
  try {
    post_json(stub.endpoint(), "/broken", nlohmann::json::object(), 1000, {3, std::chrono::milliseconds(1)});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kRemote);
    EXPECT_NE(std::string(err.what()).find("3 attempts"), std::string::npos) << err.what();
  }
}

TEST(MemoizingEmbedder, CachesByExactText) {
  StubServer stub;
  stub.on("/embed", [](const nlohmann::json& body) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < body.at("texts").size(); ++i) out.push_back({1, 1});
    return nlohmann::json{{"embeddings", out}};
  });
  stub.start();
  const MemoizingEmbedder m(std::make_shared<RemoteEmbedder>(remote_spec(stub.endpoint()), 1));
  m.embed(std::vector<std::string>{"a", "b"});
  m.embed(std::vector<std::string>{"b", "a"});
  EXPECT_EQ(stub.requests(), 1);
}
