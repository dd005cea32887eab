#include "semdrift/embedding.hpp"

#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "oracle.hpp"
#include "semdrift/common.hpp"
#include "test_util.hpp"

namespace sd = semdrift;
using testutil::TempDir;

namespace {

// Counts calls and can fail the first N of them.
class FlakyProvider : public sd::EmbeddingProvider {
 public:
  explicit FlakyProvider(int failures, std::size_t batch = 4)
      : failures_(failures), batch_(batch) {}

  std::string id() const override { return "flaky"; }
  int dim() const override { return 4; }
  std::size_t max_batch() const override { return batch_; }
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> s) override {
    ++calls;
    sent += s.size();
    if (failures_-- > 0) throw sd::IoError("transient");
    std::vector<std::vector<double>> out;
    for (const auto& x : s) out.push_back(sd::StubProvider::project(x, 4, 0));
    return out;
  }

  std::atomic<int> calls{0};
  std::atomic<std::size_t> sent{0};

 private:
  std::atomic<int> failures_;
  std::size_t batch_;
};

// In-process stand-in for the embedding service.
class FakeService {
 public:
  explicit FakeService(std::string id = "fake-model-v1", int dim = 3) : id_(std::move(id)), dim_(dim) {
    svr_.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::json j = {{"status", "ok"}, {"provider_id", id_}, {"dim", dim_}};
      res.set_content(j.dump(), "application/json");
    });
    svr_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      auto j = nlohmann::json::parse(req.body, nullptr, false);
      if (!j.is_object() || !j.contains("sentences")) {
        res.status = 400;
        return;
      }
      if (j["sentences"].size() > 8) {
        res.status = 413;
        return;
      }
      if (fail_next > 0) {
        --fail_next;
        res.status = 503;
        return;
      }
      nlohmann::json vecs = nlohmann::json::array();
      for (const auto& s : j["sentences"]) {
        const auto text = s.get<std::string>();
        std::vector<double> v(static_cast<std::size_t>(dim_));
        for (int d = 0; d < dim_; ++d) v[d] = static_cast<double>(text.size()) + d;
        vecs.push_back(v);
      }
      if (short_response) vecs.erase(vecs.begin());
      nlohmann::json out = {{"provider_id", id_}, {"dim", dim_}, {"vectors", vecs}};
      res.set_content(out.dump(), "application/json");
    });
    port_ = svr_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { svr_.listen_after_bind(); });
    svr_.wait_until_ready();
  }
  ~FakeService() {
    svr_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> requests{0};
  std::atomic<int> fail_next{0};
  std::atomic<bool> short_response{false};

 private:
  std::string id_;
  int dim_;
  httplib::Server svr_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(Stub, MatchesIndependentProjection) {
  for (const std::string s : {"", "The mental_health of nations.", "x"}) {
    EXPECT_EQ(sd::StubProvider::project(s, 32, 42), oracle::stub_vector(s, 32, 42)) << s;
  }
  sd::StubProvider p(8, 1);
  EXPECT_EQ(p.id(), "stub-gauss-v1-d8-s1");
  std::vector<std::string> in = {"a", "a", "b"};
  auto out = p.embed_batch(in);
  EXPECT_EQ(out[0], out[1]);
  EXPECT_NE(out[0], out[2]);
  EXPECT_EQ(out[0].size(), 8u);
}

TEST(SentenceHash, IsFnv) { EXPECT_EQ(sd::sentence_hash("a"), 0xaf63dc4c8601ec8cULL); }

TEST(EmbeddingFile, CsvAndBinaryRoundTrip) {
  TempDir dir;
  sd::EmbeddingTable t{"model-x v2", 3, {}};
  t.rows[sd::sentence_hash("one")] = {0.1, -2.5, 1e-300};
  t.rows[sd::sentence_hash("two")] = {1.0 / 3.0, 0, 7};
  sd::write_embedding_csv(dir / "e.csv", t);
  sd::write_embedding_binary(dir / "e.bin", t);
  for (const auto* name : {"e.csv", "e.bin"}) {
    auto back = sd::read_embedding_file(dir / name);
    EXPECT_EQ(back.provider_id, t.provider_id) << name;
    EXPECT_EQ(back.dim, 3);
    EXPECT_EQ(back.rows, t.rows) << name;
  }
  const auto csv = testutil::read_file(dir / "e.csv");
  EXPECT_EQ(csv.rfind("#provider_id=model-x v2\n#dim=3\n", 0), 0u);
  EXPECT_EQ(testutil::read_file(dir / "e.bin").substr(0, 8), "SDEMBv1\n");
}

TEST(EmbeddingFile, Malformed) {
  TempDir dir;
  auto a = testutil::write_file(dir / "a.csv", "#provider_id=x\n0000000000000001,1,2\n");
  EXPECT_THROW(sd::read_embedding_file(a), sd::FormatError);
  auto b = testutil::write_file(dir / "b.csv", "#provider_id=x\n#dim=2\n0000000000000001,1\n");
  EXPECT_THROW(sd::read_embedding_file(b), sd::FormatError);
  auto c = testutil::write_file(dir / "c.bin", std::string("SDEMBv1\n\x05\x00\x00\x00" "ab", 14));
  EXPECT_THROW(sd::read_embedding_file(c), sd::FormatError);
  EXPECT_THROW(sd::read_embedding_file(dir / "missing"), sd::IoError);
}

TEST(FileProvider, LooksUpByHash) {
  sd::EmbeddingTable t{"pre", 2, {}};
  t.rows[sd::sentence_hash("known")] = {1, 2};
  sd::FileProvider p(t);
  std::vector<std::string> ok = {"known"};
  EXPECT_EQ(p.embed_batch(ok)[0], (std::vector<double>{1, 2}));
  std::vector<std::string> bad = {"unknown"};
  EXPECT_THROW(p.embed_batch(bad), sd::Error);
  sd::EmbeddingTable wrong{"pre", 3, {}};
  wrong.rows[1] = {1, 2};
  EXPECT_THROW(sd::FileProvider{wrong}, sd::FormatError);
}

TEST(Embedder, EmptyInput) {
  sd::StubProvider p;
  sd::EmbeddingCache cache;
  sd::Embedder e(p, cache);
  EXPECT_TRUE(e.embed({}).empty());
  EXPECT_EQ(e.provider_calls(), 0u);
}

TEST(Embedder, DedupesAndCaches) {
  FlakyProvider p(0, 2);
  sd::EmbeddingCache cache;
  sd::Embedder e(p, cache);
  std::vector<std::string> s = {"a", "b", "a", "c", "b"};
  auto v = e.embed(s);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_EQ(v[0].values, v[2].values);
  EXPECT_EQ(p.sent.load(), 3u);
  EXPECT_EQ(p.calls.load(), 2);
  e.embed(s);
  EXPECT_EQ(p.calls.load(), 2);
  EXPECT_EQ(cache.size("flaky"), 3u);
}

TEST(Embedder, RetriesThenSucceeds) {
  FlakyProvider p(2);
  sd::EmbeddingCache cache;
  sd::Embedder e(p, cache, {3, 1});
  std::vector<std::string> s = {"x"};
  EXPECT_EQ(e.embed(s).size(), 1u);
  EXPECT_EQ(p.calls.load(), 3);
}

TEST(Embedder, PersistentFailureFlushesCache) {
  TempDir dir;
  FlakyProvider ok(0, 2);
  sd::EmbeddingCache cache(dir.path());
  {
    sd::Embedder e(ok, cache);
    std::vector<std::string> s = {"a", "b"};
    e.embed(s);
  }
  FlakyProvider bad(100, 2);
  sd::Embedder e(bad, cache, {1, 1});
  std::vector<std::string> s = {"c"};
  EXPECT_THROW(e.embed(s), sd::Error);
  EXPECT_EQ(bad.calls.load(), 2);
  auto saved = sd::read_embedding_file(sd::EmbeddingCache::file_for(dir.path(), "flaky"));
  EXPECT_EQ(saved.rows.size(), 2u);
}

TEST(Embedder, ConcurrentBatchesPreserveOrder) {
  FlakyProvider p(0, 3);
  sd::EmbeddingCache cache;
  sd::Embedder e(p, cache, {0, 4});
  std::vector<std::string> s;
  for (int i = 0; i < 40; ++i) s.push_back("s" + std::to_string(i));
  auto v = e.embed(s);
  for (int i = 0; i < 40; ++i) EXPECT_EQ(v[i].values, sd::StubProvider::project(s[i], 4, 0));
  EXPECT_EQ(p.calls.load(), 14);
}

TEST(Cache, PersistsAndReloads) {
  TempDir dir;
  {
    sd::EmbeddingCache c(dir.path());
    c.store("model/a:b", 2, 42, {1.5, 2.5});
    c.flush();
  }
  const auto file = sd::EmbeddingCache::file_for(dir.path(), "model/a:b");
  EXPECT_EQ(file.filename().string(), "model_a_b.emb.csv");
  sd::EmbeddingCache c(dir.path());
  c.load("model/a:b");
  std::vector<double> v;
  ASSERT_TRUE(c.lookup("model/a:b", 42, v));
  EXPECT_EQ(v, (std::vector<double>{1.5, 2.5}));
  EXPECT_FALSE(c.lookup("other", 42, v));
  EXPECT_THROW(c.store("model/a:b", 3, 1, {1, 2, 3}), sd::FormatError);
}

TEST(Cache, RejectsForeignFile) {
  TempDir dir;
  sd::EmbeddingTable t{"someone-else", 1, {}};
  sd::write_embedding_csv(sd::EmbeddingCache::file_for(dir.path(), "mine"), t);
  sd::EmbeddingCache c(dir.path());
  EXPECT_THROW(c.load("mine"), sd::FormatError);
}

TEST(HttpProvider, HealthAndEmbed) {
  FakeService svc;
  sd::HttpProvider p(svc.url(), 8, 5);
  EXPECT_EQ(p.id(), "fake-model-v1");
  EXPECT_EQ(p.dim(), 3);
  std::vector<std::string> s = {"", "abc", "abc"};
  auto v = p.embed_batch(s);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(v[1], v[2]);
}

TEST(HttpProvider, BatchingThroughEmbedder) {
  FakeService svc;
  sd::HttpProvider p(svc.url(), 8, 5);
  sd::EmbeddingCache cache;
  sd::Embedder e(p, cache, {0, 2});
  std::vector<std::string> s;
  for (int i = 0; i < 20; ++i) s.push_back(std::string(static_cast<std::size_t>(i), 'x'));
  auto v = e.embed(s);
  ASSERT_EQ(v.size(), 20u);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(v[i].values[0], i);
  EXPECT_EQ(svc.requests.load(), 3);
}

TEST(HttpProvider, RetriesServiceErrors) {
  FakeService svc;
  svc.fail_next = 2;
  sd::HttpProvider p(svc.url(), 8, 5);
  sd::EmbeddingCache cache;
  sd::Embedder e(p, cache, {3, 1});
  std::vector<std::string> s = {"hello"};
  EXPECT_EQ(e.embed(s)[0].values[0], 5.0);
  EXPECT_EQ(svc.requests.load(), 3);
}

TEST(HttpProvider, ValidatesResponses) {
  FakeService svc;
  sd::HttpProvider p(svc.url(), 64, 5);
  std::vector<std::string> big(9, "x");
  EXPECT_THROW(p.embed_batch(big), sd::IoError);  // 413 from the service
  svc.short_response = true;
  std::vector<std::string> two = {"a", "b"};
  EXPECT_THROW(p.embed_batch(two), sd::FormatError);
}

TEST(HttpProvider, Unreachable) {
  EXPECT_THROW(sd::HttpProvider("http://127.0.0.1:1", 8, 1), sd::IoError);
}
