#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace semdrift {

struct EmbeddingVector {
  std::vector<double> values;
  double norm = 0;

  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> v);
};

// Key used for caches and precomputed files: FNV-1a 64 of the UTF-8 bytes.
std::uint64_t sentence_hash(std::string_view sentence);

// A sentence encoder. Implementations must be deterministic for identical
// input and report a stable id and dimension.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  virtual std::size_t max_batch() const { return 64; }
  // One vector per sentence, same order. Throws on failure.
  virtual std::vector<std::vector<double>> embed_batch(
      std::span<const std::string> sentences) = 0;
};

// Test provider. Vector for sentence s: seed an mt19937_64 with
// mix64(sentence_hash(s) ^ seed) and draw dim standard normals with the
// Box-Muller helper in random.hpp (two engine draws per component).
class StubProvider final : public EmbeddingProvider {
 public:
  explicit StubProvider(int dim = 32, std::uint64_t seed = 0);

  std::string id() const override;
  int dim() const override { return dim_; }
  std::vector<std::vector<double>> embed_batch(
      std::span<const std::string> sentences) override;

  static std::vector<double> project(std::string_view sentence, int dim,
                                     std::uint64_t seed);

 private:
  int dim_;
  std::uint64_t seed_;
};

// Precomputed vectors keyed by sentence hash.
//
// CSV layout:
//   #provider_id=<id>
//   #dim=<D>
//   <16 hex digits>,<v1>,...,<vD>
//
// Binary layout (little-endian):
//   "SDEMBv1\n"  u32 id_len  id bytes  u32 dim  u64 count
//   count x { u64 hash, D x f64 }
struct EmbeddingTable {
  std::string provider_id;
  int dim = 0;
  std::unordered_map<std::uint64_t, std::vector<double>> rows;
};

// Detects the format from the leading bytes. Throws IoError / FormatError.
EmbeddingTable read_embedding_file(const std::filesystem::path& path);
void write_embedding_csv(const std::filesystem::path& path,
                         const EmbeddingTable& table);
void write_embedding_binary(const std::filesystem::path& path,
                            const EmbeddingTable& table);

class FileProvider final : public EmbeddingProvider {
 public:
  explicit FileProvider(const std::filesystem::path& path);
  explicit FileProvider(EmbeddingTable table);

  std::string id() const override { return table_.provider_id; }
  int dim() const override { return table_.dim; }
  std::size_t max_batch() const override { return SIZE_MAX; }
  // Throws Error when a sentence has no precomputed row.
  std::vector<std::vector<double>> embed_batch(
      std::span<const std::string> sentences) override;

 private:
  EmbeddingTable table_;
};

// Client for the sidecar's POST /embed and GET /healthz.
//   request:  {"sentences": [...]}
//   response: {"provider_id": str, "dim": int, "vectors": [[...], ...]}
class HttpProvider final : public EmbeddingProvider {
 public:
  // base_url like "http://127.0.0.1:8765". Queries /healthz for id and dim.
  explicit HttpProvider(std::string base_url, std::size_t max_batch = 64,
                        int timeout_seconds = 60);

  std::string id() const override { return provider_id_; }
  int dim() const override { return dim_; }
  std::size_t max_batch() const override { return max_batch_; }
  std::vector<std::vector<double>> embed_batch(
      std::span<const std::string> sentences) override;

 private:
  std::string base_url_;
  std::size_t max_batch_;
  int timeout_seconds_;
  std::string provider_id_;
  int dim_ = 0;
};

// Vectors keyed by (provider id, sentence hash). Reads are concurrent; writes
// are serialized. With a directory, the cache persists one CSV per provider
// at <dir>/<sanitized provider id>.emb.csv in the EmbeddingTable format.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path dir);

  bool lookup(const std::string& provider_id, std::uint64_t hash,
              std::vector<double>& out) const;
  void store(const std::string& provider_id, int dim, std::uint64_t hash,
             std::vector<double> values);
  std::size_t size(const std::string& provider_id) const;

  // No-ops without a directory.
  void load(const std::string& provider_id);
  void flush() const;

  static std::filesystem::path file_for(const std::filesystem::path& dir,
                                        const std::string& provider_id);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, EmbeddingTable> tables_;
};

struct EmbedOptions {
  int retries = 3;             // extra attempts per batch after a failure
  std::size_t max_in_flight = 1;  // concurrent provider batches
};

// Provider + cache + retry policy.
class Embedder {
 public:
  Embedder(EmbeddingProvider& provider, EmbeddingCache& cache,
           EmbedOptions options = {});

  // One vector per input sentence, order-preserving. Each distinct sentence
  // is sent to the provider at most once per cache. On a persistent provider
  // failure the cache is flushed and Error is thrown.
  std::vector<EmbeddingVector> embed(std::span<const std::string> sentences);

  const EmbeddingProvider& provider() const { return provider_; }
  std::size_t provider_calls() const { return calls_; }

 private:
  std::vector<std::vector<double>> call_with_retry(
      std::span<const std::string> batch);

  EmbeddingProvider& provider_;
  EmbeddingCache& cache_;
  EmbedOptions options_;
  std::size_t calls_ = 0;
  std::mutex calls_mu_;
};

}  // namespace semdrift
