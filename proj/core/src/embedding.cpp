#include "semdrift/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "semdrift/common.hpp"
#include "semdrift/csv.hpp"
#include "semdrift/random.hpp"

namespace semdrift {

namespace {

constexpr char kBinaryMagic[8] = {'S', 'D', 'E', 'M', 'B', 'v', '1', '\n'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

std::uint64_t get_le(std::istream& in, int bytes, const std::string& src) {
  unsigned char b[8] = {};
  if (!in.read(reinterpret_cast<char*>(b), bytes)) {
    throw FormatError(src + ": truncated embedding file");
  }
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

EmbeddingTable read_binary(std::istream& in, const std::string& src) {
  EmbeddingTable t;
  const auto id_len = get_le(in, 4, src);
  if (id_len > 4096) throw FormatError(src + ": provider id too long");
  t.provider_id.resize(id_len);
  if (!in.read(t.provider_id.data(), static_cast<std::streamsize>(id_len))) {
    throw FormatError(src + ": truncated embedding file");
  }
  t.dim = static_cast<int>(get_le(in, 4, src));
  if (t.dim <= 0) throw FormatError(src + ": non-positive dimension");
  const auto count = get_le(in, 8, src);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto hash = get_le(in, 8, src);
    std::vector<double> v(static_cast<std::size_t>(t.dim));
    for (auto& x : v) x = std::bit_cast<double>(get_le(in, 8, src));
    t.rows[hash] = std::move(v);
  }
  return t;
}

EmbeddingTable read_csv_table(std::istream& in, const std::string& src) {
  EmbeddingTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_dim = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto key = line.substr(1, eq - 1);
      const auto val = line.substr(eq + 1);
      if (key == "provider_id") {
        t.provider_id = val;
      } else if (key == "dim") {
        const auto d = csv::parse_double(val);
        if (!d || *d < 1 || *d != std::floor(*d)) {
          throw FormatError(src + ": bad dim header");
        }
        t.dim = static_cast<int>(*d);
        have_dim = true;
      }
      continue;
    }
    if (!have_dim) throw FormatError(src + ": data row before #dim header");
    const auto f = csv::split_line(line);
    if (f.size() != static_cast<std::size_t>(t.dim) + 1) {
      throw FormatError(src + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.dim + 1) + " fields");
    }
    const auto hash = parse_hex64(f[0]);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(t.dim));
    for (std::size_t i = 1; i < f.size(); ++i) {
      const auto x = csv::parse_double(f[i]);
      if (!x) {
        throw FormatError(src + ":" + std::to_string(lineno) +
                          ": non-numeric component");
      }
      v.push_back(*x);
    }
    t.rows[hash] = std::move(v);
  }
  if (!have_dim) throw FormatError(src + ": missing #dim header");
  return t;
}

std::vector<std::uint64_t> sorted_keys(const EmbeddingTable& t) {
  std::vector<std::uint64_t> keys;
  keys.reserve(t.rows.size());
  for (const auto& [k, v] : t.rows) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> v) : values(std::move(v)) {
  double ss = 0;
  for (double x : values) ss += x * x;
  norm = std::sqrt(ss);
}

std::uint64_t sentence_hash(std::string_view sentence) {
  return fnv1a64(sentence);
}

StubProvider::StubProvider(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 1) throw std::invalid_argument("stub dimension must be >= 1");
}

std::string StubProvider::id() const {
  return "stub-gauss-v1-d" + std::to_string(dim_) + "-s" + std::to_string(seed_);
}

std::vector<double> StubProvider::project(std::string_view sentence, int dim,
                                          std::uint64_t seed) {
  Rng rng(mix64(sentence_hash(sentence) ^ seed));
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = standard_normal(rng);
  return v;
}

std::vector<std::vector<double>> StubProvider::embed_batch(
    std::span<const std::string> sentences) {
  std::vector<std::vector<double>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(project(s, dim_, seed_));
  return out;
}

EmbeddingTable read_embedding_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file " + path.string());
  char magic[8] = {};
  in.read(magic, 8);
  if (in.gcount() == 8 && std::memcmp(magic, kBinaryMagic, 8) == 0) {
    return read_binary(in, path.string());
  }
  in.clear();
  in.seekg(0);
  return read_csv_table(in, path.string());
}

void write_embedding_csv(const std::filesystem::path& path,
                         const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "#provider_id=" << table.provider_id << '\n'
      << "#dim=" << table.dim << '\n';
  for (auto k : sorted_keys(table)) {
    out << to_hex64(k);
    for (double x : table.rows.at(k)) out << ',' << csv::format_double(x);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_embedding_binary(const std::filesystem::path& path,
                            const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(kBinaryMagic, 8);
  put_u32(out, static_cast<std::uint32_t>(table.provider_id.size()));
  out.write(table.provider_id.data(),
            static_cast<std::streamsize>(table.provider_id.size()));
  put_u32(out, static_cast<std::uint32_t>(table.dim));
  put_u64(out, table.rows.size());
  for (auto k : sorted_keys(table)) {
    put_u64(out, k);
    for (double x : table.rows.at(k)) put_u64(out, std::bit_cast<std::uint64_t>(x));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

FileProvider::FileProvider(const std::filesystem::path& path)
    : FileProvider(read_embedding_file(path)) {}

FileProvider::FileProvider(EmbeddingTable table) : table_(std::move(table)) {
  for (const auto& [k, v] : table_.rows) {
    if (v.size() != static_cast<std::size_t>(table_.dim)) {
      throw FormatError("embedding row " + to_hex64(k) + " has wrong dimension");
    }
  }
}

std::vector<std::vector<double>> FileProvider::embed_batch(
    std::span<const std::string> sentences) {
  std::vector<std::vector<double>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    const auto h = sentence_hash(s);
    auto it = table_.rows.find(h);
    if (it == table_.rows.end()) {
      throw Error("no precomputed embedding for sentence hash " + to_hex64(h) +
                  ": \"" + s.substr(0, 80) + "\"");
    }
    out.push_back(it->second);
  }
  return out;
}

namespace {

struct UrlParts {
  std::string scheme_host_port;
  std::string prefix;
};

UrlParts split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start =
      url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

}  // namespace

HttpProvider::HttpProvider(std::string base_url, std::size_t max_batch,
                           int timeout_seconds)
    : base_url_(std::move(base_url)),
      max_batch_(max_batch == 0 ? 64 : max_batch),
      timeout_seconds_(timeout_seconds) {
  const auto u = split_url(base_url_);
  httplib::Client cli(u.scheme_host_port);
  cli.set_connection_timeout(timeout_seconds_);
  cli.set_read_timeout(timeout_seconds_);
  auto res = cli.Get(u.prefix + "/healthz");
  if (!res) {
    throw IoError("embedding service unreachable at " + base_url_ + ": " +
                  httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw IoError("embedding service /healthz returned " +
                  std::to_string(res->status));
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (!j.is_object() || !j.contains("provider_id") || !j.contains("dim") ||
      !j["provider_id"].is_string() || !j["dim"].is_number_integer()) {
    throw FormatError("malformed /healthz response");
  }
  provider_id_ = j["provider_id"].get<std::string>();
  dim_ = j["dim"].get<int>();
  if (dim_ < 1) throw FormatError("/healthz reported non-positive dim");
}

std::vector<std::vector<double>> HttpProvider::embed_batch(
    std::span<const std::string> sentences) {
  if (sentences.size() > max_batch_) {
    throw std::invalid_argument("batch exceeds provider limit");
  }
  const auto u = split_url(base_url_);
  httplib::Client cli(u.scheme_host_port);
  cli.set_connection_timeout(timeout_seconds_);
  cli.set_read_timeout(timeout_seconds_);
  nlohmann::json req = {{"sentences", nlohmann::json::array()}};
  for (const auto& s : sentences) req["sentences"].push_back(s);
  auto res = cli.Post(u.prefix + "/embed", req.dump(), "application/json");
  if (!res) {
    throw IoError("POST /embed failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw IoError("POST /embed returned " + std::to_string(res->status));
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (!j.is_object() || !j.contains("vectors") || !j["vectors"].is_array()) {
    throw FormatError("malformed /embed response");
  }
  if (j.value("provider_id", std::string()) != provider_id_) {
    throw FormatError("/embed provider_id changed mid-session");
  }
  if (j.value("dim", -1) != dim_) {
    throw FormatError("/embed dim does not match /healthz");
  }
  const auto& vecs = j["vectors"];
  if (vecs.size() != sentences.size()) {
    throw FormatError("/embed returned " + std::to_string(vecs.size()) +
                      " vectors for " + std::to_string(sentences.size()) +
                      " sentences");
  }
  std::vector<std::vector<double>> out;
  out.reserve(vecs.size());
  for (const auto& v : vecs) {
    if (!v.is_array() || v.size() != static_cast<std::size_t>(dim_)) {
      throw FormatError("/embed vector has wrong dimension");
    }
    out.push_back(v.get<std::vector<double>>());
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path EmbeddingCache::file_for(const std::filesystem::path& dir,
                                               const std::string& provider_id) {
  std::string safe;
  for (char c : provider_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    safe.push_back(ok ? c : '_');
  }
  return dir / (safe + ".emb.csv");
}

bool EmbeddingCache::lookup(const std::string& provider_id, std::uint64_t hash,
                            std::vector<double>& out) const {
  std::lock_guard lock(mu_);
  auto t = tables_.find(provider_id);
  if (t == tables_.end()) return false;
  auto r = t->second.rows.find(hash);
  if (r == t->second.rows.end()) return false;
  out = r->second;
  return true;
}

void EmbeddingCache::store(const std::string& provider_id, int dim,
                           std::uint64_t hash, std::vector<double> values) {
  std::lock_guard lock(mu_);
  auto& t = tables_[provider_id];
  if (t.provider_id.empty()) {
    t.provider_id = provider_id;
    t.dim = dim;
  } else if (t.dim != dim) {
    throw FormatError("cache dimension mismatch for provider " + provider_id);
  }
  t.rows[hash] = std::move(values);
}

std::size_t EmbeddingCache::size(const std::string& provider_id) const {
  std::lock_guard lock(mu_);
  auto t = tables_.find(provider_id);
  return t == tables_.end() ? 0 : t->second.rows.size();
}

void EmbeddingCache::load(const std::string& provider_id) {
  if (dir_.empty()) return;
  const auto file = file_for(dir_, provider_id);
  if (!std::filesystem::exists(file)) return;
  auto table = read_embedding_file(file);
  if (table.provider_id != provider_id) {
    throw FormatError(file.string() + " belongs to provider " +
                      table.provider_id);
  }
  std::lock_guard lock(mu_);
  auto& t = tables_[provider_id];
  if (t.provider_id.empty()) {
    t = std::move(table);
  } else {
    for (auto& [k, v] : table.rows) t.rows.try_emplace(k, std::move(v));
  }
}

void EmbeddingCache::flush() const {
  if (dir_.empty()) return;
  std::lock_guard lock(mu_);
  std::filesystem::create_directories(dir_);
  for (const auto& [id, t] : tables_) write_embedding_csv(file_for(dir_, id), t);
}

Embedder::Embedder(EmbeddingProvider& provider, EmbeddingCache& cache,
                   EmbedOptions options)
    : provider_(provider), cache_(cache), options_(options) {
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
  if (options_.retries < 0) options_.retries = 0;
}

std::vector<std::vector<double>> Embedder::call_with_retry(
    std::span<const std::string> batch) {
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    try {
      {
        std::lock_guard lock(calls_mu_);
        ++calls_;
      }
      auto out = provider_.embed_batch(batch);
      if (out.size() != batch.size()) {
        throw FormatError("provider returned wrong number of vectors");
      }
      return out;
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw Error("embedding provider " + provider_.id() + " failed after " +
              std::to_string(options_.retries + 1) + " attempts: " + last_error);
}

std::vector<EmbeddingVector> Embedder::embed(
    std::span<const std::string> sentences) {
  const std::string pid = provider_.id();
  const int dim = provider_.dim();

  // Distinct uncached sentences, in first-seen order.
  std::vector<std::string> missing;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  std::vector<double> tmp;
  for (const auto& s : sentences) {
    const auto h = sentence_hash(s);
    if (seen.contains(h) || cache_.lookup(pid, h, tmp)) continue;
    seen.emplace(h, missing.size());
    missing.push_back(s);
  }

  const std::size_t batch = std::max<std::size_t>(1, provider_.max_batch());
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t b = 0; b < missing.size(); b += batch) {
    ranges.emplace_back(b, std::min(missing.size(), b + batch));
  }
  try {
    for (std::size_t w = 0; w < ranges.size(); w += options_.max_in_flight) {
      const std::size_t wend = std::min(ranges.size(), w + options_.max_in_flight);
      std::vector<std::future<std::vector<std::vector<double>>>> inflight;
      for (std::size_t r = w; r < wend; ++r) {
        std::span<const std::string> part(missing.data() + ranges[r].first,
                                          ranges[r].second - ranges[r].first);
        inflight.push_back(std::async(
            wend - w > 1 ? std::launch::async : std::launch::deferred,
            [this, part] { return call_with_retry(part); }));
      }
      for (std::size_t r = w; r < wend; ++r) {
        auto vecs = inflight[r - w].get();
        for (std::size_t i = 0; i < vecs.size(); ++i) {
          auto& v = vecs[i];
          if (v.size() != static_cast<std::size_t>(dim)) {
            throw FormatError("provider returned vector of dimension " +
                              std::to_string(v.size()));
          }
          for (double x : v) {
            if (!std::isfinite(x)) throw NumericError("non-finite embedding");
          }
          cache_.store(pid, dim, sentence_hash(missing[ranges[r].first + i]),
                       std::move(v));
        }
      }
    }
  } catch (...) {
    cache_.flush();
    throw;
  }

  std::vector<EmbeddingVector> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    std::vector<double> v;
    if (!cache_.lookup(pid, sentence_hash(s), v)) {
      throw Error("embedding missing from cache after provider call");
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

}  // namespace semdrift
