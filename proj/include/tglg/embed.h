// Copyright 2026 The TGLG Toolkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Sentence embedding providers: a hermetic hashing mock, an HTTP client for
// the embedding sidecar, and an LRU cache that wraps either.

#ifndef TGLG_EMBED_H_
#define TGLG_EMBED_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace tglg {

// Unit-norm embedding. Construction normalizes; a zero (or non-finite)
// vector is rejected with ProtocolError.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  static EmbeddingVector normalized(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  explicit EmbeddingVector(std::vector<double> v) : values_(std::move(v)) {}
  std::vector<double> values_;
};

// cos(a, b) computed as dot / sqrt(|a|^2 |b|^2), clamped to [-1, 1]. Equal
// inputs give exactly 1.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// (1 + cos) / 2, clamped to [0, 1].
double rescaled_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Implementations must be safe for concurrent callers and return one vector
// per input text, in order.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
  virtual std::string model_id() const = 0;
};

// Deterministic test double: signed feature hashing of lowercased byte
// trigrams of "^" + text + "$" into `dim` buckets. Equal strings give
// bit-identical vectors on every platform.
class MockEmbedder : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDim = 64;
  static constexpr std::size_t kNgram = 3;

  explicit MockEmbedder(std::size_t dim = kDefaultDim);

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  std::string model_id() const override;

  EmbeddingVector embed_one(const std::string& text) const;
  // Unit vector on the first axis; the image of the empty string.
  EmbeddingVector reserved_vector() const;

 private:
  std::size_t dim_;
};

struct RemoteOptions {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::seconds connect_timeout{5};
  std::chrono::seconds read_timeout{60};
  std::size_t max_batch = 256;
};

// Client for the sidecar wire protocol:
//   POST /embed  {"texts": [...]}
//   200          {"model": id, "dim": d, "vectors": [[...], ...]}
//   400          {"error": "..."}
// Transient failures (connection errors, 5xx) are retried with exponential
// backoff; after max_attempts a TransportError is thrown. Contract
// violations raise ProtocolError naming the field.
class RemoteEmbedder : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(std::string endpoint, RemoteOptions options = {});

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  std::string model_id() const override;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);

  std::string endpoint_;
  RemoteOptions options_;
  mutable std::mutex mu_;
  std::string model_id_;
};

// Exact-string LRU cache in front of another provider. Misses within one
// call are deduplicated and forwarded as a single inner batch. Errors from
// the inner provider propagate and leave the cache untouched.
class CachedEmbedder : public EmbeddingProvider {
 public:
  CachedEmbedder(std::shared_ptr<EmbeddingProvider> inner, std::size_t capacity);

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  std::string model_id() const override { return inner_->model_id(); }

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  using Lru = std::list<std::pair<std::string, EmbeddingVector>>;

  std::shared_ptr<EmbeddingProvider> inner_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  Lru lru_;
  std::unordered_map<std::string, Lru::iterator> index_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// Remote provider when `endpoint` is non-empty, else the mock; either way
// wrapped in a cache of the given capacity.
std::shared_ptr<EmbeddingProvider> make_provider(const std::string& endpoint,
                                                 std::size_t cache_capacity = 4096);

// 64-bit FNV-1a. Exposed for the oracle tests.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace tglg

#endif  // TGLG_EMBED_H_
