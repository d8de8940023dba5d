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

#include "tglg/embed.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "tglg/errors.h"

namespace tglg {

using json = nlohmann::json;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

constexpr double kNormTolerance = 1e-6;

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  double sq = 0.0;
  for (double x : values) {
    if (!std::isfinite(x)) throw ProtocolError("embedding has a non-finite component");
    sq += x * x;
  }
  if (values.empty() || sq == 0.0) throw ProtocolError("embedding is a zero vector");
  const double norm = std::sqrt(sq);
  if (std::abs(norm - 1.0) > kNormTolerance) {
    for (double& x : values) x /= norm;
  }
  return EmbeddingVector(std::move(values));
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw StructuralError("embedding dimensions differ");
  const double ab = dot(a.values(), b.values());
  const double aa = dot(a.values(), a.values());
  const double bb = dot(b.values(), b.values());
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

double rescaled_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return std::clamp((1.0 + cosine(a, b)) / 2.0, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// MockEmbedder

MockEmbedder::MockEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ParameterError("mock embedding dimension must be positive");
}

std::string MockEmbedder::model_id() const {
  return "mock-trigram-" + std::to_string(dim_);
}

EmbeddingVector MockEmbedder::reserved_vector() const {
  std::vector<double> v(dim_, 0.0);
  v[0] = 1.0;
  return EmbeddingVector::normalized(std::move(v));
}

EmbeddingVector MockEmbedder::embed_one(const std::string& text) const {
  if (text.empty()) return reserved_vector();
  std::string padded;
  padded.reserve(text.size() + 2);
  padded.push_back('^');
  for (unsigned char c : text) {
    padded.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  padded.push_back('$');

  std::vector<double> v(dim_, 0.0);
  for (std::size_t i = 0; i + kNgram <= padded.size(); ++i) {
    const std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, kNgram));
    const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
    v[h % dim_] += sign;
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
    return reserved_vector();
  }
  return EmbeddingVector::normalized(std::move(v));
}

std::vector<EmbeddingVector> MockEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

// ---------------------------------------------------------------------------
// RemoteEmbedder

RemoteEmbedder::RemoteEmbedder(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (endpoint_.empty()) throw ParameterError("embedding endpoint is empty");
  if (options_.max_attempts < 1) throw ParameterError("max_attempts must be >= 1");
  if (options_.max_batch < 1) throw ParameterError("max_batch must be >= 1");
}

std::string RemoteEmbedder::model_id() const {
  std::lock_guard lock(mu_);
  return model_id_.empty() ? "remote:" + endpoint_ : model_id_;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t pos = 0; pos < texts.size(); pos += options_.max_batch) {
    const std::size_t n = std::min(options_.max_batch, texts.size() - pos);
    auto part = embed_batch(texts.subspan(pos, n));
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  const std::string body = json{{"texts", json(std::vector<std::string>(texts.begin(), texts.end()))}}.dump();

  std::string last_failure;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(endpoint_);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.read_timeout);
    auto res = client.Post("/embed", body, "application/json");
    if (!res) {
      last_failure = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      std::string detail = res->body;
      try {
        auto err = json::parse(res->body);
        if (err.contains("error") && err["error"].is_string()) detail = err["error"];
      } catch (const json::exception&) {
      }
      throw ProtocolError("embedding service returned HTTP " + std::to_string(res->status) +
                          ": " + detail);
    }

    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("response is not valid JSON: ") + e.what());
    }
    if (!reply.is_object()) throw ProtocolError("response must be a JSON object");
    if (!reply.contains("model") || !reply["model"].is_string()) {
      throw ProtocolError("response field 'model' missing or not a string");
    }
    if (!reply.contains("dim") || !reply["dim"].is_number_integer() || reply["dim"].get<long>() < 1) {
      throw ProtocolError("response field 'dim' missing or not a positive integer");
    }
    if (!reply.contains("vectors") || !reply["vectors"].is_array()) {
      throw ProtocolError("response field 'vectors' missing or not an array");
    }
    const auto dim = reply["dim"].get<std::size_t>();
    const auto& vectors = reply["vectors"];
    if (vectors.size() != texts.size()) {
      throw ProtocolError("response field 'vectors' has " + std::to_string(vectors.size()) +
                          " entries for " + std::to_string(texts.size()) + " texts");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      const auto& v = vectors[i];
      if (!v.is_array() || v.size() != dim) {
        throw ProtocolError("response field 'vectors[" + std::to_string(i) +
                            "]' does not have dimension " + std::to_string(dim));
      }
      std::vector<double> values;
      values.reserve(dim);
      for (const auto& x : v) {
        if (!x.is_number()) {
          throw ProtocolError("response field 'vectors[" + std::to_string(i) + "]' has a non-number");
        }
        values.push_back(x.get<double>());
      }
      try {
        out.push_back(EmbeddingVector::normalized(std::move(values)));
      } catch (const ProtocolError& e) {
        throw ProtocolError("response field 'vectors[" + std::to_string(i) + "]': " + e.what());
      }
    }
    {
      std::lock_guard lock(mu_);
      model_id_ = reply["model"].get<std::string>();
    }
    return out;
  }
  throw TransportError("embedding service at " + endpoint_ + " unavailable after " +
                       std::to_string(options_.max_attempts) + " attempts (" + last_failure + ")");
}

// ---------------------------------------------------------------------------
// CachedEmbedder

CachedEmbedder::CachedEmbedder(std::shared_ptr<EmbeddingProvider> inner, std::size_t capacity)
    : inner_(std::move(inner)), capacity_(capacity) {
  if (!inner_) throw ParameterError("cached provider needs an inner provider");
  if (capacity_ < 1) throw ParameterError("cache capacity must be >= 1");
}

std::size_t CachedEmbedder::size() const {
  std::lock_guard lock(mu_);
  return lru_.size();
}
std::size_t CachedEmbedder::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}
std::size_t CachedEmbedder::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

std::vector<EmbeddingVector> CachedEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<std::size_t> pending;
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mu_);
    std::unordered_set<std::string> queued;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      auto it = index_.find(texts[i]);
      if (it != index_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        out[i] = it->second->second;
        ++hits_;
      } else {
        pending.push_back(i);
        if (queued.insert(texts[i]).second) missing.push_back(texts[i]);
        ++misses_;
      }
    }
  }
  if (missing.empty()) return out;

  // The inner call runs without the lock; concurrent misses on the same text
  // may both reach the inner provider, which is harmless.
  auto fresh = inner_->embed(missing);
  if (fresh.size() != missing.size()) {
    throw ProtocolError("inner provider returned " + std::to_string(fresh.size()) +
                        " vectors for " + std::to_string(missing.size()) + " texts");
  }
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t k = 0; k < missing.size(); ++k) pos.emplace(missing[k], k);
  for (std::size_t i : pending) out[i] = fresh[pos.at(texts[i])];

  std::lock_guard lock(mu_);
  for (std::size_t k = 0; k < missing.size(); ++k) {
    auto it = index_.find(missing[k]);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      continue;
    }
    lru_.emplace_front(missing[k], fresh[k]);
    index_[missing[k]] = lru_.begin();
    while (lru_.size() > capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
  }
  return out;
}

std::shared_ptr<EmbeddingProvider> make_provider(const std::string& endpoint,
                                                 std::size_t cache_capacity) {
  std::shared_ptr<EmbeddingProvider> base;
  if (endpoint.empty()) {
    base = std::make_shared<MockEmbedder>();
  } else {
    base = std::make_shared<RemoteEmbedder>(endpoint);
  }
  return std::make_shared<CachedEmbedder>(std::move(base), cache_capacity);
}

}  // namespace tglg
