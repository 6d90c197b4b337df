// Copyright 2026 The artlang Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================
#include "artlang/score_cache.hpp"

#include <algorithm>

#include <glog/logging.h>
#include <nlohmann/json.hpp>
#include <sqlite3.h>

#include "artlang/error.hpp"
#include "artlang/hashing.hpp"
#include "artlang/io.hpp"

namespace artlang {

struct ScoreCache::Impl {
  sqlite3* db = nullptr;
  sqlite3_stmt* get = nullptr;
  sqlite3_stmt* put = nullptr;

  void Check(int rc, const char* what) const {
    if (rc != SQLITE_OK && rc != SQLITE_DONE && rc != SQLITE_ROW) {
      throw EnvironmentError(std::string("score cache: ") + what + ": " + sqlite3_errmsg(db));
    }
  }
};

ScoreCache::ScoreCache(const std::filesystem::path& db_path) : impl_(std::make_unique<Impl>()) {
  if (db_path != ":memory:" && db_path.has_parent_path()) {
    std::filesystem::create_directories(db_path.parent_path());
  }
  if (sqlite3_open(db_path.c_str(), &impl_->db) != SQLITE_OK) {
    const std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "out of memory";
    sqlite3_close(impl_->db);
    impl_->db = nullptr;
    throw EnvironmentError("cannot open score cache " + db_path.string() + ": " + msg);
  }
  impl_->Check(sqlite3_exec(impl_->db,
                            "PRAGMA journal_mode=WAL;"
                            "PRAGMA synchronous=NORMAL;"
                            "CREATE TABLE IF NOT EXISTS scores (key TEXT PRIMARY KEY, value TEXT NOT NULL);",
                            nullptr, nullptr, nullptr),
               "schema");
  impl_->Check(sqlite3_prepare_v2(impl_->db, "SELECT value FROM scores WHERE key = ?1", -1,
                                  &impl_->get, nullptr),
               "prepare get");
  impl_->Check(sqlite3_prepare_v2(impl_->db, "INSERT OR REPLACE INTO scores (key, value) VALUES (?1, ?2)",
                                  -1, &impl_->put, nullptr),
               "prepare put");
}

ScoreCache::~ScoreCache() {
  if (!impl_) return;
  sqlite3_finalize(impl_->get);
  sqlite3_finalize(impl_->put);
  sqlite3_close(impl_->db);
}

std::string ScoreCache::Key(const std::string& state, const std::string& kind, const std::string& text) {
  Sha256 h;
  h.Field(state).Field(kind).Field(text);
  return h.Digest();
}

namespace {

std::optional<std::string> Lookup(sqlite3* db, sqlite3_stmt* stmt, const std::string& key) {
  sqlite3_reset(stmt);
  sqlite3_bind_text(stmt, 1, key.data(), static_cast<int>(key.size()), SQLITE_TRANSIENT);
  const int rc = sqlite3_step(stmt);
  if (rc == SQLITE_ROW) {
    const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, 0));
    return std::string(text, static_cast<std::size_t>(sqlite3_column_bytes(stmt, 0)));
  }
  if (rc != SQLITE_DONE) throw EnvironmentError(std::string("score cache read: ") + sqlite3_errmsg(db));
  return std::nullopt;
}

void Store(sqlite3* db, sqlite3_stmt* stmt, const std::string& key, const std::string& value) {
  sqlite3_reset(stmt);
  sqlite3_bind_text(stmt, 1, key.data(), static_cast<int>(key.size()), SQLITE_TRANSIENT);
  sqlite3_bind_text(stmt, 2, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT);
  if (sqlite3_step(stmt) != SQLITE_DONE) {
    throw EnvironmentError(std::string("score cache write: ") + sqlite3_errmsg(db));
  }
}

}  // namespace

std::optional<ScoreCache::MaskEntry> ScoreCache::GetMask(const std::string& state,
                                                         const std::string& context) const {
  std::lock_guard lock(mu_);
  const auto raw = Lookup(impl_->db, impl_->get, Key(state, "mask", context));
  if (!raw) return std::nullopt;
  const auto j = nlohmann::json::parse(*raw);
  MaskEntry e;
  for (const auto& p : j.at("p")) e.token_probs.emplace_back(p[0].get<TokenId>(), ParseDouble(p[1].get<std::string>()));
  e.topk = j.at("k").get<std::size_t>();
  for (const auto& t : j.at("top")) {
    e.top.push_back({t[0].get<TokenId>(), t[1].get<std::string>(), ParseDouble(t[2].get<std::string>())});
  }
  return e;
}

void ScoreCache::PutMask(const std::string& state, const std::string& context, const MaskEntry& entry) {
  nlohmann::json j;
  j["p"] = nlohmann::json::array();
  for (const auto& [id, p] : entry.token_probs) j["p"].push_back({id, FormatDouble(p)});
  j["k"] = entry.topk;
  j["top"] = nlohmann::json::array();
  for (const auto& t : entry.top) j["top"].push_back({t.id, t.token, FormatDouble(t.probability)});
  std::lock_guard lock(mu_);
  Store(impl_->db, impl_->put, Key(state, "mask", context), j.dump());
}

std::optional<double> ScoreCache::GetPerplexity(const std::string& state, const std::string& text) const {
  std::lock_guard lock(mu_);
  const auto raw = Lookup(impl_->db, impl_->get, Key(state, "ppl", text));
  if (!raw) return std::nullopt;
  return ParseDouble(*raw);
}

void ScoreCache::PutPerplexity(const std::string& state, const std::string& text, double value) {
  std::lock_guard lock(mu_);
  Store(impl_->db, impl_->put, Key(state, "ppl", text), FormatDouble(value));
}

MaskScores CachedModel::score_mask(const MaskQuery& query, std::span<const TokenId> tokens,
                                   std::size_t topk) const {
  const std::string state = inner_->state_id();
  auto entry = cache_->GetMask(state, query.text());
  auto find = [](const ScoreCache::MaskEntry& e, TokenId id) -> const double* {
    auto it = std::lower_bound(e.token_probs.begin(), e.token_probs.end(), id,
                               [](const auto& p, TokenId v) { return p.first < v; });
    return it != e.token_probs.end() && it->first == id ? &it->second : nullptr;
  };
  bool hit = entry.has_value() && entry->topk >= topk;
  if (hit) {
    for (TokenId id : tokens) {
      if (!find(*entry, id)) {
        hit = false;
        break;
      }
    }
  }
  if (hit) {
    cache_->hits_++;
    MaskScores out;
    for (TokenId id : tokens) out.token_probs.push_back(*find(*entry, id));
    out.top.assign(entry->top.begin(), entry->top.begin() + static_cast<std::ptrdiff_t>(std::min(topk, entry->top.size())));
    return out;
  }
  cache_->misses_++;
  // Recompute the union of what was cached and what is requested now so
  // entries only ever grow.
  ScoreCache::MaskEntry merged = entry.value_or(ScoreCache::MaskEntry{});
  std::vector<TokenId> want(tokens.begin(), tokens.end());
  for (const auto& [id, p] : merged.token_probs) want.push_back(id);
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  const std::size_t k = std::max(topk, merged.topk);
  MaskScores fresh = inner_->score_mask(query, want, k);
  merged.token_probs.clear();
  for (std::size_t i = 0; i < want.size(); ++i) merged.token_probs.emplace_back(want[i], fresh.token_probs[i]);
  merged.topk = k;
  merged.top = fresh.top;
  cache_->PutMask(state, query.text(), merged);

  MaskScores out;
  for (TokenId id : tokens) out.token_probs.push_back(*find(merged, id));
  out.top.assign(merged.top.begin(), merged.top.begin() + static_cast<std::ptrdiff_t>(std::min(topk, merged.top.size())));
  return out;
}

double CachedModel::sentence_perplexity(std::string_view text) const {
  const std::string state = inner_->state_id();
  const std::string t(text);
  if (auto v = cache_->GetPerplexity(state, t)) {
    cache_->hits_++;
    return *v;
  }
  cache_->misses_++;
  const double v = inner_->sentence_perplexity(text);
  cache_->PutPerplexity(state, t, v);
  return v;
}

}  // namespace artlang
