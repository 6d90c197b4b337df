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
#include "artlang/gpt2.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "artlang/error.hpp"
#include "artlang/hashing.hpp"
#include "artlang/tokenizer.hpp"
#include "param_store.hpp"
#include "transformer_ops.hpp"

namespace artlang {

using nn::LayerNorm;
using nn::Linear;

namespace {

struct Block {
  LayerNorm ln1;
  Linear attn;  // fused q|k|v
  Linear attn_proj;
  LayerNorm ln2;
  Linear fc;
  Linear proj;
};

}  // namespace

struct Gpt2Scorer::Impl {
  ByteLevelBpeTokenizer tokenizer;
  std::vector<std::string> id_to_token;
  std::unordered_map<std::string, TokenId> token_to_id;
  int heads = 12;
  int max_positions = 1024;
  Matrix wte, wpe;
  std::vector<Block> blocks;
  LayerNorm ln_f;

  std::string checkpoint_digest;

  explicit Impl(ByteLevelBpeTokenizer t) : tokenizer(std::move(t)) {}

  Matrix Forward(const std::vector<TokenId>& ids) const {
    const auto n = static_cast<Eigen::Index>(ids.size());
    const Eigen::Index h = wte.cols();
    const Eigen::Index d = h / heads;
    const float scale = 1.0f / std::sqrt(static_cast<float>(d));
    Matrix x(n, h);
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = wte.row(ids[static_cast<std::size_t>(i)]) + wpe.row(i);
    for (const Block& b : blocks) {
      const Matrix qkv = b.attn.Forward(b.ln1.Forward(x));
      Matrix ctx(n, h);
      for (int hd = 0; hd < heads; ++hd) {
        const auto q = qkv.middleCols(hd * d, d);
        const auto k = qkv.middleCols(h + hd * d, d);
        const auto v = qkv.middleCols(2 * h + hd * d, d);
        Matrix s = (q * k.transpose()) * scale;
        for (Eigen::Index r = 0; r < n; ++r) {
          for (Eigen::Index c = r + 1; c < n; ++c) s(r, c) = -std::numeric_limits<float>::infinity();
        }
        nn::SoftmaxRowsInPlace(s);
        ctx.middleCols(hd * d, d) = s * v;
      }
      x += b.attn_proj.Forward(ctx);
      x += b.proj.Forward(b.fc.Forward(b.ln2.Forward(x)).unaryExpr(&nn::GeluTanh));
    }
    return ln_f.Forward(x) * wte.transpose();
  }
};

Gpt2Scorer::Gpt2Scorer(std::unique_ptr<Impl> impl, std::string model_id)
    : impl_(std::move(impl)), model_id_(std::move(model_id)) {}

Gpt2Scorer::~Gpt2Scorer() = default;

std::string Gpt2Scorer::state_id() const { return model_id_ + "#" + impl_->checkpoint_digest.substr(0, 16); }

std::unique_ptr<Gpt2Scorer> Gpt2Scorer::Load(const std::filesystem::path& dir, std::string model_id) {
  std::ifstream cfg_in(dir / "config.json");
  if (!cfg_in) throw EnvironmentError("no config.json in " + dir.string());
  const auto cfg = nlohmann::json::parse(cfg_in);
  auto impl = std::make_unique<Impl>(ByteLevelBpeTokenizer::FromDirectory(dir));
  {
    std::ifstream vin(dir / "vocab.json");
    const auto vocab = nlohmann::json::parse(vin).get<std::unordered_map<std::string, TokenId>>();
    impl->id_to_token.resize(vocab.size());
    for (const auto& [tok, id] : vocab) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab.size()) throw FormatError("vocab.json ids not dense");
      impl->id_to_token[static_cast<std::size_t>(id)] = tok;
      impl->token_to_id.emplace(tok, id);
    }
  }
  impl->heads = cfg.value("n_head", 12);
  impl->max_positions = cfg.value("n_positions", 1024);
  const float eps = cfg.value("layer_norm_epsilon", 1e-5f);
  const int layers = cfg.value("n_layer", 12);
  const std::string act = cfg.value("activation_function", std::string("gelu_new"));
  if (act != "gelu_new") throw FormatError("unsupported GPT-2 activation '" + act + "'");

  const auto store = nn::ParamStore::Open(dir, {"", "transformer."});
  impl->wte = store.GetMatrix("wte.weight");
  impl->wpe = store.GetMatrix("wpe.weight");
  for (int l = 0; l < layers; ++l) {
    const std::string p = "h." + std::to_string(l) + ".";
    Block b;
    b.ln1 = store.GetLayerNorm(p + "ln_1", eps);
    b.attn = store.GetLinear(p + "attn.c_attn", true);
    b.attn_proj = store.GetLinear(p + "attn.c_proj", true);
    b.ln2 = store.GetLayerNorm(p + "ln_2", eps);
    b.fc = store.GetLinear(p + "mlp.c_fc", true);
    b.proj = store.GetLinear(p + "mlp.c_proj", true);
    impl->blocks.push_back(std::move(b));
  }
  impl->ln_f = store.GetLayerNorm("ln_f", eps);
  if (impl->wte.cols() % impl->heads != 0) throw FormatError("embedding width not divisible by heads");
  if (model_id.empty()) model_id = std::filesystem::path(dir).filename().string();
  {
    Sha256 h;
    for (const char* f : {"config.json", "vocab.json", "merges.txt", "model.safetensors"}) h.Field(Sha256File(dir / f));
    impl->checkpoint_digest = h.Digest();
  }
  return std::unique_ptr<Gpt2Scorer>(new Gpt2Scorer(std::move(impl), std::move(model_id)));
}

std::size_t Gpt2Scorer::vocab_size() const { return impl_->id_to_token.size(); }
std::size_t Gpt2Scorer::embedding_width() const { return static_cast<std::size_t>(impl_->wte.cols()); }

std::optional<TokenId> Gpt2Scorer::find_token(std::string_view token) const {
  auto it = impl_->token_to_id.find(std::string(token));
  if (it == impl_->token_to_id.end()) return std::nullopt;
  return it->second;
}

std::string Gpt2Scorer::token_text(TokenId id) const {
  return impl_->id_to_token.at(static_cast<std::size_t>(id));
}

bool Gpt2Scorer::is_subword(TokenId id) const {
  // Byte-level pieces without the leading-space marker continue a word.
  return !token_text(id).starts_with("\xC4\xA0");
}

std::vector<TokenId> Gpt2Scorer::Encode(std::string_view text) const { return impl_->tokenizer.Encode(text); }

double Gpt2Scorer::sentence_perplexity(std::string_view text) const {
  const auto ids = Encode(text);
  if (ids.size() < 2) throw QueryError("perplexity needs at least 2 tokens: \"" + std::string(text) + "\"");
  if (static_cast<int>(ids.size()) > impl_->max_positions) throw QueryError("text exceeds context window");
  const Matrix logits = impl_->Forward(ids);
  double nll = 0.0;
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const Eigen::RowVectorXd z = logits.row(static_cast<Eigen::Index>(i)).cast<double>();
    const double mx = z.maxCoeff();
    const double lse = mx + std::log((z.array() - mx).exp().sum());
    nll += lse - z(ids[i + 1]);
  }
  return std::exp(nll / static_cast<double>(ids.size() - 1));
}

Matrix Gpt2Scorer::read_embeddings(std::span<const TokenId> tokens) const {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), impl_->wte.cols());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || static_cast<std::size_t>(tokens[i]) >= vocab_size()) {
      throw VocabularyError("token id " + std::to_string(tokens[i]) + " outside vocabulary");
    }
    out.row(static_cast<Eigen::Index>(i)) = impl_->wte.row(tokens[i]);
  }
  return out;
}

std::string Gpt2Scorer::frozen_parameter_digest() const {
  Sha256 h;
  auto add = [&h](const auto& m) { h.Update(std::span<const float>(m.data(), static_cast<std::size_t>(m.size()))); };
  add(impl_->wpe);
  for (const auto& b : impl_->blocks) {
    for (const Linear* l : {&b.attn, &b.attn_proj, &b.fc, &b.proj}) {
      add(l->weight);
      add(l->bias);
    }
    for (const LayerNorm* n : {&b.ln1, &b.ln2}) {
      add(n->gamma);
      add(n->beta);
    }
  }
  add(impl_->ln_f.gamma);
  add(impl_->ln_f.beta);
  return h.Digest();
}

}  // namespace artlang
