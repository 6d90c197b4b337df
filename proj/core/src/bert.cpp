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
#include "artlang/bert.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <glog/logging.h>
#include <nlohmann/json.hpp>

#include "artlang/embedding_init.hpp"
#include "artlang/error.hpp"
#include "artlang/hashing.hpp"
#include "artlang/tokenizer.hpp"
#include "param_store.hpp"
#include "transformer_ops.hpp"

namespace artlang {

using nn::LayerNorm;
using nn::Linear;
using nn::RowVector;

namespace {

struct EncoderLayer {
  Linear query, key, value, attn_out;
  LayerNorm attn_norm;
  Linear intermediate, output;
  LayerNorm out_norm;
};

struct LayerCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> probs;
  std::vector<Matrix> probs_mask;
  Matrix attn_out_mask;
  LayerNorm::Cache attn_norm;
  Matrix inter_pre;
  Matrix out_mask;
  LayerNorm::Cache out_norm;
};

struct ForwardCache {
  LayerNorm::Cache emb_norm;
  Matrix emb_mask;
  std::vector<LayerCache> layers;
};

struct HeadCache {
  Matrix transform_pre;
  LayerNorm::Cache norm;
  Matrix transformed;
};

}  // namespace

struct BertMaskedLM::Impl {
  BertConfig cfg;
  WordPieceTokenizer tokenizer;
  Matrix word_embeddings;
  Matrix position_embeddings;
  Matrix token_type_embeddings;
  LayerNorm emb_norm;
  std::vector<EncoderLayer> layers;
  Linear head_transform;
  LayerNorm head_norm;
  Matrix untied_decoder;
  RowVector decoder_bias;

  // Adam state for the word-embedding matrix.
  Matrix adam_m, adam_v;
  long adam_step = 0;
  // Digest of the checkpoint files, part of state_id().
  std::string checkpoint_digest;

  explicit Impl(WordPieceTokenizer tok) : tokenizer(std::move(tok)) {}

  const Matrix& decoder() const { return cfg.tie_word_embeddings ? word_embeddings : untied_decoder; }

  Matrix Embed(std::span<const TokenId> ids) const {
    if (static_cast<int>(ids.size()) > cfg.max_positions) {
      throw QueryError("sequence of " + std::to_string(ids.size()) + " tokens exceeds " +
                       std::to_string(cfg.max_positions) + " positions");
    }
    Matrix e(static_cast<Eigen::Index>(ids.size()), cfg.hidden_size);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      e.row(r) = word_embeddings.row(ids[i]) + position_embeddings.row(r) + token_type_embeddings.row(0);
    }
    return e;
  }

  Matrix Encode(std::span<const TokenId> ids, ForwardCache* cache, std::mt19937_64* rng) const {
    const float hd = rng != nullptr ? cfg.hidden_dropout : 0.0f;
    const float ad = rng != nullptr ? cfg.attention_dropout : 0.0f;
    const int heads = cfg.num_heads;
    const int d = cfg.hidden_size / heads;
    const float scale = 1.0f / std::sqrt(static_cast<float>(d));

    LayerNorm::Cache emb_cache;
    Matrix x = emb_norm.Forward(Embed(ids), cache ? &emb_cache : nullptr);
    Matrix emb_mask = nn::DropoutMask(x.rows(), x.cols(), hd, rng);
    x = nn::ApplyMask(x, emb_mask);
    if (cache != nullptr) {
      cache->emb_norm = std::move(emb_cache);
      cache->emb_mask = std::move(emb_mask);
      cache->layers.assign(layers.size(), {});
    }

    for (std::size_t l = 0; l < layers.size(); ++l) {
      const EncoderLayer& layer = layers[l];
      LayerCache local;
      LayerCache& c = cache != nullptr ? cache->layers[l] : local;
      if (cache != nullptr) c.input = x;
      c.q = layer.query.Forward(x);
      c.k = layer.key.Forward(x);
      c.v = layer.value.Forward(x);
      Matrix ctx(x.rows(), cfg.hidden_size);
      c.probs.resize(static_cast<std::size_t>(heads));
      c.probs_mask.resize(static_cast<std::size_t>(heads));
      for (int h = 0; h < heads; ++h) {
        Matrix s = (c.q.middleCols(h * d, d) * c.k.middleCols(h * d, d).transpose()) * scale;
        nn::SoftmaxRowsInPlace(s);
        Matrix mask = nn::DropoutMask(s.rows(), s.cols(), ad, rng);
        ctx.middleCols(h * d, d) = nn::ApplyMask(s, mask) * c.v.middleCols(h * d, d);
        c.probs[static_cast<std::size_t>(h)] = std::move(s);
        c.probs_mask[static_cast<std::size_t>(h)] = std::move(mask);
      }
      Matrix attn = layer.attn_out.Forward(ctx);
      c.attn_out_mask = nn::DropoutMask(attn.rows(), attn.cols(), hd, rng);
      Matrix y1 = layer.attn_norm.Forward(x + nn::ApplyMask(attn, c.attn_out_mask), &c.attn_norm);
      c.inter_pre = layer.intermediate.Forward(y1);
      Matrix act = c.inter_pre.unaryExpr(&nn::GeluErf);
      Matrix out = layer.output.Forward(act);
      c.out_mask = nn::DropoutMask(out.rows(), out.cols(), hd, rng);
      x = layer.out_norm.Forward(y1 + nn::ApplyMask(out, c.out_mask), &c.out_norm);
    }
    return x;
  }

  Matrix HeadLogits(const Matrix& hidden_rows, HeadCache* cache) const {
    HeadCache local;
    HeadCache& c = cache != nullptr ? *cache : local;
    c.transform_pre = head_transform.Forward(hidden_rows);
    c.transformed = head_norm.Forward(c.transform_pre.unaryExpr(&nn::GeluErf), &c.norm);
    Matrix logits = c.transformed * decoder().transpose();
    logits.rowwise() += decoder_bias;
    return logits;
  }

  // Backpropagates dL/d(final hidden) down to the word-embedding rows.
  void BackwardEncoder(Matrix dx, std::span<const TokenId> ids, const ForwardCache& cache,
                       Matrix& grad) const {
    const int heads = cfg.num_heads;
    const int d = cfg.hidden_size / heads;
    const float scale = 1.0f / std::sqrt(static_cast<float>(d));
    for (std::size_t li = layers.size(); li-- > 0;) {
      const EncoderLayer& layer = layers[li];
      const LayerCache& c = cache.layers[li];
      const Matrix dz2 = layer.out_norm.BackwardInput(dx, c.out_norm);
      Matrix dy1 = dz2;
      const Matrix dact = layer.output.BackwardInput(nn::ApplyMask(dz2, c.out_mask));
      const Matrix dinter = dact.cwiseProduct(c.inter_pre.unaryExpr(&nn::GeluErfGrad));
      dy1 += layer.intermediate.BackwardInput(dinter);

      const Matrix dz1 = layer.attn_norm.BackwardInput(dy1, c.attn_norm);
      dx = dz1;
      const Matrix dctx = layer.attn_out.BackwardInput(nn::ApplyMask(dz1, c.attn_out_mask));
      Matrix dq = Matrix::Zero(dctx.rows(), dctx.cols());
      Matrix dk = Matrix::Zero(dctx.rows(), dctx.cols());
      Matrix dv = Matrix::Zero(dctx.rows(), dctx.cols());
      for (int h = 0; h < heads; ++h) {
        const Matrix& probs = c.probs[static_cast<std::size_t>(h)];
        const Matrix& mask = c.probs_mask[static_cast<std::size_t>(h)];
        const auto dch = dctx.middleCols(h * d, d);
        const auto vh = c.v.middleCols(h * d, d);
        Matrix dprobs = nn::ApplyMask(dch * vh.transpose(), mask);
        dv.middleCols(h * d, d) = nn::ApplyMask(probs, mask).transpose() * dch;
        const Eigen::VectorXf row_dot = dprobs.cwiseProduct(probs).rowwise().sum();
        Matrix ds = probs.cwiseProduct(dprobs - row_dot.replicate(1, dprobs.cols()));
        ds *= scale;
        dq.middleCols(h * d, d) = ds * c.k.middleCols(h * d, d);
        dk.middleCols(h * d, d) = ds.transpose() * c.q.middleCols(h * d, d);
      }
      dx += layer.query.BackwardInput(dq) + layer.key.BackwardInput(dk) + layer.value.BackwardInput(dv);
    }
    const Matrix de = emb_norm.BackwardInput(nn::ApplyMask(dx, cache.emb_mask), cache.emb_norm);
    for (std::size_t i = 0; i < ids.size(); ++i) grad.row(ids[i]) += de.row(static_cast<Eigen::Index>(i));
  }
};

namespace {

BertConfig ParseConfig(const nlohmann::json& j) {
  BertConfig c;
  c.vocab_size = j.at("vocab_size").get<int>();
  c.hidden_size = j.value("hidden_size", 768);
  c.num_layers = j.value("num_hidden_layers", 12);
  c.num_heads = j.value("num_attention_heads", 12);
  c.intermediate_size = j.value("intermediate_size", 3072);
  c.max_positions = j.value("max_position_embeddings", 512);
  c.type_vocab_size = j.value("type_vocab_size", 2);
  c.layer_norm_eps = j.value("layer_norm_eps", 1e-12f);
  c.hidden_dropout = j.value("hidden_dropout_prob", 0.1f);
  c.attention_dropout = j.value("attention_probs_dropout_prob", 0.1f);
  c.tie_word_embeddings = j.value("tie_word_embeddings", true);
  const std::string act = j.value("hidden_act", std::string("gelu"));
  if (act != "gelu") throw FormatError("unsupported BERT activation '" + act + "'");
  if (c.hidden_size % c.num_heads != 0) throw FormatError("hidden size not divisible by heads");
  return c;
}

}  // namespace

BertMaskedLM::BertMaskedLM(std::unique_ptr<Impl> impl, std::string model_id)
    : impl_(std::move(impl)), model_id_(std::move(model_id)) {}

BertMaskedLM::~BertMaskedLM() = default;

std::unique_ptr<BertMaskedLM> BertMaskedLM::Load(const std::filesystem::path& dir,
                                                 std::string model_id) {
  std::ifstream cfg_in(dir / "config.json");
  if (!cfg_in) throw EnvironmentError("no config.json in " + dir.string());
  const BertConfig cfg = ParseConfig(nlohmann::json::parse(cfg_in));
  auto impl = std::make_unique<Impl>(WordPieceTokenizer::FromDirectory(dir));
  impl->cfg = cfg;
  if (static_cast<int>(impl->tokenizer.size()) != cfg.vocab_size) {
    throw FormatError("vocab.txt has " + std::to_string(impl->tokenizer.size()) +
                      " entries, config says " + std::to_string(cfg.vocab_size));
  }

  const auto store = nn::ParamStore::Open(dir, {"", "bert."});
  const float eps = cfg.layer_norm_eps;
  impl->word_embeddings = store.GetMatrix("embeddings.word_embeddings.weight");
  impl->position_embeddings = store.GetMatrix("embeddings.position_embeddings.weight");
  impl->token_type_embeddings = store.GetMatrix("embeddings.token_type_embeddings.weight");
  impl->emb_norm = store.GetLayerNorm("embeddings.LayerNorm", eps);
  for (int l = 0; l < cfg.num_layers; ++l) {
    const std::string p = "encoder.layer." + std::to_string(l) + ".";
    EncoderLayer layer;
    layer.query = store.GetLinear(p + "attention.self.query");
    layer.key = store.GetLinear(p + "attention.self.key");
    layer.value = store.GetLinear(p + "attention.self.value");
    layer.attn_out = store.GetLinear(p + "attention.output.dense");
    layer.attn_norm = store.GetLayerNorm(p + "attention.output.LayerNorm", eps);
    layer.intermediate = store.GetLinear(p + "intermediate.dense");
    layer.output = store.GetLinear(p + "output.dense");
    layer.out_norm = store.GetLayerNorm(p + "output.LayerNorm", eps);
    impl->layers.push_back(std::move(layer));
  }
  impl->head_transform = store.GetLinear("cls.predictions.transform.dense");
  impl->head_norm = store.GetLayerNorm("cls.predictions.transform.LayerNorm", eps);
  impl->decoder_bias = store.Has("cls.predictions.bias") ? store.GetVector("cls.predictions.bias")
                                                         : store.GetVector("cls.predictions.decoder.bias");
  if (!cfg.tie_word_embeddings) impl->untied_decoder = store.GetMatrix("cls.predictions.decoder.weight");
  if (impl->word_embeddings.rows() != cfg.vocab_size || impl->word_embeddings.cols() != cfg.hidden_size) {
    throw FormatError("word embedding shape does not match config");
  }
  {
    Sha256 h;
    for (const char* f : {"config.json", "vocab.txt", "model.safetensors"}) h.Field(Sha256File(dir / f));
    impl->checkpoint_digest = h.Digest();
  }
  if (model_id.empty()) model_id = std::filesystem::path(dir).filename().string();
  return std::unique_ptr<BertMaskedLM>(new BertMaskedLM(std::move(impl), std::move(model_id)));
}

const BertConfig& BertMaskedLM::config() const { return impl_->cfg; }

std::string BertMaskedLM::state_id() const {
  const std::string base = model_id_ + "#" + impl_->checkpoint_digest.substr(0, 16);
  if (mutation_log_.empty()) return base;
  Sha256 h;
  for (const auto& m : mutation_log_) h.Field(m);
  return base + "@" + h.Digest().substr(0, 16);
}

std::size_t BertMaskedLM::vocab_size() const { return impl_->tokenizer.size(); }
std::size_t BertMaskedLM::embedding_width() const { return static_cast<std::size_t>(impl_->cfg.hidden_size); }

std::optional<TokenId> BertMaskedLM::find_token(std::string_view token) const {
  return impl_->tokenizer.Find(token);
}

std::string BertMaskedLM::token_text(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_size()) {
    throw VocabularyError("token id " + std::to_string(id) + " outside vocabulary");
  }
  return impl_->tokenizer.Token(id);
}

bool BertMaskedLM::is_subword(TokenId id) const {
  return impl_->tokenizer.IsContinuation(id) || impl_->tokenizer.IsSpecial(id);
}

std::vector<TokenId> BertMaskedLM::Encode(std::string_view text) const {
  return impl_->tokenizer.Encode(text);
}

std::vector<double> BertMaskedLM::mask_distribution(const MaskQuery& query) const {
  const auto ids = Encode(query.text());
  const auto it = std::find(ids.begin(), ids.end(), impl_->tokenizer.mask_id());
  const auto pos = static_cast<Eigen::Index>(it - ids.begin());
  const Matrix hidden = impl_->Encode(ids, nullptr, nullptr);
  const Matrix logits = impl_->HeadLogits(hidden.row(pos), nullptr);
  const Eigen::VectorXd z = logits.row(0).transpose().cast<double>();
  const double mx = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - mx).exp();
  e /= e.sum();
  return std::vector<double>(e.data(), e.data() + e.size());
}

BertMaskedLM::LossSum BertMaskedLM::AccumulateMlmGradient(std::span<const TokenId> input_ids,
                                                          std::span<const TokenId> labels,
                                                          Matrix* embedding_grad,
                                                          std::mt19937_64* dropout_rng) const {
  if (input_ids.size() != labels.size()) throw ConfigError("input/label length mismatch");
  std::vector<Eigen::Index> positions;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) positions.push_back(static_cast<Eigen::Index>(i));
  }
  LossSum out;
  if (positions.empty()) return out;

  ForwardCache cache;
  const bool need_grad = embedding_grad != nullptr;
  const Matrix hidden = impl_->Encode(input_ids, need_grad ? &cache : nullptr, dropout_rng);
  Matrix rows(static_cast<Eigen::Index>(positions.size()), hidden.cols());
  for (std::size_t i = 0; i < positions.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = hidden.row(positions[i]);

  HeadCache head;
  const Matrix logits = impl_->HeadLogits(rows, &head);
  Matrix dlogits(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Eigen::RowVectorXd z = logits.row(r).cast<double>();
    const double mx = z.maxCoeff();
    Eigen::RowVectorXd p = (z.array() - mx).exp();
    const double total = p.sum();
    p /= total;
    const TokenId label = labels[static_cast<std::size_t>(positions[static_cast<std::size_t>(r)])];
    out.nll += -(z(label) - mx - std::log(total));
    p(label) -= 1.0;
    dlogits.row(r) = p.cast<float>();
  }
  out.count = static_cast<int>(positions.size());
  if (!need_grad) return out;

  Matrix& grad = *embedding_grad;
  if (impl_->cfg.tie_word_embeddings) grad.noalias() += dlogits.transpose() * head.transformed;
  const Matrix dtransformed = dlogits * impl_->decoder();
  const Matrix dact = impl_->head_norm.BackwardInput(dtransformed, head.norm);
  const Matrix dpre = dact.cwiseProduct(head.transform_pre.unaryExpr(&nn::GeluErfGrad));
  const Matrix drows = impl_->head_transform.BackwardInput(dpre);
  Matrix dhidden = Matrix::Zero(hidden.rows(), hidden.cols());
  for (std::size_t i = 0; i < positions.size(); ++i) dhidden.row(positions[i]) += drows.row(static_cast<Eigen::Index>(i));
  impl_->BackwardEncoder(std::move(dhidden), input_ids, cache, grad);
  return out;
}

void BertMaskedLM::ResetOptimizer() {
  impl_->adam_m = Matrix::Zero(impl_->word_embeddings.rows(), impl_->word_embeddings.cols());
  impl_->adam_v = impl_->adam_m;
  impl_->adam_step = 0;
}

void BertMaskedLM::OptimizerStep(const Matrix& grad, double learning_rate, const FinetuneConfig& cfg) {
  Matrix& p = impl_->word_embeddings;
  if (impl_->adam_m.rows() != p.rows()) ResetOptimizer();
  const long t = ++impl_->adam_step;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double bc2_sqrt = std::sqrt(1.0 - std::pow(b2, static_cast<double>(t)));
  const auto step = static_cast<float>(learning_rate / bc1);
  const auto decay = static_cast<float>(1.0 - learning_rate * cfg.weight_decay);
  const auto fb1 = static_cast<float>(b1), fb2 = static_cast<float>(b2);
  const auto eps = static_cast<float>(cfg.adam_epsilon);
  const auto wd = static_cast<float>(cfg.weight_decay);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const bool has_grad = !grad.row(r).isZero(0.0f);
    RowVector g = grad.row(r);
    if (has_grad && cfg.weight_decay > 0.0) {
      if (cfg.decoupled_weight_decay) {
        p.row(r) *= decay;
      } else {
        g += wd * p.row(r);
      }
    }
    impl_->adam_m.row(r) = fb1 * impl_->adam_m.row(r) + (1.0f - fb1) * g;
    impl_->adam_v.row(r) = fb2 * impl_->adam_v.row(r) + (1.0f - fb2) * g.cwiseProduct(g);
    const RowVector denom =
        (impl_->adam_v.row(r).array().sqrt() / static_cast<float>(bc2_sqrt) + eps).matrix();
    p.row(r).array() -= step * impl_->adam_m.row(r).array() / denom.array();
  }
}

namespace {

struct MaskedExample {
  std::vector<TokenId> input;
  std::vector<TokenId> labels;
};

// Standard masked-LM corruption: each non-special position is selected with
// probability `fraction`; selected positions become [MASK] 80% of the time,
// a uniformly random vocabulary token 10%, and stay unchanged 10%.
MaskedExample Corrupt(const std::vector<TokenId>& ids, double fraction, TokenId mask_id,
                      std::size_t vocab, const std::vector<bool>& special, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<TokenId> random_token(0, static_cast<TokenId>(vocab) - 1);
  MaskedExample ex{ids, std::vector<TokenId>(ids.size(), -1)};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (special[i] || u(rng) >= fraction) continue;
    ex.labels[i] = ids[i];
    const double r = u(rng);
    if (r < 0.8) {
      ex.input[i] = mask_id;
    } else if (r < 0.9) {
      ex.input[i] = random_token(rng);
    }
  }
  return ex;
}

}  // namespace

TrainingReport BertMaskedLM::finetune_embeddings(std::span<const std::string> texts,
                                                 const FinetuneConfig& cfg) {
  cfg.Validate();
  if (texts.empty()) throw ConfigError("fine-tuning dataset is empty");

  std::vector<std::vector<TokenId>> encoded;
  encoded.reserve(texts.size());
  for (const auto& t : texts) encoded.push_back(Encode(t));
  auto special_mask = [&](const std::vector<TokenId>& ids) {
    std::vector<bool> s(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      s[i] = ids[i] == impl_->tokenizer.cls_id() || ids[i] == impl_->tokenizer.sep_id();
    }
    return s;
  };

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(texts.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<std::size_t>(std::ceil(cfg.validation_fraction * static_cast<double>(texts.size())));
  n_val = std::min(n_val, texts.size() - 1);
  const std::vector<std::size_t> val_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  TrainingReport report;
  report.train_examples = train_idx.size();
  report.validation_examples = val_idx.size();
  if (cfg.epochs == 0) return report;

  std::mt19937_64 val_rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<MaskedExample> val_set;
  for (std::size_t i : val_idx) {
    val_set.push_back(Corrupt(encoded[i], cfg.mask_fraction, impl_->tokenizer.mask_id(), vocab_size(),
                              special_mask(encoded[i]), val_rng));
  }

  const std::size_t batches_per_epoch =
      (train_idx.size() + static_cast<std::size_t>(cfg.batch_size) - 1) / static_cast<std::size_t>(cfg.batch_size);
  const std::size_t total_steps = batches_per_epoch * static_cast<std::size_t>(cfg.epochs);
  std::mt19937_64 dropout_rng(cfg.seed + 1);
  ResetOptimizer();
  Matrix grad(impl_->word_embeddings.rows(), impl_->word_embeddings.cols());

  std::size_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double loss_total = 0.0;
    std::size_t loss_batches = 0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      grad.setZero();
      LossSum batch;
      const std::size_t begin = b * static_cast<std::size_t>(cfg.batch_size);
      const std::size_t end = std::min(train_idx.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t k = begin; k < end; ++k) {
        const auto& ids = encoded[train_idx[k]];
        const MaskedExample ex = Corrupt(ids, cfg.mask_fraction, impl_->tokenizer.mask_id(),
                                         vocab_size(), special_mask(ids), rng);
        const LossSum s = AccumulateMlmGradient(ex.input, ex.labels, &grad,
                                                cfg.dropout ? &dropout_rng : nullptr);
        batch.nll += s.nll;
        batch.count += s.count;
      }
      const double lr = cfg.linear_schedule
                            ? cfg.learning_rate * static_cast<double>(total_steps - step) /
                                  static_cast<double>(total_steps)
                            : cfg.learning_rate;
      ++step;
      if (batch.count == 0) continue;
      grad /= static_cast<float>(batch.count);
      OptimizerStep(grad, lr, cfg);
      ++report.optimizer_steps;
      loss_total += batch.nll / batch.count;
      ++loss_batches;
    }
    LossSum val;
    for (const auto& ex : val_set) {
      const LossSum s = AccumulateMlmGradient(ex.input, ex.labels, nullptr, nullptr);
      val.nll += s.nll;
      val.count += s.count;
    }
    EpochLoss e;
    e.epoch = epoch + 1;
    e.train_loss = loss_batches > 0 ? loss_total / static_cast<double>(loss_batches) : 0.0;
    e.validation_loss = val.count > 0 ? val.nll / val.count : 0.0;
    LOG(INFO) << "epoch " << e.epoch << " train loss " << e.train_loss << " validation loss "
              << e.validation_loss;
    report.epochs.push_back(e);
  }

  Sha256 h;
  for (const auto& t : texts) h.Field(t);
  h.Field(std::to_string(cfg.learning_rate) + "/" + std::to_string(cfg.batch_size) + "/" +
          std::to_string(cfg.epochs) + "/" + std::to_string(cfg.seed) + "/" +
          std::to_string(cfg.mask_fraction) + "/" + std::to_string(cfg.weight_decay));
  mutation_log_.push_back("train:" + h.Digest());
  return report;
}

std::vector<TokenId> BertMaskedLM::add_new_tokens(std::span<const std::string> names,
                                                  std::uint64_t seed) {
  std::vector<std::string> offenders;
  std::vector<std::string> sorted(names.begin(), names.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if ((i > 0 && sorted[i] == sorted[i - 1]) || find_token(sorted[i])) offenders.push_back(sorted[i]);
  }
  if (!offenders.empty()) {
    std::string msg = "cannot add tokens already present or duplicated:";
    for (const auto& o : offenders) msg += " " + o;
    throw VocabularyError(msg);
  }
  if (names.empty()) return {};
  const Matrix rows = SampleEmbeddingRows(impl_->word_embeddings, names.size(), seed);
  Matrix grown(impl_->word_embeddings.rows() + rows.rows(), impl_->word_embeddings.cols());
  grown << impl_->word_embeddings, rows;
  impl_->word_embeddings = std::move(grown);
  RowVector bias = RowVector::Zero(impl_->word_embeddings.rows());
  bias.head(impl_->decoder_bias.size()) = impl_->decoder_bias;
  impl_->decoder_bias = std::move(bias);
  if (!impl_->cfg.tie_word_embeddings) {
    Matrix dec(impl_->untied_decoder.rows() + rows.rows(), impl_->untied_decoder.cols());
    dec << impl_->untied_decoder, rows;
    impl_->untied_decoder = std::move(dec);
  }
  std::vector<TokenId> ids;
  Sha256 h;
  for (const auto& n : names) {
    ids.push_back(impl_->tokenizer.AddToken(n));
    h.Field(n);
  }
  impl_->cfg.vocab_size = static_cast<int>(vocab_size());
  mutation_log_.push_back("add:" + std::to_string(seed) + ":" + h.Digest());
  return ids;
}

Matrix BertMaskedLM::read_embeddings(std::span<const TokenId> tokens) const {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), impl_->word_embeddings.cols());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] < 0 || static_cast<std::size_t>(tokens[i]) >= vocab_size()) {
      throw VocabularyError("token id " + std::to_string(tokens[i]) + " outside vocabulary");
    }
    out.row(static_cast<Eigen::Index>(i)) = impl_->word_embeddings.row(tokens[i]);
  }
  return out;
}

std::string BertMaskedLM::frozen_parameter_digest() const {
  Sha256 h;
  auto add = [&h](const auto& m) { h.Update(std::span<const float>(m.data(), static_cast<std::size_t>(m.size()))); };
  add(impl_->position_embeddings);
  add(impl_->token_type_embeddings);
  add(impl_->emb_norm.gamma);
  add(impl_->emb_norm.beta);
  for (const auto& l : impl_->layers) {
    for (const Linear* lin : {&l.query, &l.key, &l.value, &l.attn_out, &l.intermediate, &l.output}) {
      add(lin->weight);
      add(lin->bias);
    }
    for (const LayerNorm* ln : {&l.attn_norm, &l.out_norm}) {
      add(ln->gamma);
      add(ln->beta);
    }
  }
  add(impl_->head_transform.weight);
  add(impl_->head_transform.bias);
  add(impl_->head_norm.gamma);
  add(impl_->head_norm.beta);
  add(impl_->decoder_bias);
  if (!impl_->cfg.tie_word_embeddings) add(impl_->untied_decoder);
  return h.Digest();
}

}  // namespace artlang
