#include "normlex/nmt/model.h"

#include <cmath>
#include <limits>
#include <random>

#include "nmt/layers.h"
#include "normlex/errors.h"
#include "normlex/text.h"

namespace normlex {
namespace nmt {

using layers::Mat;
using layers::Vec;

ModelLayout ModelLayout::create(const ModelConfig &cfg, int source_vocab, int target_vocab,
                                TensorTable *table) {
  cfg.validate();
  ModelLayout l;
  const int d = cfg.embed_dim;
  const int f = cfg.total_filters();
  const int he = cfg.encoder_hidden;
  const int enc = cfg.encoder_state_dim();
  const int hd = cfg.decoder_hidden;
  const int a = cfg.attention_dim;

  l.source_embedding = table->add("source_embedding", d, source_vocab);
  for (std::size_t g = 0; g < cfg.conv_filter_counts.size(); ++g) {
    const std::string suffix = std::to_string(cfg.conv_filter_widths[g]);
    l.conv_weight.push_back(table->add("conv_w" + suffix, cfg.conv_filter_counts[g],
                                       cfg.conv_filter_widths[g] * d));
    l.conv_bias.push_back(table->add("conv_b" + suffix, cfg.conv_filter_counts[g], 1, true));
  }
  for (int i = 0; i < cfg.highway_layers; ++i) {
    const std::string suffix = std::to_string(i);
    l.highway_gate_weight.push_back(table->add("highway_gate_w" + suffix, f, f));
    l.highway_gate_bias.push_back(table->add("highway_gate_b" + suffix, f, 1, true));
    l.highway_transform_weight.push_back(table->add("highway_transform_w" + suffix, f, f));
    l.highway_transform_bias.push_back(table->add("highway_transform_b" + suffix, f, 1, true));
  }
  l.encoder_fwd_w = table->add("encoder_fwd_w", 3 * he, f);
  l.encoder_fwd_u = table->add("encoder_fwd_u", 3 * he, he);
  l.encoder_fwd_b = table->add("encoder_fwd_b", 3 * he, 1, true);
  l.encoder_bwd_w = table->add("encoder_bwd_w", 3 * he, f);
  l.encoder_bwd_u = table->add("encoder_bwd_u", 3 * he, he);
  l.encoder_bwd_b = table->add("encoder_bwd_b", 3 * he, 1, true);
  l.target_embedding = table->add("target_embedding", d, target_vocab);
  l.attention_query = table->add("attention_query", a, hd);
  l.attention_key = table->add("attention_key", a, enc);
  l.attention_bias = table->add("attention_bias", a, 1, true);
  l.attention_score = table->add("attention_score", a, 1);
  l.decoder_w[0] = table->add("decoder0_w", 3 * hd, d + enc);
  l.decoder_u[0] = table->add("decoder0_u", 3 * hd, hd);
  l.decoder_b[0] = table->add("decoder0_b", 3 * hd, 1, true);
  l.decoder_w[1] = table->add("decoder1_w", 3 * hd, hd);
  l.decoder_u[1] = table->add("decoder1_u", 3 * hd, hd);
  l.decoder_b[1] = table->add("decoder1_b", 3 * hd, 1, true);
  l.output_weight = table->add("output_w", target_vocab, hd + enc);
  l.output_bias = table->add("output_b", target_vocab, 1, true);
  return l;
}

TranslationModel::TranslationModel(ModelConfig cfg, CharVocab source_vocab,
                                   CharVocab target_vocab)
    : config_(std::move(cfg)),
      source_vocab_(std::move(source_vocab)),
      target_vocab_(std::move(target_vocab)) {
  auto table = std::make_shared<TensorTable>();
  layout_ = ModelLayout::create(config_, source_vocab_.size(), target_vocab_.size(), table.get());
  params_ = ParamBuffer(table);

  // mt19937_64 output is fully specified, so the bits below are portable.
  std::mt19937_64 rng(config_.seed);
  for (const auto &t : params_.table().tensors()) {
    if (t.bias) continue;
    double *p = params_.data().data() + t.offset;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      p[i] = -0.05 + 0.1 * unit;
    }
  }
}

namespace {

struct EncoderTape {
  std::vector<int> ids;
  Mat embedded;  // D x L
  layers::ConvCache conv;
  Eigen::MatrixXi pool_argmax;
  std::vector<layers::HighwayCache> highway;
  Mat highway_out;  // F x M
  std::vector<layers::GruStep> fwd, bwd;
  Mat states;  // 2He x M
};

struct DecoderTape {
  Mat keys;  // A x M
  std::vector<layers::AttentionStep> attn;
  std::vector<layers::GruStep> gru0, gru1;
  Mat x0;       // (D + 2He) x N, inputs of the first decoder layer
  Mat h0;       // Hd x N, outputs of the first decoder layer
  Mat outputs;  // (Hd + 2He) x N
  Mat probs;    // Vt x N
  std::vector<int> inputs, labels;
};

void run_encoder(const TranslationModel &model, std::vector<int> ids, EncoderTape *tape) {
  const auto &cfg = model.config();
  const auto &l = model.layout();
  const auto &p = model.params();
  if (ids.empty()) throw EmptySource();
  tape->ids = std::move(ids);
  const Eigen::Index len = static_cast<Eigen::Index>(tape->ids.size());

  auto emb = p.mat(l.source_embedding);
  tape->embedded.resize(cfg.embed_dim, len);
  for (Eigen::Index i = 0; i < len; ++i) tape->embedded.col(i) = emb.col(tape->ids[i]);

  Mat conv = layers::conv_forward(p, l.conv_weight, l.conv_bias, cfg.conv_filter_widths,
                                  tape->embedded, &tape->conv);
  Mat x = layers::maxpool_forward(conv, cfg.pool_interval, &tape->pool_argmax);
  tape->highway.resize(cfg.highway_layers);
  for (int i = 0; i < cfg.highway_layers; ++i) {
    x = layers::highway_forward(p.mat(l.highway_gate_weight[i]), p.vec(l.highway_gate_bias[i]),
                                p.mat(l.highway_transform_weight[i]),
                                p.vec(l.highway_transform_bias[i]), x, &tape->highway[i]);
  }
  tape->highway_out = std::move(x);

  const Eigen::Index m = tape->highway_out.cols();
  const int he = cfg.encoder_hidden;
  Mat ax_f = p.mat(l.encoder_fwd_w) * tape->highway_out;
  ax_f.colwise() += p.vec(l.encoder_fwd_b);
  Mat ax_b = p.mat(l.encoder_bwd_w) * tape->highway_out;
  ax_b.colwise() += p.vec(l.encoder_bwd_b);

  tape->states.resize(2 * he, m);
  tape->fwd.resize(m);
  tape->bwd.resize(m);
  Vec h = Vec::Zero(he);
  for (Eigen::Index t = 0; t < m; ++t) {
    layers::gru_forward(p.mat(l.encoder_fwd_u), ax_f.col(t), h, &tape->fwd[t]);
    h = tape->fwd[t].h;
    tape->states.block(0, t, he, 1) = h;
  }
  h.setZero();
  for (Eigen::Index t = m - 1; t >= 0; --t) {
    layers::gru_forward(p.mat(l.encoder_bwd_u), ax_b.col(t), h, &tape->bwd[t]);
    h = tape->bwd[t].h;
    tape->states.block(he, t, he, 1) = h;
  }
}

// d(states) -> parameter gradients of the encoder.
void backprop_encoder(const TranslationModel &model, const EncoderTape &tape,
                      const Mat &dstates, ParamBuffer *grad) {
  const auto &cfg = model.config();
  const auto &l = model.layout();
  const auto &p = model.params();
  const int he = cfg.encoder_hidden;
  const Eigen::Index m = tape.states.cols();

  Mat dax_f(3 * he, m), dah_f(3 * he, m), hprev_f(he, m);
  Mat dax_b(3 * he, m), dah_b(3 * he, m), hprev_b(he, m);
  Vec carry = Vec::Zero(he);
  for (Eigen::Index t = m - 1; t >= 0; --t) {
    Vec dh = dstates.block(0, t, he, 1) + carry;
    carry = layers::gru_backward(p.mat(l.encoder_fwd_u), tape.fwd[t], dh, dax_f.col(t),
                                 dah_f.col(t));
    hprev_f.col(t) = tape.fwd[t].h_prev;
  }
  carry.setZero();
  for (Eigen::Index t = 0; t < m; ++t) {
    Vec dh = dstates.block(he, t, he, 1) + carry;
    carry = layers::gru_backward(p.mat(l.encoder_bwd_u), tape.bwd[t], dh, dax_b.col(t),
                                 dah_b.col(t));
    hprev_b.col(t) = tape.bwd[t].h_prev;
  }
  const Mat &x = tape.highway_out;
  grad->mat(l.encoder_fwd_w).noalias() += dax_f * x.transpose();
  grad->vec(l.encoder_fwd_b) += dax_f.rowwise().sum();
  grad->mat(l.encoder_fwd_u).noalias() += dah_f * hprev_f.transpose();
  grad->mat(l.encoder_bwd_w).noalias() += dax_b * x.transpose();
  grad->vec(l.encoder_bwd_b) += dax_b.rowwise().sum();
  grad->mat(l.encoder_bwd_u).noalias() += dah_b * hprev_b.transpose();

  Mat dx = p.mat(l.encoder_fwd_w).transpose() * dax_f;
  dx.noalias() += p.mat(l.encoder_bwd_w).transpose() * dax_b;
  for (int i = cfg.highway_layers - 1; i >= 0; --i) {
    dx = layers::highway_backward(
        p.mat(l.highway_gate_weight[i]), p.mat(l.highway_transform_weight[i]), tape.highway[i],
        dx, grad->mat(l.highway_gate_weight[i]), grad->vec(l.highway_gate_bias[i]),
        grad->mat(l.highway_transform_weight[i]), grad->vec(l.highway_transform_bias[i]));
  }
  const Eigen::Index len = tape.embedded.cols();
  Mat dconv = layers::maxpool_backward(dx, tape.pool_argmax, len);
  Mat demb = layers::conv_backward(p, l.conv_weight, l.conv_bias, cfg.conv_filter_widths,
                                   tape.conv, dconv, grad);
  auto gemb = grad->mat(l.source_embedding);
  for (Eigen::Index i = 0; i < len; ++i) gemb.col(tape.ids[i]) += demb.col(i);
}

Mat attention_keys(const TranslationModel &model, const Mat &states) {
  return model.params().mat(model.layout().attention_key) * states;
}

// One decoder step; appends to the tape's per-step caches and fills column
// `t` of x0/h0/outputs.
void decoder_step(const TranslationModel &model, const Mat &states, int input_id, Eigen::Index t,
                  const Vec &h0_prev, const Vec &h1_prev, DecoderTape *tape) {
  const auto &l = model.layout();
  const auto &p = model.params();
  const int d = model.config().embed_dim;
  const int hd = model.config().decoder_hidden;
  const Eigen::Index enc = states.rows();

  tape->attn.emplace_back();
  layers::attention_forward(p.mat(l.attention_query), p.vec(l.attention_bias),
                            p.vec(l.attention_score), tape->keys, states, h1_prev,
                            &tape->attn.back());
  const Vec &context = tape->attn.back().context;

  tape->x0.block(0, t, d, 1) = p.mat(l.target_embedding).col(input_id);
  tape->x0.block(d, t, enc, 1) = context;
  Vec ax0 = p.mat(l.decoder_w[0]) * tape->x0.col(t) + p.vec(l.decoder_b[0]);
  tape->gru0.emplace_back();
  layers::gru_forward(p.mat(l.decoder_u[0]), ax0, h0_prev, &tape->gru0.back());
  tape->h0.col(t) = tape->gru0.back().h;

  Vec ax1 = p.mat(l.decoder_w[1]) * tape->h0.col(t) + p.vec(l.decoder_b[1]);
  tape->gru1.emplace_back();
  layers::gru_forward(p.mat(l.decoder_u[1]), ax1, h1_prev, &tape->gru1.back());

  tape->outputs.block(0, t, hd, 1) = tape->gru1.back().h;
  tape->outputs.block(hd, t, enc, 1) = context;
}

void resize_decoder_tape(const TranslationModel &model, Eigen::Index steps, Eigen::Index enc,
                         DecoderTape *tape) {
  const int d = model.config().embed_dim;
  const int hd = model.config().decoder_hidden;
  tape->x0.resize(d + enc, steps);
  tape->h0.resize(hd, steps);
  tape->outputs.resize(hd + enc, steps);
  tape->attn.reserve(steps);
  tape->gru0.reserve(steps);
  tape->gru1.reserve(steps);
}

// Teacher-forced pass; returns the mean cross-entropy.
double run_decoder(const TranslationModel &model, const Mat &states, std::vector<int> target_ids,
                   DecoderTape *tape) {
  const auto &l = model.layout();
  const auto &p = model.params();
  const int hd = model.config().decoder_hidden;

  tape->inputs.assign(1, CharVocab::kBos);
  tape->inputs.insert(tape->inputs.end(), target_ids.begin(), target_ids.end());
  tape->labels = std::move(target_ids);
  tape->labels.push_back(CharVocab::kEos);
  const Eigen::Index steps = static_cast<Eigen::Index>(tape->labels.size());

  tape->keys = attention_keys(model, states);
  resize_decoder_tape(model, steps, states.rows(), tape);
  Vec h0 = Vec::Zero(hd), h1 = Vec::Zero(hd);
  for (Eigen::Index t = 0; t < steps; ++t) {
    decoder_step(model, states, tape->inputs[t], t, h0, h1, tape);
    h0 = tape->gru0.back().h;
    h1 = tape->gru1.back().h;
  }

  Mat logits = p.mat(l.output_weight) * tape->outputs;
  logits.colwise() += p.vec(l.output_bias);
  tape->probs.resize(logits.rows(), steps);
  double loss = 0.0;
  for (Eigen::Index t = 0; t < steps; ++t) {
    const double mx = logits.col(t).maxCoeff();
    Eigen::ArrayXd e = (logits.col(t).array() - mx).exp();
    const double z = e.sum();
    tape->probs.col(t) = (e / z).matrix();
    loss += -(logits(tape->labels[t], t) - mx - std::log(z));
  }
  return loss / static_cast<double>(steps);
}

// Backward through the decoder; returns d(encoder states).
Mat backprop_decoder(const TranslationModel &model, const Mat &states, const DecoderTape &tape,
                     ParamBuffer *grad) {
  const auto &l = model.layout();
  const auto &p = model.params();
  const int d = model.config().embed_dim;
  const int hd = model.config().decoder_hidden;
  const Eigen::Index enc = states.rows();
  const Eigen::Index steps = tape.probs.cols();

  Mat dlogits = tape.probs;
  for (Eigen::Index t = 0; t < steps; ++t) dlogits(tape.labels[t], t) -= 1.0;
  dlogits /= static_cast<double>(steps);
  grad->mat(l.output_weight).noalias() += dlogits * tape.outputs.transpose();
  grad->vec(l.output_bias) += dlogits.rowwise().sum();
  Mat doutputs = p.mat(l.output_weight).transpose() * dlogits;

  Mat dstates = Mat::Zero(enc, states.cols());
  Mat dkeys = Mat::Zero(tape.keys.rows(), tape.keys.cols());
  Mat dax0(3 * hd, steps), dah0(3 * hd, steps), hprev0(hd, steps);
  Mat dax1(3 * hd, steps), dah1(3 * hd, steps), hprev1(hd, steps);
  Vec carry0 = Vec::Zero(hd), carry1 = Vec::Zero(hd);

  auto w0 = p.mat(l.decoder_w[0]);
  auto w1 = p.mat(l.decoder_w[1]);
  auto gemb = grad->mat(l.target_embedding);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    Vec dh1 = doutputs.block(0, t, hd, 1) + carry1;
    Vec dh1_prev = layers::gru_backward(p.mat(l.decoder_u[1]), tape.gru1[t], dh1, dax1.col(t),
                                        dah1.col(t));
    hprev1.col(t) = tape.gru1[t].h_prev;

    Vec dh0 = w1.transpose() * dax1.col(t) + carry0;
    carry0 = layers::gru_backward(p.mat(l.decoder_u[0]), tape.gru0[t], dh0, dax0.col(t),
                                  dah0.col(t));
    hprev0.col(t) = tape.gru0[t].h_prev;

    Vec dx0 = w0.transpose() * dax0.col(t);
    gemb.col(tape.inputs[t]) += dx0.head(d);
    Vec dcontext = doutputs.block(hd, t, enc, 1) + dx0.tail(enc);
    Vec dquery = layers::attention_backward(
        p.mat(l.attention_query), p.vec(l.attention_score), states, tape.attn[t], dcontext,
        grad->mat(l.attention_query), grad->vec(l.attention_bias), grad->vec(l.attention_score),
        dkeys, dstates);
    carry1 = dh1_prev + dquery;
  }
  grad->mat(l.decoder_w[0]).noalias() += dax0 * tape.x0.transpose();
  grad->vec(l.decoder_b[0]) += dax0.rowwise().sum();
  grad->mat(l.decoder_u[0]).noalias() += dah0 * hprev0.transpose();
  grad->mat(l.decoder_w[1]).noalias() += dax1 * tape.h0.transpose();
  grad->vec(l.decoder_b[1]) += dax1.rowwise().sum();
  grad->mat(l.decoder_u[1]).noalias() += dah1 * hprev1.transpose();

  grad->mat(l.attention_key).noalias() += dkeys * states.transpose();
  dstates.noalias() += p.mat(l.attention_key).transpose() * dkeys;
  return dstates;
}

std::vector<int> source_ids(const TranslationModel &model, std::string_view source) {
  std::vector<int> ids = model.source_vocab().encode(source);
  if (ids.empty()) throw EmptySource();
  return ids;
}

}  // namespace

EncoderStates encode(const TranslationModel &model, std::string_view source) {
  EncoderTape tape;
  run_encoder(model, source_ids(model, source), &tape);
  return EncoderStates{std::move(tape.states)};
}

AttentionResult attention(const TranslationModel &model, const Eigen::VectorXd &decoder_state,
                          const EncoderStates &enc) {
  const auto &l = model.layout();
  const auto &p = model.params();
  layers::AttentionStep step;
  Mat keys = attention_keys(model, enc.states);
  layers::attention_forward(p.mat(l.attention_query), p.vec(l.attention_bias),
                            p.vec(l.attention_score), keys, enc.states, decoder_state, &step);
  return AttentionResult{std::move(step.context), std::move(step.weights)};
}

std::string decode_greedy(const TranslationModel &model, std::string_view source) {
  const auto &cfg = model.config();
  const auto &l = model.layout();
  const auto &p = model.params();
  EncoderTape enc;
  run_encoder(model, source_ids(model, source), &enc);

  const Eigen::Index cap =
      static_cast<Eigen::Index>(cfg.max_decode_factor) * static_cast<Eigen::Index>(enc.ids.size()) +
      cfg.max_decode_slack;
  DecoderTape tape;
  tape.keys = attention_keys(model, enc.states);
  // The tape only needs one column; each step overwrites column 0.
  resize_decoder_tape(model, 1, enc.states.rows(), &tape);

  const auto &vocab = model.target_vocab();
  Vec h0 = Vec::Zero(cfg.decoder_hidden), h1 = Vec::Zero(cfg.decoder_hidden);
  int input = CharVocab::kBos;
  std::string out;
  for (Eigen::Index produced = 0; produced < cap; ++produced) {
    tape.attn.clear();
    tape.gru0.clear();
    tape.gru1.clear();
    decoder_step(model, enc.states, input, 0, h0, h1, &tape);
    h0 = tape.gru0.back().h;
    h1 = tape.gru1.back().h;
    Vec logits = p.mat(l.output_weight) * tape.outputs.col(0) + p.vec(l.output_bias);
    // PAD, BOS and UNK are never emitted.
    logits(CharVocab::kPad) = -std::numeric_limits<double>::infinity();
    logits(CharVocab::kBos) = -std::numeric_limits<double>::infinity();
    logits(CharVocab::kUnk) = -std::numeric_limits<double>::infinity();
    Eigen::Index best;
    logits.maxCoeff(&best);
    if (best == CharVocab::kEos) break;
    text::append_utf8(vocab.character(static_cast<int>(best)), &out);
    input = static_cast<int>(best);
  }
  return out;
}

double sequence_loss(const TranslationModel &model, std::string_view source,
                     std::string_view target) {
  EncoderTape enc;
  run_encoder(model, source_ids(model, source), &enc);
  DecoderTape dec;
  return run_decoder(model, enc.states, model.target_vocab().encode(target), &dec);
}

double sequence_loss_and_gradient(const TranslationModel &model, std::string_view source,
                                  std::string_view target, ParamBuffer *grad) {
  EncoderTape enc;
  run_encoder(model, source_ids(model, source), &enc);
  DecoderTape dec;
  const double loss = run_decoder(model, enc.states, model.target_vocab().encode(target), &dec);
  Mat dstates = backprop_decoder(model, enc.states, dec, grad);
  backprop_encoder(model, enc, dstates, grad);
  return loss;
}

double multi_target_loss(const TranslationModel &model, const TrainingExample &ex) {
  if (ex.targets.empty()) throw Error("training example without targets");
  EncoderTape enc;
  run_encoder(model, source_ids(model, ex.source), &enc);
  double best = std::numeric_limits<double>::infinity();
  for (const std::string &target : ex.targets) {
    DecoderTape dec;
    best = std::min(best, run_decoder(model, enc.states, model.target_vocab().encode(target), &dec));
  }
  return best;
}

double multi_target_loss_and_gradient(const TranslationModel &model, const TrainingExample &ex,
                                      ParamBuffer *grad) {
  if (ex.targets.empty()) throw Error("training example without targets");
  EncoderTape enc;
  run_encoder(model, source_ids(model, ex.source), &enc);
  DecoderTape best_tape;
  double best = std::numeric_limits<double>::infinity();
  for (const std::string &target : ex.targets) {
    DecoderTape dec;
    const double loss = run_decoder(model, enc.states, model.target_vocab().encode(target), &dec);
    if (loss < best) {
      best = loss;
      best_tape = std::move(dec);
    }
  }
  Mat dstates = backprop_decoder(model, enc.states, best_tape, grad);
  backprop_encoder(model, enc, dstates, grad);
  return best;
}

Eigen::MatrixXd output_distributions(const TranslationModel &model, std::string_view source,
                                     std::string_view target) {
  EncoderTape enc;
  run_encoder(model, source_ids(model, source), &enc);
  DecoderTape dec;
  run_decoder(model, enc.states, model.target_vocab().encode(target), &dec);
  return dec.probs;
}

}  // namespace nmt
}  // namespace normlex
