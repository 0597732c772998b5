#ifndef NORMLEX_NMT_MODEL_H_
#define NORMLEX_NMT_MODEL_H_

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "normlex/nmt/config.h"
#include "normlex/nmt/parameters.h"
#include "normlex/nmt/vocab.h"

namespace normlex {
namespace nmt {

// Tensor ids of every parameter group. GRU weights stack the update, reset
// and candidate blocks in that order: W is (3H x input), U is (3H x H).
struct ModelLayout {
  int source_embedding = -1;  // embed_dim x |source vocab|
  std::vector<int> conv_weight;  // count_g x (width_g * embed_dim)
  std::vector<int> conv_bias;
  std::vector<int> highway_gate_weight;  // F x F
  std::vector<int> highway_gate_bias;
  std::vector<int> highway_transform_weight;
  std::vector<int> highway_transform_bias;
  int encoder_fwd_w = -1, encoder_fwd_u = -1, encoder_fwd_b = -1;
  int encoder_bwd_w = -1, encoder_bwd_u = -1, encoder_bwd_b = -1;
  int target_embedding = -1;  // embed_dim x |target vocab|
  int attention_query = -1;  // attention_dim x decoder_hidden
  int attention_key = -1;    // attention_dim x 2*encoder_hidden
  int attention_bias = -1;
  int attention_score = -1;  // attention_dim x 1
  int decoder_w[2] = {-1, -1};
  int decoder_u[2] = {-1, -1};
  int decoder_b[2] = {-1, -1};
  int output_weight = -1;  // |target vocab| x (decoder_hidden + 2*encoder_hidden)
  int output_bias = -1;

  // Registers all tensors in `table`; shapes depend only on the arguments.
  static ModelLayout create(const ModelConfig &cfg, int source_vocab, int target_vocab,
                            TensorTable *table);
};

class TranslationModel {
 public:
  // Weights are drawn uniformly from (-0.05, 0.05) with a PRNG seeded by
  // cfg.seed; biases start at zero.
  TranslationModel(ModelConfig cfg, CharVocab source_vocab, CharVocab target_vocab);

  const ModelConfig &config() const { return config_; }
  const CharVocab &source_vocab() const { return source_vocab_; }
  const CharVocab &target_vocab() const { return target_vocab_; }
  const ModelLayout &layout() const { return layout_; }
  const ParamBuffer &params() const { return params_; }
  ParamBuffer &params() { return params_; }

  ParamBuffer zero_like() const { return ParamBuffer(params_.table_ptr()); }

 private:
  ModelConfig config_;
  CharVocab source_vocab_;
  CharVocab target_vocab_;
  ModelLayout layout_;
  ParamBuffer params_;
};

struct TrainingExample {
  std::string source;
  std::vector<std::string> targets;  // every admissible translation
};

// Encoder output: one column of width 2*encoder_hidden per pooled window.
struct EncoderStates {
  Eigen::MatrixXd states;
  int count() const { return static_cast<int>(states.cols()); }
};

struct AttentionResult {
  Eigen::VectorXd context;
  Eigen::VectorXd weights;
};

// Throws EmptySource when `source` has no characters.
EncoderStates encode(const TranslationModel &model, std::string_view source);

// Additive attention of a decoder state over the encoder states.
AttentionResult attention(const TranslationModel &model, const Eigen::VectorXd &decoder_state,
                          const EncoderStates &enc);

// Greedy character decoding. Stops at EOS or after
// max_decode_factor * |source| + max_decode_slack characters.
std::string decode_greedy(const TranslationModel &model, std::string_view source);

// Mean per-character cross-entropy (target characters plus EOS) under
// teacher forcing.
double sequence_loss(const TranslationModel &model, std::string_view source,
                     std::string_view target);

// Same as sequence_loss; adds d(loss)/d(params) into `grad`.
double sequence_loss_and_gradient(const TranslationModel &model, std::string_view source,
                                  std::string_view target, ParamBuffer *grad);

// Smallest sequence_loss over the example's targets.
double multi_target_loss(const TranslationModel &model, const TrainingExample &ex);

// Adds the gradient of the argmin target's loss into `grad`; ties go to the
// earliest target.
double multi_target_loss_and_gradient(const TranslationModel &model, const TrainingExample &ex,
                                      ParamBuffer *grad);

// Per-step output distributions of a teacher-forced pass, one column per
// predicted character.
Eigen::MatrixXd output_distributions(const TranslationModel &model, std::string_view source,
                                     std::string_view target);

}  // namespace nmt
}  // namespace normlex

#endif  // NORMLEX_NMT_MODEL_H_
