#ifndef NORMLEX_NMT_CONFIG_H_
#define NORMLEX_NMT_CONFIG_H_

#include <cstdint>
#include <vector>

namespace normlex {
namespace nmt {

// Hyperparameters of the character-level encoder-decoder. Defaults are the
// full-size model: 256-dim character embeddings, 688 convolution filters of
// widths 1..7, max-pooling over successive windows of 5, a 2-layer highway
// network, a bidirectional GRU encoder and a 2-layer attentional GRU decoder
// trained with Adam on mini-batches of 32.
struct ModelConfig {
  int embed_dim = 256;
  std::vector<int> conv_filter_counts = {16, 32, 64, 64, 128, 128, 256};
  std::vector<int> conv_filter_widths = {1, 2, 3, 4, 5, 6, 7};
  int pool_interval = 5;
  int highway_layers = 2;
  int encoder_hidden = 256;  // per direction
  int decoder_layers = 2;
  int decoder_hidden = 512;
  int attention_dim = 512;
  int batch_size = 32;
  double initial_lr = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_decode_factor = 4;
  int max_decode_slack = 10;
  uint64_t seed = 1;

  int total_filters() const;
  int encoder_state_dim() const { return 2 * encoder_hidden; }

  // Throws normlex::Error on inconsistent or non-positive settings.
  void validate() const;
  // True when the filter bank has the full-size 688 filters.
  bool has_full_filter_bank() const { return total_filters() == 688; }

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

// A scaled-down configuration for desk-scale experiments and tests. Keeps the
// seven filter widths, the pooling interval and the layer counts.
ModelConfig small_config();

}  // namespace nmt
}  // namespace normlex

#endif  // NORMLEX_NMT_CONFIG_H_
