#include "normlex/nmt/config.h"

#include <numeric>
#include <string>

#include "normlex/errors.h"

namespace normlex {
namespace nmt {

int ModelConfig::total_filters() const {
  return std::accumulate(conv_filter_counts.begin(), conv_filter_counts.end(), 0);
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) throw Error(std::string("invalid model config: ") + what);
  };
  require(embed_dim > 0, "embed_dim must be positive");
  require(!conv_filter_counts.empty(), "no convolution filters");
  require(conv_filter_counts.size() == conv_filter_widths.size(),
          "filter counts and widths differ in length");
  for (std::size_t i = 0; i < conv_filter_counts.size(); ++i) {
    require(conv_filter_counts[i] > 0, "filter counts must be positive");
    require(conv_filter_widths[i] > 0, "filter widths must be positive");
  }
  require(pool_interval >= 1, "pool_interval must be >= 1");
  require(highway_layers >= 0, "highway_layers must be >= 0");
  require(encoder_hidden > 0, "encoder_hidden must be positive");
  require(decoder_layers == 2, "decoder_layers must be 2");
  require(decoder_hidden > 0, "decoder_hidden must be positive");
  require(attention_dim > 0, "attention_dim must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(initial_lr > 0, "initial_lr must be positive");
  require(adam_beta1 >= 0 && adam_beta1 < 1, "adam_beta1 out of range");
  require(adam_beta2 >= 0 && adam_beta2 < 1, "adam_beta2 out of range");
  require(adam_eps > 0, "adam_eps must be positive");
  require(max_decode_factor >= 0 && max_decode_slack >= 0, "decode caps must be >= 0");
}

ModelConfig small_config() {
  ModelConfig c;
  c.embed_dim = 24;
  c.conv_filter_counts = {16, 16, 32, 32, 32, 32, 32};
  c.encoder_hidden = 64;
  c.decoder_hidden = 128;
  c.attention_dim = 64;
  // Fewer examples per update suit the small desk corpora.
  c.batch_size = 8;
  c.initial_lr = 2e-3;
  return c;
}

}  // namespace nmt
}  // namespace normlex
