#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <map>
#include <random>

#include "normlex/errors.h"
#include "normlex/nmt/config.h"
#include "normlex/nmt/model.h"
#include "normlex/nmt/model_io.h"
#include "normlex/nmt/trainer.h"
#include "normlex/nmt/vocab.h"
#include "support/fixtures.h"
#include "support/toy_data.h"

namespace normlex::nmt {
namespace {

CharVocab letters(char32_t first, int n) {
  std::u32string chars;
  for (int i = 0; i < n; ++i) chars.push_back(first + i);
  return CharVocab::from_chars(chars);
}

ModelConfig tiny_config() {
  ModelConfig cfg = small_config();
  cfg.embed_dim = 6;
  cfg.conv_filter_counts = {2, 2, 2, 2, 2, 2, 2};
  cfg.encoder_hidden = 5;
  cfg.decoder_hidden = 7;
  cfg.attention_dim = 4;
  return cfg;
}

TranslationModel tiny_model(uint64_t seed = 1) {
  ModelConfig cfg = tiny_config();
  cfg.seed = seed;
  return TranslationModel(cfg, letters(U'a', 26), letters(U'a', 26));
}

TEST(ModelConfigTest, DefaultsHaveTheFullFilterBank) {
  const ModelConfig cfg;
  EXPECT_EQ(cfg.total_filters(), 688);
  EXPECT_TRUE(cfg.has_full_filter_bank());
  EXPECT_EQ(cfg.embed_dim, 256);
  EXPECT_EQ(cfg.pool_interval, 5);
  EXPECT_EQ(cfg.highway_layers, 2);
  EXPECT_EQ(cfg.batch_size, 32);
  EXPECT_DOUBLE_EQ(cfg.initial_lr, 1e-3);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(ModelConfigTest, ValidateRejectsInconsistentSettings) {
  ModelConfig a;
  a.conv_filter_widths.pop_back();
  EXPECT_THROW(a.validate(), Error);
  ModelConfig b;
  b.pool_interval = 0;
  EXPECT_THROW(b.validate(), Error);
  ModelConfig c;
  c.decoder_hidden = -1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(CharVocabTest, SpecialsComeFirstAndCharsAreLowercased) {
  const CharVocab v = CharVocab::build({"Abc", "cab", "É"});
  EXPECT_EQ(v.chars(), U"abcé");
  EXPECT_EQ(v.size(), 8);
  EXPECT_EQ(v.id(U'a'), CharVocab::kNumSpecials);
  EXPECT_EQ(v.id(U'z'), CharVocab::kUnk);
  EXPECT_EQ(v.encode("CAé?"), (std::vector<int>{6, 4, 7, CharVocab::kUnk}));
  EXPECT_EQ(v.character(CharVocab::kEos), U'\0');
  EXPECT_EQ(v.character(5), U'b');
}

// Shapes recomputed from the config independently of ModelLayout.
std::map<std::string, std::pair<int, int>> expected_shapes(const ModelConfig &c, int vs, int vt) {
  std::map<std::string, std::pair<int, int>> s;
  int f = 0;
  for (int n : c.conv_filter_counts) f += n;
  const int enc = 2 * c.encoder_hidden;
  s["source_embedding"] = {c.embed_dim, vs};
  for (std::size_t g = 0; g < c.conv_filter_counts.size(); ++g) {
    const std::string w = std::to_string(c.conv_filter_widths[g]);
    s["conv_w" + w] = {c.conv_filter_counts[g], c.conv_filter_widths[g] * c.embed_dim};
    s["conv_b" + w] = {c.conv_filter_counts[g], 1};
  }
  for (int i = 0; i < c.highway_layers; ++i) {
    const std::string k = std::to_string(i);
    s["highway_gate_w" + k] = s["highway_transform_w" + k] = {f, f};
    s["highway_gate_b" + k] = s["highway_transform_b" + k] = {f, 1};
  }
  for (const char *dir : {"fwd", "bwd"}) {
    s[std::string("encoder_") + dir + "_w"] = {3 * c.encoder_hidden, f};
    s[std::string("encoder_") + dir + "_u"] = {3 * c.encoder_hidden, c.encoder_hidden};
    s[std::string("encoder_") + dir + "_b"] = {3 * c.encoder_hidden, 1};
  }
  s["target_embedding"] = {c.embed_dim, vt};
  s["attention_query"] = {c.attention_dim, c.decoder_hidden};
  s["attention_key"] = {c.attention_dim, enc};
  s["attention_bias"] = {c.attention_dim, 1};
  s["attention_score"] = {c.attention_dim, 1};
  const int h = c.decoder_hidden;
  s["decoder0_w"] = {3 * h, c.embed_dim + enc};
  s["decoder1_w"] = {3 * h, h};
  for (const char *l : {"decoder0", "decoder1"}) {
    s[std::string(l) + "_u"] = {3 * h, h};
    s[std::string(l) + "_b"] = {3 * h, 1};
  }
  s["output_w"] = {vt, h + enc};
  s["output_b"] = {vt, 1};
  return s;
}

TEST(ShapeAuditTest, ParameterShapesFollowConfigAndVocab) {
  std::vector<ModelConfig> configs = {tiny_config(), small_config()};
  ModelConfig odd = tiny_config();
  odd.conv_filter_counts = {1, 3, 2};
  odd.conv_filter_widths = {2, 5, 9};
  odd.highway_layers = 1;
  configs.push_back(odd);
  for (const ModelConfig &cfg : configs) {
    for (auto [vs, vt] : {std::pair{3, 5}, std::pair{26, 11}}) {
      TranslationModel m(cfg, letters(U'a', vs), letters(U'k', vt));
      const auto expected = expected_shapes(cfg, vs + 4, vt + 4);
      const auto &tensors = m.params().table().tensors();
      ASSERT_EQ(tensors.size(), expected.size());
      std::size_t total = 0;
      for (const auto &t : tensors) {
        ASSERT_TRUE(expected.count(t.name)) << t.name;
        EXPECT_EQ(t.rows, expected.at(t.name).first) << t.name;
        EXPECT_EQ(t.cols, expected.at(t.name).second) << t.name;
        total += t.size();
      }
      EXPECT_EQ(m.params().data().size(), total);
    }
  }
}

TEST(ShapeAuditTest, FullSizeModelHas688FilterStates) {
  TranslationModel m(ModelConfig{}, letters(U'a', 26), letters(U'a', 26));
  const auto &t = m.params().table().at(m.layout().highway_gate_weight[0]);
  EXPECT_EQ(t.rows, 688);
  EXPECT_EQ(t.cols, 688);
  EXPECT_EQ(encode(m, "cephalalgia").states.rows(), 512);
}

TEST(InitTest, WeightsAreSmallAndBiasesZero) {
  const TranslationModel m = tiny_model();
  for (const auto &t : m.params().table().tensors()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double v = m.params().data()[t.offset + i];
      if (t.bias) {
        EXPECT_EQ(v, 0.0) << t.name;
      } else {
        EXPECT_LT(std::abs(v), 0.05) << t.name;
      }
    }
  }
}

TEST(EncodeTest, OneStatePerPoolingWindow) {
  const TranslationModel m = tiny_model();
  EXPECT_EQ(encode(m, std::string(23, 'a')).count(), 5);
  EXPECT_EQ(encode(m, "abcde").count(), 1);
  EXPECT_EQ(encode(m, "abcdef").count(), 2);
  EXPECT_EQ(encode(m, "abcde").states.rows(), 2 * tiny_config().encoder_hidden);
  EXPECT_THROW(encode(m, ""), EmptySource);
}

TEST(EncodeTest, CountIsCeilOfLengthOverInterval) {
  for (int k : {1, 2, 3, 5, 7}) {
    ModelConfig cfg = tiny_config();
    cfg.pool_interval = k;
    TranslationModel m(cfg, letters(U'a', 26), letters(U'a', 26));
    for (int len = 1; len <= 17; ++len) {
      EXPECT_EQ(encode(m, std::string(len, 'q')).count(), (len + k - 1) / k) << k << " " << len;
    }
  }
}

TEST(AttentionTest, SingletonGetsAllWeight) {
  const TranslationModel m = tiny_model();
  const EncoderStates enc = encode(m, "abc");
  ASSERT_EQ(enc.count(), 1);
  const AttentionResult r = attention(m, Eigen::VectorXd::Constant(7, 0.3), enc);
  ASSERT_EQ(r.weights.size(), 1);
  EXPECT_DOUBLE_EQ(r.weights(0), 1.0);
  EXPECT_TRUE(r.context.isApprox(enc.states.col(0)));
}

TEST(AttentionTest, IdenticalStatesShareWeightEqually) {
  const TranslationModel m = tiny_model();
  EncoderStates enc;
  enc.states = Eigen::MatrixXd(10, 4);
  for (int j = 0; j < 4; ++j) enc.states.col(j).setLinSpaced(-0.4, 0.5);
  const AttentionResult r = attention(m, Eigen::VectorXd::Constant(7, -0.2), enc);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(r.weights(j), 0.25, 1e-12);
}

TEST(AttentionTest, WeightsFormADistribution) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    TranslationModel m = tiny_model(trial + 1);
    for (double &v : m.params().data()) v = n(rng);
    const EncoderStates enc = encode(m, std::string(3 + trial % 20, 'a' + trial % 26));
    Eigen::VectorXd state(7);
    for (int i = 0; i < 7; ++i) state(i) = n(rng);
    const AttentionResult r = attention(m, state, enc);
    EXPECT_NEAR(r.weights.sum(), 1.0, 1e-6);
    EXPECT_GE(r.weights.minCoeff(), 0.0);
    EXPECT_TRUE(r.context.isApprox(enc.states * r.weights));
  }
}

TEST(OutputTest, DistributionsSumToOne) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  TranslationModel m = tiny_model();
  for (double &v : m.params().data()) v = n(rng);
  const Eigen::MatrixXd p = output_distributions(m, "hepatite", "hepatitis");
  EXPECT_EQ(p.cols(), 10);  // nine characters and EOS
  for (int j = 0; j < p.cols(); ++j) {
    EXPECT_NEAR(p.col(j).sum(), 1.0, 1e-6);
    EXPECT_GE(p.col(j).minCoeff(), 0.0);
  }
}

TEST(DecodeTest, StaysWithinTheLengthCap) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    TranslationModel m = tiny_model(trial + 1);
    // Push EOS far down so the cap is what stops decoding.
    for (double &v : m.params().data()) v = n(rng);
    m.params().vec(m.layout().output_bias)(CharVocab::kEos) = -1e3;
    EXPECT_EQ(decode_greedy(m, "abcde").size(), 30u);
    EXPECT_LE(decode_greedy(m, "ab").size(), 18u);
  }
  EXPECT_THROW(decode_greedy(tiny_model(), ""), EmptySource);
}

TEST(DecodeTest, NeverEmitsSpecials) {
  TranslationModel m = tiny_model();
  auto bias = m.params().vec(m.layout().output_bias);
  bias(CharVocab::kUnk) = 1e3;
  bias(CharVocab::kPad) = 1e3;
  bias(CharVocab::kBos) = 1e3;
  const std::string out = decode_greedy(m, "abc");
  EXPECT_FALSE(out.empty());
  EXPECT_EQ(out.find('\0'), std::string::npos);
}

TEST(DecodeTest, SameSeedSameOutput) {
  EXPECT_EQ(decode_greedy(tiny_model(3), "grippe"), decode_greedy(tiny_model(3), "grippe"));
  EXPECT_EQ(tiny_model(3).params().checksum(), tiny_model(3).params().checksum());
  EXPECT_NE(tiny_model(3).params().checksum(), tiny_model(4).params().checksum());
}

TEST(LossTest, UniformOutputCostsLogV) {
  TranslationModel m = tiny_model();
  m.params().mat(m.layout().output_weight).setZero();
  m.params().vec(m.layout().output_bias).setZero();
  const double v = m.target_vocab().size();
  EXPECT_NEAR(sequence_loss(m, "abc", "xyz"), std::log(v), 1e-12);
  EXPECT_NEAR(sequence_loss(m, "q", "longer target"), std::log(v), 1e-12);
}

TEST(LossTest, NonNegativeAndMatchesDistributions) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  TranslationModel m = tiny_model();
  for (double &v : m.params().data()) v = n(rng);
  const std::string target = "fever";
  const Eigen::MatrixXd p = output_distributions(m, "fievre", target);
  const std::vector<int> ids = m.target_vocab().encode(target);
  double expected = -std::log(p(CharVocab::kEos, p.cols() - 1));
  for (std::size_t i = 0; i < ids.size(); ++i) expected -= std::log(p(ids[i], i));
  expected /= static_cast<double>(ids.size() + 1);
  const double loss = sequence_loss(m, "fievre", target);
  EXPECT_GE(loss, 0.0);
  EXPECT_NEAR(loss, expected, 1e-10);
}

TEST(MultiTargetLossTest, SingleAndDuplicatedTargets) {
  const TranslationModel m = tiny_model();
  const double single = sequence_loss(m, "rein", "kidney");
  EXPECT_EQ(multi_target_loss(m, {"rein", {"kidney"}}), single);
  EXPECT_EQ(multi_target_loss(m, {"rein", {"kidney", "kidney", "kidney"}}), single);
}

TEST(MultiTargetLossTest, IsTheMinimumOverTargets) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    TranslationModel m = tiny_model(trial + 1);
    for (double &v : m.params().data()) v = n(rng);
    const TrainingExample ex{"cephalee", {"headache", "cephalalgia", "head pain"}};
    double lowest = INFINITY;
    for (const auto &t : ex.targets) lowest = std::min(lowest, sequence_loss(m, ex.source, t));
    EXPECT_EQ(multi_target_loss(m, ex), lowest);
  }
}

TEST(MultiTargetLossTest, GradientFollowsTheArgminTarget) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 0.5);
  TranslationModel m = tiny_model();
  for (double &v : m.params().data()) v = n(rng);
  const TrainingExample ex{"os", {"bone", "osseous tissue"}};
  const std::string best =
      sequence_loss(m, "os", ex.targets[0]) <= sequence_loss(m, "os", ex.targets[1])
          ? ex.targets[0]
          : ex.targets[1];
  ParamBuffer multi = m.zero_like(), single = m.zero_like();
  multi_target_loss_and_gradient(m, ex, &multi);
  sequence_loss_and_gradient(m, "os", best, &single);
  EXPECT_EQ(multi.data(), single.data());
}

TEST(GradientTest, AccumulatesIntoTheBuffer) {
  const TranslationModel m = testing::gradient_check_model(1);
  ParamBuffer once = m.zero_like(), twice = m.zero_like();
  const double a = sequence_loss_and_gradient(m, "abc", "bca", &once);
  sequence_loss_and_gradient(m, "abc", "bca", &twice);
  sequence_loss_and_gradient(m, "abc", "bca", &twice);
  EXPECT_EQ(a, sequence_loss(m, "abc", "bca"));
  for (std::size_t i = 0; i < once.data().size(); ++i) {
    EXPECT_NEAR(twice.data()[i], 2 * once.data()[i], 1e-12 * (1 + std::abs(once.data()[i])));
  }
}

TEST(GradientTest, AnalyticMatchesFiniteDifferences) {
  for (uint64_t seed : {1u, 2u, 3u}) {
    const GradientCheckResult r =
        gradient_check(testing::gradient_check_model(seed), testing::gradient_check_example());
    EXPECT_LT(r.max_relative_error, 1e-4) << "seed " << seed;
    EXPECT_EQ(r.per_tensor.size(),
              testing::gradient_check_model(seed).params().table().tensors().size());
    for (const auto &[name, err] : r.per_tensor) EXPECT_LT(err, 1e-4) << name;
  }
}

TEST(GradientTest, CheckIsRepeatableAndNeedsSamples) {
  const TranslationModel m = testing::gradient_check_model(4);
  GradientCheckOptions opts;
  opts.samples_per_tensor = 20;
  const double a = gradient_check(m, testing::gradient_check_example(), opts).max_relative_error;
  const double b = gradient_check(m, testing::gradient_check_example(), opts).max_relative_error;
  EXPECT_EQ(a, b);
  opts.samples_per_tensor = 0;
  EXPECT_THROW(gradient_check(m, testing::gradient_check_example(), opts), Error);
}

TEST(TrainerTest, RejectsEmptyDatasets) {
  const std::vector<TrainingExample> some = {{"a", {"a"}}};
  EXPECT_THROW(train({}, some, tiny_config()), EmptyDataset);
  EXPECT_THROW(train(some, {}, tiny_config()), EmptyDataset);
}

std::vector<TrainingExample> fifty_pairs() {
  return testing::make_suffix_corpus(63, 5).train;
}

TEST(TrainerTest, LossFallsOverFiveEpochs) {
  const auto data = fifty_pairs();
  ASSERT_EQ(data.size(), 50u);
  TrainOptions opts;
  opts.max_epochs = 5;
  const TrainResult r = train(data, data, small_config(), opts);
  ASSERT_EQ(r.log.size(), 5u);
  EXPECT_LT(r.log.back().train_loss, r.log.front().train_loss);
  EXPECT_LT(r.best_dev_loss, r.log.front().dev_loss);
}

TEST(TrainerTest, HalvesTheRateWhenDevLossRises) {
  // A large rate on a tiny dev set makes the dev loss bounce.
  const auto split = testing::make_suffix_corpus(80, 9);
  ModelConfig cfg = tiny_config();
  cfg.initial_lr = 0.05;
  cfg.batch_size = 4;
  TrainOptions opts;
  opts.max_epochs = 25;
  const TrainResult r = train(split.train, split.dev, cfg, opts);
  EXPECT_EQ(r.log.front().lr, cfg.initial_lr);
  int rises = 0;
  for (std::size_t e = 1; e + 1 < r.log.size(); ++e) {
    const bool rose = r.log[e].dev_loss > r.log[e - 1].dev_loss;
    rises += rose;
    EXPECT_EQ(r.log[e + 1].lr, rose ? r.log[e].lr / 2 : r.log[e].lr) << "epoch " << e + 1;
  }
  EXPECT_GT(rises, 0);
  for (const auto &s : r.log) EXPECT_LE(s.lr, cfg.initial_lr);
}

TEST(TrainerTest, ReturnsTheBestDevEpoch) {
  const auto split = testing::make_suffix_corpus(80, 9);
  TrainOptions opts;
  opts.max_epochs = 6;
  const TrainResult r = train(split.train, split.dev, tiny_config(), opts);
  double best = INFINITY;
  int best_epoch = 0;
  for (const auto &s : r.log) {
    if (s.dev_loss < best) best = s.dev_loss, best_epoch = s.epoch;
  }
  EXPECT_EQ(r.best_epoch, best_epoch);
  EXPECT_EQ(r.best_dev_loss, best);
  EXPECT_EQ(mean_loss(r.model, split.dev), best);
}

TEST(TrainerTest, SameSeedSameParameters) {
  const auto data = fifty_pairs();
  TrainOptions opts;
  opts.max_epochs = 2;
  const TrainResult a = train(data, data, tiny_config(), opts);
  const TrainResult b = train(data, data, tiny_config(), opts);
  EXPECT_EQ(a.model.params().checksum(), b.model.params().checksum());
  EXPECT_EQ(serialize_model(a.model), serialize_model(b.model));
  ModelConfig other = tiny_config();
  other.seed = 2;
  EXPECT_NE(train(data, data, other, opts).model.params().checksum(),
            a.model.params().checksum());
}

TEST(TrainerTest, StopCallbackEndsTraining) {
  const auto data = fifty_pairs();
  TrainOptions opts;
  opts.max_epochs = 10;
  opts.on_epoch_end = [](const EpochStats &s, const TranslationModel &) { return s.epoch < 2; };
  EXPECT_EQ(train(data, data, tiny_config(), opts).log.size(), 2u);
}

TEST(TrainerTest, LearnsToCopy) {
  const testing::ToySplit data = testing::make_copy_corpus(500, 9);
  const TrainResult r = testing::train_copy_model(data);
  EXPECT_LE(r.log.size(), 50u);
  EXPECT_GE(exact_match_rate(r.model, data.test), 0.9);
  EXPECT_EQ(decode_greedy(r.model, "abc"), "abc");
}

TEST(ParallelCorpusTest, MergesRepeatedSources) {
  const auto ex = parse_parallel_corpus("grippe\tinfluenza\nGrippe\tflu\nrein\tkidney\n");
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].source, "grippe");
  EXPECT_EQ(ex[0].targets, (std::vector<std::string>{"influenza", "flu"}));
  EXPECT_EQ(ex[1].targets, std::vector<std::string>{"kidney"});
}

TEST(ParallelCorpusTest, RejectsMalformedLines) {
  EXPECT_THROW(parse_parallel_corpus("only one field\n"), ParseError);
  EXPECT_THROW(parse_parallel_corpus("a\t\n"), ParseError);
  EXPECT_THROW(read_parallel_corpus("/nonexistent/pairs.tsv"), Error);
}

class ModelIoTest : public ::testing::Test {
 protected:
  ModelIoTest() : model_(tiny_model(6)) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double &v : model_.params().data()) v = n(rng);
  }

  // Independent FNV-1a, 64 bit.
  static uint64_t fnv1a(std::string_view bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }
  static void reseal(std::string *bytes) {
    const uint64_t sum = fnv1a(std::string_view(*bytes).substr(0, bytes->size() - 8));
    std::memcpy(bytes->data() + bytes->size() - 8, &sum, 8);
  }

  TranslationModel model_;
};

TEST_F(ModelIoTest, SaveLoadSaveIsByteIdentical) {
  testing::TempDir dir;
  save_model(model_, dir / "m.nmt");
  const TranslationModel loaded = load_model(dir / "m.nmt");
  save_model(loaded, dir / "m2.nmt");
  EXPECT_EQ(testing::read_text(dir / "m.nmt"), testing::read_text(dir / "m2.nmt"));
  EXPECT_EQ(loaded.params().data(), model_.params().data());
  EXPECT_EQ(loaded.config(), model_.config());
  EXPECT_EQ(loaded.source_vocab(), model_.source_vocab());
  EXPECT_EQ(loaded.target_vocab(), model_.target_vocab());
  EXPECT_EQ(decode_greedy(loaded, "grippe"), decode_greedy(model_, "grippe"));
}

TEST_F(ModelIoTest, SerializedChecksumIsFnv1a) {
  const std::string bytes = serialize_model(model_);
  uint64_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  EXPECT_EQ(stored, fnv1a(std::string_view(bytes).substr(0, bytes.size() - 8)));
}

TEST_F(ModelIoTest, TruncationIsCorruption) {
  const std::string bytes = serialize_model(model_);
  for (std::size_t len : {std::size_t{0}, std::size_t{3}, std::size_t{20}, bytes.size() / 2,
                          bytes.size() - 1}) {
    EXPECT_THROW(deserialize_model(std::string_view(bytes).substr(0, len)), CorruptFile) << len;
  }
}

TEST_F(ModelIoTest, FlippedByteIsCorruption) {
  std::string bytes = serialize_model(model_);
  bytes[bytes.size() / 2] ^= 0x10;
  EXPECT_THROW(deserialize_model(bytes), CorruptFile);
  std::string magic = serialize_model(model_);
  magic[0] = 'X';
  EXPECT_THROW(deserialize_model(magic), CorruptFile);
}

TEST_F(ModelIoTest, UnknownVersionIsIncompatible) {
  std::string bytes = serialize_model(model_);
  const uint32_t v = kModelFormatVersion + 1;
  std::memcpy(bytes.data() + 4, &v, 4);
  reseal(&bytes);
  EXPECT_THROW(deserialize_model(bytes), IncompatibleVersion);
}

TEST_F(ModelIoTest, ShapeDisagreeingWithConfigIsIncompatible) {
  std::string bytes = serialize_model(model_);
  // Name is length-prefixed; rows follow it.
  const std::size_t name_at = bytes.find("source_embedding");
  ASSERT_NE(name_at, std::string::npos);
  uint64_t rows;
  std::memcpy(&rows, bytes.data() + name_at + 16, 8);
  ASSERT_EQ(rows, static_cast<uint64_t>(tiny_config().embed_dim));
  ++rows;
  std::memcpy(bytes.data() + name_at + 16, &rows, 8);
  reseal(&bytes);
  EXPECT_THROW(deserialize_model(bytes), IncompatibleVersion);
}

TEST_F(ModelIoTest, MissingFileIsAnError) {
  EXPECT_THROW(load_model("/nonexistent/model.nmt"), Error);
}

}  // namespace
}  // namespace normlex::nmt
