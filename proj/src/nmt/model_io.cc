#include "normlex/nmt/model_io.h"

#include <cstring>
#include <fstream>

#include "binary_io.h"
#include "file_util.h"
#include "normlex/errors.h"

namespace normlex {
namespace nmt {

namespace {

constexpr std::string_view kMagic = "NMTM";

void put_config(const ModelConfig &c, internal::BinaryWriter *w) {
  w->put<int32_t>(c.embed_dim);
  w->put<uint32_t>(static_cast<uint32_t>(c.conv_filter_counts.size()));
  for (int v : c.conv_filter_counts) w->put<int32_t>(v);
  for (int v : c.conv_filter_widths) w->put<int32_t>(v);
  w->put<int32_t>(c.pool_interval);
  w->put<int32_t>(c.highway_layers);
  w->put<int32_t>(c.encoder_hidden);
  w->put<int32_t>(c.decoder_layers);
  w->put<int32_t>(c.decoder_hidden);
  w->put<int32_t>(c.attention_dim);
  w->put<int32_t>(c.batch_size);
  w->put<double>(c.initial_lr);
  w->put<double>(c.adam_beta1);
  w->put<double>(c.adam_beta2);
  w->put<double>(c.adam_eps);
  w->put<int32_t>(c.max_decode_factor);
  w->put<int32_t>(c.max_decode_slack);
  w->put<uint64_t>(c.seed);
}

ModelConfig get_config(internal::BinaryReader *r) {
  ModelConfig c;
  c.embed_dim = r->get<int32_t>();
  const uint32_t groups = r->get<uint32_t>();
  if (groups > 1024) throw CorruptFile("implausible filter group count");
  c.conv_filter_counts.resize(groups);
  c.conv_filter_widths.resize(groups);
  for (auto &v : c.conv_filter_counts) v = r->get<int32_t>();
  for (auto &v : c.conv_filter_widths) v = r->get<int32_t>();
  c.pool_interval = r->get<int32_t>();
  c.highway_layers = r->get<int32_t>();
  c.encoder_hidden = r->get<int32_t>();
  c.decoder_layers = r->get<int32_t>();
  c.decoder_hidden = r->get<int32_t>();
  c.attention_dim = r->get<int32_t>();
  c.batch_size = r->get<int32_t>();
  c.initial_lr = r->get<double>();
  c.adam_beta1 = r->get<double>();
  c.adam_beta2 = r->get<double>();
  c.adam_eps = r->get<double>();
  c.max_decode_factor = r->get<int32_t>();
  c.max_decode_slack = r->get<int32_t>();
  c.seed = r->get<uint64_t>();
  return c;
}

void put_vocab(const CharVocab &v, internal::BinaryWriter *w) {
  w->put<uint64_t>(v.chars().size());
  for (char32_t c : v.chars()) w->put<uint32_t>(static_cast<uint32_t>(c));
}

CharVocab get_vocab(internal::BinaryReader *r) {
  const uint64_t n = r->get<uint64_t>();
  if (n > r->remaining() / sizeof(uint32_t)) throw CorruptFile("vocabulary overruns file");
  std::u32string chars;
  for (uint64_t i = 0; i < n; ++i) chars.push_back(static_cast<char32_t>(r->get<uint32_t>()));
  return CharVocab::from_chars(std::move(chars));
}

}  // namespace

std::string serialize_model(const TranslationModel &model) {
  internal::BinaryWriter w;
  w.put_bytes(kMagic);
  w.put<uint32_t>(kModelFormatVersion);
  put_config(model.config(), &w);
  put_vocab(model.source_vocab(), &w);
  put_vocab(model.target_vocab(), &w);
  const auto &params = model.params();
  w.put<uint32_t>(static_cast<uint32_t>(params.table().tensors().size()));
  for (const auto &t : params.table().tensors()) {
    w.put_string(t.name);
    w.put<uint64_t>(static_cast<uint64_t>(t.rows));
    w.put<uint64_t>(static_cast<uint64_t>(t.cols));
    w.put_bytes(std::string_view(reinterpret_cast<const char *>(params.data().data() + t.offset),
                                 t.size() * sizeof(double)));
  }
  w.put<uint64_t>(internal::fnv1a(w.data()));
  return w.take();
}

TranslationModel deserialize_model(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + sizeof(uint32_t) + sizeof(uint64_t)) {
    throw CorruptFile("model file too short");
  }
  if (bytes.substr(0, kMagic.size()) != kMagic) throw CorruptFile("not a model file");
  const std::string_view body = bytes.substr(0, bytes.size() - sizeof(uint64_t));
  uint64_t stored_sum;
  std::memcpy(&stored_sum, bytes.data() + body.size(), sizeof(uint64_t));

  internal::BinaryReader r(body);
  r.get_bytes(kMagic.size());
  const uint32_t version = r.get<uint32_t>();
  if (version != kModelFormatVersion) {
    throw IncompatibleVersion("model format version " + std::to_string(version) +
                              " (expected " + std::to_string(kModelFormatVersion) + ")");
  }
  if (internal::fnv1a(body) != stored_sum) throw CorruptFile("model checksum mismatch");

  ModelConfig cfg = get_config(&r);
  try {
    cfg.validate();
  } catch (const Error &e) {
    throw IncompatibleVersion(e.what());
  }
  CharVocab source = get_vocab(&r);
  CharVocab target = get_vocab(&r);
  TranslationModel model(cfg, std::move(source), std::move(target));

  const auto &tensors = model.params().table().tensors();
  const uint32_t count = r.get<uint32_t>();
  if (count != tensors.size()) {
    throw IncompatibleVersion("model has " + std::to_string(count) + " tensors, config implies " +
                              std::to_string(tensors.size()));
  }
  for (const auto &t : tensors) {
    const std::string name = r.get_string();
    const uint64_t rows = r.get<uint64_t>();
    const uint64_t cols = r.get<uint64_t>();
    if (name != t.name || rows != static_cast<uint64_t>(t.rows) ||
        cols != static_cast<uint64_t>(t.cols)) {
      throw IncompatibleVersion("tensor '" + name + "' shape does not match its config");
    }
    std::string_view data = r.get_bytes(t.size() * sizeof(double));
    std::memcpy(model.params().data().data() + t.offset, data.data(), data.size());
  }
  if (!r.done()) throw CorruptFile("trailing bytes in model file");
  return model;
}

void save_model(const TranslationModel &model, const std::filesystem::path &path) {
  const std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write model file " + path.string());
}

TranslationModel load_model(const std::filesystem::path &path) {
  auto bytes = internal::read_file(path);
  if (!bytes) throw Error("cannot read model file " + path.string());
  return deserialize_model(*bytes);
}

}  // namespace nmt
}  // namespace normlex
