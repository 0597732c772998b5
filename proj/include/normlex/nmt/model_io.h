#ifndef NORMLEX_NMT_MODEL_IO_H_
#define NORMLEX_NMT_MODEL_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "normlex/nmt/model.h"

namespace normlex {
namespace nmt {

inline constexpr uint32_t kModelFormatVersion = 1;

// Layout: "NMTM", u32 version, config, both vocabularies, named tensors with
// shapes, then an FNV-1a checksum of everything before it.
std::string serialize_model(const TranslationModel &model);

// Throws CorruptFile on truncation, bad magic or checksum mismatch, and
// IncompatibleVersion on an unknown version or when stored tensor shapes
// disagree with those implied by the stored config.
TranslationModel deserialize_model(std::string_view bytes);

void save_model(const TranslationModel &model, const std::filesystem::path &path);
TranslationModel load_model(const std::filesystem::path &path);

}  // namespace nmt
}  // namespace normlex

#endif  // NORMLEX_NMT_MODEL_IO_H_
