#ifndef NORMLEX_TRANSLATOR_H_
#define NORMLEX_TRANSLATOR_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "normlex/nmt/model.h"

namespace normlex {

// Term translation used by the translate-then-lookup search level.
// Implementations are immutable and safe to call concurrently.
class Translator {
 public:
  virtual ~Translator() = default;
  // nullopt when the term cannot be translated. Never falls back to the
  // input.
  virtual std::optional<std::string> translate(std::string_view term) const = 0;
};

// Table lookup keyed by normalized source text.
class DictionaryTranslator : public Translator {
 public:
  DictionaryTranslator() = default;
  // Keys are normalized; the first entry wins for colliding keys.
  explicit DictionaryTranslator(const std::map<std::string, std::string> &entries);

  // Reads `source<TAB>target` lines.
  static DictionaryTranslator load(const std::filesystem::path &path);

  // Ignored when the key is already present or either side is empty.
  void add(std::string_view source, std::string_view target);

  std::optional<std::string> translate(std::string_view term) const override;
  std::size_t size() const { return table_.size(); }

 private:

  std::map<std::string, std::string> table_;
};

// Greedy decoding with a trained character-level model.
class NeuralTranslator : public Translator {
 public:
  explicit NeuralTranslator(std::shared_ptr<const nmt::TranslationModel> model);

  std::optional<std::string> translate(std::string_view term) const override;
  const nmt::TranslationModel &model() const { return *model_; }

 private:
  std::shared_ptr<const nmt::TranslationModel> model_;
};

}  // namespace normlex

#endif  // NORMLEX_TRANSLATOR_H_
