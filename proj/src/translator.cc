#include "normlex/translator.h"

#include "file_util.h"
#include "normlex/errors.h"
#include "normlex/index.h"
#include "normlex/text.h"

namespace normlex {

DictionaryTranslator::DictionaryTranslator(const std::map<std::string, std::string> &entries) {
  for (const auto &[source, target] : entries) add(source, target);
}

void DictionaryTranslator::add(std::string_view source, std::string_view target) {
  std::string key = normalize_term(source).text;
  std::string_view value = text::trim(target);
  if (key.empty() || value.empty()) return;
  table_.emplace(std::move(key), std::string(value));
}

DictionaryTranslator DictionaryTranslator::load(const std::filesystem::path &path) {
  auto contents = internal::read_file(path);
  if (!contents) throw Error("cannot read dictionary " + path.string());
  DictionaryTranslator dict;
  internal::for_each_line(*contents, [&](std::size_t line_no, std::string_view line) {
    std::string_view trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') return;
    auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw ParseError(path.string(), line_no, "expected source<TAB>target");
    dict.add(fields[0], fields[1]);
  });
  return dict;
}

std::optional<std::string> DictionaryTranslator::translate(std::string_view term) const {
  const std::string key = normalize_term(term).text;
  if (key.empty()) return std::nullopt;
  auto it = table_.find(key);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

NeuralTranslator::NeuralTranslator(std::shared_ptr<const nmt::TranslationModel> model)
    : model_(std::move(model)) {
  if (!model_) throw Error("neural translator needs a model");
}

std::optional<std::string> NeuralTranslator::translate(std::string_view term) const {
  std::string_view source = text::trim(term);
  if (source.empty()) return std::nullopt;
  std::string out = nmt::decode_greedy(*model_, source);
  if (text::trim(out).empty()) return std::nullopt;
  return out;
}

}  // namespace normlex
