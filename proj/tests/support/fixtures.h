#ifndef NORMLEX_TESTS_SUPPORT_FIXTURES_H_
#define NORMLEX_TESTS_SUPPORT_FIXTURES_H_

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "normlex/pipeline.h"
#include "normlex/terminology.h"
#include "normlex/translator.h"

namespace normlex::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("normlex-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path &path, const std::string &contents) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

inline std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline ConceptId cui(uint32_t v) { return ConceptId(v); }

// Translator that counts its calls.
class CountingTranslator : public Translator {
 public:
  explicit CountingTranslator(const Translator &inner) : inner_(inner) {}
  std::optional<std::string> translate(std::string_view term) const override {
    ++calls_;
    return inner_.translate(term);
  }
  int calls() const { return calls_; }

 private:
  const Translator &inner_;
  mutable std::atomic<int> calls_{0};
};

// One fixture concept: a French term (empty when the concept has none), its
// English term, and the way a French mention of it is resolved.
struct FixtureConcept {
  uint32_t id;
  std::string fr;
  std::string en;
  std::string mention;  // French surface used in the corpus
  SearchLevel expected;
  std::string sem_group;
};

// Fifty concepts. The first thirty make the recall corpus: ten with a French
// term (ML), ten French cognates that only the English lexicon knows,
// exactly or within one edit (CL), and ten that need the dictionary (BTM).
// The last twenty are further ML concepts.
inline const std::vector<FixtureConcept> &fixture_concepts() {
  using L = SearchLevel;
  static const std::vector<FixtureConcept> concepts = {
      {100001, "grippe", "influenza", "grippe", L::kML, "DISO"},
      {100002, "céphalée", "headache", "céphalée", L::kML, "DISO"},
      {100003, "varicelle", "chickenpox", "varicelle", L::kML, "DISO"},
      {100004, "rougeole", "measles", "rougeole", L::kML, "DISO"},
      {100005, "coqueluche", "whooping cough", "coqueluche", L::kML, "DISO"},
      {100006, "oreillons", "mumps", "oreillons", L::kML, "DISO"},
      {100007, "paludisme", "malaria", "paludisme", L::kML, "DISO"},
      {100008, "tuberculose", "tuberculosis", "tuberculose", L::kML, "DISO"},
      {100009, "vertige", "vertigo", "vertige", L::kML, "DISO"},
      {100010, "rhume", "common cold", "rhume", L::kML, "DISO"},
      {100011, "", "hypertension", "hypertension", L::kCL, "DISO"},
      {100012, "", "pneumonia", "pneumonie", L::kCL, "DISO"},
      {100013, "", "asthma", "asthme", L::kCL, "DISO"},
      {100014, "", "diabetes", "diabete", L::kCL, "DISO"},
      {100015, "", "insulin", "insuline", L::kCL, "CHEM"},
      {100016, "", "migraine", "migraine", L::kCL, "DISO"},
      {100017, "", "anorexia", "anorexie", L::kCL, "DISO"},
      {100018, "", "eczema", "eczema", L::kCL, "DISO"},
      {100019, "", "psoriasis", "psoriasis", L::kCL, "DISO"},
      {100020, "", "cancer", "cancer", L::kCL, "DISO"},
      {100021, "", "kidney", "rein", L::kBTM, "ANAT"},
      {100022, "", "liver", "foie", L::kBTM, "ANAT"},
      {100023, "", "lung", "poumon", L::kBTM, "ANAT"},
      {100024, "", "heart", "coeur", L::kBTM, "ANAT"},
      {100025, "", "blood", "sang", L::kBTM, "ANAT"},
      {100026, "", "bone", "os", L::kBTM, "ANAT"},
      {100027, "", "skin", "peau", L::kBTM, "ANAT"},
      {100028, "", "brain", "cerveau", L::kBTM, "ANAT"},
      {100029, "", "stomach", "estomac", L::kBTM, "ANAT"},
      {100030, "", "eye", "oeil", L::kBTM, "ANAT"},
      {100031, "fièvre", "fever", "fièvre", L::kML, "DISO"},
      {100032, "toux", "cough", "toux", L::kML, "DISO"},
      {100033, "nausée", "nausea", "nausée", L::kML, "DISO"},
      {100034, "douleur", "pain", "douleur", L::kML, "DISO"},
      {100035, "otite", "otitis", "otite", L::kML, "DISO"},
      {100036, "cystite", "cystitis", "cystite", L::kML, "DISO"},
      {100037, "gastrite", "gastritis", "gastrite", L::kML, "DISO"},
      {100038, "bronchite", "bronchitis", "bronchite", L::kML, "DISO"},
      {100039, "arthrose", "osteoarthritis", "arthrose", L::kML, "DISO"},
      {100040, "anémie", "anemia", "anémie", L::kML, "DISO"},
      {100041, "obésité", "obesity", "obésité", L::kML, "DISO"},
      {100042, "allergie", "allergy", "allergie", L::kML, "DISO"},
      {100043, "sinusite", "sinusitis", "sinusite", L::kML, "DISO"},
      {100044, "hépatite", "hepatitis", "hépatite", L::kML, "DISO"},
      {100045, "méningite", "meningitis", "méningite", L::kML, "DISO"},
      {100046, "zona", "shingles", "zona", L::kML, "DISO"},
      {100047, "gale", "scabies", "gale", L::kML, "DISO"},
      {100048, "varice", "varicose vein", "varice", L::kML, "DISO"},
      {100049, "entorse", "sprain", "entorse", L::kML, "INJ"},
      {100050, "brûlure", "burn", "brûlure", L::kML, "INJ"},
  };
  return concepts;
}

inline std::string fixture_lexicon_tsv() {
  std::string out = "# cui\tlang\tterm\tpreferred\tsem_group\n";
  for (const FixtureConcept &c : fixture_concepts()) {
    const std::string id = ConceptId(c.id).str();
    out += id + "\ten\t" + c.en + "\t1\t" + c.sem_group + "\n";
    if (!c.fr.empty()) out += id + "\tfr\t" + c.fr + "\t1\t" + c.sem_group + "\n";
  }
  return out;
}

inline std::string fixture_dictionary_tsv() {
  std::string out;
  for (const FixtureConcept &c : fixture_concepts()) {
    if (c.expected == SearchLevel::kBTM) out += c.mention + "\t" + c.en + "\n";
  }
  return out;
}

inline DictionaryTranslator fixture_dictionary() {
  DictionaryTranslator dict;
  for (const FixtureConcept &c : fixture_concepts()) {
    if (c.expected == SearchLevel::kBTM) dict.add(c.mention, c.en);
  }
  return dict;
}

// Writes the 30-mention recall corpus: six documents of five mentions, the
// first three tagged Medline and the last three EMEA. Mention k goes to
// document k % 6 so every document mixes levels.
inline void write_recall_corpus(const std::filesystem::path &dir) {
  const auto &concepts = fixture_concepts();
  std::string manifest = "# name\tsubcorpus\tlang\n";
  for (int d = 0; d < 6; ++d) {
    std::string text, ann;
    int t = 1;
    for (int k = d; k < 30; k += 6) {
      const FixtureConcept &c = concepts[k];
      if (!text.empty()) text += ", ";
      const std::size_t start = text.size();
      text += c.mention;
      ann += "T" + std::to_string(t) + "\tDisorder " + std::to_string(start) + " " +
             std::to_string(text.size()) + "\t" + c.mention + "\n";
      ann += "N" + std::to_string(t) + "\tReference T" + std::to_string(t) + " CUI:" +
             ConceptId(c.id).str() + "\n";
      ++t;
    }
    text += ".\n";
    const std::string name = "doc" + std::to_string(d + 1);
    write_file(dir / (name + ".txt"), text);
    write_file(dir / (name + ".ann"), ann);
    manifest += name + "\t" + (d < 3 ? "Medline" : "EMEA") + "\tfr\n";
  }
  write_file(dir / "manifest.tsv", manifest);
}

// Lexicon, dictionary and corpus files of the recall fixture.
struct FixtureFiles {
  std::filesystem::path lexicon;
  std::filesystem::path dictionary;
  std::filesystem::path corpus;
};

inline FixtureFiles write_fixture_files(const std::filesystem::path &root) {
  FixtureFiles f{root / "lexicon.tsv", root / "dictionary.tsv", root / "corpus"};
  write_file(f.lexicon, fixture_lexicon_tsv());
  write_file(f.dictionary, fixture_dictionary_tsv());
  write_recall_corpus(f.corpus);
  return f;
}

}  // namespace normlex::testing

#endif  // NORMLEX_TESTS_SUPPORT_FIXTURES_H_
