#ifndef NORMLEX_ERRORS_H_
#define NORMLEX_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace normlex {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LexiconError : public Error {
 public:
  using Error::Error;
};

class RelationsError : public Error {
 public:
  using Error::Error;
};

class UnknownLanguage : public Error {
 public:
  explicit UnknownLanguage(const std::string &lang)
      : Error("unknown language: " + lang), lang_(lang) {}
  const std::string &lang() const { return lang_; }

 private:
  std::string lang_;
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates() : Error("empty candidate set") {}
};

class EmptySource : public Error {
 public:
  EmptySource() : Error("empty source string") {}
};

class EmptyDataset : public Error {
 public:
  explicit EmptyDataset(const std::string &what) : Error("empty dataset: " + what) {}
};

class IncompatibleVersion : public Error {
 public:
  using Error::Error;
};

class CorruptFile : public Error {
 public:
  using Error::Error;
};

// A malformed line in an annotation or corpus file.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line_no, const std::string &reason)
      : Error(file + ":" + std::to_string(line_no) + ": " + reason),
        file_(std::move(file)),
        line_no_(line_no) {}
  const std::string &file() const { return file_; }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string file_;
  std::size_t line_no_;
};

class OffsetMismatch : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownMention : public Error {
 public:
  using Error::Error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

}  // namespace normlex

#endif  // NORMLEX_ERRORS_H_
