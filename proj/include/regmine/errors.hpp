#pragma once

#include <stdexcept>
#include <string>

namespace regmine {

enum class Errc {
  MalformedLine,
  InvalidTimestamp,
  EmptyFile,
  UnorderedInput,
  UnknownMessageId,
  UnknownCategory,
  DuplicateRating,
  CoverageMismatch,
  DegenerateDistribution,
  TooFewRaters,
  EmptyEpisode,
  NoTemplates,
  OutOfOrderEvent,
  BadConfig,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::InvalidTimestamp: return "InvalidTimestamp";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::UnorderedInput: return "UnorderedInput";
    case Errc::UnknownMessageId: return "UnknownMessageId";
    case Errc::UnknownCategory: return "UnknownCategory";
    case Errc::DuplicateRating: return "DuplicateRating";
    case Errc::CoverageMismatch: return "CoverageMismatch";
    case Errc::DegenerateDistribution: return "DegenerateDistribution";
    case Errc::TooFewRaters: return "TooFewRaters";
    case Errc::EmptyEpisode: return "EmptyEpisode";
    case Errc::NoTemplates: return "NoTemplates";
    case Errc::OutOfOrderEvent: return "OutOfOrderEvent";
    case Errc::BadConfig: return "BadConfig";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        detail_(what) {}

  Errc code() const { return code_; }
  const std::string& detail() const { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace regmine
