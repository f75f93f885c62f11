#pragma once

#include <stdexcept>
#include <string>

namespace seglink {

enum class Errc {
  ragged_input,
  unknown_tile,
  mixed_orientation,
  mixed_slice_length,
  corpus_too_short,
  sequence_too_short,
  exhausted,
  unknown_structure,
  malformed_level,
  corpus_missing,
  bad_config,
};

inline const char* to_string(Errc e) {
  switch (e) {
    case Errc::ragged_input: return "RaggedInput";
    case Errc::unknown_tile: return "UnknownTile";
    case Errc::mixed_orientation: return "MixedOrientation";
    case Errc::mixed_slice_length: return "MixedSliceLength";
    case Errc::corpus_too_short: return "CorpusTooShort";
    case Errc::sequence_too_short: return "SequenceTooShort";
    case Errc::exhausted: return "Exhausted";
    case Errc::unknown_structure: return "UnknownStructure";
    case Errc::malformed_level: return "MalformedLevel";
    case Errc::corpus_missing: return "CorpusMissing";
    case Errc::bad_config: return "BadConfig";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace seglink
