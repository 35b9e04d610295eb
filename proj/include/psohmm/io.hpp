#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "psohmm/hmm.hpp"

namespace psohmm {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `value`.
/// Infinities render as "inf" / "-inf", NaN as "nan".
std::string format_double(double value);

// Model documents are JSON objects:
//   {"format": "psohmm-model", "version": 1, "n": 2, "m": 5, "d": 1,
//    "pi": [..n..], "trans": [[..n..] x n], "emit": [[[..m..] x n] x d]}
nlohmann::json model_to_json(const HmmModel& model);
HmmModel model_from_json(const nlohmann::json& doc);

std::string serialize_model(const HmmModel& model);
HmmModel parse_model(const std::string& text);

void write_model_file(const std::filesystem::path& path, const HmmModel& model);
HmmModel read_model_file(const std::filesystem::path& path);

/// Metadata carried in the `#` comment header of a sequence file.
struct SequenceHeader {
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<std::size_t> d;
  std::optional<std::uint64_t> seed;
};

struct SequenceFile {
  SequenceHeader header;
  ObservationSequence sequence;
};

// Sequence files: a header line `# n=2 m=5 d=1 seed=7`, then one step per
// line with d comma-separated symbol indices. Further `#` lines and blank
// lines are ignored.
void write_sequence(std::ostream& out, const ObservationSequence& seq,
                    const SequenceHeader& header);
SequenceFile read_sequence(std::istream& in);

void write_sequence_file(const std::filesystem::path& path, const ObservationSequence& seq,
                         const SequenceHeader& header);
SequenceFile read_sequence_file(const std::filesystem::path& path);

/// Write `content` to `path`, creating parent directories. Throws
/// std::runtime_error naming the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace psohmm
