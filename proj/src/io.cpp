#include "psohmm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace psohmm {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

nlohmann::json model_to_json(const HmmModel& model) {
  nlohmann::json trans = nlohmann::json::array();
  for (std::size_t i = 0; i < model.n; ++i) {
    auto row = model.trans_row(i);
    trans.push_back(std::vector<double>(row.begin(), row.end()));
  }
  nlohmann::json emit = nlohmann::json::array();
  for (std::size_t r = 0; r < model.d; ++r) {
    nlohmann::json dim = nlohmann::json::array();
    for (std::size_t i = 0; i < model.n; ++i) {
      auto row = model.emit_row(r, i);
      dim.push_back(std::vector<double>(row.begin(), row.end()));
    }
    emit.push_back(std::move(dim));
  }
  return {{"format", "psohmm-model"}, {"version", 1},    {"n", model.n},
          {"m", model.m},             {"d", model.d},    {"pi", model.pi},
          {"trans", std::move(trans)}, {"emit", std::move(emit)}};
}

namespace {

std::vector<double> read_row(const nlohmann::json& row, std::size_t expected,
                             const std::string& label) {
  if (!row.is_array() || row.size() != expected) {
    throw ParseError("model document: " + label + " must be an array of " +
                     std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : row) {
    if (!v.is_number()) throw ParseError("model document: non-numeric entry in " + label);
    out.push_back(v.get<double>());
  }
  return out;
}

std::size_t read_positive(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_unsigned() || doc[key].get<std::size_t>() == 0) {
    throw ParseError(std::string("model document: '") + key + "' must be a positive integer");
  }
  return doc[key].get<std::size_t>();
}

}  // namespace

HmmModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("model document must be a JSON object");
  if (doc.contains("format") && doc["format"] != "psohmm-model") {
    throw ParseError("model document: unexpected format tag");
  }
  HmmModel model(read_positive(doc, "n"), read_positive(doc, "m"), read_positive(doc, "d"));
  for (const char* key : {"pi", "trans", "emit"}) {
    if (!doc.contains(key)) throw ParseError(std::string("model document: missing '") + key + "'");
  }
  model.pi = read_row(doc["pi"], model.n, "pi");
  const auto& trans = doc["trans"];
  if (!trans.is_array() || trans.size() != model.n) {
    throw ParseError("model document: 'trans' must have n rows");
  }
  for (std::size_t i = 0; i < model.n; ++i) {
    const auto row = read_row(trans[i], model.n, "trans[" + std::to_string(i) + "]");
    std::copy(row.begin(), row.end(), model.trans.begin() + static_cast<std::ptrdiff_t>(i * model.n));
  }
  const auto& emit = doc["emit"];
  if (!emit.is_array() || emit.size() != model.d) {
    throw ParseError("model document: 'emit' must have d matrices");
  }
  for (std::size_t r = 0; r < model.d; ++r) {
    if (!emit[r].is_array() || emit[r].size() != model.n) {
      throw ParseError("model document: each emit matrix must have n rows");
    }
    for (std::size_t i = 0; i < model.n; ++i) {
      const auto row = read_row(emit[r][i], model.m,
                                "emit[" + std::to_string(r) + "][" + std::to_string(i) + "]");
      std::copy(row.begin(), row.end(),
                model.emit.begin() + static_cast<std::ptrdiff_t>((r * model.n + i) * model.m));
    }
  }
  return model;
}

std::string serialize_model(const HmmModel& model) { return model_to_json(model).dump(2) + "\n"; }

HmmModel parse_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model document is not valid JSON: ") + e.what());
  }
  return model_from_json(doc);
}

void write_model_file(const std::filesystem::path& path, const HmmModel& model) {
  write_text_file(path, serialize_model(model));
}

HmmModel read_model_file(const std::filesystem::path& path) {
  try {
    return parse_model(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_sequence(std::ostream& out, const ObservationSequence& seq,
                    const SequenceHeader& header) {
  out << "#";
  if (header.n) out << " n=" << *header.n;
  if (header.m) out << " m=" << *header.m;
  out << " d=" << seq.dims();
  if (header.seed) out << " seed=" << *header.seed;
  out << "\n";
  for (std::size_t t = 0; t < seq.length(); ++t) {
    const auto step = seq.step(t);
    for (std::size_t r = 0; r < step.size(); ++r) {
      if (r) out << ',';
      out << step[r];
    }
    out << '\n';
  }
}

namespace {

template <typename T>
T parse_number(std::string_view text, const std::string& context) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError(context + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

void parse_header_line(std::string_view line, SequenceHeader& header) {
  std::istringstream tokens{std::string(line.substr(1))};
  std::string tok;
  while (tokens >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const std::string_view value = std::string_view(tok).substr(eq + 1);
    if (key == "n") header.n = parse_number<std::size_t>(value, "header n");
    else if (key == "m") header.m = parse_number<std::size_t>(value, "header m");
    else if (key == "d") header.d = parse_number<std::size_t>(value, "header d");
    else if (key == "seed") header.seed = parse_number<std::uint64_t>(value, "header seed");
  }
}

}  // namespace

SequenceFile read_sequence(std::istream& in) {
  SequenceFile file;
  std::vector<std::uint32_t> symbols;
  std::optional<std::size_t> dims;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') {
      parse_header_line(line, file.header);
      continue;
    }
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      auto field = rest.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      symbols.push_back(parse_number<std::uint32_t>(field, "line " + std::to_string(line_no)));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!dims) dims = count;
    if (count != *dims) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(*dims) +
                       " symbols, found " + std::to_string(count));
    }
  }
  if (!dims) throw ParseError("sequence file contains no steps");
  if (file.header.d && *file.header.d != *dims) {
    throw ParseError("sequence header says d=" + std::to_string(*file.header.d) +
                     " but steps have " + std::to_string(*dims) + " symbols");
  }
  file.sequence = ObservationSequence(*dims, std::move(symbols));
  if (file.header.m && file.sequence.max_symbol() >= *file.header.m) {
    throw ParseError("sequence symbol " + std::to_string(file.sequence.max_symbol()) +
                     " out of range for header m=" + std::to_string(*file.header.m));
  }
  return file;
}

void write_sequence_file(const std::filesystem::path& path, const ObservationSequence& seq,
                         const SequenceHeader& header) {
  std::ostringstream out;
  write_sequence(out, seq, header);
  write_text_file(path, out.str());
}

SequenceFile read_sequence_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_sequence(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace psohmm
