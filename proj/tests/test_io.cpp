#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "psohmm/io.hpp"
#include "test_support.hpp"

namespace psohmm {
namespace {

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-153.5), "-153.5");
  EXPECT_EQ(format_double(kNegInf), "-inf");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform() * 20 - 10);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(ModelDocument, RoundTripIsBitExact) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    const auto model = random_model(1 + seed % 3, 2 + seed % 4, 1 + seed % 2, rng);
    const auto text = serialize_model(model);
    const auto back = parse_model(text);
    EXPECT_EQ(back, model);
    EXPECT_EQ(serialize_model(back), text);
  }
}

TEST(ModelDocument, RejectsMalformed) {
  EXPECT_THROW(parse_model("not json"), ParseError);
  EXPECT_THROW(parse_model(R"({"n": 2, "m": 2, "d": 1, "pi": [1, 0]})"), ParseError);
  EXPECT_THROW(parse_model(R"({"n": 0, "m": 2, "d": 1, "pi": [], "trans": [], "emit": []})"),
               ParseError);
  EXPECT_THROW(
      parse_model(R"({"n": 1, "m": 2, "d": 1, "pi": [1], "trans": [[1]], "emit": [[[0.5]]]})"),
      ParseError);
}

TEST(ModelDocument, ParsesHandWrittenModel) {
  const auto model = parse_model(R"({
    "n": 2, "m": 2, "d": 1,
    "pi": [1, 0],
    "trans": [[0, 1], [1, 0]],
    "emit": [[[1, 0], [0, 1]]]
  })");
  EXPECT_EQ(model, testing::alternating_model());
}

TEST(SequenceFormat, WritesHeaderAndSteps) {
  std::ostringstream out;
  write_sequence(out, ObservationSequence(2, {0, 1, 4, 2}), {2, 5, 2, 7});
  EXPECT_EQ(out.str(), "# n=2 m=5 d=2 seed=7\n0,1\n4,2\n");
}

TEST(SequenceFormat, RoundTrip) {
  Rng rng(3);
  const auto seq = sample_sequence(random_model(2, 5, 2, rng), 40, rng);
  std::stringstream io;
  write_sequence(io, seq, {2, 5, 2, 3});
  const auto file = read_sequence(io);
  EXPECT_EQ(file.sequence, seq);
  EXPECT_EQ(file.header.n, 2u);
  EXPECT_EQ(file.header.m, 5u);
  EXPECT_EQ(file.header.seed, 3u);
}

TEST(SequenceFormat, ToleratesCommentsBlanksAndSpaces) {
  std::istringstream in("# d=1\n\n0\n# mid comment\n 3 \r\n1\n");
  EXPECT_EQ(read_sequence(in).sequence, ObservationSequence::from_symbols({0, 3, 1}));
}

TEST(SequenceFormat, RejectsBadInput) {
  std::istringstream ragged("0,1\n2\n");
  EXPECT_THROW(read_sequence(ragged), ParseError);
  std::istringstream letters("0\nx\n");
  EXPECT_THROW(read_sequence(letters), ParseError);
  std::istringstream empty("# n=2\n");
  EXPECT_THROW(read_sequence(empty), ParseError);
  std::istringstream out_of_range("# m=3 d=1\n0\n3\n");
  EXPECT_THROW(read_sequence(out_of_range), ParseError);
  std::istringstream wrong_d("# d=2\n0\n");
  EXPECT_THROW(read_sequence(wrong_d), ParseError);
}

TEST(Files, MissingFileNamesPath) {
  try {
    read_model_file("/nonexistent/model.json");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/model.json"), std::string::npos);
  }
}

}  // namespace
}  // namespace psohmm
