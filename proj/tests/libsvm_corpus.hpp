#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spdpeg/core.hpp"

namespace testing {

struct CorpusRow
{
  double label;
  std::vector<std::pair<std::uint32_t, double>> features; // 0-based
};

/// A LIBSVM text with either the exact expected dataset or the exact line of
/// the expected parse error.
struct CorpusCase
{
  std::string name;
  std::string text;
  std::vector<CorpusRow> rows; // valid cases
  std::size_t dimension = 0;
  std::size_t error_line = 0; // nonzero for malformed cases
};

inline spdpeg::Dataset expected_dataset(const CorpusCase& c)
{
  spdpeg::Dataset d;
  d.dimension = c.dimension;
  for (auto const& r : c.rows) {
    spdpeg::Sample s;
    s.label = r.label;
    s.features = r.features;
    d.samples.push_back(s);
  }
  return d;
}

inline std::vector<CorpusCase> libsvm_corpus()
{
  return {
    // valid
    {"single sample", "+1 1:0.5 3:2.0\n", {{1, {{0, 0.5}, {2, 2.0}}}}, 3},
    {"zero label maps to -1", "0 1:1\n", {{-1, {{0, 1.0}}}}, 1},
    {"negative label", "-1 2:3\n", {{-1, {{1, 3.0}}}}, 2},
    {"multiclass label 2 maps to +1", "2 1:1\n", {{1, {{0, 1.0}}}}, 1},
    {"fractional positive label", "0.25 1:1\n", {{1, {{0, 1.0}}}}, 1},
    {"label only", "1\n", {{1, {}}}, 0},
    {"no trailing newline", "1 1:2", {{1, {{0, 2.0}}}}, 1},
    {"crlf endings", "1 1:2\r\n-1 2:3\r\n", {{1, {{0, 2.0}}}, {-1, {{1, 3.0}}}}, 2},
    {"blank lines skipped", "\n1 1:2\n\n\n-1 1:1\n", {{1, {{0, 2.0}}}, {-1, {{0, 1.0}}}}, 1},
    {"whitespace-only lines skipped", "  \t\n1 1:2\n", {{1, {{0, 2.0}}}}, 1},
    {"tabs between tokens", "1\t1:2\t4:1\n", {{1, {{0, 2.0}, {3, 1.0}}}}, 4},
    {"leading and trailing spaces", "   1  1:2   \n", {{1, {{0, 2.0}}}}, 1},
    {"scientific notation", "1 1:1e-3 2:-2.5E+2\n", {{1, {{0, 1e-3}, {1, -250.0}}}}, 2},
    {"explicit zero value kept", "1 1:0\n", {{1, {{0, 0.0}}}}, 1},
    {"large index", "1 100000:1\n", {{1, {{99999, 1.0}}}}, 100000},
    {"dimension is max over lines", "1 2:1\n-1 7:1\n", {{1, {{1, 1.0}}}, {-1, {{6, 1.0}}}}, 7},
    {"plus-signed value", "1 1:+3\n", {{1, {{0, 3.0}}}}, 1},
    {"leading dot value", "1 1:.5\n", {{1, {{0, 0.5}}}}, 1},
    {"negative zero label", "-0 1:1\n", {{-1, {{0, 1.0}}}}, 1},
    {"float label", "+1.0 1:1\n", {{1, {{0, 1.0}}}}, 1},
    {"many features",
     "1 1:1 2:2 3:3 4:4 5:5\n",
     {{1, {{0, 1.0}, {1, 2.0}, {2, 3.0}, {3, 4.0}, {4, 5.0}}}},
     5},
    {"three samples",
     "1 1:1\n-1 2:1\n1 3:1\n",
     {{1, {{0, 1.0}}}, {-1, {{1, 1.0}}}, {1, {{2, 1.0}}}},
     3},
    {"gaps between indices", "1 2:1 10:1\n", {{1, {{1, 1.0}, {9, 1.0}}}}, 10},
    {"leading zeros in index", "1 007:1\n", {{1, {{6, 1.0}}}}, 7},
    {"17-digit value", "1 1:0.10000000000000001\n", {{1, {{0, 0.1}}}}, 1},

    // malformed
    {"non-numeric value", "1 3:x\n", {}, 0, 1},
    {"bad value on line 2", "1 1:1\n1 3:x\n", {}, 0, 2},
    {"missing colon", "1 3\n", {}, 0, 1},
    {"empty value", "1 3:\n", {}, 0, 1},
    {"empty index", "1 :3\n", {}, 0, 1},
    {"zero index", "1 0:1\n", {}, 0, 1},
    {"negative index", "1 -1:1\n", {}, 0, 1},
    {"non-increasing index", "1 2:1 2:1\n", {}, 0, 1},
    {"decreasing index", "1 3:1 2:1\n", {}, 0, 1},
    {"non-numeric label", "abc 1:1\n", {}, 0, 1},
    {"label with colon", "1:1 2:1\n", {}, 0, 1},
    {"bad label on line 3", "1 1:1\n-1 1:1\nfoo\n", {}, 0, 3},
    {"nan value", "1 1:nan\n", {}, 0, 1},
    {"inf value", "1 1:inf\n", {}, 0, 1},
    {"overflowing value", "1 1:1e400\n", {}, 0, 1},
    {"double colon", "1 1::2\n", {}, 0, 1},
    {"trailing garbage after value", "1 1:2abc\n", {}, 0, 1},
    {"fractional index", "1 1.5:2\n", {}, 0, 1},
    {"index overflows 32 bits", "1 4294967297:1\n", {}, 0, 1},
    {"double sign value", "1 1:+-2\n", {}, 0, 1},
    {"empty input", "", {}, 0, 1},
    {"blank lines only", "\n\n", {}, 0, 3},
    {"error after blank lines", "\n\n1 1:a\n", {}, 0, 3},
    {"error after crlf lines", "1 1:1\r\n1 1:1\r\n1 x\r\n", {}, 0, 3},
    {"comma separator", "1 1:1,2:2\n", {}, 0, 1},
  };
}

} // namespace testing
