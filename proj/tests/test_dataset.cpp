#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include <zlib.h>

#include "asgd/dataset.hpp"

using namespace asgd;

TEST_CASE("basic sparse text parsing, 1-based to 0-based") {
  Dataset d = parse_sparse_text(std::string("+1 1:0.5 3:2.0\n-1 2:1.0"));
  CHECK(d.dim == 3);
  REQUIRE(d.n() == 2);
  CHECK(d.examples[0].label == 1.0);
  CHECK(d.examples[0].indices == std::vector<std::uint32_t>{0, 2});
  CHECK(d.examples[0].values == std::vector<double>{0.5, 2.0});
  CHECK(d.examples[1].label == -1.0);
  CHECK(d.examples[1].indices == std::vector<std::uint32_t>{1});
}

TEST_CASE("empty stream is an error") {
  CHECK_THROWS_WITH_AS(parse_sparse_text(std::string("")),
                       doctest::Contains("empty dataset"), ParseError);
  CHECK_THROWS_AS(parse_sparse_text(std::string("# only a comment\n\n")),
                  ParseError);
}

TEST_CASE("malformed input reports the line number") {
  try {
    parse_sparse_text(std::string("+1 1:0.5\n-1 2:oops"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse_sparse_text(std::string("+1 3:1.0 2:1.0"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("comments, blank lines, and explicit zeros") {
  Dataset d = parse_sparse_text(
      std::string("# header\n\n+1 1:1.0 2:0.0 3:2.0\n\n# tail\n"));
  REQUIRE(d.n() == 1);
  CHECK(d.examples[0].indices == std::vector<std::uint32_t>{0, 2});
  CHECK(d.examples[0].values == std::vector<double>{1.0, 2.0});
}

TEST_CASE("dim override must cover the data") {
  Dataset d = parse_sparse_text(std::string("+1 1:1.0"), 10u);
  CHECK(d.dim == 10);
  CHECK_THROWS_AS(parse_sparse_text(std::string("+1 5:1.0"), 2u), ParseError);
}

TEST_CASE("support is the stored index list") {
  Dataset d = parse_sparse_text(
      std::string("1 1:1 2:1\n1 2:1 3:1\n1 3:1"));
  CHECK(support(d.examples[0]) == std::vector<std::uint32_t>{0, 1});
  CHECK(support(d.examples[1]) == std::vector<std::uint32_t>{1, 2});
  CHECK(support(d.examples[2]) == std::vector<std::uint32_t>{2});
}

TEST_CASE("serialize/parse round trip") {
  Dataset d = parse_sparse_text(
      std::string("+1 1:0.5 3:2.25\n-1 2:1e-3\n3.5 1:-7.125"));
  Dataset r = parse_sparse_text(serialize_sparse_text(d), d.dim);
  REQUIRE(r.n() == d.n());
  CHECK(r.dim == d.dim);
  for (std::size_t i = 0; i < d.n(); ++i) {
    CHECK(r.examples[i].label == d.examples[i].label);
    CHECK(r.examples[i].indices == d.examples[i].indices);
    CHECK(r.examples[i].values == d.examples[i].values);
  }
}

TEST_CASE("gzip files load transparently") {
  std::string text = "+1 1:0.5 3:2.0\n-1 2:1.0\n";
  std::string path = "test_tmp_dataset.txt.gz";
  gzFile f = gzopen(path.c_str(), "wb");
  REQUIRE(f != nullptr);
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);
  Dataset d = load_sparse_file(path);
  std::remove(path.c_str());
  CHECK(d.n() == 2);
  CHECK(d.dim == 3);
}

TEST_CASE("subsample determinism and subset property") {
  std::string text;
  for (int i = 1; i <= 10; ++i)
    text += std::to_string(i) + " " + std::to_string(i) + ":1.0\n";
  Dataset d = parse_sparse_text(text);

  Dataset a = subsample(d, 3, 7), b = subsample(d, 3, 7);
  REQUIRE(a.n() == 3);
  CHECK(a.dim == d.dim);
  std::multiset<double> la, lb;
  for (const Example& e : a.examples) la.insert(e.label);
  for (const Example& e : b.examples) lb.insert(e.label);
  CHECK(la == lb);
  // subset of the original labels (labels are unique here)
  for (double l : la) CHECK((l >= 1 && l <= 10));
  CHECK(la.size() == 3);

  Dataset full = subsample(d, 10, 3);
  std::multiset<double> lf;
  for (const Example& e : full.examples) lf.insert(e.label);
  std::multiset<double> orig;
  for (const Example& e : d.examples) orig.insert(e.label);
  CHECK(lf == orig);

  CHECK_THROWS(subsample(d, 11, 1));
  CHECK_THROWS(subsample(d, 0, 1));
}
