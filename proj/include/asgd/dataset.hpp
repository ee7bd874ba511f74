#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace asgd {

// One labeled sparse sample. `indices` is the sample's support: strictly
// increasing 0-based coordinates, no stored zeros.
struct Example {
  double label = 0.0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
};

struct Dataset {
  std::uint32_t dim = 0;
  std::vector<Example> examples;

  std::size_t n() const { return examples.size(); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Parses `<label> <idx>:<val> ...` lines with 1-based indices. Blank lines
// and `#` comments are skipped; explicit zero values are dropped so the
// stored support equals the mathematical gradient support.
Dataset parse_sparse_text(std::istream& in,
                          std::optional<std::uint32_t> dim_override = {});
Dataset parse_sparse_text(const std::string& text,
                          std::optional<std::uint32_t> dim_override = {});

// Loads from disk; transparently inflates when the name ends in ".gz".
Dataset load_sparse_file(const std::string& path,
                         std::optional<std::uint32_t> dim_override = {});

std::string serialize_sparse_text(const Dataset& d);

// The support set D_xi of an example. Indices are already sorted and unique.
inline const std::vector<std::uint32_t>& support(const Example& e) {
  return e.indices;
}

// Uniform sample of m examples without replacement, deterministic per seed.
// dim is preserved so subsets keep the full coordinate space.
Dataset subsample(const Dataset& d, std::size_t m, std::uint64_t seed);

}  // namespace asgd
