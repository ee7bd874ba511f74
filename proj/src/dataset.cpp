#include "asgd/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "asgd/rng.hpp"
#include "asgd/harness.hpp"

namespace asgd {

namespace {

double parse_real(const std::string& tok, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError("malformed number '" + tok + "'", line);
  return v;
}

}  // namespace

Dataset parse_sparse_text(std::istream& in,
                          std::optional<std::uint32_t> dim_override) {
  Dataset d;
  std::uint32_t max_index = 0;  // 0-based
  bool any_index = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    Example e;
    e.label = parse_real(tok, lineno);
    long long prev = -1;
    while (ls >> tok) {
      std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError("malformed token '" + tok + "'", lineno);
      std::uint64_t idx1 = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + colon, idx1);
      if (ec != std::errc{} || p != tok.data() + colon || idx1 == 0)
        throw ParseError("malformed index in '" + tok + "'", lineno);
      double val = parse_real(tok.substr(colon + 1), lineno);
      long long idx0 = static_cast<long long>(idx1) - 1;  // 1-based file
      if (idx0 <= prev)
        throw ParseError("indices not strictly increasing at '" + tok + "'",
                         lineno);
      prev = idx0;
      if (val == 0.0) continue;  // stored zeros are not support
      e.indices.push_back(static_cast<std::uint32_t>(idx0));
      e.values.push_back(val);
      max_index = std::max(max_index, static_cast<std::uint32_t>(idx0));
      any_index = true;
    }
    d.examples.push_back(std::move(e));
  }
  if (d.examples.empty()) throw ParseError("empty dataset", lineno);
  d.dim = dim_override ? *dim_override : (any_index ? max_index + 1 : 1);
  for (std::size_t i = 0; i < d.examples.size(); ++i)
    if (!d.examples[i].indices.empty() &&
        d.examples[i].indices.back() >= d.dim)
      throw ParseError("index exceeds dimension override", i + 1);
  return d;
}

Dataset parse_sparse_text(const std::string& text,
                          std::optional<std::uint32_t> dim_override) {
  std::istringstream in(text);
  return parse_sparse_text(in, dim_override);
}

Dataset load_sparse_file(const std::string& path,
                         std::optional<std::uint32_t> dim_override) {
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string text;
    char buf[1 << 16];
    int got;
    while ((got = gzread(f, buf, sizeof buf)) > 0) text.append(buf, got);
    bool bad = got < 0;
    gzclose(f);
    if (bad) throw std::runtime_error("gzip read error on " + path);
    return parse_sparse_text(text, dim_override);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_sparse_text(in, dim_override);
}

std::string serialize_sparse_text(const Dataset& d) {
  std::string out;
  for (const Example& e : d.examples) {
    out += format_double(e.label);
    for (std::size_t k = 0; k < e.indices.size(); ++k) {
      out += ' ';
      out += std::to_string(e.indices[k] + 1);  // back to 1-based
      out += ':';
      out += format_double(e.values[k]);
    }
    out += '\n';
  }
  return out;
}

Dataset subsample(const Dataset& d, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m > d.n())
    throw std::invalid_argument("subsample size out of range");
  std::vector<std::size_t> order(d.n());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  // partial Fisher-Yates: first m entries are the sample
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i + uniform_index(rng, d.n() - i);
    std::swap(order[i], order[j]);
  }
  Dataset out;
  out.dim = d.dim;
  out.examples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.examples.push_back(d.examples[order[i]]);
  return out;
}

}  // namespace asgd
