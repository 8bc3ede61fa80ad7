#include "gamp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gamp/errors.hpp"

namespace gamp {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view next_token(std::string_view& rest) {
  std::size_t b = 0;
  while (b < rest.size() && is_space(rest[b])) ++b;
  std::size_t e = b;
  while (e < rest.size() && !is_space(rest[e])) ++e;
  std::string_view tok = rest.substr(b, e - b);
  rest.remove_prefix(e);
  return tok;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

double parse_label(std::string_view tok, std::size_t line) {
  double v = 0.0;
  if (!parse_number(tok, v)) throw ParseError(line, "malformed label '" + std::string(tok) + "'");
  if (v == 1.0) return 1.0;
  if (v == -1.0 || v == 0.0) return -1.0;
  throw DomainError("line " + std::to_string(line) + ": label '" + std::string(tok) +
                    "' is not one of -1, +1, 0, 1");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void put_double(std::ostream& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.write(buf, n);
}

}  // namespace

Dataset read_libsvm(std::istream& in, std::optional<Index> num_features) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  Index max_index = 0;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::string_view rest(text);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    std::string_view tok = next_token(rest);
    if (tok.empty()) continue;
    const Index row = static_cast<Index>(labels.size());
    labels.push_back(parse_label(tok, line_no));
    Index prev = 0;
    while (!(tok = next_token(rest)).empty()) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "expected <index>:<value>, got '" + std::string(tok) + "'");
      long long idx = 0;
      double val = 0.0;
      if (!parse_number(tok.substr(0, colon), idx) || idx < 1)
        throw ParseError(line_no, "bad feature index in '" + std::string(tok) + "'");
      if (!parse_number(tok.substr(colon + 1), val)) throw ParseError(line_no, "bad feature value in '" + std::string(tok) + "'");
      if (idx <= prev) throw ParseError(line_no, "feature indices must be strictly ascending");
      prev = static_cast<Index>(idx);
      max_index = std::max(max_index, prev);
      if (val != 0.0) triplets.emplace_back(row, prev - 1, val);
    }
  }
  Index cols = max_index;
  if (num_features) {
    if (*num_features < max_index)
      throw DomainError("read_libsvm: feature index " + std::to_string(max_index) + " exceeds N=" +
                        std::to_string(*num_features));
    cols = *num_features;
  }
  const auto rows = static_cast<Index>(labels.size());
  Dataset out{FeatureMatrix::from_triplets(rows, cols, triplets), Eigen::Map<Vector>(labels.data(), rows)};
  return out;
}

Dataset read_libsvm(const std::filesystem::path& path, std::optional<Index> num_features) {
  auto in = open_in(path);
  return read_libsvm(in, num_features);
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  const FeatureMatrix& x = data.X;
  for (Index m = 0; m < data.num_examples(); ++m) {
    out << (data.y(m) > 0 ? "+1" : "-1");
    if (const auto* sp = std::get_if<SparseMatrix>(&x.storage())) {
      for (SparseMatrix::InnerIterator it(*sp, m); it; ++it) {
        if (it.value() == 0.0) continue;
        out << ' ' << (it.col() + 1) << ':';
        put_double(out, it.value());
      }
    } else {
      const auto& dense = std::get<DenseMatrix>(x.storage());
      for (Index n = 0; n < dense.cols(); ++n) {
        if (dense(m, n) == 0.0) continue;
        out << ' ' << (n + 1) << ':';
        put_double(out, dense(m, n));
      }
    }
    out << '\n';
  }
}

void write_libsvm(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  write_libsvm(out, data);
}

Dataset read_csv(std::istream& in) {
  std::vector<double> labels;
  std::vector<double> values;
  Index cols = -1;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    std::string_view rest(text);
    while (!rest.empty() && is_space(rest.back())) rest.remove_suffix(1);
    if (rest.empty()) continue;
    Index count = 0;
    bool first = true;
    while (true) {
      const auto comma = rest.find(',');
      std::string_view field = rest.substr(0, comma);
      while (!field.empty() && is_space(field.front())) field.remove_prefix(1);
      while (!field.empty() && is_space(field.back())) field.remove_suffix(1);
      if (first) {
        labels.push_back(parse_label(field, line_no));
        first = false;
      } else {
        double v = 0.0;
        if (!parse_number(field, v)) throw ParseError(line_no, "bad value '" + std::string(field) + "'");
        values.push_back(v);
        ++count;
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols < 0) cols = count;
    if (count != cols) throw ParseError(line_no, "expected " + std::to_string(cols) + " features, got " + std::to_string(count));
  }
  if (cols < 0) cols = 0;
  const auto rows = static_cast<Index>(labels.size());
  DenseMatrix x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), rows, cols);
  return Dataset{FeatureMatrix(std::move(x)), Eigen::Map<Vector>(labels.data(), rows)};
}

Dataset read_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const DenseMatrix x = data.X.to_dense();
  for (Index m = 0; m < x.rows(); ++m) {
    out << (data.y(m) > 0 ? "1" : "-1");
    for (Index n = 0; n < x.cols(); ++n) {
      out << ',';
      put_double(out, x(m, n));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  auto out = open_out(path);
  write_csv(out, data);
}

}  // namespace gamp
