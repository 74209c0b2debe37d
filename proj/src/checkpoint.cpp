#include "propdet/checkpoint.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "propdet/error.hpp"
#include "tsv.hpp"

namespace propdet::checkpoint {

std::string Reader::next_line() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    const auto row = tsv::chomp(line);
    if (!row.empty()) return std::string(row);
  }
  throw FormatError(source_, line_, "unexpected end of checkpoint");
}

void Reader::fail(const std::string& what) const { throw FormatError(source_, line_, what); }

std::map<std::string, std::string> Reader::key_values(std::string_view keyword) {
  const auto line = next_line();
  const auto parts = tsv::split_ws(line);
  if (parts.empty() || parts.front() != keyword) fail("expected '" + std::string(keyword) + "' line");
  std::map<std::string, std::string> out;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos) fail("expected key=value, got '" + std::string(parts[i]) + "'");
    out[std::string(parts[i].substr(0, eq))] = std::string(parts[i].substr(eq + 1));
  }
  return out;
}

Eigen::MatrixXd Reader::tensor(std::string_view expected_name) {
  const auto header = next_line();
  const auto parts = tsv::split_ws(header);
  if (parts.size() != 4 || parts[0] != "tensor" || parts[1] != expected_name) {
    fail("expected tensor " + std::string(expected_name));
  }
  const auto rows = tsv::to_int<Eigen::Index>(parts[2]);
  const auto cols = tsv::to_int<Eigen::Index>(parts[3]);
  if (!rows || !cols) fail("bad tensor shape");
  Eigen::MatrixXd m(*rows, *cols);
  for (Eigen::Index i = 0; i < *rows; ++i) {
    const auto line = next_line();
    const auto values = tsv::split_ws(line);
    if (static_cast<Eigen::Index>(values.size()) != *cols) fail("tensor row has wrong width");
    for (Eigen::Index j = 0; j < *cols; ++j) {
      const auto v = tsv::to_double(values[static_cast<std::size_t>(j)]);
      if (!v) fail("non-finite tensor value");
      m(i, j) = *v;
    }
  }
  return m;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_tensor(std::ostream& out, std::string_view name, const Eigen::MatrixXd& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace propdet::checkpoint
