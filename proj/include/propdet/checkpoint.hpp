#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace propdet::checkpoint {

/// Line-oriented reader that tracks line numbers for error messages.
class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next non-empty line; throws FormatError at end of input.
  std::string next_line();

  /// Expects `<keyword> k1=v1 k2=v2 ...` and returns the key/value pairs.
  std::map<std::string, std::string> key_values(std::string_view keyword);

  Eigen::MatrixXd tensor(std::string_view expected_name);

  [[noreturn]] void fail(const std::string& what) const;

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

void write_tensor(std::ostream& out, std::string_view name, const Eigen::MatrixXd& m);

/// Writes every tensor of `params` as `<prefix>.<name>`.
template <typename Params>
void write_params(std::ostream& out, std::string_view prefix, const Params& params) {
  params.visit([&](const char* name, const Eigen::MatrixXd& m) {
    write_tensor(out, std::string(prefix) + "." + name, m);
  });
}

/// Reads tensors into an already-shaped `params`; shapes must match.
template <typename Params>
void read_params(Reader& reader, std::string_view prefix, Params& params) {
  params.visit([&](const char* name, Eigen::MatrixXd& m) {
    auto t = reader.tensor(std::string(prefix) + "." + name);
    if (t.rows() != m.rows() || t.cols() != m.cols()) {
      reader.fail("tensor " + std::string(prefix) + "." + name + " has unexpected shape");
    }
    m = std::move(t);
  });
}

std::string format_double(double v);

}  // namespace propdet::checkpoint
