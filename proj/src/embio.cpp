#include "propdet/embio.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "propdet/corpus.hpp"
#include "propdet/error.hpp"
#include "propdet/log.hpp"
#include "propdet/utf8.hpp"
#include "tsv.hpp"

namespace propdet {

template <typename Key>
bool EmbeddingTable<Key>::insert(Key key, Eigen::VectorXd v) {
  if (v.size() != dim_) throw ShapeError("embedding has " + std::to_string(v.size()) + " values, table dim is " +
                                         std::to_string(dim_));
  auto [it, inserted] = rows_.insert_or_assign(std::move(key), std::move(v));
  return !inserted;
}

template class EmbeddingTable<TokenKey>;
template class EmbeddingTable<std::size_t>;

namespace {

Eigen::Index parse_header(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source, 1, "missing #dim=<d> header");
  const auto row = tsv::chomp(line);
  constexpr std::string_view kPrefix = "#dim=";
  if (row.substr(0, kPrefix.size()) != kPrefix) throw FormatError(source, 1, "missing #dim=<d> header");
  const auto dim = tsv::to_int<Eigen::Index>(row.substr(kPrefix.size()));
  if (!dim || *dim < 1) throw FormatError(source, 1, "dimension must be a positive integer");
  return *dim;
}

Eigen::VectorXd parse_vector(std::string_view field, Eigen::Index dim, const std::string& source,
                             std::size_t lineno) {
  const auto parts = tsv::split_ws(field);
  if (static_cast<Eigen::Index>(parts.size()) != dim) {
    throw FormatError(source, lineno, "expected " + std::to_string(dim) + " values, found " +
                                          std::to_string(parts.size()));
  }
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto x = tsv::to_double(parts[static_cast<std::size_t>(i)]);
    if (!x) throw FormatError(source, lineno, "non-finite or malformed value '" +
                                                  std::string(parts[static_cast<std::size_t>(i)]) + "'");
    v[i] = *x;
  }
  return v;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", v[i]);
    if (i > 0) out << ' ';
    out << buf;
  }
}

template <typename Key, typename ParseKey>
EmbeddingTable<Key> parse_table(std::istream& in, const std::string& source, std::size_t key_fields,
                                ParseKey parse_key) {
  EmbeddingTable<Key> table(parse_header(in, source));
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = tsv::chomp(line);
    if (row.empty()) continue;
    const auto cols = tsv::split(row);
    if (cols.size() != key_fields + 1) {
      throw FormatError(source, lineno, "expected " + std::to_string(key_fields + 1) + " tab-separated fields");
    }
    auto key = parse_key(cols, lineno);
    if (table.insert(std::move(key), parse_vector(cols.back(), table.dim(), source, lineno))) {
      log::warn(source + ":" + std::to_string(lineno) + ": duplicate key, later row wins");
    }
  }
  return table;
}

}  // namespace

TokenEmbeddingTable parse_token_embeddings(std::istream& in, const std::string& source) {
  return parse_table<TokenKey>(in, source, 3, [&](const auto& cols, std::size_t lineno) {
    const auto frag = tsv::to_int<std::size_t>(cols[1]);
    const auto tok = tsv::to_int<std::size_t>(cols[2]);
    if (!frag || !tok) throw FormatError(source, lineno, "fragment and token indices must be integers");
    return TokenKey{std::string(cols[0]), *frag, *tok};
  });
}

TokenEmbeddingTable read_token_embeddings(const std::filesystem::path& path) {
  auto in = tsv::open(path.string());
  return parse_token_embeddings(in, path.string());
}

void write_token_embeddings(std::ostream& out, const TokenEmbeddingTable& table) {
  out << "#dim=" << table.dim() << '\n';
  for (const auto& [key, v] : table.rows()) {
    out << key.article_id << '\t' << key.fragment_index << '\t' << key.token_index << '\t';
    write_vector(out, v);
    out << '\n';
  }
}

SeqEmbeddingTable parse_seq_embeddings(std::istream& in, const std::string& source) {
  return parse_table<std::size_t>(in, source, 1, [&](const auto& cols, std::size_t lineno) {
    const auto id = tsv::to_int<std::size_t>(cols[0]);
    if (!id) throw FormatError(source, lineno, "instance id must be a non-negative integer");
    return *id;
  });
}

SeqEmbeddingTable read_seq_embeddings(const std::filesystem::path& path) {
  auto in = tsv::open(path.string());
  return parse_seq_embeddings(in, path.string());
}

void write_seq_embeddings(std::ostream& out, const SeqEmbeddingTable& table) {
  out << "#dim=" << table.dim() << '\n';
  for (const auto& [id, v] : table.rows()) {
    out << id << '\t';
    write_vector(out, v);
    out << '\n';
  }
}

namespace {

// FNV-1a followed by a splitmix64 finalizer.
std::uint64_t mix(std::uint64_t h) {
  h += 0x9E3779B97F4A7C15ULL;
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
  return h ^ (h >> 31);
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xCBF29CE484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

Eigen::VectorXd hash_embedding(std::string_view token, Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw ShapeError("embedding dimension must be positive");
  const auto base = fnv1a(utf8::to_lower(token));
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto h = mix(base ^ mix(static_cast<std::uint64_t>(i) ^ mix(seed)));
    v[i] = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return v;
}

Eigen::VectorXd hash_sequence_embedding(std::string_view text, Eigen::Index dim, std::uint64_t seed) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  const auto tokens = tokenize(utf8::decode(text));
  for (const auto& t : tokens) sum += hash_embedding(t.text, dim, seed);
  if (!tokens.empty()) sum /= static_cast<double>(tokens.size());
  return sum;
}

}  // namespace propdet
