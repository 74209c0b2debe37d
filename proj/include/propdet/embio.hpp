#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace propdet {

struct TokenKey {
  std::string article_id;
  std::size_t fragment_index = 0;
  std::size_t token_index = 0;
  auto operator<=>(const TokenKey&) const = default;
};

/// Fixed-width vectors keyed by token position or instance id. Backed by the
/// `#dim=<d>` sidecar text files.
template <typename Key>
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }

  /// Returns true when an existing row was replaced.
  bool insert(Key key, Eigen::VectorXd v);
  const Eigen::VectorXd* find(const Key& key) const {
    const auto it = rows_.find(key);
    return it == rows_.end() ? nullptr : &it->second;
  }
  const std::map<Key, Eigen::VectorXd>& rows() const { return rows_; }

  bool operator==(const EmbeddingTable& o) const {
    if (dim_ != o.dim_ || rows_.size() != o.rows_.size()) return false;
    for (auto a = rows_.begin(), b = o.rows_.begin(); a != rows_.end(); ++a, ++b) {
      if (a->first != b->first || a->second != b->second) return false;
    }
    return true;
  }

 private:
  Eigen::Index dim_ = 0;
  std::map<Key, Eigen::VectorXd> rows_;
};

using TokenEmbeddingTable = EmbeddingTable<TokenKey>;
using SeqEmbeddingTable = EmbeddingTable<std::size_t>;

/// Body rows `article_id<TAB>fragment_index<TAB>token_index<TAB>v1 ... vd`.
TokenEmbeddingTable read_token_embeddings(const std::filesystem::path& path);
TokenEmbeddingTable parse_token_embeddings(std::istream& in, const std::string& source);
void write_token_embeddings(std::ostream& out, const TokenEmbeddingTable& table);

/// Body rows `instance_id<TAB>v1 ... vd`.
SeqEmbeddingTable read_seq_embeddings(const std::filesystem::path& path);
SeqEmbeddingTable parse_seq_embeddings(std::istream& in, const std::string& source);
void write_seq_embeddings(std::ostream& out, const SeqEmbeddingTable& table);

/// Deterministic pseudo-embedding in [-1, 1]^dim from the lowercased token,
/// coordinate index and seed. Offline substitute for pretrained vectors.
Eigen::VectorXd hash_embedding(std::string_view token, Eigen::Index dim, std::uint64_t seed);

/// Mean of the token hash embeddings of `text` (zero vector for empty text).
Eigen::VectorXd hash_sequence_embedding(std::string_view text, Eigen::Index dim, std::uint64_t seed);

}  // namespace propdet
