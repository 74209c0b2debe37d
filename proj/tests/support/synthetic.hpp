#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "propdet/corpus.hpp"

namespace propdet::synthetic {

/// Articles of neutral filler where every gold span is a run of sentinel words,
/// at most one per sentence and at least 40 characters apart.
struct Corpus {
  std::vector<Article> articles;
  SpanMap gold;
};

Corpus make_si_corpus(std::size_t articles, std::uint64_t seed, std::size_t first_id = 1000);

/// Writes `article<id>.txt` files into `dir` and the gold spans to `gold`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir, const std::filesystem::path& gold);

/// Splits off the last `held_out` articles.
std::pair<Corpus, Corpus> split(const Corpus& corpus, std::size_t held_out);

/// One labeled instance per gold span; the technique is a function of the
/// span's first sentinel word (four classes).
std::vector<TechniqueInstance> make_tc_instances(const Corpus& corpus);
void write_tc_instances(std::span<const TechniqueInstance> instances, const std::filesystem::path& path);

const std::vector<const char*>& sentinel_words();
const std::vector<const char*>& filler_words();

}  // namespace propdet::synthetic
