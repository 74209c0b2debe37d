#include "propdet/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "propdet/error.hpp"
#include "propdet/utf8.hpp"
#include "tsv.hpp"

namespace propdet {

namespace fs = std::filesystem;

Article Article::from_utf8(std::string id, std::string text, const std::string& source) {
  Article a;
  a.id = std::move(id);
  a.chars = utf8::decode(text, source);
  a.text = std::move(text);
  return a;
}

std::string Article::slice(std::size_t begin, std::size_t end) const {
  return utf8::encode(std::u32string_view(chars).substr(begin, end - begin));
}

std::vector<Article> load_articles(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw IoError("not a directory: " + directory.string());
  static const std::regex kPattern(R"(article(\d+)\.txt)");
  std::vector<Article> out;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, kPattern)) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw IoError("cannot read " + entry.path().string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + entry.path().string());
    out.push_back(Article::from_utf8(m[1].str(), buf.str(), entry.path().string()));
  }
  std::sort(out.begin(), out.end(), [](const Article& a, const Article& b) {
    if (a.id.size() != b.id.size()) return a.id.size() < b.id.size();
    return a.id < b.id;
  });
  return out;
}

SpanMap parse_si_spans(std::istream& in, const std::string& source) {
  SpanMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = tsv::chomp(line);
    if (row.empty()) continue;
    const auto cols = tsv::split(row);
    if (cols.size() != 3) throw FormatError(source, lineno, "expected 3 tab-separated fields");
    const auto begin = tsv::to_int<std::size_t>(cols[1]);
    const auto end = tsv::to_int<std::size_t>(cols[2]);
    if (!begin || !end) throw FormatError(source, lineno, "span offsets must be non-negative integers");
    if (*begin >= *end) throw FormatError(source, lineno, "span begin must be less than end");
    out[std::string(cols[0])].push_back({*begin, *end});
  }
  for (auto& [id, spans] : out) std::stable_sort(spans.begin(), spans.end());
  return out;
}

SpanMap load_si_spans(const fs::path& path) {
  auto in = tsv::open(path.string());
  return parse_si_spans(in, path.string());
}

void write_si_spans(std::ostream& out, const SpanMap& spans) {
  for (const auto& [id, list] : spans) {
    for (const auto& s : list) out << id << '\t' << s.begin << '\t' << s.end << '\n';
  }
}

std::vector<TechniqueInstance> parse_tc_instances(std::istream& in, const std::string& source,
                                                  bool labeled) {
  std::vector<TechniqueInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = tsv::chomp(line);
    if (row.empty()) continue;
    const auto cols = tsv::split(row);
    if (cols.size() != 4) throw FormatError(source, lineno, "expected 4 tab-separated fields");
    const auto begin = tsv::to_int<std::size_t>(cols[2]);
    const auto end = tsv::to_int<std::size_t>(cols[3]);
    if (!begin || !end) throw FormatError(source, lineno, "span offsets must be non-negative integers");
    if (*begin >= *end) throw FormatError(source, lineno, "span begin must be less than end");
    TechniqueInstance inst;
    inst.article_id = std::string(cols[0]);
    inst.span = {*begin, *end};
    inst.instance_id = out.size();
    if (labeled) {
      try {
        inst.technique = parse_technique(cols[1]);
      } catch (const FormatError& e) {
        throw FormatError(source, lineno, e.what());
      }
    }
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TechniqueInstance> load_tc_instances(const fs::path& path, bool labeled) {
  auto in = tsv::open(path.string());
  return parse_tc_instances(in, path.string(), labeled);
}

void write_tc_predictions(std::ostream& out, std::span<const TechniqueInstance> instances,
                          std::span<const Technique> labels) {
  if (instances.size() != labels.size()) throw ShapeError("one label per instance required");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    out << inst.article_id << '\t' << task_name(labels[i]) << '\t' << inst.span.begin << '\t'
        << inst.span.end << '\n';
  }
}

void check_span(const Article& article, const CharSpan& span) {
  if (span.begin >= span.end || span.end > article.size()) {
    throw std::out_of_range("span [" + std::to_string(span.begin) + "," + std::to_string(span.end) +
                            ") outside article " + article.id + " of length " +
                            std::to_string(article.size()));
  }
}

namespace {

bool is_connector(char32_t c) { return c == U'\'' || c == U'’' || c == U'-'; }

bool is_sentence_end(const Token& t) { return t.text == "." || t.text == "!" || t.text == "?"; }

}  // namespace

std::vector<Token> tokenize(std::u32string_view text, std::size_t base_offset) {
  std::vector<Token> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const char32_t c = text[i];
    if (utf8::is_space(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (utf8::is_alnum(c)) {
      while (j < n) {
        if (utf8::is_alnum(text[j])) {
          ++j;
        } else if (is_connector(text[j]) && j + 1 < n && utf8::is_alnum(text[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
    }
    out.push_back({utf8::encode(text.substr(i, j - i)), base_offset + i, base_offset + j});
    i = j;
  }
  return out;
}

std::vector<std::vector<Token>> split_sentences(const Article& article) {
  const auto tokens = tokenize(article.chars);
  std::vector<std::vector<Token>> out;
  std::vector<Token> current;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    current.push_back(tokens[k]);
    const std::size_t stop = k + 1 < tokens.size() ? tokens[k + 1].begin : article.size();
    bool boundary = false;
    if (is_sentence_end(tokens[k])) {
      boundary = tokens[k].end == article.size() || utf8::is_space(article.chars[tokens[k].end]);
    }
    for (std::size_t p = tokens[k].end; !boundary && p < stop; ++p) {
      boundary = article.chars[p] == U'\n';
    }
    if (boundary) out.push_back(std::exchange(current, {}));
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

SplitClass split_class(const Token& token) {
  static const std::vector<std::string> kQuotes = {"\"", "'", "‘", "’", "“",
                                                   "”", "„", "«", "»"};
  if (std::find(kQuotes.begin(), kQuotes.end(), token.text) != kQuotes.end()) return SplitClass::Quote;
  if (token.text == ";" || token.text == "；") return SplitClass::Semicolon;
  if (token.text == "," || token.text == "，") return SplitClass::Comma;
  return SplitClass::None;
}

std::vector<std::vector<Token>> split_long(std::vector<Token> tokens, std::size_t max_len) {
  if (max_len == 0) throw std::invalid_argument("max_len must be positive");
  std::vector<std::vector<Token>> out;
  std::size_t start = 0;
  while (tokens.size() - start > max_len) {
    std::size_t cut = max_len;  // tokens [start, start + cut) form the left piece
    bool found = false;
    for (auto cls : {SplitClass::Quote, SplitClass::Semicolon, SplitClass::Comma}) {
      for (std::size_t j = max_len; j-- > 0;) {
        if (split_class(tokens[start + j]) == cls) {
          cut = j + 1;
          found = true;
          break;
        }
      }
      if (found) break;
    }
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                     tokens.begin() + static_cast<std::ptrdiff_t>(start + cut));
    start += cut;
  }
  if (start < tokens.size()) {
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(start), tokens.end());
  }
  return out;
}

std::vector<Fragment> split_fragments(const Article& article, std::size_t max_len) {
  std::vector<Fragment> out;
  for (auto& sentence : split_sentences(article)) {
    for (auto& piece : split_long(std::move(sentence), max_len)) {
      out.push_back({article.id, out.size(), std::move(piece)});
    }
  }
  return out;
}

LabelSequence project_labels(const Fragment& fragment, std::span<const CharSpan> gold) {
  LabelSequence out(fragment.size(), IoLabel::O);
  for (std::size_t k = 0; k < fragment.size(); ++k) {
    const auto tok = fragment.tokens[k].span();
    for (const auto& s : gold) {
      if (s.overlaps(tok)) {
        out[k] = IoLabel::I;
        break;
      }
    }
  }
  return out;
}

std::vector<CharSpan> labels_to_spans(const Fragment& fragment, std::span<const IoLabel> labels) {
  if (labels.size() != fragment.size()) throw ShapeError("label count differs from token count");
  std::vector<CharSpan> out;
  std::size_t k = 0;
  while (k < labels.size()) {
    if (labels[k] != IoLabel::I) {
      ++k;
      continue;
    }
    const std::size_t first = k;
    while (k < labels.size() && labels[k] == IoLabel::I) ++k;
    out.push_back({fragment.tokens[first].begin, fragment.tokens[k - 1].end});
  }
  return out;
}

}  // namespace propdet
