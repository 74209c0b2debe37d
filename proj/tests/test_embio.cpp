#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "propdet/embio.hpp"
#include "propdet/error.hpp"

using namespace propdet;

namespace {

TokenEmbeddingTable random_table(std::mt19937_64& rng, Eigen::Index dim, int rows) {
  TokenEmbeddingTable t(dim);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int r = 0; r < rows; ++r) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = u(rng);
    t.insert({std::to_string(100 + r % 3), static_cast<std::size_t>(r / 3), static_cast<std::size_t>(r % 7)}, v);
  }
  return t;
}

}  // namespace

TEST_CASE("token sidecar basics") {
  std::istringstream in("#dim=4\n1\t0\t0\t0.1 0.2 0.3 0.4\n");
  const auto t = parse_token_embeddings(in, "emb");
  CHECK(t.size() == 1);
  CHECK(t.dim() == 4);
  CHECK((*t.find({"1", 0, 0}))[3] == doctest::Approx(0.4));
  CHECK(t.find({"1", 0, 1}) == nullptr);

  std::istringstream short_row("#dim=4\n1\t0\t0\t0.1 0.2 0.3\n");
  try {
    parse_token_embeddings(short_row, "emb");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream nan_row("#dim=2\n1\t0\t0\t0.1 nan\n");
  CHECK_THROWS_AS(parse_token_embeddings(nan_row, "emb"), FormatError);
  std::istringstream no_header("1\t0\t0\t0.1\n");
  CHECK_THROWS_AS(parse_token_embeddings(no_header, "emb"), FormatError);
}

TEST_CASE("duplicate keys keep the later row") {
  std::istringstream in("#dim=1\n1\t0\t0\t0.5\n1\t0\t0\t0.25\n");
  const auto t = parse_token_embeddings(in, "emb");
  CHECK(t.size() == 1);
  CHECK((*t.find({"1", 0, 0}))[0] == 0.25);
}

TEST_CASE("sequence sidecar basics") {
  std::istringstream in("#dim=3\n7\t1 2 3\n");
  const auto t = parse_seq_embeddings(in, "seq");
  CHECK(t.size() == 1);
  CHECK((*t.find(7))[2] == 3.0);
  std::istringstream bad("#dim=3\n7\t1 2\n");
  CHECK_THROWS_AS(parse_seq_embeddings(bad, "seq"), FormatError);
  std::istringstream bad_id("#dim=1\nx\t1\n");
  CHECK_THROWS_AS(parse_seq_embeddings(bad_id, "seq"), FormatError);
}

TEST_CASE("write then read is the identity within 1e-6") {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 20; ++round) {
    const auto t = random_table(rng, 1 + round % 9, 40);
    std::stringstream buf;
    write_token_embeddings(buf, t);
    const auto back = parse_token_embeddings(buf, "rt");
    REQUIRE(back.size() == t.size());
    for (const auto& [key, v] : t.rows()) {
      const auto* w = back.find(key);
      REQUIRE(w != nullptr);
      CHECK((*w - v).cwiseAbs().maxCoeff() <= 1e-6);
    }

    SeqEmbeddingTable s(5);
    for (std::size_t id = 0; id < 30; ++id) s.insert(id * 3, Eigen::VectorXd::Random(5));
    std::stringstream sbuf;
    write_seq_embeddings(sbuf, s);
    const auto sback = parse_seq_embeddings(sbuf, "rt");
    for (const auto& [id, v] : s.rows()) CHECK((*sback.find(id) - v).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("reading ignores row order") {
  std::mt19937_64 rng(13);
  const auto t = random_table(rng, 4, 30);
  std::stringstream buf;
  write_token_embeddings(buf, t);
  std::string header;
  std::getline(buf, header);
  std::vector<std::string> lines;
  for (std::string l; std::getline(buf, l);) lines.push_back(l);
  const auto read = [&] {
    std::string text = header + "\n";
    for (const auto& l : lines) text += l + "\n";
    std::istringstream in(text);
    return parse_token_embeddings(in, "x");
  };
  const auto reference = read();
  for (int i = 0; i < 5; ++i) {
    std::shuffle(lines.begin(), lines.end(), rng);
    CHECK(read() == reference);
  }
}

TEST_CASE("hash embeddings") {
  const auto a = hash_embedding("Propaganda", 16, 0);
  CHECK(a == hash_embedding("propaganda", 16, 0));
  CHECK(a == hash_embedding("Propaganda", 16, 0));
  CHECK(a.cwiseAbs().maxCoeff() <= 1.0);

  bool any_differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto w = "tok" + std::to_string(i);
    const auto x = hash_embedding(w, 8, 1);
    const auto y = hash_embedding(w, 8, 2);
    CHECK(x.cwiseAbs().maxCoeff() <= 1.0);
    any_differs = any_differs || x != y;
  }
  CHECK(any_differs);
  CHECK(hash_embedding("a", 8, 0) != hash_embedding("b", 8, 0));
  CHECK_THROWS_AS(hash_embedding("a", 0, 0), ShapeError);
  CHECK(hash_sequence_embedding("", 4, 0) == Eigen::VectorXd::Zero(4));
  CHECK(hash_sequence_embedding("war", 4, 0) == hash_embedding("war", 4, 0));
}
