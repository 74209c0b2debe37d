// Writes a synthetic corpus: <out>/train/, <out>/test/, span gold files and
// technique instance files.
#include <cstdlib>
#include <iostream>
#include <string>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_synthetic <out-dir> [articles=50] [held-out=10] [seed=1]\n";
    return 1;
  }
  const std::filesystem::path out = argv[1];
  const auto n = argc > 2 ? std::stoul(argv[2]) : 50UL;
  const auto held = argc > 3 ? std::stoul(argv[3]) : 10UL;
  const auto seed = argc > 4 ? std::stoull(argv[4]) : 1ULL;
  const auto [train, test] = propdet::synthetic::split(propdet::synthetic::make_si_corpus(n, seed), held);
  propdet::synthetic::write_corpus(train, out / "train", out / "train_gold.tsv");
  propdet::synthetic::write_corpus(test, out / "test", out / "test_gold.tsv");
  propdet::synthetic::write_tc_instances(propdet::synthetic::make_tc_instances(train), out / "train_tc.tsv");
  propdet::synthetic::write_tc_instances(propdet::synthetic::make_tc_instances(test), out / "test_tc.tsv");
  return 0;
}
