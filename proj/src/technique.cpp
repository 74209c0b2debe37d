#include "propdet/technique.hpp"

#include "propdet/error.hpp"

namespace propdet {

namespace {

struct Names {
  std::string_view task;
  std::string_view display;
};

constexpr std::array<Names, kNumTechniques> kNames = {{
    {"Loaded_Language", "Loaded language"},
    {"Name_Calling,Labeling", "Name calling, labeling"},
    {"Repetition", "Repetition"},
    {"Flag-Waving", "Flag-waving"},
    {"Exaggeration,Minimisation", "Exaggeration, minimisation"},
    {"Doubt", "Doubt"},
    {"Appeal_to_fear-prejudice", "Appeal to fear/prejudice"},
    {"Slogans", "Slogans"},
    {"Whataboutism,Straw_Men,Red_Herring", "Whataboutism, straw men, red herring"},
    {"Black-and-White_Fallacy", "Black-and-white fallacy"},
    {"Causal_Oversimplification", "Causal oversimplification"},
    {"Thought-terminating_Cliches", "Thought-terminating cliches"},
    {"Appeal_to_Authority", "Appeal to authority"},
    {"Bandwagon,Reductio_ad_hitlerum", "Bandwagon, reductio ad hitlerum"},
}};

}  // namespace

const std::array<Technique, kNumTechniques>& all_techniques() {
  static const auto all = [] {
    std::array<Technique, kNumTechniques> out{};
    for (std::size_t i = 0; i < kNumTechniques; ++i) out[i] = static_cast<Technique>(i);
    return out;
  }();
  return all;
}

std::string_view task_name(Technique t) { return kNames.at(static_cast<std::size_t>(t)).task; }

std::string_view display_name(Technique t) {
  return kNames.at(static_cast<std::size_t>(t)).display;
}

Technique parse_technique(std::string_view name) {
  for (std::size_t i = 0; i < kNumTechniques; ++i) {
    if (kNames[i].task == name) return static_cast<Technique>(i);
  }
  std::string msg = "unknown technique '" + std::string(name) + "'; valid names:";
  for (const auto& n : kNames) msg += " " + std::string(n.task);
  throw FormatError(msg);
}

int alt_index(Technique t) {
  const int i = index_of(t);
  if (t == Technique::Repetition) return -1;
  return i < index_of(Technique::Repetition) ? i : i - 1;
}

Technique from_alt_index(int index) {
  return technique_at(index < index_of(Technique::Repetition) ? index : index + 1);
}

}  // namespace propdet
