#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace propdet {

/// The 14 technique classes, ordered by their share of the development data
/// (largest first). This order is also the model output order.
enum class Technique : int {
  LoadedLanguage = 0,
  NameCalling,
  Repetition,
  FlagWaving,
  Exaggeration,
  Doubt,
  AppealToFear,
  Slogans,
  Whataboutism,
  BlackAndWhite,
  CausalOversimplification,
  ThoughtTerminating,
  AppealToAuthority,
  BandwagonReductio,
};

inline constexpr std::size_t kNumTechniques = 14;

/// Classes seen by the alternative model: everything except Repetition, same order.
inline constexpr std::size_t kNumAltTechniques = 13;

const std::array<Technique, kNumTechniques>& all_techniques();

/// Underscore form used in TSV files, e.g. "Name_Calling,Labeling".
std::string_view task_name(Technique t);

/// Human-readable form, e.g. "Name calling, labeling".
std::string_view display_name(Technique t);

/// Parses the underscore form. Throws FormatError listing all valid names.
Technique parse_technique(std::string_view name);

/// Index into the 13-class alternative output space. Repetition has none.
int alt_index(Technique t);
Technique from_alt_index(int index);

inline int index_of(Technique t) { return static_cast<int>(t); }
inline Technique technique_at(int index) { return static_cast<Technique>(index); }

}  // namespace propdet
