#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gfk/geometry.hpp"

namespace gfk {

enum class Characteristic {
  calcification,
  internal_structure,
  lobulation,
  malignancy,
  margin,
  sphericity,
  spiculation,
  subtlety,
  texture,
};

inline constexpr std::array<Characteristic, 9> kAllCharacteristics{
    Characteristic::calcification, Characteristic::internal_structure, Characteristic::lobulation,
    Characteristic::malignancy,    Characteristic::margin,             Characteristic::sphericity,
    Characteristic::spiculation,   Characteristic::subtlety,           Characteristic::texture};

/// Ordinal characteristics compared in agreement tables.
inline constexpr std::array<Characteristic, 7> kOrdinalCharacteristics{
    Characteristic::lobulation,  Characteristic::malignancy, Characteristic::margin, Characteristic::sphericity,
    Characteristic::spiculation, Characteristic::subtlety,   Characteristic::texture};

std::string_view characteristic_name(Characteristic c);
std::optional<Characteristic> parse_characteristic(std::string_view name);
/// 6 for calcification, 5 otherwise; all scales start at 1.
int characteristic_max(Characteristic c);

struct CharacteristicScores {
  std::array<std::optional<int>, 9> values{};

  std::optional<int> get(Characteristic c) const { return values[static_cast<std::size_t>(c)]; }
  void set(Characteristic c, int v) { values[static_cast<std::size_t>(c)] = v; }
  friend bool operator==(const CharacteristicScores&, const CharacteristicScores&) = default;
};

/// Smallest equivalent radius admitted as a ground-truth nodule (mm).
inline constexpr double kNoduleMinRadiusMm = 1.5;

struct NoduleTruth {
  std::string id;
  std::string scan_id;
  Vec3 centroid_mm;
  double equivalent_radius_mm = 0.0;
  std::vector<CharacteristicScores> raters;

  double diameter_mm() const { return 2.0 * equivalent_radius_mm; }
  friend bool operator==(const NoduleTruth&, const NoduleTruth&) = default;
};

/// Lesion judged not to be a nodule; marks on it are neither TP nor FP.
struct NonNodule {
  std::string id;
  std::string scan_id;
  Vec3 centroid_mm;
  double equivalent_radius_mm = 0.0;

  double diameter_mm() const { return 2.0 * equivalent_radius_mm; }
  friend bool operator==(const NonNodule&, const NonNodule&) = default;
};

struct GroundTruth {
  std::vector<NoduleTruth> nodules;
  std::vector<NonNodule> non_nodules;
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

enum class MarkKind { nodule, non_nodule_point };
enum class MarkSource { radiologist, cade };

struct Mark {
  std::string id;
  std::string scan_id;
  std::string annotator;
  Vec3 centroid_mm;
  MarkKind kind = MarkKind::nodule;
  std::optional<CharacteristicScores> scores;
  std::optional<double> equivalent_diameter_mm;
  MarkSource source = MarkSource::radiologist;
  std::optional<double> score;  // CADe probability for cade-sourced marks

  friend bool operator==(const Mark&, const Mark&) = default;
};

struct Candidate {
  std::string id;
  std::string scan_id;
  Vec3 centroid_mm;
  double bbox_w_mm = 0.0;
  double bbox_h_mm = 0.0;
  double score = 0.0;

  double max_dim_mm() const { return bbox_w_mm > bbox_h_mm ? bbox_w_mm : bbox_h_mm; }
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

GroundTruth parse_truth(std::string_view json_text);
std::vector<Mark> parse_marks(std::string_view json_text);
std::vector<Candidate> parse_candidates(std::string_view json_text);

std::string dump_truth(const GroundTruth& truth);
std::string dump_marks(const std::vector<Mark>& marks);
std::string dump_candidates(const std::vector<Candidate>& candidates);

GroundTruth load_truth(const std::filesystem::path& path);
std::vector<Mark> load_marks(const std::filesystem::path& path);
std::vector<Candidate> load_candidates(const std::filesystem::path& path);

void save_truth(const std::filesystem::path& path, const GroundTruth& truth);
void save_marks(const std::filesystem::path& path, const std::vector<Mark>& marks);
void save_candidates(const std::filesystem::path& path, const std::vector<Candidate>& candidates);

/// Text helpers shared by the file writers.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gfk
