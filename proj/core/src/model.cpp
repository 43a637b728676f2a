#include "gfk/model.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "gfk/error.hpp"
#include "json.hpp"

namespace gfk {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  fail(Errc::schema, fmt::format("{}: {}", where, what));
}

const json& field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema(fmt::format("{}.{}", where, key), "missing field");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) schema(fmt::format("{}.{}", where, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema(fmt::format("{}.{}", where, key), "must be finite");
  return d;
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  schema(fmt::format("{}.{}", where, key), "expected a string");
}

Vec3 vec3(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  const std::string at = fmt::format("{}.{}", where, key);
  if (!v.is_array() || v.size() != 3) schema(at, "expected [x, y, z]");
  Vec3 out;
  double* dst[3] = {&out.x, &out.y, &out.z};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) schema(at, "coordinates must be numbers");
    *dst[i] = v[i].get<double>();
    if (!std::isfinite(*dst[i])) schema(at, "coordinates must be finite");
  }
  return out;
}

CharacteristicScores parse_scores(const json& obj, const std::string& where) {
  if (!obj.is_object()) schema(where, "expected an object of characteristic scores");
  CharacteristicScores s;
  for (const auto& [key, value] : obj.items()) {
    const auto c = parse_characteristic(key);
    const std::string at = fmt::format("{}.{}", where, key);
    if (!c) schema(at, "unknown characteristic");
    if (value.is_null()) continue;
    if (!value.is_number_integer()) schema(at, "score must be an integer");
    const int v = value.get<int>();
    if (v < 1 || v > characteristic_max(*c)) schema(at, fmt::format("score {} outside 1..{}", v, characteristic_max(*c)));
    s.set(*c, v);
  }
  return s;
}

ojson dump_scores(const CharacteristicScores& s) {
  ojson o = ojson::object();
  for (Characteristic c : kAllCharacteristics)
    if (auto v = s.get(c)) o[std::string(characteristic_name(c))] = *v;
  return o;
}

json parse_document(std::string_view text_in, const char* what) {
  try {
    return json::parse(text_in);
  } catch (const json::parse_error& e) {
    fail(Errc::schema, fmt::format("{}: invalid JSON: {}", what, e.what()));
  }
}

ojson vec_json(Vec3 v) { return ojson::array({v.x, v.y, v.z}); }

}  // namespace

std::string_view characteristic_name(Characteristic c) {
  switch (c) {
    case Characteristic::calcification: return "calcification";
    case Characteristic::internal_structure: return "internal_structure";
    case Characteristic::lobulation: return "lobulation";
    case Characteristic::malignancy: return "malignancy";
    case Characteristic::margin: return "margin";
    case Characteristic::sphericity: return "sphericity";
    case Characteristic::spiculation: return "spiculation";
    case Characteristic::subtlety: return "subtlety";
    case Characteristic::texture: return "texture";
  }
  return "unknown";
}

std::optional<Characteristic> parse_characteristic(std::string_view name) {
  for (Characteristic c : kAllCharacteristics)
    if (characteristic_name(c) == name) return c;
  return std::nullopt;
}

int characteristic_max(Characteristic c) { return c == Characteristic::calcification ? 6 : 5; }

GroundTruth parse_truth(std::string_view json_text) {
  const json doc = parse_document(json_text, "truth");
  if (!doc.is_array()) schema("truth", "expected a JSON array");
  GroundTruth gt;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = fmt::format("truth[{}]", i);
    const json& e = doc[i];
    if (!e.is_object()) schema(where, "expected an object");
    std::string kind = "nodule";
    if (const auto k = e.find("kind"); k != e.end()) {
      if (!k->is_string()) schema(where + ".kind", "expected a string");
      kind = k->get<std::string>();
    }
    if (kind == "non_nodule") {
      NonNodule n{text(e, "id", where), text(e, "scan_id", where), vec3(e, "centroid_mm", where),
                  number(e, "equivalent_radius_mm", where)};
      if (!(n.equivalent_radius_mm > 0.0)) schema(where + ".equivalent_radius_mm", "must be positive");
      gt.non_nodules.push_back(std::move(n));
      continue;
    }
    if (kind != "nodule") schema(where + ".kind", fmt::format("unknown kind '{}'", kind));
    NoduleTruth n;
    n.id = text(e, "id", where);
    n.scan_id = text(e, "scan_id", where);
    n.centroid_mm = vec3(e, "centroid_mm", where);
    n.equivalent_radius_mm = number(e, "equivalent_radius_mm", where);
    if (n.equivalent_radius_mm < kNoduleMinRadiusMm)
      schema(where + ".equivalent_radius_mm",
             fmt::format("{} mm is below the {} mm inclusion bound", n.equivalent_radius_mm, kNoduleMinRadiusMm));
    const json& raters = field(e, "raters", where);
    if (!raters.is_array() || raters.empty()) schema(where + ".raters", "expected at least one rater");
    for (std::size_t r = 0; r < raters.size(); ++r)
      n.raters.push_back(parse_scores(raters[r], fmt::format("{}.raters[{}]", where, r)));
    gt.nodules.push_back(std::move(n));
  }
  return gt;
}

std::vector<Mark> parse_marks(std::string_view json_text) {
  const json doc = parse_document(json_text, "marks");
  if (!doc.is_array()) schema("marks", "expected a JSON array");
  std::vector<Mark> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = fmt::format("marks[{}]", i);
    const json& e = doc[i];
    if (!e.is_object()) schema(where, "expected an object");
    Mark m;
    m.id = text(e, "id", where);
    m.scan_id = text(e, "scan_id", where);
    m.annotator = text(e, "annotator", where);
    m.centroid_mm = vec3(e, "centroid_mm", where);
    if (const auto k = e.find("kind"); k != e.end()) {
      const std::string kind = k->is_string() ? k->get<std::string>() : "";
      if (kind == "nodule") m.kind = MarkKind::nodule;
      else if (kind == "non_nodule_point") m.kind = MarkKind::non_nodule_point;
      else schema(where + ".kind", "expected \"nodule\" or \"non_nodule_point\"");
    }
    if (const auto s = e.find("scores"); s != e.end() && !s->is_null()) m.scores = parse_scores(*s, where + ".scores");
    if (e.contains("equivalent_diameter_mm")) {
      m.equivalent_diameter_mm = number(e, "equivalent_diameter_mm", where);
      if (!(*m.equivalent_diameter_mm > 0.0)) schema(where + ".equivalent_diameter_mm", "must be positive");
    }
    if (const auto s = e.find("source"); s != e.end()) {
      const std::string src = s->is_string() ? s->get<std::string>() : "";
      if (src == "radiologist") m.source = MarkSource::radiologist;
      else if (src == "cade") m.source = MarkSource::cade;
      else schema(where + ".source", "expected \"radiologist\" or \"cade\"");
    }
    if (e.contains("score")) {
      const double p = number(e, "score", where);
      if (p < 0.0 || p > 1.0) schema(where + ".score", fmt::format("probability {} outside [0, 1]", p));
      m.score = p;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Candidate> parse_candidates(std::string_view json_text) {
  const json doc = parse_document(json_text, "candidates");
  if (!doc.is_array()) schema("candidates", "expected a JSON array");
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = fmt::format("candidates[{}]", i);
    const json& e = doc[i];
    if (!e.is_object()) schema(where, "expected an object");
    Candidate c;
    c.id = text(e, "id", where);
    c.scan_id = text(e, "scan_id", where);
    c.centroid_mm = vec3(e, "centroid_mm", where);
    const json& box = field(e, "bbox_mm", where);
    if (!box.is_array() || box.size() != 2 || !box[0].is_number() || !box[1].is_number())
      schema(where + ".bbox_mm", "expected [w, h]");
    c.bbox_w_mm = box[0].get<double>();
    c.bbox_h_mm = box[1].get<double>();
    if (!(c.bbox_w_mm > 0.0) || !(c.bbox_h_mm > 0.0)) schema(where + ".bbox_mm", "width and height must be positive");
    c.score = number(e, "score", where);
    if (c.score < 0.0 || c.score > 1.0) schema(where + ".score", fmt::format("probability {} outside [0, 1]", c.score));
    out.push_back(std::move(c));
  }
  return out;
}

std::string dump_truth(const GroundTruth& truth) {
  ojson doc = ojson::array();
  for (const auto& n : truth.nodules) {
    ojson e;
    e["id"] = n.id;
    e["scan_id"] = n.scan_id;
    e["kind"] = "nodule";
    e["centroid_mm"] = vec_json(n.centroid_mm);
    e["equivalent_radius_mm"] = n.equivalent_radius_mm;
    ojson raters = ojson::array();
    for (const auto& r : n.raters) raters.push_back(dump_scores(r));
    e["raters"] = raters;
    doc.push_back(e);
  }
  for (const auto& n : truth.non_nodules) {
    ojson e;
    e["id"] = n.id;
    e["scan_id"] = n.scan_id;
    e["kind"] = "non_nodule";
    e["centroid_mm"] = vec_json(n.centroid_mm);
    e["equivalent_radius_mm"] = n.equivalent_radius_mm;
    doc.push_back(e);
  }
  return doc.dump(2) + "\n";
}

std::string dump_marks(const std::vector<Mark>& marks) {
  ojson doc = ojson::array();
  for (const auto& m : marks) {
    ojson e;
    e["id"] = m.id;
    e["scan_id"] = m.scan_id;
    e["annotator"] = m.annotator;
    e["centroid_mm"] = vec_json(m.centroid_mm);
    e["kind"] = m.kind == MarkKind::nodule ? "nodule" : "non_nodule_point";
    if (m.scores) e["scores"] = dump_scores(*m.scores);
    if (m.equivalent_diameter_mm) e["equivalent_diameter_mm"] = *m.equivalent_diameter_mm;
    e["source"] = m.source == MarkSource::radiologist ? "radiologist" : "cade";
    if (m.score) e["score"] = *m.score;
    doc.push_back(e);
  }
  return doc.dump(2) + "\n";
}

std::string dump_candidates(const std::vector<Candidate>& candidates) {
  ojson doc = ojson::array();
  for (const auto& c : candidates) {
    ojson e;
    e["id"] = c.id;
    e["scan_id"] = c.scan_id;
    e["centroid_mm"] = vec_json(c.centroid_mm);
    e["bbox_mm"] = ojson::array({c.bbox_w_mm, c.bbox_h_mm});
    e["score"] = c.score;
    doc.push_back(e);
  }
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, fmt::format("cannot write {}", path.string()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) fail(Errc::io, fmt::format("short write on {}", path.string()));
}

GroundTruth load_truth(const std::filesystem::path& path) { return parse_truth(read_text_file(path)); }
std::vector<Mark> load_marks(const std::filesystem::path& path) { return parse_marks(read_text_file(path)); }
std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
  return parse_candidates(read_text_file(path));
}

void save_truth(const std::filesystem::path& path, const GroundTruth& truth) { write_text_file(path, dump_truth(truth)); }
void save_marks(const std::filesystem::path& path, const std::vector<Mark>& marks) {
  write_text_file(path, dump_marks(marks));
}
void save_candidates(const std::filesystem::path& path, const std::vector<Candidate>& candidates) {
  write_text_file(path, dump_candidates(candidates));
}

}  // namespace gfk
