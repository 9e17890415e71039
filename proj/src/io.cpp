#include "tameforge/io.hpp"

#include <fstream>
#include <sstream>

namespace tameforge {

using nlohmann::json;

namespace {

[[noreturn]] void bad_doc(const std::string& what) { fail(ErrorCode::ParseError, "document: " + what); }

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) bad_doc(std::string("missing field '") + key + "'");
  return doc.at(key);
}

std::vector<std::string> string_list(const json& arr, const char* what) {
  if (!arr.is_array()) bad_doc(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& x : arr) {
    if (!x.is_string()) bad_doc(std::string(what) + " entries must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

json matrix_json(const PolyMatrix& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& x : row) r.push_back(x.str());
    rows.push_back(r);
  }
  return rows;
}

PolyMatrix matrix_from(const json& doc, const FramePtr& frame) {
  PolyMatrix m;
  if (!doc.is_array()) bad_doc("matrix must be an array of rows");
  for (const auto& row : doc) {
    m.emplace_back();
    for (const auto& s : string_list(row, "matrix row")) m.back().push_back(parse_poly(s, frame));
  }
  return m;
}

}  // namespace

json map_to_json(const PolyMap& phi) {
  json doc;
  doc["ring"] = phi.ring()->str();
  doc["vars"] = phi.frame()->names();
  doc["dim"] = phi.dim();
  json coords = json::array();
  for (const auto& c : phi.coords()) coords.push_back(c.str());
  doc["coords"] = coords;
  return doc;
}

PolyMap map_from_json(const json& doc) {
  RingPtr ring = parse_ring(field(doc, "ring").get<std::string>());
  FramePtr frame = make_frame(ring, string_list(field(doc, "vars"), "vars"));
  auto coords_text = string_list(field(doc, "coords"), "coords");
  std::size_t dim = doc.contains("dim") ? doc.at("dim").get<std::size_t>() : coords_text.size();
  std::vector<MultiPoly> coords;
  for (const auto& s : coords_text) coords.push_back(parse_poly(s, frame));
  return PolyMap(frame, dim, std::move(coords));
}

json gen_to_json(const TameGen& g) {
  json doc;
  if (auto e = std::get_if<Elementary>(&g)) {
    doc["kind"] = "elementary";
    doc["i"] = e->i + 1;
    doc["f"] = e->f.str();
  } else if (auto l = std::get_if<Linear>(&g)) {
    doc["kind"] = "linear";
    doc["matrix"] = matrix_json(l->matrix);
    doc["inverse"] = matrix_json(l->inverse);
  } else {
    doc["kind"] = "translation";
    json v = json::array();
    for (const auto& x : std::get<Translation>(g).v) v.push_back(x.str());
    doc["v"] = v;
  }
  return doc;
}

TameGen gen_from_json(const json& doc, const FramePtr& frame, std::size_t dim) {
  std::string kind = field(doc, "kind").get<std::string>();
  if (kind == "elementary") {
    std::size_t i = field(doc, "i").get<std::size_t>();
    if (i == 0 || i > dim) bad_doc("elementary index out of range");
    return make_elementary(dim, i - 1, parse_poly(field(doc, "f").get<std::string>(), frame));
  }
  if (kind == "linear") {
    return make_linear(dim, matrix_from(field(doc, "matrix"), frame), matrix_from(field(doc, "inverse"), frame));
  }
  if (kind == "translation") {
    Translation t;
    for (const auto& s : string_list(field(doc, "v"), "v")) t.v.push_back(parse_poly(s, frame));
    if (t.v.size() != dim) bad_doc("translation length");
    for (const auto& p : t.v)
      if (!params_only(p, dim)) bad_doc("translation entries must be free of coordinates");
    return t;
  }
  bad_doc("unknown generator kind '" + kind + "'");
}

json word_to_json(const TameWord& w) {
  json gens = json::array();
  for (const auto& g : w.gens()) gens.push_back(gen_to_json(g));
  return gens;
}

json word_document(const TameWord& w) {
  json doc;
  doc["ring"] = w.ring()->str();
  doc["vars"] = w.frame()->names();
  doc["dim"] = w.dim();
  doc["word"] = word_to_json(w);
  return doc;
}

TameWord word_from_json(const json& doc) {
  RingPtr ring = parse_ring(field(doc, "ring").get<std::string>());
  FramePtr frame = make_frame(ring, string_list(field(doc, "vars"), "vars"));
  std::size_t n = field(doc, "dim").get<std::size_t>();
  if (n > frame->size()) bad_doc("dim exceeds the number of variables");
  const json& gens = field(doc, "word");
  if (!gens.is_array()) bad_doc("word must be an array");
  TameWord w(frame, n);
  for (const auto& g : gens) w.push(gen_from_json(g, frame, n));
  return w;
}

json certificate_to_json(const Certificate& c) {
  json doc;
  doc["ring"] = c.word.ring()->str();
  doc["vars"] = c.word.frame()->names();
  doc["dim"] = c.target.dim();
  doc["stabilizeBy"] = c.stabilize_by;
  json target = json::array();
  for (const auto& p : c.target.coords()) target.push_back(p.str());
  doc["target"] = target;
  doc["word"] = word_to_json(c.word);
  json prov = json::array();
  for (const auto& s : c.word.provenance()) prov.push_back({{"start", s.start}, {"end", s.end}, {"source", s.source}});
  doc["provenance"] = prov;
  return doc;
}

Certificate certificate_from_json(const json& doc) {
  RingPtr ring = parse_ring(field(doc, "ring").get<std::string>());
  auto vars = string_list(field(doc, "vars"), "vars");
  std::size_t n = field(doc, "dim").get<std::size_t>();
  std::size_t m = field(doc, "stabilizeBy").get<std::size_t>();
  if (vars.size() < n + m) bad_doc("vars shorter than dim + stabilizeBy");
  FramePtr wframe = make_frame(ring, vars);
  std::vector<std::string> tvars(vars.begin(), vars.begin() + static_cast<long>(n));
  tvars.insert(tvars.end(), vars.begin() + static_cast<long>(n + m), vars.end());
  FramePtr tframe = make_frame(ring, tvars);
  std::vector<MultiPoly> coords;
  for (const auto& s : string_list(field(doc, "target"), "target")) coords.push_back(parse_poly(s, tframe));
  Certificate c;
  c.target = PolyMap(tframe, n, std::move(coords));
  c.stabilize_by = m;
  c.word = TameWord(wframe, n + m);
  const json& gens = field(doc, "word");
  if (!gens.is_array()) bad_doc("word must be an array");
  auto& raw = c.word.mutable_gens();
  for (const auto& g : gens) raw.push_back(gen_from_json(g, wframe, n + m));
  std::vector<ProvenanceSpan> spans;
  if (doc.contains("provenance")) {
    for (const auto& s : doc.at("provenance")) {
      spans.push_back({field(s, "start").get<std::size_t>(), field(s, "end").get<std::size_t>(),
                       field(s, "source").get<std::string>()});
    }
  }
  c.word.set_provenance(std::move(spans));
  return c;
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path);
  out << text;
}

}  // namespace tameforge
