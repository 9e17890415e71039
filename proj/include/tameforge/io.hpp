#pragma once

#include <json.hpp>

#include <string>

#include "tameforge/automap.hpp"

namespace tameforge {

/// Map document: {"ring", "vars", "dim", "coords"}; variables after the first dim are parameters.
nlohmann::json map_to_json(const PolyMap& phi);
PolyMap map_from_json(const nlohmann::json& doc);

nlohmann::json gen_to_json(const TameGen& g);
TameGen gen_from_json(const nlohmann::json& doc, const FramePtr& frame, std::size_t dim);
nlohmann::json word_to_json(const TameWord& w);

/// Word document: {"ring", "vars", "dim", "word"}.
nlohmann::json word_document(const TameWord& w);
TameWord word_from_json(const nlohmann::json& doc);

/**
 * Certificate document: {"ring", "vars", "dim", "stabilizeBy", "target", "word", "provenance"}.
 * "vars" names the word's frame; the target frame omits the stabilizeBy names following the
 * first dim variables.
 */
nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& doc);

/// Deterministic pretty printing (sorted keys, two-space indent, trailing newline).
std::string dump_json(const nlohmann::json& doc);
nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tameforge
