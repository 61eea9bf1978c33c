#pragma once

#include <string>

#include <json.hpp>

#include "msk/modality.hpp"
#include "msk/oplax.hpp"
#include "msk/translate.hpp"

namespace msk::io {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

json read_file(const std::string& path);  // SchemaError on bad JSON, with the byte offset
std::string read_text(const std::string& path);

Poset poset_from(const json& j);
json to_json(const Poset& p);
Cosieve cosieve_from(const Poset& p, const json& names);
json to_json(const Poset& p, Cosieve c);  // sorted identifiers
Cosieve cosieve_arg(const Poset& p, const std::string& csv);

ModeSketch sketch_from(const json& j);
json to_json(const ModeSketch& s);
// a bare poset is read as a sketch with nothing thin
ModeSketch sketch_or_poset(const json& j);

Copresheaf copresheaf_from(const json& j);
json to_json(const Copresheaf& x);
NatMap natmap_from(const Copresheaf& source, const Copresheaf& target, const json& j);
json to_json(const NatMap& f);  // {"stage": table}

Modality modality_from(const Poset& base, const json& j);
json to_json(const Modality& m);

// {"sketch", "target", "table": [{"from": [...], "to": [...]}]}
LatticeMorphism morphism_from(const ModeSketch& t, const json& j);
json to_json(const LatticeMorphism& p);

// {"sketch", "base", "modes": {"i": modality}}
ModeFamily family_from(const json& j);
json to_json(const ModeFamily& f);

json to_json(const AxiomReport& r, const std::vector<Copresheaf>& corpus);
json to_json(const FractureSquare& s);

LexFunctor lex_from(const Poset& source, const Poset& target, const json& j);
json to_json(const LexFunctor& f);
SketchDiagram diagram_from(const json& j);
OplaxObject oplax_from(const SketchDiagram& d, const json& j);
json to_json(const SketchDiagram& d, const OplaxObject& x);
json to_json(const Poset& t, const NestedGlue& g);

// {"B": {"static": 2, "relation": [1, 3]}}
std::vector<GluedDecl> env_from(const json& j);

} // namespace msk::io
