#include "json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "msk/errors.hpp"

namespace msk::io {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::string edge_key(const Poset& p, std::size_t a, std::size_t b) { return p.name(a) + "<" + p.name(b); }

Edge edge_from(const Poset& p, const std::string& key) {
    auto lt = key.find('<');
    if (lt == std::string::npos) throw SchemaError("edge key '" + key + "' is not of the form a<b");
    return {p.index_of(key.substr(0, lt)), p.index_of(key.substr(lt + 1))};
}

std::vector<std::string> strings(const json& j) {
    if (!j.is_array()) throw SchemaError("expected an array of identifiers");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw SchemaError("expected an identifier, got " + e.dump());
        out.push_back(e.get<std::string>());
    }
    return out;
}

Table table_from(const json& j) {
    if (!j.is_array()) throw SchemaError("expected a table, got " + j.dump());
    Table t;
    for (const auto& v : j) {
        if (!v.is_number_unsigned()) throw SchemaError("table entries are natural numbers, got " + v.dump());
        t.push_back(v.get<std::size_t>());
    }
    return t;
}

std::size_t count_from(const json& j) {
    if (!j.is_number_unsigned()) throw SchemaError("expected a natural number, got " + j.dump());
    return j.get<std::size_t>();
}

} // namespace

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_file(const std::string& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

Poset poset_from(const json& j) {
    auto elems = strings(field(j, "elements"));
    std::vector<std::pair<std::string, std::string>> covers;
    if (j.contains("covers"))
        for (const auto& c : j.at("covers")) {
            auto pr = strings(c);
            if (pr.size() != 2) throw SchemaError("cover " + c.dump() + " is not a pair");
            covers.emplace_back(pr[0], pr[1]);
        }
    return Poset::build(elems, covers);
}

json to_json(const Poset& p) {
    json covers = json::array();
    for (auto [a, b] : p.covers()) covers.push_back({p.name(a), p.name(b)});
    return {{"elements", p.elements()}, {"covers", covers}};
}

Cosieve cosieve_from(const Poset& p, const json& names) {
    Mask m = mask_of(p, strings(names));
    if (!is_cosieve(p, m)) throw SchemaError(names.dump() + " is not upward closed");
    return Cosieve{m};
}

json to_json(const Poset& p, Cosieve c) {
    auto n = names_of(p, c.bits);
    std::sort(n.begin(), n.end());
    return n;
}

Cosieve cosieve_arg(const Poset& p, const std::string& csv) {
    json names = json::array();
    std::stringstream s(csv);
    std::string item;
    while (std::getline(s, item, ','))
        if (!item.empty()) names.push_back(item);
    return cosieve_from(p, names);
}

ModeSketch sketch_from(const json& j) {
    Poset p = poset_from(field(j, "poset"));
    std::vector<Triangle> thin;
    if (j.contains("thin"))
        for (const auto& t : j.at("thin")) {
            auto n = strings(t);
            if (n.size() != 3) throw SchemaError("thin triangle " + t.dump() + " needs three elements");
            thin.push_back({p.index_of(n[0]), p.index_of(n[1]), p.index_of(n[2])});
        }
    return ModeSketch(p, thin);
}

json to_json(const ModeSketch& s) {
    json thin = json::array();
    for (auto& t : s.thin()) thin.push_back({s.base().name(t[0]), s.base().name(t[1]), s.base().name(t[2])});
    return {{"poset", to_json(s.base())}, {"thin", thin}};
}

ModeSketch sketch_or_poset(const json& j) {
    if (j.is_object() && j.contains("poset")) return sketch_from(j);
    return ModeSketch(poset_from(j), {});
}

Copresheaf copresheaf_from(const json& j) {
    Poset p = poset_from(field(j, "base"));
    std::vector<std::size_t> card(p.size(), 0);
    const auto& c = field(j, "card");
    if (!c.is_object()) throw SchemaError("card must map elements to sizes");
    for (auto& [k, v] : c.items()) card[p.index_of(k)] = count_from(v);
    std::map<Edge, Table> edges;
    if (j.contains("edges"))
        for (auto& [k, v] : j.at("edges").items()) edges[edge_from(p, k)] = table_from(v);
    return Copresheaf(p, card, edges);
}

json to_json(const Copresheaf& x) {
    const auto& p = x.base();
    json card = json::object(), edges = json::object();
    for (std::size_t i = 0; i < p.size(); ++i) card[p.name(i)] = x.card(i);
    for (auto& [e, t] : x.edges()) edges[edge_key(p, e.first, e.second)] = t;
    return {{"base", to_json(p)}, {"card", card}, {"edges", edges}};
}

NatMap natmap_from(const Copresheaf& source, const Copresheaf& target, const json& j) {
    const auto& p = source.base();
    if (!j.is_object()) throw SchemaError("a map is an object from stages to tables");
    std::vector<Table> comps(p.size());
    std::vector<bool> seen(p.size(), false);
    for (auto& [k, v] : j.items()) {
        auto i = p.index_of(k);
        comps[i] = table_from(v);
        seen[i] = true;
    }
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!seen[i] && source.card(i) > 0) throw SchemaError("map has no table at " + p.name(i));
    return NatMap(source, target, comps);
}

json to_json(const NatMap& f) {
    json out = json::object();
    const auto& p = f.source().base();
    for (std::size_t i = 0; i < p.size(); ++i) out[p.name(i)] = f.at(i);
    return out;
}

Modality modality_from(const Poset& base, const json& j) {
    return Modality(base, cosieve_from(base, field(j, "open")), cosieve_from(base, field(j, "closed")));
}

json to_json(const Modality& m) {
    return {{"open", to_json(m.base(), m.open())}, {"closed", to_json(m.base(), m.closed())}};
}

LatticeMorphism morphism_from(const ModeSketch& t, const json& j) {
    Poset target = poset_from(field(j, "target"));
    CosieveLattice src(t.base());
    std::vector<Cosieve> table(src.size());
    std::vector<bool> seen(src.size(), false);
    for (const auto& row : field(j, "table")) {
        auto k = src.index_of(cosieve_from(t.base(), field(row, "from")));
        table[k] = cosieve_from(target, field(row, "to"));
        seen[k] = true;
    }
    for (std::size_t k = 0; k < src.size(); ++k)
        if (!seen[k]) throw SchemaError("table misses the cosieve " + to_json(t.base(), src.elements()[k]).dump());
    return LatticeMorphism(t.base(), target, table);
}

json to_json(const LatticeMorphism& p) {
    json rows = json::array();
    CosieveLattice src(p.source());
    for (std::size_t k = 0; k < src.size(); ++k)
        rows.push_back({{"from", to_json(p.source(), src.elements()[k])}, {"to", to_json(p.target(), p.table()[k])}});
    return {{"target", to_json(p.target())}, {"table", rows}};
}

ModeFamily family_from(const json& j) {
    ModeFamily f{sketch_from(field(j, "sketch")), poset_from(field(j, "base")), {}};
    const auto& t = f.sketch.base();
    const auto& modes = field(j, "modes");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!modes.contains(t.name(i))) throw SchemaError("no mode for element " + t.name(i));
        f.modes.push_back(modality_from(f.base, modes.at(t.name(i))));
    }
    return f;
}

json to_json(const ModeFamily& f) {
    json modes = json::object();
    for (std::size_t i = 0; i < f.modes.size(); ++i) modes[f.sketch.base().name(i)] = to_json(f.modes[i]);
    return {{"sketch", to_json(f.sketch)}, {"base", to_json(f.base)}, {"modes", modes}};
}

json to_json(const AxiomReport& r, const std::vector<Copresheaf>& corpus) {
    json w = json::array();
    for (auto& x : r.witnesses)
        w.push_back({{"axiom", x.axiom}, {"detail", x.detail}, {"object", to_json(corpus.at(x.object))}});
    return {{"A1", r.a1}, {"A2", r.a2}, {"A3", r.a3}, {"A3_checked", r.a3_checked},
            {"corpus_size", r.corpus_size}, {"ok", r.ok()}, {"witnesses", w}};
}

json to_json(const FractureSquare& s) {
    return {{"commutes", s.commutes},
            {"is_pullback", s.is_pullback},
            {"object", to_json(s.x)},
            {"open_part", to_json(s.open_part)},
            {"closed_part", to_json(s.closed_part)},
            {"corner", to_json(s.corner)},
            {"reassembled", to_json(s.reassembled)},
            {"iso", s.iso ? to_json(*s.iso) : json(nullptr)}};
}

LexFunctor lex_from(const Poset& source, const Poset& target, const json& j) {
    auto kind = field(j, "kind").get<std::string>();
    if (kind == "identity") {
        if (!(source == target)) throw SchemaError("identity between different models");
        return LexFunctor::identity(source);
    }
    if (kind == "precompose") {
        std::vector<std::size_t> g(target.size(), 0);
        std::vector<bool> seen(target.size(), false);
        for (auto& [k, v] : field(j, "map").items()) {
            auto i = target.index_of(k);
            g[i] = source.index_of(v.get<std::string>());
            seen[i] = true;
        }
        for (std::size_t i = 0; i < target.size(); ++i)
            if (!seen[i]) throw SchemaError("precompose map misses " + target.name(i));
        return LexFunctor::precompose(source, target, g);
    }
    if (kind == "global_sections") return LexFunctor::global_sections(source);
    if (kind == "evaluation") return LexFunctor::evaluation(source, source.index_of(field(j, "at").get<std::string>()));
    if (kind == "compose") {
        // parts listed outermost first; each part's models are inferred by
        // walking from the source
        const auto& parts = field(j, "parts");
        if (!parts.is_array() || parts.empty()) throw SchemaError("compose needs parts");
        std::vector<LexFunctor> out(parts.size());
        Poset at = source;
        for (std::size_t k = parts.size(); k-- > 0;) {
            const auto& pj = parts[k];
            Poset to = k == 0 ? target : (pj.contains("target") ? poset_from(pj.at("target")) : at);
            auto pk = pj.value("kind", "");
            if (pk == "global_sections" || pk == "evaluation") to = Poset::point();
            out[k] = lex_from(at, to, pj);
            at = out[k].target();
        }
        return LexFunctor::compose(out);
    }
    throw SchemaError("unknown functor kind '" + kind + "'");
}

json to_json(const LexFunctor& f) {
    switch (f.kind()) {
    case LexFunctor::Kind::Identity: return {{"kind", "identity"}};
    case LexFunctor::Kind::Precompose: {
        json m = json::object();
        for (std::size_t i = 0; i < f.target().size(); ++i) m[f.target().name(i)] = f.source().name(f.map()[i]);
        return {{"kind", "precompose"}, {"map", m}};
    }
    case LexFunctor::Kind::GlobalSections: return {{"kind", "global_sections"}};
    case LexFunctor::Kind::Evaluation: return {{"kind", "evaluation"}, {"at", f.source().name(f.at())}};
    case LexFunctor::Kind::Compose: {
        json parts = json::array();
        for (auto& p : f.parts()) parts.push_back(to_json(p));
        return {{"kind", "compose"}, {"parts", parts}};
    }
    }
    return nullptr;
}

SketchDiagram diagram_from(const json& j) {
    SketchDiagram d;
    d.sketch = sketch_from(field(j, "sketch"));
    const auto& t = d.sketch.base();
    const auto& models = field(j, "models");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!models.contains(t.name(i))) throw SchemaError("no model for element " + t.name(i));
        d.models.push_back(poset_from(models.at(t.name(i))));
    }
    if (j.contains("functors"))
        for (auto& [k, v] : j.at("functors").items()) {
            auto e = edge_from(t, k);
            if (!t.lt(e.first, e.second)) throw SchemaError("functor key " + k + " is not a strict pair");
            d.functors.emplace(e, lex_from(d.models[e.second], d.models[e.first], v));
        }
    return d;
}

OplaxObject oplax_from(const SketchDiagram& d, const json& j) {
    const auto& t = d.sketch.base();
    OplaxObject x;
    const auto& comps = field(j, "comps");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!comps.contains(t.name(i))) throw SchemaError("no component at " + t.name(i));
        x.comps.push_back(copresheaf_from(comps.at(t.name(i))));
        require_same_base(x.comps.back().base(), d.models[i]);
    }
    const auto& maps = field(j, "maps");
    for (auto& [e, f] : d.functors) {
        auto key = edge_key(t, e.first, e.second);
        if (!maps.contains(key)) throw SchemaError("no structure map " + key);
        x.maps[e] = natmap_from(x.comps[e.first], lex_apply(f, x.comps[e.second]), maps.at(key));
    }
    return x;
}

json to_json(const SketchDiagram& d, const OplaxObject& x) {
    const auto& t = d.sketch.base();
    json comps = json::object(), maps = json::object();
    for (std::size_t i = 0; i < x.comps.size(); ++i) comps[t.name(i)] = to_json(x.comps[i]);
    for (auto& [e, f] : x.maps) maps[edge_key(t, e.first, e.second)] = to_json(f);
    return {{"comps", comps}, {"maps", maps}};
}

json to_json(const Poset& t, const NestedGlue& g) {
    return {{"element", t.name(g.element)},
            {"head", to_json(g.head)},
            {"target", to_json(g.target)},
            {"map", to_json(g.m)},
            {"rest", g.rest ? to_json(t, *g.rest) : json(nullptr)}};
}

std::vector<GluedDecl> env_from(const json& j) {
    if (!j.is_object()) throw SchemaError("environment must map base names to declarations");
    std::vector<GluedDecl> out;
    for (auto& [k, v] : j.items()) {
        GluedDecl d{k, count_from(field(v, "static")), {}};
        for (const auto& r : field(v, "relation")) d.relation_cards.push_back(count_from(r));
        out.push_back(d);
    }
    return out;
}

} // namespace msk::io
