#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace msk {

// Types and terms share one syntax. Var carries a de Bruijn index; Lvl is a
// de Bruijn level, used only while building terms and closed off afterwards.
enum class Tag { U, Unit, Tt, Pi, Sigma, Lam, App, Pair, Fst, Snd, Id, IdOver, Refl, Var, Lvl, Base };

struct Expr;
using E = std::shared_ptr<const Expr>;

struct Expr {
    Tag tag;
    std::string name;        // binder hint or base name
    std::size_t index = 0;   // Var index / Lvl level
    std::vector<E> kids;
    E annot;                 // Lam domain, filled in by the checker
};

// Children by tag:
//   Pi, Sigma: dom, cod      Lam: body          App: fun, arg
//   Pair: fst, snd           Fst, Snd: pair     Id: type, lhs, rhs
//   IdOver: family, lhs, rhs, path...           (family applied to the
//   endpoints of the paths; set-level dependent identity)
namespace mk {
E u();
E unit();
E tt();
E refl();
E var(std::size_t i);
E lvl(std::size_t l);
E base(std::string name);
E pi(std::string x, E dom, E cod);
E sigma(std::string x, E dom, E cod);
E arrow(E dom, E cod);  // cod not under the binder
E lam(std::string x, E body);
E app(E f, E a);
E apps(E f, const std::vector<E>& args);
E pair(E a, E b);
E fst(E p);
E snd(E p);
E id(E type, E lhs, E rhs);
E id_over(E family, std::vector<E> paths, E lhs, E rhs);
} // namespace mk

E shift(const E& e, std::ptrdiff_t by, std::size_t cutoff = 0);
// body[0 := s], lowering the other free indices
E instantiate(const E& body, const E& s);
// replace Lvl l by Var(depth - 1 - l)
E close_levels(const E& e, std::size_t depth);
bool has_var(const E& e, std::size_t index);  // free index occurs
bool has_levels(const E& e);

E normalize(const E& e);  // beta, fst/snd of pairs
bool alpha_eq(const E& a, const E& b);  // ignores names and annotations

// Pretty printer in the surface syntax (unicode binders). Unused λ binders
// print as _, unused Π binders as arrows; clashing names get primes.
std::string show(const E& e, const std::vector<std::string>& context = {});

// Parser. Names not bound by a binder resolve to declared bases.
struct ParsedFile {
    std::vector<std::string> bases;  // "base NAME" lines, in order
    E expr;
};
E parse_expr(const std::string& text, const std::vector<std::string>& bases);
ParsedFile parse_file(const std::string& text);

// Bidirectional checker; definitional equality is alpha-equality of beta
// normal forms, plus eta for Unit.
struct TypeContext {
    std::map<std::string, E> bases;                    // closed types
    std::vector<std::pair<std::string, E>> vars;       // innermost last
};
struct Checked {
    E expr;  // annotated
    E type;
};
Checked infer(const TypeContext& ctx, const E& e);
E check(const TypeContext& ctx, const E& e, const E& type);
E check_type(const TypeContext& ctx, const E& e);  // e : U
bool conv(const E& a, const E& b);

} // namespace msk
