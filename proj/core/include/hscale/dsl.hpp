#pragma once

#include <string>

#include "hscale/orfun.hpp"

namespace hscale::dsl {

/// Prefix grammar for order functions:
///   pow:S | logp:E | loglogp:E | logstar | const:C
///   mul(F,G) | div(F,G) | rescale(F,P) | interp(F0,F1,PSI)
///   tab(LT:LV,LT:LV,...)          knots in (log t, log value) form
/// Numbers are printed with 17 significant digits so parse(render(f)) == f.
std::string render(const orfun::OrFunction& f);
orfun::OrFunction parse(const std::string& text);

std::string render(const orfun::PsiParameter& psi);
orfun::PsiParameter parse_psi(const std::string& text);

}  // namespace hscale::dsl
