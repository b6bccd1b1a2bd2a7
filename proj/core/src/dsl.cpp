#include "hscale/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <vector>

namespace hscale::dsl {

using orfun::OrFunction;
using orfun::PsiParameter;
using Kind = OrFunction::Kind;
using Node = OrFunction::Node;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void render_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Power:
      out += "pow:" + num(n.a);
      return;
    case Kind::LogP:
      out += "logp:" + num(n.a);
      return;
    case Kind::LogLogP:
      out += "loglogp:" + num(n.a);
      return;
    case Kind::LogStar:
      out += "logstar";
      return;
    case Kind::Const:
      out += "const:" + num(std::exp(n.a));
      return;
    case Kind::Product:
      out += "mul(";
      render_node(*n.lhs, out);
      out += ',';
      render_node(*n.rhs, out);
      out += ')';
      return;
    case Kind::Quotient:
      out += "div(";
      render_node(*n.lhs, out);
      out += ',';
      render_node(*n.rhs, out);
      out += ')';
      return;
    case Kind::Rescale:
      out += "rescale(";
      render_node(*n.lhs, out);
      out += ',' + num(n.a) + ')';
      return;
    case Kind::Tabulated: {
      out += "tab(";
      for (size_t i = 0; i < n.log_t.size(); ++i) {
        if (i) out += ',';
        out += num(n.log_t[i]) + ':' + num(n.log_v[i]);
      }
      out += ')';
      return;
    }
    case Kind::Interp:
      out += "interp(";
      render_node(*n.lhs, out);
      out += ',';
      render_node(*n.rhs, out);
      out += ',';
      render_node(*n.psi, out);
      out += ')';
      return;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  OrFunction parse() {
    OrFunction f = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return f;
  }

 private:
  const std::string& s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("function DSL: " + why + " at offset " +
                                std::to_string(pos_) + " in '" + s_ + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() &&
           std::isalpha(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected a combinator name");
    return s_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<size_t>(end - begin);
    return v;
  }

  OrFunction expr() {
    const std::string name = ident();
    if (name == "pow") {
      expect(':');
      return OrFunction::power(number());
    }
    if (name == "logp") {
      expect(':');
      return OrFunction::logp(number());
    }
    if (name == "loglogp") {
      expect(':');
      return OrFunction::loglogp(number());
    }
    if (name == "logstar") return OrFunction::logstar();
    if (name == "const") {
      expect(':');
      return OrFunction::constant(number());
    }
    if (name == "mul" || name == "div") {
      expect('(');
      OrFunction a = expr();
      expect(',');
      OrFunction b = expr();
      expect(')');
      return name == "mul" ? OrFunction::product(a, b)
                           : OrFunction::quotient(a, b);
    }
    if (name == "rescale") {
      expect('(');
      OrFunction f = expr();
      expect(',');
      double p = number();
      expect(')');
      return OrFunction::rescale(f, p);
    }
    if (name == "tab") {
      expect('(');
      std::vector<double> lt, lv;
      do {
        lt.push_back(number());
        expect(':');
        lv.push_back(number());
      } while (consume(','));
      expect(')');
      return OrFunction::tabulated_log(std::move(lt), std::move(lv));
    }
    if (name == "interp") {
      expect('(');
      OrFunction f0 = expr();
      expect(',');
      OrFunction f1 = expr();
      expect(',');
      OrFunction psi = expr();
      expect(')');
      auto n = std::make_shared<Node>();
      n->kind = Kind::Interp;
      n->lhs = f0.node();
      n->rhs = f1.node();
      n->psi = psi.node();
      return OrFunction(std::move(n));
    }
    fail("unknown combinator '" + name + "'");
  }
};

}  // namespace

std::string render(const OrFunction& f) {
  std::string out;
  render_node(*f.node(), out);
  return out;
}

OrFunction parse(const std::string& text) { return Parser(text).parse(); }

std::string render(const PsiParameter& psi) { return render(psi.upper()); }

PsiParameter parse_psi(const std::string& text) {
  return PsiParameter(parse(text));
}

}  // namespace hscale::dsl
