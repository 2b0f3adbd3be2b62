#include "qlgs/potentials.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace qlgs {

namespace {
constexpr double kClamp = 1e300;
}

struct Expr {
  enum class Kind { Constant, Power, ExpR, ExpInvR, Min, Max, Product, Sum };
  Kind kind;
  double value = 0.0;   // Constant
  Rational exponent;    // Power: r^exponent; ExpR/ExpInvR: exact rate
  std::vector<std::shared_ptr<const Expr>> kids;
};

namespace {

using ExprPtr = std::shared_ptr<const Expr>;

double eval_node(const Expr& e, double r) {
  switch (e.kind) {
    case Expr::Kind::Constant:
      return e.value;
    case Expr::Kind::Power:
      return std::pow(r, to_double(e.exponent));
    case Expr::Kind::ExpR:
      return std::exp(to_double(e.exponent) * r);
    case Expr::Kind::ExpInvR:
      return std::exp(to_double(e.exponent) / r);
    case Expr::Kind::Min: {
      double v = std::numeric_limits<double>::infinity();
      for (const auto& k : e.kids) v = std::min(v, eval_node(*k, r));
      return v;
    }
    case Expr::Kind::Max: {
      double v = -std::numeric_limits<double>::infinity();
      for (const auto& k : e.kids) v = std::max(v, eval_node(*k, r));
      return v;
    }
    case Expr::Kind::Product: {
      double v = 1.0;
      for (const auto& k : e.kids) v *= std::min(eval_node(*k, r), kClamp);
      return v;
    }
    case Expr::Kind::Sum: {
      double v = 0.0;
      for (const auto& k : e.kids) v += eval_node(*k, r);
      return v;
    }
  }
  return 0.0;
}

bool all_constants(const Expr& e, bool strict) {
  if (e.kind == Expr::Kind::Constant) return strict ? e.value > 0.0 : e.value >= 0.0;
  for (const auto& k : e.kids)
    if (!all_constants(*k, strict)) return false;
  return true;
}

// asymptotic size comparison of leading terms; ties on (rate, power) fall to coeff
bool larger(const Leading& a, const Leading& b, bool at_zero) {
  if (a.rate != b.rate) return a.rate > b.rate;
  if (a.power != b.power) return at_zero ? a.power < b.power : a.power > b.power;
  return a.coeff > b.coeff;
}

bool same_shape(const Leading& a, const Leading& b) {
  return a.rate == b.rate && a.power == b.power;
}

Leading leading_node(const Expr& e, bool at_zero) {
  switch (e.kind) {
    case Expr::Kind::Constant:
      return {Rational(0), Rational(0), e.value};
    case Expr::Kind::Power:
      return {e.exponent, Rational(0), 1.0};
    case Expr::Kind::ExpR:
      // exp(c*r) tends to 1 near zero
      return at_zero ? Leading{Rational(0), Rational(0), 1.0}
                     : Leading{Rational(0), e.exponent, 1.0};
    case Expr::Kind::ExpInvR:
      // exp(c/r) tends to 1 toward infinity
      return at_zero ? Leading{Rational(0), e.exponent, 1.0}
                     : Leading{Rational(0), Rational(0), 1.0};
    case Expr::Kind::Product: {
      Leading out{Rational(0), Rational(0), 1.0};
      for (const auto& k : e.kids) {
        Leading l = leading_node(*k, at_zero);
        out.power += l.power;
        out.rate += l.rate;
        out.coeff *= l.coeff;
      }
      return out;
    }
    case Expr::Kind::Sum: {
      Leading out = leading_node(*e.kids.front(), at_zero);
      for (std::size_t i = 1; i < e.kids.size(); ++i) {
        Leading l = leading_node(*e.kids[i], at_zero);
        if (same_shape(l, out))
          out.coeff += l.coeff;
        else if (larger(l, out, at_zero))
          out = l;
      }
      return out;
    }
    case Expr::Kind::Min:
    case Expr::Kind::Max: {
      bool want_larger = e.kind == Expr::Kind::Max;
      Leading out = leading_node(*e.kids.front(), at_zero);
      for (std::size_t i = 1; i < e.kids.size(); ++i) {
        Leading l = leading_node(*e.kids[i], at_zero);
        if (same_shape(l, out))
          out.coeff = want_larger ? std::max(out.coeff, l.coeff) : std::min(out.coeff, l.coeff);
        else if (larger(l, out, at_zero) == want_larger)
          out = l;
      }
      return out;
    }
  }
  return {};
}

// tokenizer for the weight grammar
struct Lexer {
  std::string_view s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eof() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ExprParseError(std::string("expected ") + what, pos);
  }
  bool peek_number() {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }
  std::string number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
      ++pos;
    if (start == pos) throw ExprParseError("expected a number", pos);
    return std::string(s.substr(start, pos - start));
  }
  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    return std::string(s.substr(start, pos - start));
  }
};

Rational parse_exact(const std::string& text, std::size_t at) {
  auto v = parse_rational(text);
  if (!v) throw ExprParseError("malformed number '" + text + "'", at);
  return *v;
}

ExprPtr parse_expr(Lexer& lx);

// exponent after '^': NUM, -NUM, or parenthesized (-)p(/q)
Rational parse_power_exponent(Lexer& lx) {
  if (lx.accept('(')) {
    bool neg = lx.accept('-');
    if (!neg) lx.accept('+');
    std::size_t at = lx.pos;
    std::string num = lx.number();
    Rational value = parse_exact(num, at);
    if (lx.accept('/')) {
      at = lx.pos;
      Rational den = parse_exact(lx.number(), at);
      if (den == Rational(0)) throw ExprParseError("zero denominator", at);
      value /= den;
    }
    lx.expect(')', "')' after exponent");
    return neg ? -value : value;
  }
  bool neg = lx.accept('-');
  if (!neg) lx.accept('+');
  std::size_t at = lx.pos;
  Rational value = parse_exact(lx.number(), at);
  return neg ? -value : value;
}

// exp argument: [sign] ( r | c * r | c / r | c / d * r )
ExprPtr parse_exp_call(Lexer& lx) {
  lx.expect('(', "'(' after exp");
  bool neg = lx.accept('-');
  if (!neg) lx.accept('+');
  auto node = std::make_shared<Expr>();
  Rational coef(1);
  if (lx.peek_number()) {
    std::size_t at = lx.pos;
    coef = parse_exact(lx.number(), at);
    if (lx.accept('*')) {
      std::size_t rp = lx.pos;
      if (lx.ident() != "r") throw ExprParseError("expected r in exp argument", rp);
      node->kind = Expr::Kind::ExpR;
    } else if (lx.accept('/')) {
      if (lx.peek_number()) {
        at = lx.pos;
        Rational den = parse_exact(lx.number(), at);
        if (den == Rational(0)) throw ExprParseError("zero denominator", at);
        coef /= den;
        lx.expect('*', "'*' before r");
        std::size_t rp = lx.pos;
        if (lx.ident() != "r") throw ExprParseError("expected r in exp argument", rp);
        node->kind = Expr::Kind::ExpR;
      } else {
        std::size_t rp = lx.pos;
        if (lx.ident() != "r") throw ExprParseError("expected r in exp argument", rp);
        node->kind = Expr::Kind::ExpInvR;
      }
    } else {
      throw ExprParseError("expected '*r' or '/r' in exp argument", lx.pos);
    }
  } else {
    std::size_t rp = lx.pos;
    if (lx.ident() != "r") throw ExprParseError("expected r in exp argument", rp);
    node->kind = Expr::Kind::ExpR;
  }
  node->exponent = neg ? -coef : coef;
  lx.expect(')', "')' after exp argument");
  return node;
}

ExprPtr parse_minmax(Lexer& lx, Expr::Kind kind) {
  lx.expect('(', "'(' after min/max");
  auto node = std::make_shared<Expr>();
  node->kind = kind;
  node->kids.push_back(parse_expr(lx));
  while (lx.accept(',')) node->kids.push_back(parse_expr(lx));
  if (node->kids.size() < 2) throw ExprParseError("min/max needs at least two arguments", lx.pos);
  lx.expect(')', "')' after min/max arguments");
  return node;
}

ExprPtr parse_factor(Lexer& lx) {
  if (lx.peek_number()) {
    std::size_t at = lx.pos;
    std::string num = lx.number();
    auto node = std::make_shared<Expr>();
    node->kind = Expr::Kind::Constant;
    node->value = to_double(parse_exact(num, at));
    return node;
  }
  if (lx.accept('(')) {
    ExprPtr inner = parse_expr(lx);
    lx.expect(')', "')'");
    return inner;
  }
  std::size_t at = lx.pos;
  std::string name = lx.ident();
  if (name == "r") {
    auto node = std::make_shared<Expr>();
    node->kind = Expr::Kind::Power;
    node->exponent = lx.accept('^') ? parse_power_exponent(lx) : Rational(1);
    return node;
  }
  if (name == "exp") return parse_exp_call(lx);
  if (name == "min") return parse_minmax(lx, Expr::Kind::Min);
  if (name == "max") return parse_minmax(lx, Expr::Kind::Max);
  throw ExprParseError(name.empty() ? "expected an expression"
                                    : "unknown function '" + name + "'",
                       at);
}

ExprPtr parse_term(Lexer& lx) {
  ExprPtr first = parse_factor(lx);
  if (lx.peek() != '*') return first;
  auto node = std::make_shared<Expr>();
  node->kind = Expr::Kind::Product;
  node->kids.push_back(first);
  while (lx.accept('*')) node->kids.push_back(parse_factor(lx));
  return node;
}

ExprPtr parse_expr(Lexer& lx) {
  ExprPtr first = parse_term(lx);
  if (lx.peek() != '+') return first;
  auto node = std::make_shared<Expr>();
  node->kind = Expr::Kind::Sum;
  node->kids.push_back(first);
  while (lx.accept('+')) node->kids.push_back(parse_term(lx));
  return node;
}

}  // namespace

Potential Potential::parse(std::string_view text) {
  Lexer lx{text};
  if (lx.eof()) throw ExprParseError("empty expression", 0);
  Potential p;
  p.root_ = parse_expr(lx);
  if (!lx.eof()) throw ExprParseError("trailing input after expression", lx.pos);
  p.text_ = std::string(text);
  return p;
}

Potential Potential::constant(double c) {
  auto node = std::make_shared<Expr>();
  node->kind = Expr::Kind::Constant;
  node->value = c;
  Potential p;
  p.root_ = node;
  p.text_ = std::to_string(c);
  return p;
}

double Potential::eval(double r) const {
  if (!root_) return 0.0;
  return std::min(eval_node(*root_, r), kClamp);
}

bool Potential::clamped_at(double r) const {
  if (!root_) return false;
  return eval_node(*root_, r) >= kClamp;
}

bool Potential::is_zero() const {
  return !root_ || (root_->kind == Expr::Kind::Constant && root_->value == 0.0);
}

bool Potential::strictly_positive() const { return root_ && all_constants(*root_, true); }

bool Potential::nonnegative() const { return !root_ || all_constants(*root_, false); }

namespace {

void collect_kinks(const Expr& e, double lo, double hi, std::vector<double>& out) {
  for (const auto& k : e.kids) collect_kinks(*k, lo, hi, out);
  if (e.kind != Expr::Kind::Min && e.kind != Expr::Kind::Max) return;
  auto active = [&](double r) {
    std::size_t best = 0;
    double bv = eval_node(*e.kids[0], r);
    for (std::size_t i = 1; i < e.kids.size(); ++i) {
      double v = eval_node(*e.kids[i], r);
      if (e.kind == Expr::Kind::Min ? v < bv : v > bv) {
        bv = v;
        best = i;
      }
    }
    return best;
  };
  // log-grid scan for branch switches, then geometric bisection
  constexpr int kScan = 512;
  const double llo = std::log(lo), lhi = std::log(hi);
  double prev_r = lo;
  std::size_t prev_a = active(lo);
  for (int s = 1; s <= kScan; ++s) {
    const double r = std::exp(llo + (lhi - llo) * s / kScan);
    const std::size_t a = active(r);
    if (a != prev_a) {
      double ra = prev_r, rb = r;
      for (int it = 0; it < 80; ++it) {
        const double mid = std::sqrt(ra * rb);
        (active(mid) == prev_a ? ra : rb) = mid;
      }
      out.push_back(0.5 * (ra + rb));
    }
    prev_r = r;
    prev_a = a;
  }
}

}  // namespace

std::vector<double> Potential::kink_radii(double lo, double hi) const {
  std::vector<double> out;
  if (root_ && lo > 0.0 && lo < hi) collect_kinks(*root_, lo, hi, out);
  std::sort(out.begin(), out.end());
  return out;
}

Leading Potential::leading_zero() const {
  if (!root_) return {Rational(0), Rational(0), 0.0};
  return leading_node(*root_, true);
}

Leading Potential::leading_infinity() const {
  if (!root_) return {Rational(0), Rational(0), 0.0};
  return leading_node(*root_, false);
}

double singular_bound_constant(const Potential& V, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r = std::pow(10.0, -6.0 * (samples - 1 - i) / (samples - 1));  // 1e-6 .. 1
    worst = std::max(worst, V.eval(r) * r * r);
  }
  return worst;
}

namespace {

std::vector<Envelope> suggest(const Leading& lk, const Leading& lv) {
  std::vector<Envelope> out;
  for (const Rational& beta : {Rational(0), Rational(1, 2), Rational(1)}) {
    Rational rate = lk.rate - beta * lv.rate;
    if (rate == Rational(0)) {
      Envelope e;
      e.alpha = lk.power - beta * lv.power;
      e.beta = beta;
      out.push_back(e);
    } else if (rate < Rational(0)) {
      // leftover super-polynomial factor vanishes at this end: any alpha works
      Envelope e;
      e.beta = beta;
      e.alpha_any = true;
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace

std::vector<Envelope> suggest_envelopes_zero(const Potential& K, const Potential& V) {
  return suggest(K.leading_zero(), V.leading_zero());
}

std::vector<Envelope> suggest_envelopes_infinity(const Potential& K, const Potential& V) {
  return suggest(K.leading_infinity(), V.leading_infinity());
}

}  // namespace qlgs
