#include <qlgs/config.hpp>

#include <cctype>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>
#include <utility>

namespace qlgs {
namespace {

struct Cursor {
  std::size_t line = 0;  // 1-based once a line is loaded
  std::size_t col = 0;
};

[[noreturn]] void fail(const std::string& msg, const Cursor& at) {
  throw ConfigError(msg, at.line, at.col);
}

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

// strips an unquoted '#' comment
std::string_view strip_comment(std::string_view s) {
  bool in_quote = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_quote = !in_quote;
    if (s[i] == '#' && !in_quote) return s.substr(0, i);
  }
  return s;
}

double parse_double(std::string_view v, const Cursor& at) {
  std::string buf(v);
  char* end = nullptr;
  const double x = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty())
    fail("expected a number, got '" + buf + "'", at);
  return x;
}

long long parse_int(std::string_view v, const Cursor& at) {
  std::string buf(v);
  char* end = nullptr;
  const long long x = std::strtoll(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || buf.empty())
    fail("expected an integer, got '" + buf + "'", at);
  return x;
}

std::uint64_t parse_u64(std::string_view v, const Cursor& at) {
  std::string buf(v);
  if (!buf.empty() && buf[0] == '-') fail("expected a nonnegative integer", at);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || buf.empty())
    fail("expected an integer, got '" + buf + "'", at);
  return x;
}

bool parse_bool(std::string_view v, const Cursor& at) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail("expected true or false, got '" + std::string(v) + "'", at);
}

Rational parse_rat(std::string_view v, const Cursor& at) {
  const auto r = parse_rational(v);
  if (!r) fail("expected a rational number, got '" + std::string(v) + "'", at);
  return *r;
}

std::string parse_quoted(std::string_view v, const Cursor& at) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    fail("expected a quoted string", at);
  const std::string inner(v.substr(1, v.size() - 2));
  if (inner.find('"') != std::string::npos)
    fail("expected a single quoted string", at);
  return inner;
}

// accepts either a quoted or a bare token (for paths)
std::string parse_path(std::string_view v, const Cursor& at) {
  if (!v.empty() && v.front() == '"') return parse_quoted(v, at);
  return std::string(v);
}

// one [envelope.*] section collects into this before validation
struct EnvelopeDraft {
  std::optional<Rational> alpha;
  Rational beta{0};
  double radius = 1.0;
  bool alpha_any = false;
  Cursor header;
  bool at_zero = true;
};

// one [nonlinearity] section
struct NonlinearityDraft {
  std::string kind;
  std::optional<Rational> q, q1, q2, theta;
  std::optional<bool> truncated_negative;
  Cursor header;
  bool present = false;
};

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  bool have_dim = false, have_v = false, have_k = false;
  std::string section;  // "" = top level
  std::set<std::string> seen;  // "section/key", envelope sections excluded
  std::optional<EnvelopeDraft> env;
  NonlinearityDraft nl;

  auto finish_envelope = [&cfg](const EnvelopeDraft& d) {
    if (!d.alpha && !d.alpha_any)
      fail("envelope needs alpha (or alpha_any = true)", d.header);
    Envelope e;
    e.alpha = d.alpha.value_or(Rational(0));
    e.beta = d.beta;
    e.radius = d.radius;
    e.alpha_any = d.alpha_any;
    (d.at_zero ? cfg.env_zero : cfg.env_infinity).push_back(e);
  };

  std::size_t pos = 0;
  Cursor at;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    ++at.line;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::size_t lead = 0;
    std::string_view line = trim(strip_comment(raw), &lead);
    at.col = lead + 1;
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header", at);
      const std::string name(line.substr(1, line.size() - 2));
      if (env) finish_envelope(*env);
      env.reset();
      if (name == "envelope.zero" || name == "envelope.infinity") {
        env.emplace();
        env->header = at;
        env->at_zero = name == "envelope.zero";
      } else if (name == "nonlinearity") {
        nl.present = true;
        if (nl.header.line == 0) nl.header = at;
      } else if (name == "mesh" || name == "solver" || name == "verify" ||
                 name == "rates") {
        // recognized; keys dispatch below
      } else {
        fail("unknown section [" + name + "]", at);
      }
      section = name;
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value", at);
    std::size_t key_lead = 0;
    const std::string key(trim(line.substr(0, eq), &key_lead));
    std::size_t val_lead = 0;
    const std::string_view val = trim(line.substr(eq + 1), &val_lead);
    Cursor key_at{at.line, at.col + key_lead};
    // 1-based column of the value text within the raw line
    Cursor val_at{at.line, lead + eq + 1 + val_lead + 1};
    if (key.empty()) fail("empty key", key_at);
    if (val.empty()) fail("missing value for '" + key + "'", val_at);

    if (!env) {
      if (!seen.insert(section + "/" + key).second)
        fail("duplicate key '" + key + "'", key_at);
    }

    auto unknown = [&]() {
      const std::string where =
          section.empty() ? "at top level" : "in [" + section + "]";
      fail("unknown key '" + key + "' " + where, key_at);
    };

    if (env) {
      if (key == "alpha")
        env->alpha = parse_rat(val, val_at);
      else if (key == "beta") {
        env->beta = parse_rat(val, val_at);
        if (env->beta < Rational(0) || env->beta > Rational(1))
          fail("beta must lie in [0, 1]", val_at);
      } else if (key == "radius") {
        env->radius = parse_double(val, val_at);
        if (!(env->radius > 0.0)) fail("radius must be positive", val_at);
      } else if (key == "alpha_any")
        env->alpha_any = parse_bool(val, val_at);
      else
        unknown();
    } else if (section.empty()) {
      if (key == "dimension") {
        const long long n = parse_int(val, val_at);
        if (n < 3) fail("dimension must be at least 3", val_at);
        if (n > 64) fail("dimension out of range", val_at);
        cfg.dimension = static_cast<int>(n);
        have_dim = true;
      } else if (key == "V") {
        const std::string expr = parse_quoted(val, val_at);
        try {
          cfg.V = Potential::parse(expr);
        } catch (const ExprParseError& e) {
          fail(std::string("V: ") + e.what(),
               {val_at.line, val_at.col + 1 + e.offset});
        }
        have_v = true;
      } else if (key == "K") {
        const std::string expr = parse_quoted(val, val_at);
        try {
          cfg.K = Potential::parse(expr);
        } catch (const ExprParseError& e) {
          fail(std::string("K: ") + e.what(),
               {val_at.line, val_at.col + 1 + e.offset});
        }
        have_k = true;
      } else if (key == "output")
        cfg.output = parse_path(val, val_at);
      else if (key == "threads") {
        const long long t = parse_int(val, val_at);
        if (t < 1) fail("threads must be at least 1", val_at);
        cfg.threads = static_cast<int>(t);
      } else
        unknown();
    } else if (section == "nonlinearity") {
      if (key == "kind")
        nl.kind = std::string(val);
      else if (key == "q")
        nl.q = parse_rat(val, val_at);
      else if (key == "q1")
        nl.q1 = parse_rat(val, val_at);
      else if (key == "q2")
        nl.q2 = parse_rat(val, val_at);
      else if (key == "theta")
        nl.theta = parse_rat(val, val_at);
      else if (key == "truncated_negative")
        nl.truncated_negative = parse_bool(val, val_at);
      else
        unknown();
    } else if (section == "mesh") {
      if (key == "nodes") {
        const long long n = parse_int(val, val_at);
        if (n < 8) fail("nodes must be at least 8", val_at);
        if (n > 2000000) fail("nodes out of range", val_at);
        cfg.mesh.nodes = static_cast<int>(n);
      } else if (key == "r_min") {
        cfg.mesh.r_min = parse_double(val, val_at);
        if (!(cfg.mesh.r_min > 0.0)) fail("r_min must be positive", val_at);
      } else if (key == "r_max")
        cfg.mesh.r_max = parse_double(val, val_at);
      else
        unknown();
    } else if (section == "solver") {
      if (key == "rho")
        cfg.solver.rho = parse_double(val, val_at);
      else if (key == "path_points") {
        const long long p = parse_int(val, val_at);
        if (p < 2) fail("path_points must be at least 2", val_at);
        cfg.solver.path_points = static_cast<int>(p);
      } else if (key == "rho_samples") {
        const long long s = parse_int(val, val_at);
        if (s < 1) fail("rho_samples must be at least 1", val_at);
        cfg.solver.rho_samples = static_cast<int>(s);
      } else if (key == "deform_tol") {
        cfg.solver.deform_tol = parse_double(val, val_at);
        if (!(cfg.solver.deform_tol > 0.0)) fail("deform_tol must be positive", val_at);
      } else if (key == "max_deform_iter") {
        const long long m = parse_int(val, val_at);
        if (m < 1) fail("max_deform_iter must be at least 1", val_at);
        cfg.solver.max_deform_iter = static_cast<int>(m);
      } else if (key == "refine_tol") {
        cfg.solver.refine_tol = parse_double(val, val_at);
        if (!(cfg.solver.refine_tol > 0.0)) fail("refine_tol must be positive", val_at);
      } else if (key == "seed")
        cfg.solver.seed = parse_u64(val, val_at);
      else if (key == "u0_inner") {
        cfg.solver.u0_inner = parse_double(val, val_at);
        if (!(cfg.solver.u0_inner > 0.0)) fail("u0_inner must be positive", val_at);
      } else if (key == "u0_outer")
        cfg.solver.u0_outer = parse_double(val, val_at);
      else if (key == "u0_height") {
        cfg.solver.u0_height = parse_double(val, val_at);
        if (!(cfg.solver.u0_height > 0.0)) fail("u0_height must be positive", val_at);
      } else
        unknown();
    } else if (section == "verify") {
      if (key == "grad_norm_max") {
        cfg.verify.grad_norm_max = parse_double(val, val_at);
        if (!(cfg.verify.grad_norm_max > 0.0)) fail("grad_norm_max must be positive", val_at);
      } else if (key == "weak_defect_max") {
        cfg.verify.weak_defect_max = parse_double(val, val_at);
        if (!(cfg.verify.weak_defect_max > 0.0)) fail("weak_defect_max must be positive", val_at);
      } else if (key == "min_nodal")
        cfg.verify.min_nodal = parse_double(val, val_at);
      else if (key == "order_min")
        cfg.verify.order_min = parse_double(val, val_at);
      else if (key == "order_max")
        cfg.verify.order_max = parse_double(val, val_at);
      else if (key == "refine_levels") {
        const long long l = parse_int(val, val_at);
        if (l < 0 || l > 8) fail("refine_levels must lie in [0, 8]", val_at);
        cfg.verify.refine_levels = static_cast<int>(l);
      } else if (key == "decay_margin") {
        cfg.verify.decay_margin = parse_double(val, val_at);
        if (!(cfg.verify.decay_margin >= 1.0)) fail("decay_margin must be at least 1", val_at);
      } else
        unknown();
    } else if (section == "rates") {
      if (key == "samples") {
        const long long s = parse_int(val, val_at);
        if (s < 1) fail("samples must be at least 1", val_at);
        cfg.rates.samples = static_cast<int>(s);
      } else if (key == "seed")
        cfg.rates.seed = parse_u64(val, val_at);
      else
        unknown();
    } else {
      unknown();
    }
  }
  if (env) finish_envelope(*env);

  const Cursor whole{0, 0};
  if (!have_dim) fail("missing required key 'dimension'", whole);
  if (!have_v) fail("missing required key 'V'", whole);
  if (!have_k) fail("missing required key 'K'", whole);
  if (!(cfg.mesh.r_min < cfg.mesh.r_max))
    fail("mesh needs r_min < r_max", whole);
  if (nl.present) {
    cfg.has_nonlinearity = true;
    auto need = [&](const std::optional<Rational>& x, const char* what) {
      if (!x) fail(std::string("nonlinearity needs ") + what, nl.header);
      return *x;
    };
    try {
      if (nl.kind == "single_power") {
        cfg.g = NonlinearitySpec::single_power(need(nl.q, "q"));
      } else if (nl.kind == "min_power") {
        cfg.g = NonlinearitySpec::min_power(need(nl.q1, "q1"), need(nl.q2, "q2"));
      } else if (nl.kind == "ratio_power") {
        cfg.g = NonlinearitySpec::ratio_power(need(nl.q1, "q1"), need(nl.q2, "q2"));
      } else if (nl.kind == "zero") {
        cfg.g = NonlinearitySpec::zero();
      } else if (nl.kind.empty()) {
        fail("nonlinearity needs kind", nl.header);
      } else {
        fail("unknown nonlinearity kind '" + nl.kind + "'", nl.header);
      }
      if (nl.theta) cfg.g = cfg.g.with_theta(*nl.theta);
      if (nl.truncated_negative && !*nl.truncated_negative)
        cfg.g = cfg.g.untruncated();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      fail(std::string("nonlinearity: ") + e.what(), nl.header);
    }
  }
  return cfg;
}

}  // namespace qlgs
