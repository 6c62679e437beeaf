#include "pmjp/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace pmjp {

namespace {

// n (n-1) ... (n-k+1); zero whenever n < k.
double falling_factorial(int n, int k) {
  double out = 1.0;
  for (int j = 0; j < k; ++j) out *= static_cast<double>(n - j);
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // prefer the short form when it round-trips
  char short_buf[40];
  std::snprintf(short_buf, sizeof(short_buf), "%g", v);
  if (std::strtod(short_buf, nullptr) == v) return short_buf;
  return buf;
}

}  // namespace

double KineticLaw::evaluate(const State& state) const {
  double rho = coefficient;
  for (const auto& f : factors) {
    rho *= falling_factorial(state[f.species], f.order);
    if (rho == 0.0) return 0.0;
  }
  if (!exponential.empty()) {
    double arg = 0.0;
    for (const auto& e : exponential) arg += e.coeff * state[e.species];
    rho *= std::exp(arg);
  }
  return rho;
}

int Model::species_index(const std::string& name) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i].name == name) return static_cast<int>(i);
  return -1;
}

int Model::reaction_by_update(const std::vector<int>& delta) const {
  for (std::size_t i = 0; i < reactions.size(); ++i)
    if (reactions[i].update == delta) return static_cast<int>(i);
  return -1;
}

void Model::validate() const {
  if (species.empty()) throw validation_error("model has no species");
  if (reactions.empty()) throw validation_error("model has no reactions");
  std::set<std::string> names;
  for (const auto& s : species)
    if (!names.insert(s.name).second)
      throw validation_error("duplicate species name: " + s.name);
  std::set<std::vector<int>> updates;
  for (const auto& r : reactions) {
    if (r.update.size() != species.size())
      throw validation_error("reaction " + r.name + ": update vector length mismatch");
    if (std::all_of(r.update.begin(), r.update.end(), [](int u) { return u == 0; }))
      throw validation_error("reaction " + r.name + ": zero update vector");
    if (!updates.insert(r.update).second)
      throw validation_error("reaction " + r.name + ": duplicate update vector");
    if (r.parameter_index < 0 ||
        static_cast<std::size_t>(r.parameter_index) >= priors.size())
      throw validation_error("reaction " + r.name + ": parameter index without a prior");
    for (const auto& f : r.law.factors)
      if (f.species < 0 || static_cast<std::size_t>(f.species) >= species.size())
        throw validation_error("reaction " + r.name + ": unknown species in law");
  }
  for (const auto& p : priors)
    if (!(p.shape > 0.0) || !(p.rate > 0.0) || !std::isfinite(p.shape) ||
        !std::isfinite(p.rate))
      throw validation_error("prior parameters must be positive and finite");
  if (!initial_state.empty() && initial_state.size() != species.size())
    throw validation_error("initial state length mismatch");
}

double evaluate_propensity(const Reaction& reaction, const State& state,
                           double theta) {
  for (const auto& f : reaction.law.factors)
    if (static_cast<std::size_t>(f.species) >= state.size())
      throw dimension_error("state dimension mismatch in propensity evaluation");
  double rho = reaction.law.evaluate(state);
  if (rho == 0.0) return 0.0;
  return theta * rho;
}

double exit_rate(const Model& model, const State& state,
                 const std::vector<double>& theta) {
  if (state.size() != model.species.size())
    throw dimension_error("state dimension mismatch in exit rate");
  if (theta.size() != model.parameter_count())
    throw dimension_error("parameter vector length mismatch");
  double total = 0.0;
  for (const auto& r : model.reactions)
    total += evaluate_propensity(r, state, theta[r.parameter_index]);
  return total;
}

// ---------------------------------------------------------------------------
// Model file parsing

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_'))
    return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

double parse_number(const std::string& s, int line) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw parse_error(line, "expected a number, got '" + s + "'");
  return v;
}

// Splits on `sep` at parenthesis depth 0.
std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// theta[<i>]
int parse_theta_index(const std::string& s, int line) {
  if (s.rfind("theta[", 0) != 0 || s.back() != ']')
    throw parse_error(line, "expected theta[<i>], got '" + s + "'");
  std::string idx = s.substr(6, s.size() - 7);
  try {
    int i = std::stoi(idx);
    if (i < 0) throw parse_error(line, "negative parameter index");
    return i;
  } catch (const std::invalid_argument&) {
    throw parse_error(line, "bad parameter index '" + idx + "'");
  }
}

struct ParserContext {
  Model model;
  std::map<int, GammaPrior> priors;
};

// Linear form inside exp(): sum of [coef *] species terms.
void parse_linear_form(const std::string& body, const ParserContext& ctx,
                       KineticLaw& law, int line) {
  std::string expanded;
  for (char c : body) {
    if (c == '-') expanded += "+-";
    else expanded += c;
  }
  for (std::string term : split_top_level(expanded, '+')) {
    if (term.empty()) continue;
    double sign = 1.0;
    if (term[0] == '-') {
      sign = -1.0;
      term = trim(term.substr(1));
    }
    auto parts = split_top_level(term, '*');
    double coeff = sign;
    std::string coeff_name;
    int species = -1;
    for (const auto& p : parts) {
      int sidx = ctx.model.species_index(p);
      if (sidx >= 0) {
        if (species >= 0)
          throw parse_error(line, "exp() argument must be linear in the counts");
        species = sidx;
      } else if (ctx.model.constants.count(p)) {
        coeff *= ctx.model.constants.at(p);
        coeff_name = p;
      } else {
        coeff *= parse_number(p, line);
      }
    }
    if (species < 0)
      throw parse_error(line, "exp() term '" + term + "' names no species");
    law.exponential.push_back({coeff, species, sign < 0 ? "" : coeff_name});
  }
}

KineticLaw parse_law(const std::string& expr, const ParserContext& ctx, int line) {
  KineticLaw law;
  for (const auto& factor : split_top_level(expr, '*')) {
    if (factor.empty()) throw parse_error(line, "empty factor in rate expression");
    if (factor.rfind("exp(", 0) == 0 && factor.back() == ')') {
      parse_linear_form(factor.substr(4, factor.size() - 5), ctx, law, line);
      continue;
    }
    std::string name = factor;
    int order = 1;
    auto caret = factor.find('^');
    if (caret != std::string::npos) {
      name = trim(factor.substr(0, caret));
      order = static_cast<int>(parse_number(trim(factor.substr(caret + 1)), line));
      if (order < 1) throw parse_error(line, "power must be a positive integer");
    }
    int sidx = ctx.model.species_index(name);
    if (sidx >= 0) {
      law.factors.push_back({sidx, order});
    } else if (ctx.model.constants.count(name)) {
      law.coefficient *= ctx.model.constants.at(name);
    } else if (is_identifier(name)) {
      throw parse_error(line, "unknown species or constant '" + name + "'");
    } else {
      law.coefficient *= parse_number(name, line);
    }
  }
  return law;
}

void parse_reaction(const std::string& rest, ParserContext& ctx, int line) {
  auto colon = rest.find(':');
  if (colon == std::string::npos)
    throw parse_error(line, "reaction line needs '<name>: <updates> @ <rate>'");
  Reaction reaction;
  reaction.name = trim(rest.substr(0, colon));
  if (!is_identifier(reaction.name))
    throw parse_error(line, "bad reaction name '" + reaction.name + "'");
  auto at = rest.find('@', colon);
  if (at == std::string::npos)
    throw parse_error(line, "reaction line missing '@ <rate>'");

  reaction.update.assign(ctx.model.species.size(), 0);
  for (const auto& tok : split_ws(rest.substr(colon + 1, at - colon - 1))) {
    auto sep = tok.find(':');
    if (sep == std::string::npos)
      throw parse_error(line, "update entry '" + tok + "' is not <species>:<+/-k>");
    std::string sname = tok.substr(0, sep);
    int sidx = ctx.model.species_index(sname);
    if (sidx < 0) throw parse_error(line, "unknown species '" + sname + "'");
    reaction.update[sidx] +=
        static_cast<int>(parse_number(tok.substr(sep + 1), line));
  }

  auto rate_parts = split_top_level(trim(rest.substr(at + 1)), '*');
  if (rate_parts.empty())
    throw parse_error(line, "empty rate expression");
  reaction.parameter_index = parse_theta_index(rate_parts[0], line);
  std::string rho;
  for (std::size_t i = 1; i < rate_parts.size(); ++i) {
    if (i > 1) rho += " * ";
    rho += rate_parts[i];
  }
  reaction.law = rho.empty() ? KineticLaw{} : parse_law(rho, ctx, line);
  ctx.model.reactions.push_back(std::move(reaction));
}

}  // namespace

Model parse_model(const std::string& text) {
  std::vector<std::pair<int, std::string>> lines;
  {
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
      ++no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      raw = trim(raw);
      if (!raw.empty()) lines.emplace_back(no, raw);
    }
  }

  ParserContext ctx;
  // declarations first so reactions may reference them in any order
  for (const auto& [no, line] : lines) {
    auto toks = split_ws(line);
    if (toks[0] == "species") {
      if (toks.size() != 2 || !is_identifier(toks[1]))
        throw parse_error(no, "expected 'species <name>'");
      ctx.model.species.push_back({toks[1]});
    } else if (toks[0] == "const") {
      // const <name> = <value>
      auto eq = line.find('=');
      if (eq == std::string::npos) throw parse_error(no, "expected 'const <name> = <value>'");
      std::string name = trim(line.substr(5, eq - 5));
      if (!is_identifier(name)) throw parse_error(no, "bad constant name '" + name + "'");
      ctx.model.constants[name] = parse_number(trim(line.substr(eq + 1)), no);
    }
  }

  for (const auto& [no, line] : lines) {
    auto toks = split_ws(line);
    if (toks[0] == "species" || toks[0] == "const") continue;
    if (toks[0] == "reaction") {
      parse_reaction(trim(line.substr(8)), ctx, no);
    } else if (toks[0] == "prior") {
      // prior theta[<i>] ~ Gamma(<shape>, <rate>)
      auto tilde = line.find('~');
      if (tilde == std::string::npos) throw parse_error(no, "expected 'prior theta[<i>] ~ Gamma(a, b)'");
      int idx = parse_theta_index(trim(line.substr(5, tilde - 5)), no);
      std::string dist = trim(line.substr(tilde + 1));
      if (dist.rfind("Gamma(", 0) != 0 || dist.back() != ')')
        throw parse_error(no, "only Gamma(shape, rate) priors are supported");
      auto args = split_top_level(dist.substr(6, dist.size() - 7), ',');
      if (args.size() != 2) throw parse_error(no, "Gamma takes two arguments");
      GammaPrior prior{parse_number(args[0], no), parse_number(args[1], no)};
      if (!(prior.shape > 0.0) || !(prior.rate > 0.0))
        throw parse_error(no, "prior parameters must be positive");
      ctx.priors[idx] = prior;
    } else if (toks[0] == "init") {
      ctx.model.initial_state.assign(ctx.model.species.size(), 0);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto eq = toks[i].find('=');
        if (eq == std::string::npos)
          throw parse_error(no, "init entry '" + toks[i] + "' is not <species>=<count>");
        int sidx = ctx.model.species_index(toks[i].substr(0, eq));
        if (sidx < 0) throw parse_error(no, "unknown species '" + toks[i].substr(0, eq) + "'");
        int count = static_cast<int>(parse_number(toks[i].substr(eq + 1), no));
        if (count < 0) throw parse_error(no, "negative initial count");
        ctx.model.initial_state[sidx] = count;
      }
    } else {
      throw parse_error(no, "unknown declaration '" + toks[0] + "'");
    }
  }

  if (!ctx.priors.empty()) {
    int max_idx = ctx.priors.rbegin()->first;
    ctx.model.priors.resize(max_idx + 1, GammaPrior{1.0, 1.0});
    std::vector<bool> seen(max_idx + 1, false);
    for (const auto& [idx, prior] : ctx.priors) {
      ctx.model.priors[idx] = prior;
      seen[idx] = true;
    }
    for (int i = 0; i <= max_idx; ++i)
      if (!seen[i]) throw parse_error(0, "no prior declared for theta[" + std::to_string(i) + "]");
  }
  ctx.model.validate();
  return ctx.model;
}

std::string serialize_model(const Model& model) {
  std::ostringstream out;
  for (const auto& s : model.species) out << "species " << s.name << "\n";
  for (const auto& [name, value] : model.constants)
    out << "const " << name << " = " << format_number(value) << "\n";
  for (const auto& r : model.reactions) {
    out << "reaction " << r.name << ":";
    for (std::size_t i = 0; i < r.update.size(); ++i)
      if (r.update[i] != 0)
        out << " " << model.species[i].name << ":" << (r.update[i] > 0 ? "+" : "")
            << r.update[i];
    out << " @ theta[" << r.parameter_index << "]";
    if (r.law.coefficient != 1.0) out << " * " << format_number(r.law.coefficient);
    for (const auto& f : r.law.factors) {
      out << " * " << model.species[f.species].name;
      if (f.order != 1) out << "^" << f.order;
    }
    for (const auto& e : r.law.exponential) {
      out << " * exp(";
      if (!e.coeff_name.empty())
        out << e.coeff_name;
      else
        out << format_number(e.coeff);
      out << " * " << model.species[e.species].name << ")";
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < model.priors.size(); ++i)
    out << "prior theta[" << i << "] ~ Gamma(" << format_number(model.priors[i].shape)
        << ", " << format_number(model.priors[i].rate) << ")\n";
  if (!model.initial_state.empty()) {
    out << "init";
    for (std::size_t i = 0; i < model.initial_state.size(); ++i)
      out << " " << model.species[i].name << "=" << model.initial_state[i];
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Built-in benchmark models

namespace {

const char* kLotkaVolterra = R"(# Lotka-Volterra predator-prey
species X
species Y
reaction pred_birth: X:+1 @ theta[0] * X * Y
reaction pred_death: X:-1 @ theta[1] * X
reaction prey_birth: Y:+1 @ theta[2] * Y
reaction prey_death: Y:-1 @ theta[3] * X * Y
prior theta[0] ~ Gamma(2, 10)
prior theta[1] ~ Gamma(2, 4)
prior theta[2] ~ Gamma(2, 4)
prior theta[3] ~ Gamma(2, 10)
init X=7 Y=20
)";

const char* kSirFinite = R"(# SIR epidemic, closed population
species S
species I
species R
reaction infection: S:-1 I:+1 @ theta[0] * S * I
reaction recovery: I:-1 R:+1 @ theta[1] * I
prior theta[0] ~ Gamma(2, 10)
prior theta[1] ~ Gamma(2, 4)
init S=10 I=5 R=0
)";

const char* kSirInfinite = R"(# SIR epidemic with open arrivals
species S
species I
species R
reaction infection: S:-1 I:+1 @ theta[0] * S * I
reaction recovery: I:-1 R:+1 @ theta[1] * I
reaction arrival: S:+1 @ theta[2]
prior theta[0] ~ Gamma(2, 10)
prior theta[1] ~ Gamma(2, 4)
prior theta[2] ~ Gamma(2, 1)
init S=10 I=5 R=0
)";

// Genes carried as paired on/off indicator species; the update vectors keep
// on + off = 1 for each gene. The paper's theta[3] degradation law reads
// "theta_4 P_1"; it is taken as P2 here (see README). The modulation constant
// r is not stated in the paper; 0.2 is this artifact's default.
const char* kToggleSwitch = R"(# genetic toggle switch
species G1on
species G1off
species G2on
species G2off
species P1
species P2
const r = 0.2
reaction p1_production: P1:+1 @ theta[0] * G1on
reaction p2_production: P2:+1 @ theta[1] * G2on
reaction p1_degradation: P1:-1 @ theta[2] * P1
reaction p2_degradation: P2:-1 @ theta[3] * P2
reaction g1_activation: G1off:-1 G1on:+1 @ theta[4] * G1off
reaction g2_activation: G2off:-1 G2on:+1 @ theta[5] * G2off
reaction g1_deactivation: G1on:-1 G1off:+1 @ theta[6] * G1on * exp(r * P2)
reaction g2_deactivation: G2on:-1 G2off:+1 @ theta[7] * G2on * exp(r * P1)
prior theta[0] ~ Gamma(2, 0.5)
prior theta[1] ~ Gamma(2, 0.5)
prior theta[2] ~ Gamma(2, 4)
prior theta[3] ~ Gamma(2, 4)
prior theta[4] ~ Gamma(2, 2)
prior theta[5] ~ Gamma(2, 2)
prior theta[6] ~ Gamma(2, 2)
prior theta[7] ~ Gamma(2, 2)
init G1on=1 G1off=0 G2on=0 G2off=1 P1=10 P2=0
)";

const char* kBirthDeath = R"(# single-species birth-death
species X
reaction birth: X:+1 @ theta[0]
reaction death: X:-1 @ theta[1] * X
prior theta[0] ~ Gamma(2, 0.0125)
prior theta[1] ~ Gamma(2, 2)
init X=10
)";

}  // namespace

Model builtin_model(const std::string& name) {
  if (name == "lv") return parse_model(kLotkaVolterra);
  if (name == "sir-finite") return parse_model(kSirFinite);
  if (name == "sir-infinite") return parse_model(kSirInfinite);
  if (name == "toggle") return parse_model(kToggleSwitch);
  if (name == "birth-death") return parse_model(kBirthDeath);
  throw validation_error("unknown built-in model '" + name + "'");
}

}  // namespace pmjp
