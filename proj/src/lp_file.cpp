#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "sccuc/milp.hpp"

namespace sccuc {

namespace {

std::string fmt(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string lower_case(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool reserved(std::string_view name) {
  static const std::set<std::string> words = {
      "minimize", "minimum", "min", "maximize", "max", "subject", "to", "st", "s.t.", "such",
      "that", "bounds", "bound", "binaries", "binary", "bin", "general", "generals", "gen",
      "end", "free", "inf", "infinity", "nan", "obj"};
  return words.count(lower_case(name)) > 0;
}

class NameTable {
public:
  std::string assign(const std::string& original, char prefix, LpExport& out) {
    std::string s;
    for (char c : original) {
      const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
      s.push_back(ok ? c : '_');
    }
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.' ||
        ((s[0] == 'e' || s[0] == 'E') && s.size() > 1 &&
         std::isdigit(static_cast<unsigned char>(s[1]))) ||
        reserved(s)) {
      s = std::string(1, prefix) + "_" + s;
    }
    std::string candidate = s;
    for (int k = 1; used_.count(candidate); ++k) candidate = s + "_" + std::to_string(k);
    used_.insert(candidate);
    if (candidate != original) out.renamed.emplace(original, candidate);
    return candidate;
  }

private:
  std::set<std::string> used_;
};

void append_terms(std::string& line, const std::vector<std::pair<double, std::string>>& terms,
                  std::string& text, std::size_t wrap) {
  std::size_t on_line = 0;
  for (const auto& [coef, name] : terms) {
    if (on_line == wrap) {
      text += line + "\n";
      line = "   ";
      on_line = 0;
    }
    line += coef < 0 ? " - " : " + ";
    line += fmt(std::abs(coef)) + " " + name;
    ++on_line;
  }
}

}  // namespace

LpExport export_lp_file(const MilpModel& m) {
  m.validate();
  LpExport out;
  NameTable var_names;
  NameTable row_names;
  std::vector<std::string> vn, rn;
  for (const auto& v : m.variables()) vn.push_back(var_names.assign(v.name, 'x', out));
  for (const auto& r : m.constraints()) rn.push_back(row_names.assign(r.name, 'c', out));

  std::string text;
  for (const auto& [from, to] : out.renamed) text += "\\ rename: " + from + " -> " + to + "\n";
  if (m.objective_constant() != 0.0)
    text += "\\ objective constant: " + fmt(m.objective_constant()) + "\n";

  // Every variable appears in the objective (zero costs included) so that an
  // import recovers the original column order.
  text += "Minimize\n";
  {
    std::vector<std::pair<double, std::string>> terms;
    for (std::size_t j = 0; j < vn.size(); ++j) terms.emplace_back(m.variables()[j].objective, vn[j]);
    std::string line = " obj:";
    append_terms(line, terms, text, 8);
    text += line + "\n";
  }

  text += "Subject To\n";
  for (std::size_t i = 0; i < rn.size(); ++i) {
    const auto& r = m.constraints()[i];
    std::vector<std::pair<double, std::string>> terms;
    for (const auto& t : r.terms) terms.emplace_back(t.coef, vn[t.var]);
    std::string line = " " + rn[i] + ":";
    if (terms.empty()) terms.emplace_back(0.0, vn.empty() ? "x_0" : vn[0]);
    append_terms(line, terms, text, 8);
    const char* sense = r.sense == RowSense::LessEqual ? " <= " : r.sense == RowSense::Equal ? " = " : " >= ";
    text += line + sense + fmt(r.rhs) + "\n";
  }

  text += "Bounds\n";
  bool any_binary = false;
  for (std::size_t j = 0; j < vn.size(); ++j) {
    const auto& v = m.variables()[j];
    if (v.kind == VarKind::Binary) {
      any_binary = true;
      if (v.lower == 0.0 && v.upper == 1.0) continue;
    }
    if (v.lower == -kInf && v.upper == kInf) {
      text += " " + vn[j] + " free\n";
    } else if (v.lower == v.upper) {
      text += " " + vn[j] + " = " + fmt(v.lower) + "\n";
    } else if (v.upper == kInf) {
      text += " " + vn[j] + " >= " + fmt(v.lower) + "\n";
    } else {
      text += " " + fmt(v.lower) + " <= " + vn[j] + " <= " + fmt(v.upper) + "\n";
    }
  }
  if (any_binary) {
    text += "Binaries\n";
    for (std::size_t j = 0; j < vn.size(); ++j)
      if (m.variables()[j].kind == VarKind::Binary) text += " " + vn[j] + "\n";
  }
  text += "End\n";
  out.text = std::move(text);
  return out;
}

namespace {

enum class Section { None, Objective, Constraints, Bounds, Binaries, Done };

bool parse_number(std::string_view tok, double& v) {
  const std::string low = lower_case(tok);
  if (low == "inf" || low == "+inf" || low == "infinity" || low == "+infinity") {
    v = kInf;
    return true;
  }
  if (low == "-inf" || low == "-infinity") {
    v = -kInf;
    return true;
  }
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e;
}

bool is_sense(std::string_view t) {
  return t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">" || t == "=<" || t == "=>";
}

RowSense to_sense(std::string_view t) {
  if (t == "=") return RowSense::Equal;
  if (t == "<=" || t == "<" || t == "=<") return RowSense::LessEqual;
  return RowSense::GreaterEqual;
}

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const char c = line[i];
    if (c == '<' || c == '>' || c == '=') {
      std::size_t j = i + 1;
      if (j < line.size() && (line[j] == '=' || line[j] == '<' || line[j] == '>')) ++j;
      toks.emplace_back(line.substr(i, j - i));
      i = j;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
           line[j] != '<' && line[j] != '>' && line[j] != '=')
      ++j;
    toks.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

class Importer {
public:
  MilpModel run(std::string_view text) {
    std::vector<std::string> obj_tokens;
    std::vector<std::string> row_tokens;
    std::istringstream in{std::string(text)};
    std::string line;
    Section sec = Section::None;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string_view sv = line;
      const auto first = sv.find_first_not_of(" \t");
      if (first == std::string_view::npos) continue;
      sv.remove_prefix(first);
      if (sv.front() == '\\') {
        constexpr std::string_view tag = "\\ objective constant:";
        if (sv.substr(0, tag.size()) == tag) {
          double c = 0.0;
          std::string num(sv.substr(tag.size()));
          num.erase(0, num.find_first_not_of(' '));
          if (!parse_number(num, c)) fail(lineno, "bad objective constant");
          constant_ = c;
        }
        continue;
      }
      const std::string head = lower_case(sv);
      if (head == "minimize" || head == "minimum" || head == "min") {
        sec = Section::Objective;
        continue;
      }
      if (head == "maximize" || head == "max") fail(lineno, "maximization is not supported");
      if (head == "subject to" || head == "st" || head == "s.t." || head == "such that") {
        sec = Section::Constraints;
        continue;
      }
      if (head == "bounds" || head == "bound") {
        sec = Section::Bounds;
        continue;
      }
      if (head == "binaries" || head == "binary" || head == "bin") {
        sec = Section::Binaries;
        continue;
      }
      if (head == "general" || head == "generals" || head == "gen")
        fail(lineno, "general integers are not supported");
      if (head == "end") {
        sec = Section::Done;
        continue;
      }
      auto toks = tokenize(sv);
      switch (sec) {
        case Section::Objective: obj_tokens.insert(obj_tokens.end(), toks.begin(), toks.end()); break;
        case Section::Constraints:
          for (auto& t : toks) row_tokens.push_back(std::move(t));
          // A row ends with "sense rhs"; flush once one is complete.
          if (row_tokens.size() >= 2 && is_sense(row_tokens[row_tokens.size() - 2])) {
            parse_row(row_tokens, lineno);
            row_tokens.clear();
          }
          break;
        case Section::Bounds: parse_bound(toks, lineno); break;
        case Section::Binaries:
          for (const auto& t : toks) {
            const std::size_t j = var(t);
            binary_[j] = true;
          }
          break;
        case Section::None: fail(lineno, "content before the objective section");
        case Section::Done: fail(lineno, "content after End");
      }
    }
    if (!row_tokens.empty()) fail(lineno, "unterminated constraint");
    parse_objective(obj_tokens, lineno);

    MilpModel m;
    for (std::size_t j = 0; j < names_.size(); ++j) {
      double lo = lower_[j], up = upper_[j];
      if (binary_[j]) {
        if (!lower_set_[j]) lo = 0.0;
        if (!upper_set_[j]) up = 1.0;
      }
      m.add_variable(names_[j], lo, up, binary_[j] ? VarKind::Binary : VarKind::Continuous, cost_[j]);
    }
    for (auto& r : rows_) m.add_constraint(std::move(r.name), std::move(r.terms), r.sense, r.rhs);
    m.set_objective_constant(constant_);
    m.validate();
    return m;
  }

private:
  [[noreturn]] static void fail(int line, const std::string& msg) {
    throw ModelError("LP file line " + std::to_string(line) + ": " + msg);
  }

  std::size_t var(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    const std::size_t j = names_.size();
    index_.emplace(name, j);
    names_.push_back(name);
    cost_.push_back(0.0);
    lower_.push_back(0.0);
    upper_.push_back(kInf);
    lower_set_.push_back(false);
    upper_set_.push_back(false);
    binary_.push_back(false);
    return j;
  }

  // Parses "[name:] ±c v ±c v ..." starting at tokens[pos] up to `end`.
  std::vector<Term> parse_terms(const std::vector<std::string>& toks, std::size_t pos,
                                std::size_t end, int lineno) {
    std::vector<Term> terms;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    for (std::size_t i = pos; i < end; ++i) {
      const std::string& t = toks[i];
      if (t == "+") continue;
      if (t == "-") {
        sign = -sign;
        continue;
      }
      double v;
      if (parse_number(t, v)) {
        if (have_coef) fail(lineno, "two coefficients in a row");
        coef = v;
        have_coef = true;
        continue;
      }
      terms.push_back(Term{var(t), sign * coef});
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    if (have_coef) fail(lineno, "coefficient without a variable");
    return terms;
  }

  void parse_objective(const std::vector<std::string>& toks, int lineno) {
    std::size_t pos = 0;
    if (!toks.empty() && toks[0].back() == ':') pos = 1;
    for (const auto& t : parse_terms(toks, pos, toks.size(), lineno)) cost_[t.var] += t.coef;
  }

  void parse_row(const std::vector<std::string>& toks, int lineno) {
    std::size_t pos = 0;
    Constraint c;
    if (!toks.empty() && toks[0].back() == ':') {
      c.name = toks[0].substr(0, toks[0].size() - 1);
      pos = 1;
    } else {
      c.name = "R" + std::to_string(rows_.size() + 1);
    }
    const std::size_t sense_at = toks.size() - 2;
    // Merge repeated variables so a row maps back to the same sparse vector.
    std::vector<Term> raw = parse_terms(toks, pos, sense_at, lineno);
    for (const auto& t : raw) {
      auto it = std::find_if(c.terms.begin(), c.terms.end(), [&](const Term& s) { return s.var == t.var; });
      if (it == c.terms.end()) c.terms.push_back(t);
      else it->coef += t.coef;
    }
    // Zero placeholder terms written for empty rows.
    c.terms.erase(std::remove_if(c.terms.begin(), c.terms.end(), [](const Term& t) { return t.coef == 0.0; }),
                  c.terms.end());
    c.sense = to_sense(toks[sense_at]);
    if (!parse_number(toks.back(), c.rhs)) fail(lineno, "bad right-hand side '" + toks.back() + "'");
    rows_.push_back(std::move(c));
  }

  void set_lower(std::size_t j, double v) {
    lower_[j] = v;
    lower_set_[j] = true;
  }
  void set_upper(std::size_t j, double v) {
    upper_[j] = v;
    upper_set_[j] = true;
  }

  void parse_bound(const std::vector<std::string>& t, int lineno) {
    double a, b;
    if (t.size() == 2 && lower_case(t[1]) == "free") {
      const std::size_t j = var(t[0]);
      set_lower(j, -kInf);
      set_upper(j, kInf);
    } else if (t.size() == 5 && parse_number(t[0], a) && parse_number(t[4], b) && is_sense(t[1]) &&
               is_sense(t[3])) {
      const std::size_t j = var(t[2]);
      set_lower(j, a);
      set_upper(j, b);
    } else if (t.size() == 3 && parse_number(t[2], a) && is_sense(t[1])) {
      const std::size_t j = var(t[0]);
      switch (to_sense(t[1])) {
        case RowSense::Equal: set_lower(j, a); set_upper(j, a); break;
        case RowSense::GreaterEqual: set_lower(j, a); break;
        case RowSense::LessEqual: set_upper(j, a); break;
      }
    } else if (t.size() == 3 && parse_number(t[0], a) && is_sense(t[1])) {
      const std::size_t j = var(t[2]);
      switch (to_sense(t[1])) {
        case RowSense::Equal: set_lower(j, a); set_upper(j, a); break;
        case RowSense::LessEqual: set_lower(j, a); break;
        case RowSense::GreaterEqual: set_upper(j, a); break;
      }
    } else {
      fail(lineno, "unrecognised bound");
    }
  }

  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> names_;
  std::vector<double> cost_, lower_, upper_;
  std::vector<bool> lower_set_, upper_set_, binary_;
  std::vector<Constraint> rows_;
  double constant_ = 0.0;
};

}  // namespace

MilpModel import_lp_file(std::string_view text) { return Importer{}.run(text); }

}  // namespace sccuc
