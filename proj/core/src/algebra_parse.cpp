#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "qva/algebra.h"

namespace qva {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*' || c == '\'';
}

bool valid_name(const std::string& s) {
  if (s.empty() || !ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

class LineError {
 public:
  explicit LineError(int line) : line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const {
    throw SpecError("line " + std::to_string(line_) + ": " + msg);
  }

 private:
  int line_;
};

// "2 e - 1/2 h + f", or "0".
LinComb parse_lincomb(const std::string& text, const AlgebraSpec& spec, const LineError& err) {
  LinComb out;
  std::size_t i = 0;
  const std::string s = trim(text);
  if (s == "0") return out;
  auto skip = [&] {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  };
  bool first = true;
  while (true) {
    skip();
    if (i == s.size()) break;
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      err.fail("expected '+' or '-' between terms in '" + s + "'");
    }
    Rational c = 1;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '/')) ++j;
      try {
        c = parse_rational(s.substr(i, j - i));
      } catch (const std::invalid_argument& e) {
        err.fail(e.what());
      }
      i = j;
      skip();
    }
    if (i == s.size() || !ident_start(s[i])) err.fail("term without a generator in '" + s + "'");
    std::size_t j = i;
    while (j < s.size() && ident_char(s[j])) ++j;
    const std::string name = s.substr(i, j - i);
    i = j;
    auto idx = spec.find(name);
    if (!idx) err.fail("unknown generator '" + name + "'");
    lincomb_add(out, *idx, c * sign);
    first = false;
  }
  if (first) err.fail("empty linear combination");
  return out;
}

QMatrix parse_matrix(const std::string& text, const LineError& err) {
  std::vector<std::vector<Rational>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<Rational> r;
    std::stringstream es(row);
    std::string entry;
    while (std::getline(es, entry, ',')) {
      try {
        r.push_back(parse_rational(entry));
      } catch (const std::invalid_argument& e) {
        err.fail(e.what());
      }
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) err.fail("empty matrix");
  const auto n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n) err.fail("matrix must be square with comma-separated rows");
  QMatrix m(static_cast<int>(n), static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

std::string lincomb_text(const LinComb& c, const AlgebraSpec& spec) {
  if (c.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [idx, r] : c) {
    Rational a = abs(r);
    if (first)
      out += sgn(r) < 0 ? "-" : "";
    else
      out += sgn(r) < 0 ? " - " : " + ";
    if (a != 1) out += a.get_str() + " ";
    out += spec.generators[static_cast<std::size_t>(idx)];
    first = false;
  }
  return out;
}

std::string matrix_text(const QMatrix& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += m(i, j).get_str();
    }
  }
  return out;
}

std::string names_text(const std::vector<int>& idx, const AlgebraSpec& spec) {
  std::string out;
  for (std::size_t i = 0; i < idx.size(); ++i)
    out += (i ? " " : "") + spec.generators[static_cast<std::size_t>(idx[i])];
  return out;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::affine: return "affine";
    case Family::half_current: return "half-current";
    case Family::heisenberg: return "heisenberg";
    case Family::zf: return "zf-rmatrix";
    case Family::semidirect: return "semidirect";
    case Family::derivation: return "derivation-assoc";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::affine, Family::half_current, Family::heisenberg, Family::zf, Family::semidirect,
                   Family::derivation})
    if (family_name(f) == name) return f;
  if (name == "zf") return Family::zf;
  if (name == "derivation") return Family::derivation;
  throw SpecError("unknown family '" + name + "'");
}

AlgebraSpec parse_spec(const std::string& text) {
  AlgebraSpec spec;
  std::stringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  bool have_family = false, have_generators = false;
  std::set<std::string> seen_sections;
  // R lines may precede "order", so collect them first.
  std::map<int, std::pair<QMatrix, int>> rlines;
  std::optional<int> order;
  int order_line = 0;
  std::vector<std::string> u_names, dual_names;
  int u_line = 0;

  while (std::getline(in, raw)) {
    ++lineno;
    LineError err(lineno);
    auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') err.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "algebra" && section != "rmatrix" && section != "semidirect" && section != "derivation")
        err.fail("unknown section [" + section + "]");
      if (!seen_sections.insert(section).second) err.fail("section [" + section + "] repeated");
      if (section != "algebra" && !have_generators) err.fail("[algebra] with generators must come first");
      if (section == "rmatrix") spec.rmatrix.emplace();
      if (section == "semidirect") spec.semidirect.emplace();
      if (section == "derivation") spec.derivation.emplace();
      continue;
    }
    if (section.empty()) err.fail("content before any section");
    auto eq = line.find('=');
    if (eq == std::string::npos) err.fail("expected 'key = value'");
    const std::string lhs = trim(line.substr(0, eq));
    const std::string rhs = trim(line.substr(eq + 1));
    auto words = split_names(lhs);
    if (words.empty()) err.fail("missing key");
    const std::string& key = words[0];
    auto gen = [&](std::size_t w) {
      if (words.size() <= w) err.fail("'" + key + "' needs generator arguments");
      auto idx = spec.find(words[w]);
      if (!idx) err.fail("unknown generator '" + words[w] + "'");
      return *idx;
    };
    auto arity = [&](std::size_t n) {
      if (words.size() != n + 1) err.fail("'" + key + "' takes " + std::to_string(n) + " argument(s)");
    };

    if (section == "algebra") {
      if (key == "family") {
        arity(0);
        try {
          spec.family = parse_family(rhs);
        } catch (const SpecError& e) {
          err.fail(e.what());
        }
        have_family = true;
      } else if (key == "level") {
        arity(0);
        try {
          spec.level = parse_rational(rhs);
        } catch (const std::invalid_argument& e) {
          err.fail(e.what());
        }
      } else if (key == "generators") {
        arity(0);
        if (have_generators) err.fail("generators given twice");
        spec.generators = split_names(rhs);
        if (spec.generators.empty()) err.fail("no generators");
        std::set<std::string> uniq;
        for (const auto& g : spec.generators) {
          if (!valid_name(g)) err.fail("bad generator name '" + g + "'");
          if (!uniq.insert(g).second) err.fail("generator '" + g + "' repeated");
        }
        have_generators = true;
      } else if (key == "bracket") {
        arity(2);
        const int a = gen(1), b = gen(2);
        if (!spec.bracket.emplace(std::make_pair(a, b), parse_lincomb(rhs, spec, err)).second)
          err.fail("bracket given twice");
      } else if (key == "form") {
        arity(2);
        const int a = gen(1), b = gen(2);
        Rational v;
        try {
          v = parse_rational(rhs);
        } catch (const std::invalid_argument& e) {
          err.fail(e.what());
        }
        if (!spec.form.emplace(std::make_pair(a, b), v).second) err.fail("form entry given twice");
      } else {
        err.fail("unknown key '" + key + "' in [algebra]");
      }
    } else if (section == "rmatrix") {
      if (key == "order") {
        arity(0);
        try {
          Rational o = parse_rational(rhs);
          if (o.get_den() != 1 || o < 0) err.fail("order must be a nonnegative integer");
          order = static_cast<int>(o.get_num().get_si());
        } catch (const std::invalid_argument& e) {
          err.fail(e.what());
        }
        order_line = lineno;
      } else if (key == "truncated") {
        arity(0);
        if (rhs != "yes" && rhs != "no") err.fail("truncated must be yes or no");
        spec.rmatrix->truncated = rhs == "yes";
      } else if (key == "U") {
        arity(0);
        u_names = split_names(rhs);
        u_line = lineno;
      } else if (key == "dual") {
        arity(0);
        dual_names = split_names(rhs);
      } else if (key.size() > 1 && key[0] == 'R' &&
                 std::all_of(key.begin() + 1, key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        arity(0);
        const int k = std::stoi(key.substr(1));
        if (rlines.count(k)) err.fail(key + " given twice");
        rlines.emplace(k, std::make_pair(parse_matrix(rhs, err), lineno));
      } else {
        err.fail("unknown key '" + key + "' in [rmatrix]");
      }
    } else if (section == "semidirect") {
      auto& sd = *spec.semidirect;
      arity(0);
      std::vector<int>* dst = nullptr;
      if (key == "ideal")
        dst = &sd.ideal;
      else if (key == "subalgebra")
        dst = &sd.subalgebra;
      else
        err.fail("unknown key '" + key + "' in [semidirect]");
      for (const auto& n : split_names(rhs)) {
        auto idx = spec.find(n);
        if (!idx) err.fail("unknown generator '" + n + "'");
        dst->push_back(*idx);
      }
    } else if (section == "derivation") {
      auto& dd = *spec.derivation;
      if (key == "mult") {
        arity(2);
        const int a = gen(1), b = gen(2);
        if (!dd.mult.emplace(std::make_pair(a, b), parse_lincomb(rhs, spec, err)).second)
          err.fail("mult given twice");
      } else if (key == "d") {
        arity(1);
        if (!dd.d.emplace(gen(1), parse_lincomb(rhs, spec, err)).second) err.fail("d given twice");
      } else if (key == "grade") {
        arity(1);
        const int a = gen(1);
        int g = 0;
        try {
          Rational r = parse_rational(rhs);
          if (r.get_den() != 1 || r < 0) err.fail("grade must be a nonnegative integer");
          g = static_cast<int>(r.get_num().get_si());
        } catch (const std::invalid_argument& e) {
          err.fail(e.what());
        }
        dd.grade[a] = g;
      } else if (key == "degree_bound") {
        arity(0);
        try {
          Rational r = parse_rational(rhs);
          if (r.get_den() != 1 || r <= 0) err.fail("degree_bound must be a positive integer");
          dd.degree_bound = static_cast<int>(r.get_num().get_si());
        } catch (const std::invalid_argument& e) {
          err.fail(e.what());
        }
      } else {
        err.fail("unknown key '" + key + "' in [derivation]");
      }
    }
  }

  if (!have_family) throw SpecError("missing 'family' in [algebra]");
  if (!have_generators) throw SpecError("missing 'generators' in [algebra]");

  if (spec.rmatrix) {
    LineError err(order_line ? order_line : lineno);
    if (!order) err.fail("[rmatrix] needs 'order = N'");
    std::vector<QMatrix> R;
    for (int k = 0; k <= *order; ++k) {
      auto it = rlines.find(k);
      if (it == rlines.end()) err.fail("missing R" + std::to_string(k));
      R.push_back(it->second.first);
    }
    for (const auto& [k, v] : rlines)
      if (k > *order) LineError(v.second).fail("R" + std::to_string(k) + " exceeds order " + std::to_string(*order));
    for (const auto& m : R)
      if (m.rows() != R[0].rows()) err.fail("R coefficients differ in size");
    spec.rmatrix->order = *order;
    spec.rmatrix->R = std::move(R);
    LineError uerr(u_line ? u_line : lineno);
    for (const auto& n : u_names) {
      auto idx = spec.find(n);
      if (!idx) uerr.fail("unknown generator '" + n + "'");
      spec.rmatrix->U.push_back(*idx);
    }
    for (const auto& n : dual_names) {
      auto idx = spec.find(n);
      if (!idx) uerr.fail("unknown generator '" + n + "'");
      spec.rmatrix->dual.push_back(*idx);
    }
  }
  return spec;
}

AlgebraSpec load_spec(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SpecError("cannot read spec file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_spec(ss.str());
}

std::string print_spec(const AlgebraSpec& spec) {
  std::ostringstream os;
  os << "[algebra]\n";
  os << "family = " << family_name(spec.family) << "\n";
  if (spec.level != 0 || spec.family == Family::affine || spec.family == Family::semidirect)
    os << "level = " << spec.level.get_str() << "\n";
  os << "generators =";
  for (const auto& g : spec.generators) os << " " << g;
  os << "\n";
  for (const auto& [k, v] : spec.bracket)
    os << "bracket " << spec.generators[static_cast<std::size_t>(k.first)] << " "
       << spec.generators[static_cast<std::size_t>(k.second)] << " = " << lincomb_text(v, spec) << "\n";
  for (const auto& [k, v] : spec.form)
    os << "form " << spec.generators[static_cast<std::size_t>(k.first)] << " "
       << spec.generators[static_cast<std::size_t>(k.second)] << " = " << v.get_str() << "\n";
  if (spec.rmatrix) {
    const auto& z = *spec.rmatrix;
    os << "\n[rmatrix]\n";
    os << "order = " << z.order << "\n";
    if (z.truncated) os << "truncated = yes\n";
    for (std::size_t k = 0; k < z.R.size(); ++k) os << "R" << k << " = " << matrix_text(z.R[k]) << "\n";
    if (!z.U.empty()) os << "U = " << names_text(z.U, spec) << "\n";
    if (!z.dual.empty()) os << "dual = " << names_text(z.dual, spec) << "\n";
  }
  if (spec.semidirect) {
    os << "\n[semidirect]\n";
    os << "ideal = " << names_text(spec.semidirect->ideal, spec) << "\n";
    os << "subalgebra = " << names_text(spec.semidirect->subalgebra, spec) << "\n";
  }
  if (spec.derivation) {
    const auto& d = *spec.derivation;
    os << "\n[derivation]\n";
    for (const auto& [k, v] : d.mult)
      os << "mult " << spec.generators[static_cast<std::size_t>(k.first)] << " "
         << spec.generators[static_cast<std::size_t>(k.second)] << " = " << lincomb_text(v, spec) << "\n";
    for (const auto& [k, v] : d.d)
      os << "d " << spec.generators[static_cast<std::size_t>(k)] << " = " << lincomb_text(v, spec) << "\n";
    for (const auto& [k, v] : d.grade) os << "grade " << spec.generators[static_cast<std::size_t>(k)] << " = " << v << "\n";
    if (d.degree_bound) os << "degree_bound = " << *d.degree_bound << "\n";
  }
  return os.str();
}

}  // namespace qva
