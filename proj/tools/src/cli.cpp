#include "qva/cli.h"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace qva::cli {

namespace {

using json = nlohmann::ordered_json;
using Params = std::map<std::string, int>;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

// Defaults per verb; "window" is filled from default_window().
const std::map<std::string, Params>& defaults() {
  static const std::map<std::string, Params> d = {
      {"validate", {}},
      {"check-relations", {{"level", 3}, {"window", -1}}},
      {"find-slocality", {{"level", 1}, {"window", 3}, {"k-max", 4}, {"f-degree", 2}}},
      {"check-jacobi", {{"level", 2}, {"window", -1}}},
      {"check-assoc", {{"level", 2}, {"window", -1}, {"l-max", 4}}},
      {"check-qyb", {{"order", 8}}},
      {"check-unitarity", {{"order", 8}}},
      {"extract-s", {{"level", 1}, {"window", 3}, {"k-max", 4}, {"f-degree", 2}}},
      {"probe-z", {{"n", 2}, {"level", 1}, {"exp", 3}, {"dmax", 2}}},
      {"ker-d", {{"level", 4}}},
      {"gr-dims", {{"level", 4}}},
      {"check-filtration", {{"level", 4}}},
      {"check-delta", {{"level", 2}, {"order", 4}, {"window", 3}}},
      {"run-suite", {}},
  };
  return d;
}

const std::vector<std::string> kSuite = {"validate",  "check-relations", "check-filtration", "find-slocality",
                                         "check-jacobi", "check-assoc",  "extract-s",        "check-qyb",
                                         "check-unitarity", "gr-dims",   "ker-d",            "probe-z"};

std::string gen_name(const AlgebraSpec& spec, int g) {
  return g == kVacuum ? std::string("1") : spec.generators[static_cast<std::size_t>(g)];
}

// Runs a check, turning engine limits into an inconclusive report.
CheckReport guarded(const std::string& name, const std::function<CheckReport()>& f) {
  const auto t0 = Clock::now();
  CheckReport r;
  try {
    r = f();
  } catch (const std::exception& e) {
    r = CheckReport{};
    r.name = name;
    r.inconclusive(std::string("engine limit: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

CheckReport validate_report(const AlgebraSpec& spec) {
  CheckReport r;
  r.name = "validate";
  r.param("family", family_name(spec.family));
  const ValidationResult v = validate(spec);
  int warnings = 0;
  for (const auto& d : v.diagnostics) {
    const std::string text = d.check + ": " + d.message;
    if (d.severity == Diagnostic::Severity::error)
      r.fail(text, 100);
    else
      r.detail("warning " + std::to_string(++warnings), text);
  }
  return r;
}

SMap smap_for(const Context& ctx, int order, const Params& p) {
  try {
    return induced_smap(ctx.spec(), 2 * order + 4);
  } catch (const NoClosedForm&) {
    SMap s;
    extract_qyb_operator(ctx, p.count("k-max") ? p.at("k-max") : 4, p.count("f-degree") ? p.at("f-degree") : 2, 1, 3, &s);
    return s;
  }
}

std::vector<int> qyb_basis(const Context& ctx) {
  std::vector<int> b{kVacuum};
  for (int g : ctx.generators()) b.push_back(g);
  return b;
}

std::vector<std::pair<int, int>> pairs(const Context& ctx, const Options& opt) {
  const AlgebraSpec& spec = ctx.spec();
  std::vector<int> as = ctx.generators(), bs = ctx.generators();
  if (opt.a) as = {spec.index(*opt.a)};
  if (opt.b) bs = {spec.index(*opt.b)};
  std::vector<std::pair<int, int>> out;
  for (int a : as)
    for (int b : bs) out.emplace_back(a, b);
  return out;
}

// One summary report over many sub-checks of the same verb.
CheckReport summarize(const std::string& name, const std::vector<CheckReport>& subs, const Params& p) {
  CheckReport r;
  r.name = name;
  for (const auto& [k, v] : p) r.param(k, v);
  long passed = 0;
  for (const auto& s : subs) {
    r.status = combine(r.status, s.status);
    std::string label;
    for (const auto& [k, v] : s.params)
      if (k == "u" || k == "v" || k == "w" || k == "a" || k == "b") label += (label.empty() ? "" : " ") + k + "=" + v;
    for (const auto& w : s.witnesses)
      if (r.witnesses.size() < 20) r.witnesses.push_back(label + ": " + w);
    for (const auto& [k, v] : s.details)
      if (k == "inconclusive" || k == "l" || k == "k" || k == "row") r.detail(label + " " + k, v);
    if (s.status == Status::pass) ++passed;
  }
  r.detail("subchecks", static_cast<long>(subs.size()));
  r.detail("subchecks_passed", passed);
  return r;
}

std::vector<CheckReport> run_verb(const std::string& verb, const Context& ctx, const Options& opt, const Params& p) {
  const AlgebraSpec& spec = ctx.spec();
  auto P = [&](const char* k) { return p.at(k); };
  std::vector<CheckReport> out;

  if (verb == "validate") {
    out.push_back(validate_report(spec));
  } else if (verb == "check-relations") {
    out.push_back(guarded(verb, [&] { return check_structure_relations(ctx, P("level"), P("window")); }));
  } else if (verb == "find-slocality") {
    for (auto [a, b] : pairs(ctx, opt))
      out.push_back(guarded(verb, [&] {
        CheckReport r;
        r.name = verb;
        find_slocality(ctx, a, b, P("k-max"), P("f-degree"), P("level"), P("window"), &r);
        return r;
      }));
  } else if (verb == "check-jacobi") {
    out.push_back(guarded(verb, [&] {
      std::vector<CheckReport> subs;
      const int W = P("window");
      for (auto [u, v] : pairs(ctx, opt)) {
        auto row = closed_form_row(ctx, u, v, 3 * W + 2 * P("level") + 6);
        if (!row) {
          const SlocalityResult s = find_slocality(ctx, u, v, 4, 2, 1, 3);
          if (!s.k) {
            CheckReport r;
            r.name = verb;
            r.param("u", gen_name(spec, u));
            r.param("v", gen_name(spec, v));
            r.inconclusive("no S row available");
            subs.push_back(r);
            continue;
          }
          row = s.row;
        }
        for (const auto& w : ctx.probes(P("level"))) subs.push_back(check_s_jacobi(ctx, u, v, w, *row, W));
      }
      return summarize(verb, subs, p);
    }));
  } else if (verb == "check-assoc") {
    out.push_back(guarded(verb, [&] {
      std::vector<CheckReport> subs;
      int lmax_found = -1;
      for (auto [u, v] : pairs(ctx, opt))
        for (const auto& w : ctx.probes(P("level"))) {
          AssocResult ar;
          subs.push_back(check_weak_assoc(ctx, ctx.module().generator_state(u), ctx.module().generator_state(v), w,
                                          P("l-max"), P("window"), &ar));
          if (ar.l) lmax_found = std::max(lmax_found, *ar.l);
        }
      CheckReport r = summarize(verb, subs, p);
      r.details.erase(std::remove_if(r.details.begin(), r.details.end(),
                                     [](const auto& d) { return d.first.size() > 2 && d.first.substr(d.first.size() - 2) == " l"; }),
                      r.details.end());
      r.detail("max_l_needed", lmax_found);
      return r;
    }));
  } else if (verb == "check-qyb" || verb == "check-unitarity") {
    out.push_back(guarded(verb, [&] {
      const SMap s = smap_for(ctx, P("order"), p);
      return verb == "check-qyb" ? check_qyb(spec, s, qyb_basis(ctx), P("order"))
                                 : check_unitarity(spec, s, qyb_basis(ctx), P("order"));
    }));
  } else if (verb == "extract-s") {
    out.push_back(guarded(verb, [&] {
      return extract_qyb_operator(ctx, P("k-max"), P("f-degree"), P("level"), P("window"));
    }));
  } else if (verb == "probe-z") {
    out.push_back(guarded(verb, [&] { return nondegeneracy_probe(ctx, P("n"), P("level"), P("exp"), P("dmax")); }));
  } else if (verb == "ker-d") {
    out.push_back(guarded(verb, [&] { return ker_d_probe(ctx, P("level")); }));
  } else if (verb == "gr-dims") {
    out.push_back(guarded(verb, [&] { return gr_dims_check(ctx, P("level")); }));
  } else if (verb == "check-filtration") {
    out.push_back(guarded(verb, [&] { return check_filtration(ctx, P("level")); }));
  } else if (verb == "check-delta") {
    out.push_back(guarded(verb, [&] { return check_delta_suite(ctx, P("level"), P("order"), P("window")); }));
  }
  return out;
}

json check_json(const CheckReport& c) {
  json j;
  j["name"] = c.name;
  j["status"] = status_name(c.status);
  json params = json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["params"] = params;
  if (!c.window.empty()) j["window"] = c.window;
  j["witnesses"] = c.witnesses;
  json details = json::object();
  for (const auto& [k, v] : c.details) details[k] = v;
  j["details"] = details;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int default_window() {
  if (const char* env = std::getenv("QVA_DEFAULT_WINDOW")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0 && v < 1000) return static_cast<int>(v);
  }
  return 4;
}

const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> out;
    for (const auto& [k, d] : defaults()) out.push_back(k);
    return out;
  }();
  return v;
}

Params effective_params(const Options& opt) {
  auto it = defaults().find(opt.verb);
  if (it == defaults().end()) throw std::invalid_argument("unknown verb '" + opt.verb + "'");
  Params p = it->second;
  for (auto& [k, v] : p)
    if (k == "window" && v < 0) v = default_window();
  for (const auto& [k, v] : opt.ints) {
    if (opt.verb != "run-suite" && !p.count(k))
      throw std::invalid_argument("--" + k + " does not apply to " + opt.verb);
    p[k] = v;
  }
  return p;
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int exit_code(Status s) {
  switch (s) {
    case Status::pass: return kPass;
    case Status::fail: return kFail;
    case Status::inconclusive: return kInconclusive;
  }
  return kFail;
}

Report run(const Options& opt, const std::string& spec_text) {
  Report rep;
  rep.verb = opt.verb;
  rep.spec_path = opt.spec_path;
  rep.spec_hash = fnv1a64(spec_text);
  rep.params = effective_params(opt);
  const auto t0 = Clock::now();
  AlgebraSpec spec = parse_spec(spec_text);

  CheckReport v = validate_report(spec);
  if (opt.verb == "validate" || v.status == Status::fail) {
    rep.checks.push_back(v);
  } else {
    Context ctx(spec);
    if (opt.verb == "run-suite") {
      for (const auto& verb : kSuite) {
        Options sub = opt;
        sub.verb = verb;
        sub.ints.clear();
        for (const auto& [k, val] : opt.ints)
          if (defaults().at(verb).count(k)) sub.ints[k] = val;
        const Params p = effective_params(sub);
        for (auto& c : run_verb(verb, ctx, sub, p)) rep.checks.push_back(std::move(c));
      }
      if (spec.family == Family::zf) {
        Options sub = opt;
        sub.verb = "check-delta";
        sub.ints.clear();
        for (auto& c : run_verb(sub.verb, ctx, sub, effective_params(sub))) rep.checks.push_back(std::move(c));
      }
    } else {
      rep.checks = run_verb(opt.verb, ctx, opt, rep.params);
    }
  }
  for (const auto& c : rep.checks) rep.status = combine(rep.status, c.status);
  rep.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

std::string to_json(const Report& r, bool timings) {
  json j;
  j["tool"] = "qva";
  j["version"] = kVersion;
  j["spec"] = {{"path", r.spec_path}, {"hash", "fnv1a64:" + r.spec_hash}};
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["command"] = {{"verb", r.verb}, {"params", params}};
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  j["checks"] = checks;
  j["status"] = status_name(r.status);
  if (timings) {
    json t = json::object();
    t["total_seconds"] = r.seconds;
    json per = json::array();
    for (const auto& c : r.checks) per.push_back({{"name", c.name}, {"seconds", c.seconds}});
    t["checks"] = per;
    j["timings"] = t;
  }
  return j.dump(2) + "\n";
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qva: exact checks for quantum vertex algebra specs"};
  app.require_subcommand(1);
  Options opt;
  std::map<std::string, int> values;

  std::string verb_help;
  for (const auto& [verb, d] : defaults()) {
    std::string desc = "defaults:";
    if (d.empty()) desc += " none";
    for (const auto& [k, v] : d) desc += " --" + k + " " + (v < 0 ? std::string("$QVA_DEFAULT_WINDOW or 4") : std::to_string(v));
    if (verb == "run-suite") desc = "validate, then every check of the family with each verb's defaults";
    CLI::App* sub = app.add_subcommand(verb, desc);
    sub->add_option("spec", opt.spec_path, "spec file")->required();
    sub->add_option("--out", opt.out, "also write the report to this file");
    sub->add_flag("--timings", opt.timings, "add wall-clock timings to the report");
    std::set<std::string> flags;
    if (verb == "run-suite") {
      for (const auto& [v2, d2] : defaults())
        for (const auto& [k, v] : d2) flags.insert(k);
    } else {
      for (const auto& [k, v] : d) flags.insert(k);
    }
    for (const auto& k : flags) sub->add_option("--" + k, values[verb + "/" + k], k);
    if (verb == "find-slocality" || verb == "check-jacobi" || verb == "check-assoc") {
      sub->add_option("--a", opt.a, "first generator (x1)");
      sub->add_option("--b", opt.b, "second generator (x2)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kPass : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  opt.verb = sub->get_name();
  for (const auto* o : sub->get_options()) {
    const std::string name = o->get_name();
    if (name.rfind("--", 0) != 0 || o->count() == 0) continue;
    const std::string k = name.substr(2);
    auto it = values.find(opt.verb + "/" + k);
    if (it != values.end()) opt.ints[k] = it->second;
  }

  std::string text;
  try {
    text = read_file(opt.spec_path);
  } catch (const std::exception& e) {
    err << "qva: " << e.what() << "\n";
    return kUsage;
  }
  Report rep;
  try {
    rep = run(opt, text);
  } catch (const SpecError& e) {
    err << "qva: spec error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "qva: " << e.what() << "\n";
    return kUsage;
  }
  const std::string body = to_json(rep, opt.timings);
  out << body;
  if (opt.out) {
    std::ofstream f(*opt.out, std::ios::binary);
    if (!f || !(f << body)) {
      err << "qva: cannot write " << *opt.out << "\n";
      return kUsage;
    }
  }
  return exit_code(rep.status);
}

}  // namespace qva::cli
