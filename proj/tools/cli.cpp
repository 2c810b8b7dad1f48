#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recur/recur.hpp"

namespace recur::cli {
namespace {

struct Config {
  std::string command;
  std::string mode = "witness";
  std::size_t k = 1;
  std::size_t r = 3;
  std::size_t v = 0;
  std::size_t t_max = 3;
  std::optional<std::size_t> n_max;
  std::size_t stage_max = 12;
  std::optional<std::size_t> j_max;
  std::string epsilon = "0.05";
  std::string alpha = "golden";
  std::vector<std::uint64_t> seeds;
  std::string seeds_file;
  std::string class_file;
  std::string target;
  std::string source;
  std::string input;
  std::string format = "json";
  std::string out;
  std::size_t precision = kDefaultPrecision;

  Json to_json() const {
    Json j;
    j["command"] = command;
    if (command == "grid") j["mode"] = mode;
    j["k"] = k;
    j["r"] = r;
    j["v"] = v;
    j["t_max"] = t_max;
    j["n_max"] = n_max ? Json(*n_max) : Json(nullptr);
    j["stage_max"] = stage_max;
    j["j_max"] = j_max ? Json(*j_max) : Json(nullptr);
    j["epsilon"] = epsilon;
    j["alpha"] = alpha;
    j["seeds"] = seeds;
    j["class_file"] = class_file;
    j["target"] = target;
    j["source"] = source;
    j["precision"] = precision;
    return j;
  }
};

using Row = std::vector<std::string>;

struct Result {
  Json doc;
  std::vector<Row> csv;  // header first
  int status = kPass;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::size_t parse_size(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ParseError(std::string("bad ") + what + " '" + s + "'");
  }
}

// --- targets -----------------------------------------------------------------

// Inline clopen target `n0:w1,w2,...`.
ClopenSet parse_clopen_inline(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("clopen target must look like '<n0>:<word>,<word>'");
  const auto n0 = parse_size(text.substr(0, colon), "granularity");
  std::vector<Word> words;
  for (auto& w : split(text.substr(colon + 1), ',')) {
    w = trim(w);
    if (!w.empty()) words.emplace_back(w);
  }
  return ClopenSet(n0, std::move(words));
}

// Inline co-enumeration `t:w w;t:w`.
StagedCoEnumeration parse_coenumeration_inline(const std::string& text) {
  std::map<std::size_t, std::vector<Word>> stages;
  for (auto& part : split(text, ';')) {
    part = trim(part);
    if (part.empty()) continue;
    auto colon = part.find(':');
    if (colon == std::string::npos) throw ParseError("co-enumeration must look like '<stage>:<word> <word>;...'");
    auto& bucket = stages[parse_size(trim(part.substr(0, colon)), "stage")];
    std::istringstream ws(part.substr(colon + 1));
    std::string w;
    while (ws >> w) bucket.emplace_back(w);
  }
  return StagedCoEnumeration(std::move(stages));
}

bool looks_like_coenumeration(const std::string& body) {
  std::istringstream in(body);
  std::string first;
  in >> first;
  return first == "stage";
}

ClopenSet load_clopen(const Config& c) {
  if (!c.target.empty()) return parse_clopen_inline(c.target);
  if (c.class_file.empty()) throw ParseError("a clopen target is needed: pass --target or --class-file");
  std::istringstream in(read_file(c.class_file));
  return read_clopen(in);
}

StagedCoEnumeration load_coenumeration(const Config& c) {
  if (!c.target.empty()) return parse_coenumeration_inline(c.target);
  if (c.class_file.empty()) throw ParseError("a co-enumeration is needed: pass --target or --class-file");
  std::istringstream in(read_file(c.class_file));
  return read_coenumeration(in);
}

std::vector<ArraySample> load_arrays(const Config& c) {
  std::vector<ArraySample> out;
  if (!c.target.empty()) {
    for (auto& w : split(c.target, ',')) {
      w = trim(w);
      if (w.empty()) continue;
      auto a = ArraySample::from_flat(c.k, Word(w));
      if (a.cell_count() != Word(w).size()) throw ParseError("'" + w + "' is not a cube of dimension " + std::to_string(c.k));
      out.push_back(std::move(a));
    }
    return out;
  }
  if (c.class_file.empty()) throw ParseError("arrays are needed: pass --target or --class-file");
  std::istringstream in(read_file(c.class_file));
  ArraySample a;
  while (read_array(in, a)) {
    if (a.dim() != c.k) throw ParseError("array dimension does not match --k");
    out.push_back(a);
  }
  return out;
}

std::vector<std::uint64_t> load_seeds(const Config& c) {
  std::vector<std::uint64_t> seeds = c.seeds;
  if (!c.seeds_file.empty()) {
    std::string body = read_file(c.seeds_file);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream in(body);
    std::string tok;
    while (in >> tok) seeds.push_back(parse_size(tok, "seed"));
  }
  if (seeds.empty()) seeds.push_back(0);
  return seeds;
}

std::string opt_str(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }
Json opt_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

Row cert_row(const std::string& label, std::size_t index, const TestCertificate& cert) {
  return {label, std::to_string(index), std::to_string(cert.words.size()), cert.exact_measure.to_string(),
          cert.required_bound.to_string(), cert.passes() ? "1" : "0"};
}

const Row kCertHeader{"kind", "index", "words", "exact_measure", "required_bound", "pass"};

bool all_pass(const std::vector<TestCertificate>& certs) {
  return std::all_of(certs.begin(), certs.end(), [](const auto& c) { return c.passes(); });
}

Json certs_json(const std::vector<TestCertificate>& certs) {
  Json arr = Json::array();
  for (const auto& c : certs) arr.push_back(to_json(c));
  return arr;
}

// --- recur ---------------------------------------------------------------------

template <RecurrenceTarget Target>
Result recur_with(const Config& c, const Target& target, Json target_desc) {
  Result res;
  res.doc["target"] = std::move(target_desc);
  res.doc["k"] = c.k;
  const std::size_t n_max = c.n_max.value_or(64);
  res.doc["n_max"] = n_max;
  res.csv.push_back({"seed", "k", "n_max", "witness"});
  if (!c.source.empty()) {
    RecurrenceQuery<Target> q{parse_source(c.source), target, c.k, n_max};
    auto report = find_witness(q);
    const bool sound = recheck(q, report);
    res.doc["source"] = q.source.describe();
    res.doc["witness"] = opt_json(report.witness);
    res.doc["checked_range"] = report.checked_range;
    res.doc["stage_budget"] = opt_json(report.stage_budget);
    Json ev = Json::array();
    for (const auto& m : report.evidence) {
      ev.push_back({{"i", m.i}, {"offset", m.offset}, {"window", m.window.token()}, {"admitted", m.admitted}});
    }
    res.doc["evidence"] = std::move(ev);
    res.doc["rechecked"] = sound;
    res.csv.push_back({q.source.describe(), std::to_string(c.k), std::to_string(n_max), opt_str(report.witness)});
    if (!sound) res.status = kBoundViolated;
    return res;
  }
  auto seeds = load_seeds(c);
  auto summary = batch_statistics(std::span<const std::uint64_t>(seeds), target, c.k, n_max);
  Json rows = Json::array();
  for (const auto& row : summary.rows) {
    rows.push_back({{"seed", row.seed}, {"witness", opt_json(row.witness)}});
    res.csv.push_back({std::to_string(row.seed), std::to_string(c.k), std::to_string(n_max), opt_str(row.witness)});
  }
  Json hist = Json::object();
  for (auto [n, count] : summary.histogram) hist[std::to_string(n)] = count;
  res.doc["rows"] = std::move(rows);
  res.doc["summary"] = {{"seeds", summary.rows.size()},
                        {"with_witness", summary.with_witness},
                        {"fraction", summary.fraction()},
                        {"mean_witness", summary.mean_witness()},
                        {"histogram", std::move(hist)}};
  return res;
}

Result cmd_recur(const Config& c) {
  const bool coenum = c.target.empty() && !c.class_file.empty() && looks_like_coenumeration(read_file(c.class_file));
  if (coenum) {
    auto b = load_coenumeration(c);
    ClosedTarget target(b, c.stage_max);
    return recur_with(c, target, Json{{"kind", "closed"}, {"stage_budget", c.stage_max}});
  }
  auto p = load_clopen(c);
  return recur_with(c, p, Json{{"kind", "clopen"}, {"granularity", p.granularity()}, {"measure", p.measure().to_string()}});
}

// --- kurtz -------------------------------------------------------------------

Result cmd_kurtz(const Config& c) {
  Result res;
  auto p = load_clopen(c);
  std::vector<TestCertificate> certs;
  res.csv.push_back({"t", "n_t", "granularity", "exact_measure", "required_bound", "pass"});
  KurtzSchedule sched{p.granularity(), c.k};
  for (std::size_t t = 0; t <= c.t_max; ++t) {
    certs.push_back(kurtz_stage_set(p, c.k, t));
    const auto& cert = certs.back();
    res.csv.push_back({std::to_string(t), std::to_string(sched.time(t)), std::to_string(sched.granularity(t)),
                       cert.exact_measure.to_string(), cert.required_bound.to_string(), cert.passes() ? "1" : "0"});
  }
  res.doc["p"] = p.measure().to_string();
  res.doc["k"] = c.k;
  res.doc["certificates"] = certs_json(certs);
  if (!c.source.empty()) {
    auto z = parse_source(c.source);
    auto cap = kurtz_capture(z, p, c.k, c.t_max);
    res.doc["capture"] = {{"source", z.describe()},
                          {"captured", cap.captured},
                          {"escape_stage", opt_json(cap.escape_stage)},
                          {"stages_checked", cap.stages_checked}};
  }
  if (!all_pass(certs)) res.status = kBoundViolated;
  return res;
}

// --- schnorr -----------------------------------------------------------------

Result cmd_schnorr(const Config& c) {
  Result res;
  auto b = load_coenumeration(c);
  auto sched = schnorr_schedule(b, c.k, c.v, c.t_max);
  std::vector<TestCertificate> certs;
  res.csv.push_back({"t", "n_t", "exact_measure", "required_bound", "pass"});
  Json schedule = Json::array();
  for (std::size_t t = 0; t < sched.stages(); ++t) {
    schedule.push_back({{"t", t}, {"n_t", sched.time(t)}, {"tail", b.tail_modulus(sched.time(t)).to_string()},
                        {"tail_bound", t == 0 ? Json(nullptr) : Json(sched.tail_bound(t).to_string())}});
    if (t == 0) continue;
    certs.push_back(schnorr_error_set(b, sched, t));
    const auto& cert = certs.back();
    res.csv.push_back({std::to_string(t), std::to_string(sched.time(t)), cert.exact_measure.to_string(),
                       cert.required_bound.to_string(), cert.passes() ? "1" : "0"});
  }
  auto u = schnorr_union_bound(certs);
  res.csv.push_back({"union", "", u.union_measure.to_string(), u.level_bound.to_string(), u.holds() ? "1" : "0"});
  res.doc["k"] = c.k;
  res.doc["v"] = c.v;
  res.doc["schedule"] = std::move(schedule);
  res.doc["certificates"] = certs_json(certs);
  res.doc["union"] = {{"union_measure", u.union_measure.to_string()},
                      {"sum_of_measures", u.sum_of_measures.to_string()},
                      {"sum_of_bounds", u.sum_of_bounds.to_string()},
                      {"level_bound", u.level_bound.to_string()},
                      {"holds", u.holds()}};
  if (!all_pass(certs) || !u.holds()) res.status = kBoundViolated;
  return res;
}

// --- mltest ------------------------------------------------------------------

Result cmd_mltest(const Config& c) {
  Result res;
  auto b = load_coenumeration(c);
  auto report = ml_test(b, c.k, c.r, c.stage_max, c.j_max.value_or(c.r));
  res.csv.push_back(kCertHeader);
  auto add_rows = [&](const std::string& label, const std::vector<TestCertificate>& certs, std::size_t first) {
    for (std::size_t i = 0; i < certs.size(); ++i) res.csv.push_back(cert_row(label, first + i, certs[i]));
  };
  res.doc["k"] = c.k;
  res.doc["stage_max"] = c.stage_max;
  res.doc["path"] = report.split ? "split" : "direct";
  res.doc["q"] = report.q.to_string();
  res.doc["levels"] = certs_json(report.c_sets);
  add_rows("ml-Cr", report.c_sets, 0);
  bool ok = report.passes();
  if (report.split) {
    Json d = Json::array();
    for (const auto& w : report.d) d.push_back(w.token());
    Json residual = Json::array();
    for (const auto& w : report.residual) residual.push_back(w.token());
    res.doc["split"] = {{"D", std::move(d)}, {"N", report.n_bound}, {"residual", std::move(residual)}};
    res.doc["g_sets"] = certs_json(report.g_sets);
    res.doc["refined"] = certs_json(report.refined);
    add_rows("ml-Gm", report.g_sets, 0);
    add_rows("ml-refined", report.refined, 0);
  }
  Json test = Json::array();
  for (const auto& lv : report.test) {
    test.push_back({{"j", lv.j}, {"u", lv.u}, {"certificate", to_json(lv.cert)}});
    res.csv.push_back(cert_row("level", lv.j, lv.cert));
  }
  res.doc["test"] = std::move(test);

  if (!c.source.empty()) {
    auto z = parse_source(c.source);
    const Word zp = prefix(z, c.stage_max);
    if (!report.split) {
      Json inside = Json::array();
      for (std::size_t r = 0; r < report.levels.levels.size(); ++r) {
        auto pats = report.levels.patterns(r);
        inside.push_back({{"r", r}, {"inside", has_prefix_in(LineGeometry{c.k}, zp, std::span<const Word>(pats))}});
      }
      res.doc["capture"] = {{"source", z.describe()}, {"levels", std::move(inside)}};
    } else {
      auto esc = ml_escape(report.levels, std::span<const Word>(report.d), report.n_bound, zp);
      if (!esc) {
        res.doc["escape"] = nullptr;
      } else {
        auto from = ml_enumerate_refined(report.levels, std::span<const Word>(report.residual), esc->level, c.r);
        for (auto& cert : from) cert.escape_level = esc->m_star;
        res.doc["escape"] = {{"source", z.describe()},
                             {"m_star", esc->m_star},
                             {"rho", esc->rho.token()},
                             {"level", esc->level},
                             {"refined", certs_json(from)}};
        add_rows("ml-refined-escape", from, esc->level);
        ok = ok && all_pass(from);
      }
    }
  }
  if (!ok) res.status = kBoundViolated;
  return res;
}

// --- grid --------------------------------------------------------------------

GridSource parse_grid_source(const std::string& spec, std::size_t dim) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParseError("grid source must be seed:<n>, constant:<b> or file:<path>");
  auto kind = spec.substr(0, colon);
  auto rest = spec.substr(colon + 1);
  if (kind == "seed") return GridSource::seeded(dim, parse_size(rest, "seed"));
  if (kind == "constant") {
    if (rest != "0" && rest != "1") throw ParseError("constant grid bit must be 0 or 1");
    return GridSource::constant(dim, rest == "1");
  }
  if (kind == "file") {
    std::istringstream in(read_file(rest));
    ArraySample a;
    if (!read_array(in, a)) throw ParseError("grid file '" + rest + "' holds no array");
    if (a.dim() != dim) throw ParseError("grid file dimension does not match --k");
    return GridSource::explicit_data(std::move(a), false);
  }
  throw ParseError("unknown grid source kind '" + kind + "'");
}

ClopenArraySet arrays_as_clopen(const Config& c) {
  auto arrays = load_arrays(c);
  if (arrays.empty()) throw ParseError("the grid target needs at least one array");
  const std::size_t n1 = arrays.front().size();
  return ClopenArraySet(c.k, n1, std::move(arrays));
}

Result cmd_grid(const Config& c) {
  Result res;
  res.doc["mode"] = c.mode;
  res.doc["k"] = c.k;
  if (c.mode == "witness") {
    auto p = arrays_as_clopen(c);
    const std::size_t n_max = c.n_max.value_or(64);
    res.doc["n_max"] = n_max;
    res.csv.push_back({"seed", "k", "n_max", "witness"});
    std::vector<GridSource> sources;
    std::vector<std::string> labels;
    if (!c.source.empty()) {
      sources.push_back(parse_grid_source(c.source, c.k));
      labels.push_back(sources.back().describe());
    } else {
      for (auto s : load_seeds(c)) {
        sources.push_back(GridSource::seeded(c.k, s));
        labels.push_back(std::to_string(s));
      }
    }
    Json rows = Json::array();
    for (std::size_t i = 0; i < sources.size(); ++i) {
      auto w = grid_find_witness(sources[i], p, c.k, n_max);
      rows.push_back({{"source", labels[i]}, {"witness", opt_json(w.witness)}});
      res.csv.push_back({labels[i], std::to_string(c.k), std::to_string(n_max), opt_str(w.witness)});
    }
    res.doc["rows"] = std::move(rows);
    return res;
  }
  std::vector<TestCertificate> certs;
  res.csv.push_back(kCertHeader);
  if (c.mode == "kurtz") {
    auto p = arrays_as_clopen(c);
    res.doc["p"] = p.measure().to_string();
    for (std::size_t r = 1; r <= c.r; ++r) {
      certs.push_back(grid_kurtz_stage_set(p, r));
      res.csv.push_back(cert_row("kurtz-stage", r, certs.back()));
    }
  } else if (c.mode == "ml") {
    auto b = load_arrays(c);
    auto levels = ml_enumerate_levels(CubeGeometry{c.k}, std::span<const ArraySample>(b), c.r, c.stage_max);
    res.doc["stage_max"] = c.stage_max;
    res.doc["q"] = levels.q().to_string();
    for (std::size_t r = 0; r <= c.r; ++r) {
      certs.push_back(ml_certificate(levels, r));
      res.csv.push_back(cert_row("ml-Cr", r, certs.back()));
    }
  } else {
    throw ParseError("grid mode must be witness, kurtz or ml");
  }
  res.doc["certificates"] = certs_json(certs);
  for (const auto& cert : certs) {
    if (!cert.passes() || !check_prefix_free(cert)) res.status = kBoundViolated;
  }
  return res;
}

// --- rotate ------------------------------------------------------------------

Json report_json(const ReturnReport& r) {
  return {{"n", r.n},
          {"distances", r.distances},
          {"epsilon", boost::multiprecision::numerator(r.epsilon).str() + "/" + boost::multiprecision::denominator(r.epsilon).str()},
          {"bound_used", r.bound_used},
          {"precision", r.precision}};
}

Result cmd_rotate(const Config& c) {
  Result res;
  const auto alpha = Alpha::parse(c.alpha);
  const Rational eps = parse_rational(c.epsilon);
  if (eps <= 0) throw ParseError("epsilon must be positive");
  const auto ceiling = dirichlet_ceiling(c.k, eps);
  const std::uint64_t n_max = c.n_max ? *c.n_max : ceiling;
  res.doc["alpha"] = alpha.label();
  res.doc["k"] = c.k;
  res.doc["epsilon"] = c.epsilon;
  res.doc["dirichlet_ceiling"] = ceiling;
  res.doc["n_max"] = n_max;
  res.csv.push_back({"alpha", "k", "epsilon", "method", "n", "max_distance", "verified"});

  auto least = find_multi_return_escalating(alpha, c.k, eps, n_max, c.precision);
  if (least) {
    const bool ok = verify_return(alpha, *least, c.k, 2 * least->precision);
    res.doc["least"] = report_json(*least);
    res.doc["least"]["verified_at"] = 2 * least->precision;
    res.doc["least"]["verified"] = ok;
    res.csv.push_back({alpha.label(), std::to_string(c.k), c.epsilon, "scan", std::to_string(least->n),
                       std::to_string(*std::max_element(least->distances.begin(), least->distances.end())), ok ? "1" : "0"});
    if (!ok) res.status = kBoundViolated;
  } else {
    res.doc["least"] = nullptr;
    res.csv.push_back({alpha.label(), std::to_string(c.k), c.epsilon, "scan", "", "", ""});
    if (n_max >= ceiling) res.status = kBoundViolated;
  }
  try {
    auto cf = cf_accelerated_return(alpha, c.k, eps, 96, 64, c.precision);
    const bool ok = verify_return(alpha, cf, c.k, 2 * cf.precision);
    res.doc["cf"] = report_json(cf);
    res.doc["cf"]["verified"] = ok;
    res.csv.push_back({alpha.label(), std::to_string(c.k), c.epsilon, "cf", std::to_string(cf.n),
                       std::to_string(*std::max_element(cf.distances.begin(), cf.distances.end())), ok ? "1" : "0"});
    if (!ok) res.status = kBoundViolated;
  } catch (const DepthExhausted& e) {
    res.doc["cf"] = {{"error", e.what()}};
  }
  return res;
}

// --- verify ------------------------------------------------------------------

void collect_certificates(const Json& j, std::vector<const Json*>& out) {
  if (j.is_object()) {
    if (j.contains("kind") && j.contains("words") && j.contains("exact_measure")) {
      out.push_back(&j);
      return;
    }
    for (const auto& [key, value] : j.items()) collect_certificates(value, out);
  } else if (j.is_array()) {
    for (const auto& value : j) collect_certificates(value, out);
  }
}

Result cmd_verify(const Config& c) {
  Result res;
  const std::string path = !c.input.empty() ? c.input : c.class_file;
  if (path.empty()) throw ParseError("verify needs a certificate file");
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("certificate file is not valid JSON: ") + e.what());
  }
  std::vector<const Json*> found;
  collect_certificates(doc, found);
  if (found.empty()) throw ParseError("no certificates found in '" + path + "'");
  res.csv.push_back({"index", "kind", "prefix_free", "measure_matches", "bound_holds", "pass"});
  Json results = Json::array();
  for (std::size_t i = 0; i < found.size(); ++i) {
    auto cert = certificate_from_json(*found[i]);
    auto v = verify(cert);
    results.push_back({{"index", i},
                       {"kind", to_string(cert.kind)},
                       {"prefix_free", v.prefix_free},
                       {"measure_matches", v.measure_matches},
                       {"recomputed", v.recomputed.to_string()},
                       {"bound_holds", v.bound_holds},
                       {"pass", v.ok()}});
    res.csv.push_back({std::to_string(i), to_string(cert.kind), v.prefix_free ? "1" : "0", v.measure_matches ? "1" : "0",
                       v.bound_holds ? "1" : "0", v.ok() ? "1" : "0"});
    if (!v.ok()) res.status = kBoundViolated;
  }
  res.doc["certificates"] = found.size();
  res.doc["results"] = std::move(results);
  return res;
}

// --- configuration -----------------------------------------------------------

void apply_config_file(Config& c, const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "k") c.k = value.get<std::size_t>();
      else if (key == "r") c.r = value.get<std::size_t>();
      else if (key == "v") c.v = value.get<std::size_t>();
      else if (key == "t_max") c.t_max = value.get<std::size_t>();
      else if (key == "n_max") c.n_max = value.get<std::size_t>();
      else if (key == "stage_max") c.stage_max = value.get<std::size_t>();
      else if (key == "j_max") c.j_max = value.get<std::size_t>();
      else if (key == "epsilon") c.epsilon = value.is_string() ? value.get<std::string>() : value.dump();
      else if (key == "alpha") c.alpha = value.get<std::string>();
      else if (key == "seed") c.seeds = {value.get<std::uint64_t>()};
      else if (key == "seeds") c.seeds = value.get<std::vector<std::uint64_t>>();
      else if (key == "seeds_file") c.seeds_file = value.get<std::string>();
      else if (key == "class_file") c.class_file = value.get<std::string>();
      else if (key == "target") c.target = value.get<std::string>();
      else if (key == "source") c.source = value.get<std::string>();
      else if (key == "mode") c.mode = value.get<std::string>();
      else if (key == "format") c.format = value.get<std::string>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "precision") c.precision = value.get<std::size_t>();
      else throw ParseError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad config value: ") + e.what());
  }
}

void write_result(const Result& res, const Config& c, std::ostream& out) {
  if (c.format == "csv") {
    for (const auto& row : res.csv) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
    return;
  }
  Json doc;
  doc["config"] = c.to_json();
  for (const auto& [key, value] : res.doc.items()) doc[key] = value;
  doc["status"] = res.status;
  out << doc.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recurrence witnesses, exact measures and randomness-test certificates"};
  app.require_subcommand(1, 1);

  std::size_t k = 0, r = 0, v = 0, t_max = 0, n_max = 0, stage_max = 0, j_max = 0, precision = 0;
  std::string epsilon, alpha, seeds_file, class_file, target, source, format, out_path, config_path, mode, input;
  std::vector<std::uint64_t> seeds;

  std::vector<CLI::Option*> opts;
  auto* o_k = app.add_option("--k", k, "order of recurrence (grid: dimension)");
  auto* o_r = app.add_option("--r", r, "test level / number of stages");
  auto* o_v = app.add_option("--v", v, "Schnorr test level");
  auto* o_t = app.add_option("--t-max", t_max, "last stage");
  auto* o_n = app.add_option("--n-max", n_max, "largest n searched");
  auto* o_s = app.add_option("--stage-max", stage_max, "enumeration truncation stage");
  auto* o_j = app.add_option("--j-max", j_max, "last ML test level (default: --r)");
  auto* o_eps = app.add_option("--epsilon", epsilon, "return radius (decimal or p/q)");
  auto* o_alpha = app.add_option("--alpha", alpha, "rotation number: golden, p/q, decimal or cf:a0,a1,...");
  auto* o_seed = app.add_option("--seed", seeds, "seed (repeatable)");
  auto* o_seeds = app.add_option("--seeds-file", seeds_file, "file of seeds");
  auto* o_class = app.add_option("--class-file", class_file, "target or co-enumeration file");
  auto* o_target = app.add_option("--target", target, "inline target");
  auto* o_source = app.add_option("--source", source, "sequence source, e.g. seed:7 or periodic:-:10");
  auto* o_format = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* o_out = app.add_option("--out", out_path, "output file");
  auto* o_prec = app.add_option("--precision", precision, "fixed-point bits for rotations");
  app.add_option("--config", config_path, "JSON config file; flags override it");

  app.add_subcommand("recur", "least k-recurrence witnesses")->fallthrough();
  app.add_subcommand("kurtz", "Kurtz stage sets")->fallthrough();
  app.add_subcommand("schnorr", "Schnorr error sets")->fallthrough();
  app.add_subcommand("mltest", "Martin-Löf test levels")->fallthrough();
  auto* grid = app.add_subcommand("grid", "k commuting shifts on arrays")->fallthrough();
  auto* o_mode = grid->add_option("--mode", mode, "witness, kurtz or ml")->check(CLI::IsMember({"witness", "kurtz", "ml"}));
  app.add_subcommand("rotate", "circle rotation return times")->fallthrough();
  auto* verify_cmd = app.add_subcommand("verify", "re-check serialized certificates")->fallthrough();
  verify_cmd->add_option("file", input, "certificate JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  Config c;
  try {
    if (const char* env = std::getenv("RECUR_PRECISION"); env && *env) c.precision = parse_size(env, "RECUR_PRECISION");
    if (!config_path.empty()) apply_config_file(c, config_path);
    c.command = app.get_subcommands().front()->get_name();
    if (o_k->count()) c.k = k;
    if (o_r->count()) c.r = r;
    if (o_v->count()) c.v = v;
    if (o_t->count()) c.t_max = t_max;
    if (o_n->count()) c.n_max = n_max;
    if (o_s->count()) c.stage_max = stage_max;
    if (o_j->count()) c.j_max = j_max;
    if (o_eps->count()) c.epsilon = epsilon;
    if (o_alpha->count()) c.alpha = alpha;
    if (o_seed->count()) c.seeds = seeds;
    if (o_seeds->count()) c.seeds_file = seeds_file;
    if (o_class->count()) c.class_file = class_file;
    if (o_target->count()) c.target = target;
    if (o_source->count()) c.source = source;
    if (o_format->count()) c.format = format;
    if (o_out->count()) c.out = out_path;
    if (o_prec->count()) c.precision = precision;
    if (o_mode->count()) c.mode = mode;
    c.input = input;
    if (c.format != "csv" && c.format != "json") throw ParseError("format must be csv or json");
    if (c.k == 0) throw ParseError("--k must be at least 1");
    if (c.precision < 16) throw ParseError("precision must be at least 16 bits");

    Result res;
    if (c.command == "recur") res = cmd_recur(c);
    else if (c.command == "kurtz") res = cmd_kurtz(c);
    else if (c.command == "schnorr") res = cmd_schnorr(c);
    else if (c.command == "mltest") res = cmd_mltest(c);
    else if (c.command == "grid") res = cmd_grid(c);
    else if (c.command == "rotate") res = cmd_rotate(c);
    else res = cmd_verify(c);

    if (c.out.empty()) {
      write_result(res, c, out);
    } else {
      std::ofstream file(c.out, std::ios::binary);
      if (!file) throw ParseError("cannot write '" + c.out + "'");
      write_result(res, c, file);
    }
    return res.status;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace recur::cli
