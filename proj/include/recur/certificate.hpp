#pragma once
// Test certificates: an enumerated test component, its exact measure and the
// bound that measure must satisfy.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "recur/array.hpp"
#include "recur/bitseq.hpp"
#include "recur/dyadic.hpp"
#include "recur/geometry.hpp"
#include "recur/measure.hpp"

namespace recur {

using Json = nlohmann::ordered_json;

enum class CertificateKind { kurtz_stage, schnorr_error, ml_c, ml_g, ml_refined };

inline std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kurtz_stage:
      return "kurtz-stage";
    case CertificateKind::schnorr_error:
      return "schnorr-error";
    case CertificateKind::ml_c:
      return "ml-Cr";
    case CertificateKind::ml_g:
      return "ml-Gm";
    case CertificateKind::ml_refined:
      return "ml-refined";
  }
  return "unknown";
}

inline CertificateKind parse_kind(const std::string& s) {
  for (auto k : {CertificateKind::kurtz_stage, CertificateKind::schnorr_error, CertificateKind::ml_c, CertificateKind::ml_g,
                 CertificateKind::ml_refined}) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("unknown certificate kind '" + s + "'");
}

// Kurtz stage sets are equality certificates; the rest are upper bounds.
enum class BoundRelation { at_most, equal };

struct TestCertificate {
  CertificateKind kind = CertificateKind::kurtz_stage;
  Json parameters = Json::object();
  std::size_t dimension = 1;  // > 1: words are row-major flattened cubes
  std::vector<Word> words;
  Dyadic exact_measure;
  Dyadic required_bound;
  BoundRelation relation = BoundRelation::at_most;
  std::size_t stage_budget = 0;
  std::optional<std::size_t> escape_level;

  bool passes() const {
    return relation == BoundRelation::equal ? exact_measure == required_bound : exact_measure <= required_bound;
  }
};

namespace detail {
inline std::vector<ArraySample> as_arrays(const TestCertificate& c) {
  std::vector<ArraySample> out;
  out.reserve(c.words.size());
  for (const auto& w : c.words) out.push_back(ArraySample::from_flat(c.dimension, w));
  return out;
}
}  // namespace detail

/// Measure of the certificate's open set, recomputed from its words.
inline Dyadic recompute_measure(const TestCertificate& c) {
  if (c.dimension == 1) return measure_open(c.words);
  auto arrays = detail::as_arrays(c);
  return pattern_measure<CubeGeometry>(CubeGeometry{c.dimension}, arrays);
}

/// No member is a prefix of another (sub-cube order for arrays).
inline bool check_prefix_free(const TestCertificate& c) {
  if (c.dimension == 1) return PrefixFreeWordSet::is_prefix_free(c.words);
  auto arrays = detail::as_arrays(c);
  return is_prefix_free<CubeGeometry>(CubeGeometry{c.dimension}, arrays);
}

struct VerifyOutcome {
  bool prefix_free = false;
  bool measure_matches = false;
  bool bound_holds = false;
  Dyadic recomputed;

  bool ok() const { return prefix_free && measure_matches && bound_holds; }
};

/// Re-derives everything checkable from the certificate alone.
inline VerifyOutcome verify(const TestCertificate& c) {
  VerifyOutcome v;
  v.prefix_free = check_prefix_free(c);
  v.recomputed = recompute_measure(c);
  v.measure_matches = v.recomputed == c.exact_measure;
  v.bound_holds = c.passes();
  return v;
}

inline Json to_json(const TestCertificate& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["parameters"] = c.parameters;
  j["dimension"] = c.dimension;
  Json words = Json::array();
  for (const auto& w : c.words) words.push_back(w.to_string());
  j["words"] = std::move(words);
  j["exact_measure"] = c.exact_measure.to_string();
  j["required_bound"] = c.required_bound.to_string();
  j["relation"] = c.relation == BoundRelation::equal ? "eq" : "le";
  j["stage_budget"] = c.stage_budget;
  j["escape_level"] = c.escape_level ? Json(*c.escape_level) : Json(nullptr);
  j["pass"] = c.passes();
  return j;
}

inline TestCertificate certificate_from_json(const Json& j) {
  try {
    TestCertificate c;
    c.kind = parse_kind(j.at("kind").get<std::string>());
    c.parameters = j.value("parameters", Json::object());
    c.dimension = j.value("dimension", std::size_t{1});
    if (c.dimension == 0) throw ParseError("certificate dimension must be positive");
    for (const auto& w : j.at("words")) c.words.emplace_back(w.get<std::string>());
    c.exact_measure = Dyadic::parse(j.at("exact_measure").get<std::string>());
    c.required_bound = Dyadic::parse(j.at("required_bound").get<std::string>());
    auto rel = j.value("relation", std::string("le"));
    if (rel != "le" && rel != "eq") throw ParseError("relation must be 'le' or 'eq'");
    c.relation = rel == "eq" ? BoundRelation::equal : BoundRelation::at_most;
    c.stage_budget = j.value("stage_budget", std::size_t{0});
    if (j.contains("escape_level") && !j["escape_level"].is_null()) c.escape_level = j["escape_level"].get<std::size_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed certificate: ") + e.what());
  }
}

}  // namespace recur
