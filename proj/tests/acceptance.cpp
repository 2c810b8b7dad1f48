// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
// its wall time; the process exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "cli.hpp"
#include "recur/recur.hpp"

using namespace recur;

namespace {

// Pinned budgets and tolerances.
constexpr double kBudgetKurtz = 1.0;
constexpr double kBudgetCapture = 1.0;
constexpr double kBudgetSchnorr = 1.0;
constexpr double kBudgetMl = 30.0;
constexpr double kBudgetZero = 5.0;
constexpr double kBudgetRandom = 10.0;
constexpr double kBudgetGrid = 60.0;
constexpr double kBudgetRotation = 10.0;
constexpr double kBudgetCli = 60.0;
constexpr double kStandardErrors = 3.0;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget;
  std::function<Outcome()> body;
};

ClopenSet ones() { return ClopenSet(1, {Word("1")}); }

std::unordered_set<Word, WordHash> as_set(const std::vector<Word>& ws) { return {ws.begin(), ws.end()}; }

// Independent survivor count: bit-level scan over all words of the stage length.
std::uint64_t kurtz_survivors_oracle(std::size_t k, std::size_t t) {
  std::size_t n = 1;
  for (std::size_t s = 0; s < t; ++s) n *= k + 1;
  const std::size_t len = k * n + 1;
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << len); ++x) {
    auto bit = [&](std::size_t j) { return ((x >> j) & 1U) != 0; };
    bool alive = true;
    std::size_t m = 1;
    for (std::size_t s = 0; s <= t && alive; ++s, m *= k + 1) {
      bool all = true;
      for (std::size_t i = 1; i <= k; ++i) all = all && bit(i * m);
      alive = !all;
    }
    count += alive ? 1 : 0;
  }
  return count;
}

Outcome kurtz_identity() {
  Outcome o;
  const Dyadic base(BigInt(3), 2);
  for (std::size_t t = 0; t <= 2; ++t) {
    auto cert = kurtz_stage_set(ones(), 2, t);
    const std::size_t len = 2 * KurtzSchedule{1, 2}.time(t) + 1;
    const auto survivors = kurtz_survivors_oracle(2, t);
    o.require(cert.exact_measure == base.pow(t + 1), "t=" + std::to_string(t) + " measure " + cert.exact_measure.to_string());
    o.require(cert.words.size() == survivors, "t=" + std::to_string(t) + " survivor count differs from enumeration");
    o.require(Dyadic(BigInt(survivors), len) == base.pow(t + 1), "oracle disagrees with the product at t=" + std::to_string(t));
    o.require(verify(cert).ok(), "certificate does not verify at t=" + std::to_string(t));
  }
  o.require(kurtz_survivors_oracle(2, 1) == 72, "72 of 128 survivors expected at t=1");
  o.detail = o.pass ? "3/4, 9/16, 27/64; 72 of 128 survivors at length 7" : o.detail;
  return o;
}

Outcome kurtz_capture_theorem() {
  Outcome o;
  const std::size_t t_max = 4;
  const KurtzSchedule sched{1, 1};
  std::vector<std::unordered_set<Word, WordHash>> stage_sets;
  for (std::size_t t = 0; t <= t_max; ++t) stage_sets.push_back(as_set(kurtz_stage_set(ones(), 1, t).words));
  std::size_t survivors_checked = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << 12); ++x) {
    const auto z = SequenceSource::explicit_prefix(Word::from_bits(x, 12), false);
    std::optional<std::size_t> first_witness;
    for (std::size_t t = 0; t <= t_max; ++t) {
      if (!first_witness && is_witness(z, ones(), 1, sched.time(t))) first_witness = t;
      const bool survivor = stage_sets[t].contains(prefix(z, sched.granularity(t)));
      // No witness at scheduled times up to t exactly when Z survives stage t.
      o.require(survivor == !first_witness.has_value(), "word " + std::to_string(x) + " stage " + std::to_string(t));
      survivors_checked += survivor ? 1 : 0;
    }
    auto cap = kurtz_capture(z, ones(), 1, t_max);
    o.require(cap.escape_stage == first_witness, "scheduled witness did not force escape for word " + std::to_string(x));
    o.require(cap.captured == !first_witness.has_value(), "capture flag wrong for word " + std::to_string(x));
  }
  if (o.pass) o.detail = "4096 words, stages 0..4, " + std::to_string(survivors_checked) + " survivor memberships confirmed";
  return o;
}

// Measure of {Y : some Y_{i n} starts with a late word}, by enumeration.
Dyadic schnorr_oracle(const std::vector<std::pair<std::size_t, Word>>& all, std::size_t n, std::size_t k) {
  std::vector<std::string> late;
  std::size_t longest = 0;
  for (const auto& [stage, w] : all) {
    if (stage > n) {
      late.push_back(w.to_string());
      longest = std::max(longest, w.size());
    }
  }
  if (late.empty()) return Dyadic(0);
  const std::size_t len = k * n + longest;
  std::uint64_t hits = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << len); ++x) {
    const std::string y = Word::from_bits(x, len).to_string();
    bool hit = false;
    for (std::size_t i = 1; i <= k && !hit; ++i) {
      for (const auto& w : late) hit = hit || y.compare(i * n, w.size(), w) == 0;
    }
    hits += hit ? 1 : 0;
  }
  return Dyadic(BigInt(hits), len);
}

Outcome schnorr_budget() {
  Outcome o;
  using Staged = std::vector<std::pair<std::size_t, Word>>;
  const std::vector<Staged> classes{
      {},
      {{2, Word("11")}, {4, Word("0000")}},
      {{3, Word("111")}, {6, Word("000000")}, {9, Word("010101010")}},
  };
  std::size_t oracle_checks = 0;
  for (const auto& staged : classes) {
    std::map<std::size_t, std::vector<Word>> stages;
    for (const auto& [t, w] : staged) stages[t].push_back(w);
    const StagedCoEnumeration b(stages);
    for (std::size_t k = 1; k <= 2; ++k) {
      for (std::size_t v = 0; v <= 4; ++v) {
        const std::string tag = "k=" + std::to_string(k) + " v=" + std::to_string(v) + " |B|=" + std::to_string(staged.size());
        auto sched = schnorr_schedule(b, k, v, 3);
        std::vector<TestCertificate> certs;
        for (std::size_t t = 1; t < sched.stages(); ++t) {
          o.require(sched.time(t) >= (k + 1) * sched.time(t - 1), tag + " growth constraint");
          o.require(b.tail_modulus(sched.time(t)) <= sched.tail_bound(t), tag + " tail constraint");
          certs.push_back(schnorr_error_set(b, sched, t));
          const auto& c = certs.back();
          o.require(c.required_bound == Dyadic(static_cast<long long>(k)) * Dyadic::half_pow(t + v + k), tag + " required bound");
          o.require(c.exact_measure <= c.required_bound, tag + " stage bound at t=" + std::to_string(t));
          o.require(verify(c).ok(), tag + " certificate does not verify");
          const std::size_t longest = staged.empty() ? 0 : staged.back().second.size();
          if (k * sched.time(t) + longest <= 20) {
            o.require(c.exact_measure == schnorr_oracle(staged, sched.time(t), k), tag + " oracle measure at t=" + std::to_string(t));
            ++oracle_checks;
          }
        }
        auto u = schnorr_union_bound(certs);
        o.require(u.union_measure <= Dyadic::half_pow(v), tag + " union exceeds 2^-v");
        o.require(u.holds(), tag + " union accounting");
      }
    }
  }
  if (o.pass) o.detail = "3 classes, k=1..2, v=0..4; " + std::to_string(oracle_checks) + " stage measures matched by enumeration";
  return o;
}

std::string summarize(const std::vector<TestCertificate>& certs) {
  std::string s;
  for (const auto& c : certs) s += (s.empty() ? "" : ", ") + c.exact_measure.to_string();
  return s;
}

Outcome ml_certificates() {
  Outcome o;
  // Direct path.
  auto direct = ml_test(StagedCoEnumeration({{2, {Word("11")}}}), 2, 3, 12, 3);
  o.require(!direct.split, "direct instance took the split path");
  o.require(direct.q == Dyadic::half_pow(1), "q should be 1/2");
  for (std::size_t r = 0; r <= 3; ++r) {
    const auto& c = direct.c_sets[r];
    o.require(check_prefix_free(c), "C^" + std::to_string(r) + " not prefix-free");
    o.require(c.exact_measure <= Dyadic::half_pow(r), "C^" + std::to_string(r) + " above 2^-r");
    o.require(verify(c).ok(), "C^" + std::to_string(r) + " certificate does not verify");
  }
  for (const auto& lv : direct.test) o.require(lv.passes(), "test level " + std::to_string(lv.j) + " above 2^-j");

  // Split path: λ⟦B⟧ = 5/8 >= 1/2.
  const StagedCoEnumeration big({{1, {Word("0")}}, {3, {Word("100")}}});
  const std::size_t k = 2;
  auto split = ml_test(big, k, 3, 20, 3);
  o.require(split.split, "large instance did not split");
  const Dyadic residual = measure_open(std::span<const Word>(split.residual));
  o.require(Dyadic(static_cast<long long>(k)) * residual < Dyadic(1), "residual measure not below 1/k");
  for (const auto& w : split.d) o.require(w.size() <= split.n_bound, "D word longer than N");
  for (std::size_t m = 1; m < split.g_sets.size(); ++m) {
    const auto& g = split.g_sets[m];
    const Dyadic v = Dyadic(1) - measure_open(std::span<const Word>(split.d));
    const Dyadic decay = (Dyadic(1) - v.pow(k)) * split.g_sets[m - 1].exact_measure;
    o.require(g.required_bound == decay, "G_" + std::to_string(m) + " bound is not the decay estimate");
    o.require(g.exact_measure <= decay, "G_" + std::to_string(m) + " violates the decay estimate");
    o.require(check_prefix_free(g), "G_" + std::to_string(m) + " not prefix-free");
  }
  for (std::size_t u = 0; u < split.refined.size(); ++u) {
    const auto& c = split.refined[u];
    o.require(c.exact_measure <= split.q.pow(u), "refined level " + std::to_string(u) + " above q^u");
    o.require(verify(c).ok(), "refined level " + std::to_string(u) + " certificate does not verify");
  }
  for (const auto& lv : split.test) o.require(lv.passes(), "split test level " + std::to_string(lv.j));
  if (o.pass) {
    o.detail = "C^r: " + summarize(direct.c_sets) + "; split q=" + split.q.to_string() + ", G_m: " + summarize(split.g_sets) +
               ", refined: " + summarize(split.refined);
  }

  // The decay estimate is not automatic: with k = 1 and ⟦B⟧ everything, the
  // hits at successive levels accumulate.
  auto k1 = ml_test(StagedCoEnumeration({{1, {Word("0")}}, {2, {Word("10"), Word("11")}}}), 1, 4, 16, 4);
  for (std::size_t m = 1; m < k1.g_sets.size(); ++m) {
    if (!k1.g_sets[m].passes()) {
      o.notes.push_back("note: k=1, B={0,10,11}: lambda[G_" + std::to_string(m) + "] = " + k1.g_sets[m].exact_measure.to_string() +
                        " exceeds the decay estimate " + k1.g_sets[m].required_bound.to_string() + " (reported as failing)");
    }
  }
  return o;
}

Outcome zero_sequence() {
  Outcome o;
  const auto z = SequenceSource::constant(false);
  for (std::size_t k = 1; k <= 6; ++k) {
    auto r = find_witness(RecurrenceQuery<ClopenSet>{z, ones(), k, 2000});
    o.require(!r.witness.has_value(), "0^w has a witness at k=" + std::to_string(k));
  }
  // ⟦B⟧ is the complement of the target: B = {0}.
  const std::vector<Word> b{Word("0")};
  std::size_t levels_checked = 0;
  for (std::size_t k = 1; k <= 3; ++k) {
    const std::size_t stage_max = k == 1 ? 20 : 14;
    auto lv = ml_enumerate_levels(LineGeometry{k}, std::span<const Word>(b), 6, stage_max);
    const Word zp = prefix(z, stage_max);
    for (std::size_t r = 0; r < lv.levels.size(); ++r) {
      auto pats = lv.patterns(r);
      if (pats.empty()) break;
      ++levels_checked;
      o.require(has_prefix_in(LineGeometry{k}, zp, std::span<const Word>(pats)),
                "0^w escapes C^" + std::to_string(r) + " at k=" + std::to_string(k));
    }
  }
  if (o.pass) o.detail = "no witness for k<=6, n<=2000; captured by all " + std::to_string(levels_checked) + " nonempty levels";
  return o;
}

// Monte Carlo estimate of the mean least witness with independent fair bits.
std::pair<double, double> least_witness_moments(std::size_t k, std::size_t samples) {
  std::mt19937_64 rng(0xC0FFEEULL);
  double sum = 0;
  double sq = 0;
  std::vector<char> bits;
  for (std::size_t s = 0; s < samples; ++s) {
    bits.clear();
    std::size_t n = 1;
    for (;; ++n) {
      while (bits.size() <= k * n) bits.push_back(static_cast<char>(rng() & 1U));
      bool all = true;
      for (std::size_t i = 1; i <= k && all; ++i) all = bits[i * n] != 0;
      if (all) break;
    }
    sum += static_cast<double>(n);
    sq += static_cast<double>(n) * static_cast<double>(n);
  }
  const double mean = sum / static_cast<double>(samples);
  return {mean, std::sqrt(sq / static_cast<double>(samples) - mean * mean)};
}

Outcome random_recur() {
  Outcome o;
  std::vector<std::uint64_t> seeds(1000);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i;
  auto summary = batch_statistics(std::span<const std::uint64_t>(seeds), ones(), 3, 200);
  o.require(summary.with_witness == seeds.size(), "only " + std::to_string(summary.with_witness) + " of 1000 found witnesses");

  const auto [oracle_mean, oracle_sd] = least_witness_moments(3, 200000);
  const double se = oracle_sd / std::sqrt(static_cast<double>(seeds.size()));
  const double mean = summary.mean_witness();
  o.require(std::fabs(mean - oracle_mean) <= kStandardErrors * se, "mean least witness off the oracle prediction");

  // Per-n success frequency is p^k = 1/8 at every fixed n.
  for (std::size_t n : {1u, 5u, 17u}) {
    std::size_t hits = 0;
    for (auto s : seeds) hits += is_witness(SequenceSource::seeded(s), ones(), 3, n) ? 1 : 0;
    const double freq = static_cast<double>(hits) / static_cast<double>(seeds.size());
    const double se_n = std::sqrt(0.125 * 0.875 / static_cast<double>(seeds.size()));
    o.require(std::fabs(freq - 0.125) <= kStandardErrors * se_n, "per-n frequency at n=" + std::to_string(n));
  }
  std::ostringstream d;
  d.precision(4);
  d << "1000/1000 witnesses, mean " << mean << " vs oracle " << oracle_mean << " (SE " << se << ")";
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome multidim() {
  Outcome o;
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t dim = 2 + rng() % 2;
    const std::size_t n = 1 + rng() % 8;
    Word bits;
    for (std::size_t c = 0, total = cube_cells(dim, n); c < total; ++c) bits.push_back((rng() & 1U) != 0);
    const ArraySample a(dim, n, bits);
    const std::size_t i = 1 + rng() % dim;
    const std::size_t j = 1 + rng() % dim;
    const std::size_t s1 = rng() % (n + 1);
    const std::size_t s2 = rng() % (n - s1 + 1);
    o.require(a.crop(i, s1).crop(i, s2) == a.crop(i, s1 + s2), "crop composition in one direction");
    o.require(a.crop(i, s1).crop(j, s2) == a.crop(j, s2).crop(i, s1), "crops in two directions commute");
    const auto g = GridSource::explicit_data(a, (rng() & 1U) != 0);
    const std::size_t m = n - s1;
    o.require(g.face_shift(i, s1).sample(m) == a.crop(i, s1), "face shift of the source matches the crop");
    o.require(g.face_shift(i, s1).face_shift(i, s2).sample(m) == g.face_shift(i, s1 + s2).sample(m), "face shifts compose");
  }
  for (std::size_t dim = 2; dim <= 3; ++dim) {
    for (std::size_t n = 0; n <= 4; ++n) {
      std::vector<ArraySample> one{ArraySample::filled(dim, n, true)};
      o.require(pattern_measure(CubeGeometry{dim}, std::span<const ArraySample>(one)) == Dyadic::half_pow(cube_cells(dim, n)),
                "cylinder measure");
    }
  }
  // Single grid Kurtz stage against a direct count over 2x2 cubes.
  for (const std::string& member : {std::string("1"), std::string("0")}) {
    const ClopenArraySet p(2, 1, {ArraySample(2, 1, Word(member))});
    const bool want = member == "1";
    std::uint64_t survivors = 0;
    for (std::uint64_t x = 0; x < 16; ++x) {
      // Row-major 2x2: cell (1,0) is index 2, cell (0,1) is index 1.
      const bool b10 = ((x >> 1) & 1U) != 0;
      const bool b01 = ((x >> 2) & 1U) != 0;
      survivors += (b10 == want && b01 == want) ? 0 : 1;
    }
    auto cert = grid_kurtz_stage_set(p, 1);
    o.require(cert.exact_measure == Dyadic(BigInt(survivors), 4), "grid Kurtz count");
    o.require(cert.exact_measure == Dyadic(1) - p.measure().pow(2), "grid Kurtz equals 1 - p^k");
  }
  const std::vector<ArraySample> b{ArraySample(2, 2, Word("1001"))};
  auto ml = grid_ml_enumerate_C(b, 2, 1, 5);
  o.require(!ml.words.empty(), "grid C^1 is empty");
  o.require(check_prefix_free(ml), "grid C^1 not prefix-free");
  o.require(verify(ml).ok(), "grid C^1 measure accounting");
  if (o.pass) {
    o.detail = "10^4 identity instances; grid C^1 has " + std::to_string(ml.words.size()) + " arrays, measure " +
               ml.exact_measure.to_string() + " <= " + ml.required_bound.to_string();
  }
  return o;
}

Outcome rotation() {
  Outcome o;
  const auto golden = Alpha::golden();
  const Rational eps(1, 20);
  auto least = find_multi_return_escalating(golden, 2, eps, dirichlet_ceiling(2, eps));
  o.require(least.has_value(), "no golden return below the ceiling");
  if (least) {
    o.require(verify_return(golden, *least, 2, 2 * least->precision), "least witness fails at doubled precision");
    // Independent double-precision scan for the least n.
    const double a = (std::sqrt(5.0) - 1.0) / 2.0;
    std::uint64_t scan = 0;
    for (std::uint64_t n = 1; n <= 400 && scan == 0; ++n) {
      if (circle_norm(a * static_cast<double>(n)) < 0.05 && circle_norm(a * static_cast<double>(2 * n)) < 0.05) scan = n;
    }
    o.require(scan == least->n, "least witness differs from the scan");
  }
  auto cf = cf_accelerated_return(golden, 2, eps);
  const double a = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i = 1; i <= 2; ++i) {
    o.require(circle_norm(a * static_cast<double>(cf.n * i)) < 0.05, "continued-fraction witness not admissible");
  }
  o.require(verify_return(golden, cf, 2, 2 * cf.precision), "continued-fraction witness fails verification");

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const unsigned bits = 1 + rng() % 24;
    const Alpha alpha = Alpha::rational(Rational(BigInt(rng() % (std::uint64_t{1} << bits)), BigInt(1) << bits));
    const std::size_t k = 1 + rng() % 3;
    const Rational e(1, 2 + rng() % 19);
    const auto ceiling = dirichlet_ceiling(k, e);
    auto r = find_multi_return(alpha, k, e, ceiling);
    o.require(r.has_value() && r->n <= ceiling, "no return below the ceiling for " + alpha.label());
  }
  if (o.pass) {
    o.detail = "golden k=2: least n=" + std::to_string(least->n) + ", cf n=" + std::to_string(cf.n) +
               "; 100 dyadic alphas below the ceiling";
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("recur-acceptance-" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return (dir / name).string();
  };
  const std::vector<std::pair<std::string, std::string>> configs{
      {"recur", R"({"k": 3, "target": "1:1", "seeds": [0, 1, 2, 3, 4, 5, 6, 7], "n_max": 200})"},
      {"kurtz", R"({"k": 2, "target": "1:1", "t_max": 2})"},
      {"schnorr", R"({"k": 1, "v": 2, "t_max": 3, "target": "2:11;4:0000"})"},
      {"mltest", R"({"k": 2, "r": 3, "stage_max": 12, "target": "1:0;3:100", "source": "seed:3"})"},
      {"grid", R"({"k": 2, "mode": "ml", "r": 1, "stage_max": 5, "target": "1001"})"},
      {"rotate", R"({"k": 2, "alpha": "golden", "epsilon": "0.05"})"},
  };
  std::ostringstream sink;
  for (const auto& [cmd, body] : configs) {
    const auto cfg = write(cmd + ".json", body);
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const auto out = (dir / (cmd + "-" + std::to_string(run) + ".json")).string();
      const int code = cli::run({cmd, "--config", cfg, "--out", out}, sink, sink);
      o.require(code == cli::kPass, cmd + " exited " + std::to_string(code));
      outputs[run] = slurp(out);
    }
    o.require(!outputs[0].empty() && outputs[0] == outputs[1], cmd + " output differs between runs");
  }
  // verify re-reads a certificate file produced above.
  std::string verified[2];
  for (int run = 0; run < 2; ++run) {
    const auto out = (dir / ("verify-" + std::to_string(run) + ".csv")).string();
    const int code = cli::run({"verify", (dir / "kurtz-0.json").string(), "--format", "csv", "--out", out}, sink, sink);
    o.require(code == cli::kPass, "verify exited " + std::to_string(code));
    verified[run] = slurp(out);
  }
  o.require(!verified[0].empty() && verified[0] == verified[1], "verify output differs between runs");
  fs::remove_all(dir);
  if (o.pass) o.detail = "7 subcommands byte-identical across two runs";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Kurtz measure identity", kBudgetKurtz, kurtz_identity},
      {2, "Kurtz capture at desk scale", kBudgetCapture, kurtz_capture_theorem},
      {3, "Schnorr budget", kBudgetSchnorr, schnorr_budget},
      {4, "Martin-Lof certificates", kBudgetMl, ml_certificates},
      {5, "Non-recurrence capture of 0^w", kBudgetZero, zero_sequence},
      {6, "Random sequences recur", kBudgetRandom, random_recur},
      {7, "Multidimensional shifts", kBudgetGrid, multidim},
      {8, "Rotation returns", kBudgetRotation, rotation},
      {9, "CLI determinism", kBudgetCli, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs > c.budget) {
      o.pass = false;
      o.detail = "over the " + std::to_string(c.budget) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %d %-32s %s  %7.3f s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    for (const auto& n : o.notes) std::printf("            %s\n", n.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
