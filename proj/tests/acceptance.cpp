// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "keycast/analysis.hpp"
#include "keycast/constructions.hpp"
#include "keycast/feasibility.hpp"
#include "keycast/search.hpp"
#include "keycast/transforms.hpp"

using namespace keycast;

namespace {

// Pinned limits.
constexpr double kCheckSeconds = 1.0;
constexpr double kSearchSeconds = 300.0;
constexpr double kEntropyTolerance = 1e-9;
constexpr int kBalancedMaps = 200;
constexpr int kMaxMapBits = 10;
constexpr int kPreencodedInstances = 50;
constexpr int kColumnMatrices = 500;
constexpr int kMaxRows = 12;
constexpr int kMaxCols = 20;
constexpr int kLinearKeyCodes = 50;
constexpr int kRoundTrips = 50;
constexpr int kCountTables = 1000;
constexpr int kAttemptFactor = 20;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// A code that passed some check, kept for the containment criterion.
struct Passing {
  NetworkInstance instance;
  NetworkCode code;
  Rational rate;
  FeasibilityMode mode;
  std::vector<Coord> coords;
};

std::vector<Passing> passing;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void record(const NetworkInstance& g, const NetworkCode& code, const Rational& rate, FeasibilityMode mode,
            std::vector<Coord> coords = {}) {
  passing.push_back({g, code, rate, mode, std::move(coords)});
}

Outcome gap_sum_check() {
  Outcome o;
  for (auto mode : {EavesdropMode::kEdgeSets, EavesdropMode::kNodeAll}) {
    const auto g = gap_instance(2, mode);
    const auto code = sum_code(g);
    const auto start = std::chrono::steady_clock::now();
    const auto r = check_key_feasibility(g, code, Rational(1));
    const double t = seconds_since(start);
    o.ok = o.ok && r.overall() && t < kCheckSeconds;
    o.detail += (mode == EavesdropMode::kEdgeSets ? "edge sets " : " node-all ") + std::to_string(t) + "s";
    if (r.overall()) record(g, code, Rational(1), FeasibilityMode::kKey);
  }
  return o;
}

Outcome two_stage_check() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  for (int alpha = 1; alpha <= 2; ++alpha) {
    for (auto mode : {EavesdropMode::kEdgeSets, EavesdropMode::kNodeAll}) {
      const auto g = gap_instance(alpha, mode);
      const auto code = two_stage_gap_code(g);
      std::vector<Coord> all;
      for (const auto& s : g.sources) all.push_back({s.node, 0});
      const auto r = check_two_stage_feasibility(g, code, Rational(1, 2), all);
      ok = ok && r.overall();
      if (r.overall()) record(g, code, Rational(1, 2), FeasibilityMode::kKey2, all);
    }
  }
  const double t = seconds_since(start);
  return {ok && t < kCheckSeconds, "n=2, M = every source bit, alpha 1 and 2, " + std::to_string(t) + "s"};
}

Outcome gap_search() {
  const auto g = gap_instance(2);
  const CodeShape shape;  // n=1, one bit per source, all tables, forwarding sources
  const auto start = std::chrono::steady_clock::now();
  const auto key2 = max_feasible_rate(g, FeasibilityMode::kKey2, shape);
  const auto key = max_feasible_rate(g, FeasibilityMode::kKey, shape);
  const double t = seconds_since(start);
  bool ok = key2.exhaustive && key.exhaustive && key2.best_rate == Rational(0) && key.best_rate == Rational(1) &&
            key.witness.has_value() && t < kSearchSeconds;
  if (key.witness) {
    const auto r = check_key_feasibility(g, *key.witness, Rational(1));
    ok = ok && r.overall();
    if (r.overall()) record(g, *key.witness, Rational(1), FeasibilityMode::kKey);
  }
  return {ok, "key2 " + format_rational(key2.best_rate) + ", key " + format_rational(key.best_rate) + ", " +
                  std::to_string(key.candidates_examined) + " candidates each, " + std::to_string(t) + "s"};
}

Outcome secure_search() {
  CodeShape free_shape;
  free_shape.sources = SourceBehavior::kFree;
  const auto start = std::chrono::steady_clock::now();
  const auto fig1b = max_feasible_rate(fig1b_instance_and_code().first, FeasibilityMode::kSec, free_shape);
  const auto gap = max_feasible_rate(gap_instance(2, EavesdropMode::kNodeAll), FeasibilityMode::kSec, CodeShape{});
  const double t = seconds_since(start);
  const bool ok = fig1b.exhaustive && gap.exhaustive && fig1b.best_rate == Rational(0) &&
                  gap.best_rate == Rational(0) && t < kSearchSeconds;
  return {ok, "fig1b " + format_rational(fig1b.best_rate) + ", gap node-all " + format_rational(gap.best_rate) + ", " +
                  std::to_string(t) + "s"};
}

Outcome preencoding(testing::Rng& rng) {
  int maps_ok = 0;
  for (int i = 0; i < kBalancedMaps; ++i) {
    const int l = 1 + static_cast<int>(rng() % kMaxMapBits);
    const int k = 1 + static_cast<int>(rng() % l);
    const auto f = testing::random_balanced_map(rng, l, k);
    const auto pi = preencoding_permutation(f, k);
    bool ok = pi.is_bijection();
    for (std::uint64_t m = 0; ok && m < (std::uint64_t{1} << l); ++m) ok = f(pi(m)) == m >> (l - k);
    maps_ok += ok;
  }
  int instances = 0;
  int kept = 0;
  int feasible = 0;
  for (int attempt = 0; instances < kPreencodedInstances && attempt < kPreencodedInstances * kAttemptFactor;
       ++attempt) {
    auto g = testing::random_desk_instance(rng, {1, SourceRole::kBoth, 0, 2, 2, 2, 0.6});
    if (rng() % 2) g.eavesdrop_sets.push_back({{g.edges[rng() % g.edges.size()].id}, {}});
    const auto base = testing::random_table_encoders(rng, g, 1, {3});
    // Alternate decodable keys with arbitrary balanced keys so both verdicts occur.
    std::optional<TruthTable> key = attempt % 2 == 0 ? testing::random_decodable_key(rng, g, base, 1)
                                                     : std::optional(testing::random_balanced_map(rng, 3, 1));
    if (!key) continue;
    const auto code = testing::with_key_and_derived_decoders(g, base, *key);
    const auto before = check_key_feasibility(g, code, Rational(1));
    const auto pre = apply_preencoding(g, code, preencoding_permutation(code.key, 1));
    const auto after = check_key_feasibility(g, pre, Rational(1));
    kept += before.overall() == after.overall() && before.decoding_ok.ok == after.decoding_ok.ok &&
            before.secrecy_ok.ok == after.secrecy_ok.ok;
    feasible += before.overall();
    if (after.overall()) record(g, pre, Rational(1), FeasibilityMode::kKey);
    ++instances;
  }
  return {maps_ok == kBalancedMaps && instances == kPreencodedInstances && kept == instances,
          std::to_string(maps_ok) + "/" + std::to_string(kBalancedMaps) + " maps, " + std::to_string(kept) + "/" +
              std::to_string(instances) + " verdicts kept (" + std::to_string(feasible) + " feasible)"};
}

Outcome column_zeroing(testing::Rng& rng) {
  int matrices_ok = 0;
  for (int i = 0; i < kColumnMatrices; ++i) {
    Gf2Matrix a(1 + static_cast<int>(rng() % kMaxRows), 1 + static_cast<int>(rng() % kMaxCols));
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c) a.set(r, c, rng() & 1u);
    const auto z = zero_redundant_columns(a);
    bool ok = z.matrix.rank() == a.rank() && static_cast<int>(z.kept.size()) == a.rank() &&
              z.matrix.nonzero_column_count() == a.rank();
    ok = ok && z.matrix.select_columns(z.kept) == a.select_columns(z.kept);
    matrices_ok += ok;
  }
  int codes = 0;
  int secure_ok = 0;
  for (int attempt = 0; codes < kLinearKeyCodes && attempt < kLinearKeyCodes * kAttemptFactor; ++attempt) {
    const auto g = testing::random_desk_instance(rng, {2, SourceRole::kBoth, 0, 2, 2, 2, 0.6});
    const int k = 1 + static_cast<int>(rng() % 2);
    const auto keyed = testing::with_linear_key(rng, g, testing::random_linear_encoders(rng, g, 1, {2}), k);
    if (!keyed || !check_key_feasibility(g, *keyed, Rational(k)).overall()) continue;
    ++codes;
    const auto secure = linear_key_to_secure(g, *keyed);
    const auto r = check_secure_feasibility(g, secure.code, Rational(k), secure.message_coords);
    secure_ok += r.overall();
    if (r.overall()) record(g, secure.code, Rational(k), FeasibilityMode::kSec, secure.message_coords);
  }
  return {matrices_ok == kColumnMatrices && codes == kLinearKeyCodes && secure_ok == codes,
          std::to_string(matrices_ok) + "/" + std::to_string(kColumnMatrices) + " matrices, " +
              std::to_string(secure_ok) + "/" + std::to_string(codes) + " secure codes"};
}

Outcome round_trips(testing::Rng& rng) {
  int codes = 0;
  int ok_count = 0;
  int with_views = 0;
  for (int attempt = 0; codes < kRoundTrips && attempt < kRoundTrips * kAttemptFactor; ++attempt) {
    auto g = testing::random_desk_instance(rng, {1, SourceRole::kMessage, 1, 2, 2, 2, 0.6});
    const auto secure = testing::with_linear_message(rng, g, testing::random_linear_encoders(rng, g, 1, {2, 1}), 1);
    if (!secure) continue;
    g = testing::with_secret_views(rng, g, secure->code, 4, true);
    if (!check_secure_feasibility(g, secure->code, Rational(1), secure->message_coords).overall()) continue;
    ++codes;
    with_views += !g.eavesdrop_sets.empty();
    record(g, secure->code, Rational(1), FeasibilityMode::kSec, secure->message_coords);

    const auto reduced = reduce_secure_to_key(g, Rational(1));
    const auto lifted = lift_secure_code(g, secure->code, secure->message_coords, Rational(1));
    const bool lifted_ok = check_key_feasibility(reduced, lifted, Rational(1)).overall();
    const auto back = restrict_key_code_to_secure(reduced, lifted);
    const auto original = strip_key_terminal(reduced);
    const bool back_ok =
        check_secure_feasibility(original, back.code, Rational(1), back.message_coords).overall();
    ok_count += lifted_ok && back_ok;
    if (lifted_ok) record(reduced, lifted, Rational(1), FeasibilityMode::kKey);
    if (back_ok) record(original, back.code, Rational(1), FeasibilityMode::kSec, back.message_coords);
  }
  return {codes == kRoundTrips && ok_count == codes && with_views > 0,
          std::to_string(ok_count) + "/" + std::to_string(codes) + " round trips, " + std::to_string(with_views) +
              " with eavesdroppers"};
}

Outcome gap_min_cuts() {
  std::string detail;
  bool ok = true;
  for (int alpha = 2; alpha <= 8; ++alpha) {
    const auto g = gap_instance(alpha);
    for (std::size_t i = 0; i < g.terminals.size(); ++i) {
      std::vector<std::string> others;
      for (std::size_t j = 0; j < g.sources.size(); ++j)
        if (j != i) others.push_back(g.sources[j].node);
      ok = ok && min_cut(g, others, g.terminals[i]) == Rational(1);
    }
  }
  return {ok, "alpha 2..8, every terminal"};
}

CountTable random_count_table(testing::Rng& rng) {
  const int a_bits = 1 + static_cast<int>(rng() % 3);
  const int b_bits = 1 + static_cast<int>(rng() % 3);
  const std::uint64_t a_size = std::uint64_t{1} << a_bits;
  const std::uint64_t b_size = std::uint64_t{1} << b_bits;
  std::map<CountTable::Tuple, std::uint64_t> counts;
  const int kind = static_cast<int>(rng() % 4);
  std::vector<std::uint64_t> pa(a_size), pb(b_size), fn(a_size);
  for (auto& x : pa) x = rng() % 4;
  for (auto& x : pb) x = rng() % 4;
  for (auto& x : fn) x = rng() % b_size;
  if (kind == 3) std::fill(pa.begin(), pa.end(), 1 + rng() % 3);  // uniform A, independent B
  for (std::uint64_t a = 0; a < a_size; ++a) {
    for (std::uint64_t b = 0; b < b_size; ++b) {
      std::uint64_t c = 0;
      if (kind == 0 || kind == 3) c = pa[a] * pb[b];  // independent
      else if (kind == 1) c = fn[a] == b ? pa[a] : 0;  // B determined by A
      else c = rng() % 4;
      if (c) counts[{a, b}] = c;
    }
  }
  if (counts.empty()) counts[{0, 0}] = 1;
  std::uint64_t total = 0;
  for (const auto& [t, c] : counts) total += c;
  return CountTable({Variable::source_bit("a", 0), Variable::source_bit("b", 0)}, {a_bits, b_bits}, total, counts);
}

Outcome entropy_consistency(testing::Rng& rng) {
  const std::array<int, 1> a{0};
  const std::array<int, 1> b{1};
  const std::array<int, 2> ab{0, 1};
  int ok_count = 0;
  int uniform = 0;
  double worst = 0;
  for (int i = 0; i < kCountTables; ++i) {
    const auto t = random_count_table(rng);
    const double chain = std::fabs(entropy_bits(t, ab) - entropy_bits(t, a) - conditional_entropy_bits(t, b, a));
    const double mi = mutual_information_bits(t, a, b);
    const double h_b_given_a = conditional_entropy_bits(t, b, a);
    const double uniform_gap = std::fabs(entropy_bits(t, a) - t.widths()[0]);
    worst = std::max(worst, chain);
    const bool ok = chain <= kEntropyTolerance && is_independent(t, a, b) == (std::fabs(mi) < kEntropyTolerance) &&
                    is_determined(t, a, b) == (h_b_given_a < kEntropyTolerance) &&
                    is_uniform(t, 0) == (uniform_gap < kEntropyTolerance);
    uniform += is_uniform(t, 0);
    ok_count += ok;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, ", worst chain-rule gap %.3g", worst);
  return {ok_count == kCountTables, std::to_string(ok_count) + "/" + std::to_string(kCountTables) + " tables, " +
                                        std::to_string(uniform) + " uniform" + buf};
}

Outcome containments() {
  int sec = 0;
  int key2 = 0;
  int held = 0;
  for (const auto& p : passing) {
    if (p.mode == FeasibilityMode::kKey) continue;
    (p.mode == FeasibilityMode::kSec ? sec : key2) += 1;
    held += check_key_feasibility(p.instance, p.code, p.rate).overall();
  }
  return {sec > 0 && key2 > 0 && held == sec + key2,
          std::to_string(held) + "/" + std::to_string(sec + key2) + " (" + std::to_string(sec) + " sec, " +
              std::to_string(key2) + " key2) also key-feasible"};
}

}  // namespace

int main() {
  testing::Rng rng(20261015);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 gap sum code key check", gap_sum_check},
      {"C2 two-stage code at rate 1/2", two_stage_check},
      {"C3 gap key2 = 0, key = 1 by search", gap_search},
      {"C4 secure search rate 0", secure_search},
      {"C5 pre-encoding", [&] { return preencoding(rng); }},
      {"C6 column zeroing", [&] { return column_zeroing(rng); }},
      {"C7 lift and restrict round trip", [&] { return round_trips(rng); }},
      {"C8 gap min cuts", gap_min_cuts},
      {"C9 entropy and predicate consistency", [&] { return entropy_consistency(rng); }},
      {"C10 sec and key2 imply key", containments},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    failures += !o.ok;
    std::printf("%s %s: %s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
