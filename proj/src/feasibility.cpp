#include "keycast/feasibility.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

#include "keycast/error.hpp"

namespace keycast {

std::string_view to_string(FeasibilityMode mode) {
  switch (mode) {
    case FeasibilityMode::kKey: return "key";
    case FeasibilityMode::kSec: return "sec";
    case FeasibilityMode::kKey2: return "key2";
  }
  return "key";
}

FeasibilityMode parse_mode(std::string_view text) {
  if (text == "key") return FeasibilityMode::kKey;
  if (text == "sec") return FeasibilityMode::kSec;
  if (text == "key2") return FeasibilityMode::kKey2;
  fail(ErrorCode::kParse, "mode must be key, sec, or key2, got '" + std::string(text) + "'");
}

bool FeasibilityReport::overall() const {
  for (const Verdict* v : {&rate_ok, &decoding_ok, &secrecy_ok, &witness_ok}) {
    if (v->applicable && !v->ok) return false;
  }
  return true;
}

std::vector<Variable> eavesdrop_view(const EavesdropSet& set) {
  std::vector<Variable> vars;
  for (const auto& e : set.edges) vars.push_back(Variable::edge(e));
  for (const auto& s : set.observed_sources) vars.push_back(Variable::source_bits(s));
  return vars;
}

namespace {

int key_bits_for(const Rational& rate, int blocklength) {
  if (rate < 0) fail(ErrorCode::kBadRate, "rate must be nonnegative");
  std::int64_t k = 0;
  if (!integral_product(rate, blocklength, k)) {
    fail(ErrorCode::kWidthMismatch, "R*n = " + format_rational(rate * Rational(blocklength)) +
                                        " is not an integer number of key bits");
  }
  return static_cast<int>(k);
}

void check_coords(const NetworkInstance& instance, const NetworkCode& code,
                  const std::vector<Coord>& coords, bool require_message_role) {
  const AssignmentLayout layout(instance, code);
  std::set<Coord> seen;
  for (const Coord& c : coords) {
    layout.shift_of(c);  // throws BAD_COORDS when out of range
    if (!seen.insert(c).second) fail(ErrorCode::kBadCoords, "duplicate coord " + c.source + ":" + std::to_string(c.bit));
    if (require_message_role) {
      const auto& decl = instance.sources[*instance.find_source(c.source)];
      if (!holds_messages(decl.role)) {
        fail(ErrorCode::kBadCoords, "'" + c.source + "' does not hold message bits");
      }
    }
  }
}

std::vector<Variable> coord_vars(const std::vector<Coord>& coords) {
  std::vector<Variable> vars;
  for (const Coord& c : coords) vars.push_back(Variable::source_bit(c.source, c.bit));
  return vars;
}

std::vector<int> iota_positions(int from, int count) {
  std::vector<int> v(count);
  std::iota(v.begin(), v.end(), from);
  return v;
}

// Table layouts built once per check, read by the verdict helpers below.
struct CheckTables {
  std::vector<std::vector<Variable>> groups;
  int key_group = -1;
  int decoding_first = -1;  // one [decoder, key] group per terminal
  int equivocation_first = -1;  // one [view, key] group per terminal
  int secrecy_first = -1;       // one [view..., key] group per eavesdrop set
  int projection_group = -1;    // [key, coords...]
  int stage_one_first = -1;     // one [view, M...] group per terminal
  int stage_two_group = -1;     // [M..., key]
};

FeasibilityReport run_checks(const NetworkInstance& instance, const NetworkCode& code,
                             const Rational& rate, FeasibilityMode mode,
                             const std::vector<Coord>& coords, int enumeration_cap) {
  require_valid(instance);
  validate_code(instance, code);

  FeasibilityReport report;
  report.mode = mode;
  report.rate = rate;
  report.blocklength = code.blocklength;
  report.key_bits = key_bits_for(rate, code.blocklength);
  report.total_bits = AssignmentLayout(instance, code).total_bits();
  report.coords = coords;
  if (mode == FeasibilityMode::kSec) check_coords(instance, code, coords, true);
  if (mode == FeasibilityMode::kKey2) check_coords(instance, code, coords, false);

  CheckTables t;
  auto add = [&](std::vector<Variable> vars) {
    t.groups.push_back(std::move(vars));
    return static_cast<int>(t.groups.size()) - 1;
  };
  t.key_group = add({Variable::key()});
  t.decoding_first = static_cast<int>(t.groups.size());
  for (const auto& d : instance.terminals) add({Variable::decoder_output(d), Variable::key()});
  t.equivocation_first = static_cast<int>(t.groups.size());
  for (const auto& d : instance.terminals) add({Variable::terminal_view(d), Variable::key()});
  t.secrecy_first = static_cast<int>(t.groups.size());
  for (const auto& set : instance.eavesdrop_sets) {
    auto vars = eavesdrop_view(set);
    vars.push_back(Variable::key());
    add(std::move(vars));
  }
  const auto m_vars = coord_vars(coords);
  if (mode == FeasibilityMode::kSec) {
    std::vector<Variable> vars{Variable::key()};
    vars.insert(vars.end(), m_vars.begin(), m_vars.end());
    t.projection_group = add(std::move(vars));
  }
  if (mode == FeasibilityMode::kKey2) {
    t.stage_one_first = static_cast<int>(t.groups.size());
    for (const auto& d : instance.terminals) {
      std::vector<Variable> vars{Variable::terminal_view(d)};
      vars.insert(vars.end(), m_vars.begin(), m_vars.end());
      add(std::move(vars));
    }
    std::vector<Variable> vars = m_vars;
    vars.push_back(Variable::key());
    t.stage_two_group = add(std::move(vars));
  }

  const std::vector<CountTable> tables =
      joint_counts_many(instance, code, t.groups, enumeration_cap);
  const std::array<int, 1> first{0};
  const std::array<int, 1> second{1};

  auto first_with = [&](int group, const CountTable::Tuple& tuple) {
    return first_assignment_with(instance, code, t.groups[group], tuple, enumeration_cap);
  };

  // Key rate (and, for sec, the projection requirement).
  report.rate_ok.applicable = true;
  const CountTable& key_table = tables[t.key_group];
  if (code.key.out_bits() != report.key_bits) {
    report.rate_ok.ok = false;
    report.rate_ok.counterexample = Counterexample{
        std::nullopt, std::nullopt, std::nullopt,
        "key map has " + std::to_string(code.key.out_bits()) + " bits, R*n = " +
            std::to_string(report.key_bits)};
  } else if (!is_uniform(key_table, 0)) {
    report.rate_ok.ok = false;
    // Report an assignment producing the most frequent key value.
    auto it = std::max_element(key_table.counts().begin(), key_table.counts().end(),
                               [](const auto& a, const auto& b) { return a.second < b.second; });
    report.rate_ok.counterexample = Counterexample{first_with(t.key_group, it->first), std::nullopt,
                                                   std::nullopt, "key is not uniform"};
  }
  if (mode == FeasibilityMode::kSec && report.rate_ok.ok) {
    if (static_cast<int>(coords.size()) != report.key_bits) {
      report.rate_ok.ok = false;
      report.rate_ok.counterexample =
          Counterexample{std::nullopt, std::nullopt, std::nullopt,
                         std::to_string(coords.size()) + " message coords for a " +
                             std::to_string(report.key_bits) + "-bit key"};
    } else {
      for (const auto& [tuple, count] : tables[t.projection_group].counts()) {
        std::uint64_t projected = 0;
        for (std::size_t i = 1; i < tuple.size(); ++i) projected = (projected << 1) | tuple[i];
        if (projected != tuple[0]) {
          report.rate_ok.ok = false;
          report.rate_ok.counterexample =
              Counterexample{first_with(t.projection_group, tuple), std::nullopt, std::nullopt,
                             "key is not the projection onto the message coords"};
          break;
        }
      }
    }
  }

  // Decoding: every decoder output equals the key pointwise.
  report.decoding_ok.applicable = true;
  for (std::size_t j = 0; j < instance.terminals.size() && report.decoding_ok.ok; ++j) {
    const int g = t.decoding_first + static_cast<int>(j);
    for (const auto& [tuple, count] : tables[g].counts()) {
      if (tuple[0] != tuple[1]) {
        report.decoding_ok.ok = false;
        report.decoding_ok.counterexample =
            Counterexample{first_with(g, tuple), std::nullopt, instance.terminals[j],
                           "decoder output differs from the key"};
        break;
      }
    }
  }

  // Secrecy: the key is independent of each eavesdrop view separately.
  report.secrecy_ok.applicable = true;
  for (std::size_t b = 0; b < instance.eavesdrop_sets.size(); ++b) {
    const int g = t.secrecy_first + static_cast<int>(b);
    const CountTable& table = tables[g];
    const int view_width = static_cast<int>(table.variables().size()) - 1;
    const auto view = iota_positions(0, view_width);
    const std::array<int, 1> key_pos{view_width};
    report.entropies.leakage.push_back(mutual_information_bits(table, view, key_pos));
    if (report.secrecy_ok.ok && !is_independent(table, view, key_pos)) {
      report.secrecy_ok.ok = false;
      // A view value whose conditional key law differs from the marginal.
      const CountTable views = table.marginal(view);
      const CountTable keys = table.marginal(key_pos);
      std::optional<std::uint64_t> witness;
      for (const auto& [tuple, count] : table.counts()) {
        CountTable::Tuple v(tuple.begin(), tuple.end() - 1);
        const CountTable::Tuple k{tuple.back()};
        const unsigned __int128 lhs = static_cast<unsigned __int128>(count) * table.total();
        const unsigned __int128 rhs =
            static_cast<unsigned __int128>(views.counts().at(v)) * keys.counts().at(k);
        if (lhs != rhs) {
          witness = first_with(g, tuple);
          break;
        }
      }
      report.secrecy_ok.counterexample = Counterexample{witness, static_cast<int>(b), std::nullopt,
                                                        "key is correlated with this view"};
    }
  }

  // Two-stage: each terminal recovers M, and M determines K.
  if (mode == FeasibilityMode::kKey2) {
    report.witness_ok.applicable = true;
    const auto m_positions = iota_positions(1, static_cast<int>(coords.size()));
    for (std::size_t j = 0; j < instance.terminals.size(); ++j) {
      const CountTable& table = tables[t.stage_one_first + static_cast<int>(j)];
      if (!is_determined(table, first, m_positions)) {
        report.witness_ok.ok = false;
        report.witness_ok.counterexample =
            Counterexample{std::nullopt, std::nullopt, instance.terminals[j],
                           "terminal cannot determine M from its inputs"};
        break;
      }
    }
    if (report.witness_ok.ok) {
      const CountTable& table = tables[t.stage_two_group];
      const auto m_pos = iota_positions(0, static_cast<int>(coords.size()));
      const std::array<int, 1> key_pos{static_cast<int>(coords.size())};
      if (!is_determined(table, m_pos, key_pos)) {
        report.witness_ok.ok = false;
        report.witness_ok.counterexample = Counterexample{std::nullopt, std::nullopt, std::nullopt,
                                                          "the key is not a function of M"};
      }
    }
  }

  report.entropies.key = entropy_bits(key_table, first);
  for (std::size_t j = 0; j < instance.terminals.size(); ++j) {
    const CountTable& table = tables[t.equivocation_first + static_cast<int>(j)];
    report.entropies.equivocation.push_back(conditional_entropy_bits(table, second, first));
  }
  return report;
}

}  // namespace

FeasibilityReport check_key_feasibility(const NetworkInstance& instance, const NetworkCode& code,
                                        const Rational& rate, int enumeration_cap) {
  return run_checks(instance, code, rate, FeasibilityMode::kKey, {}, enumeration_cap);
}

FeasibilityReport check_secure_feasibility(const NetworkInstance& instance, const NetworkCode& code,
                                           const Rational& rate,
                                           const std::vector<Coord>& message_coords,
                                           int enumeration_cap) {
  return run_checks(instance, code, rate, FeasibilityMode::kSec, message_coords, enumeration_cap);
}

FeasibilityReport check_two_stage_feasibility(const NetworkInstance& instance,
                                              const NetworkCode& code, const Rational& rate,
                                              const std::vector<Coord>& witness,
                                              int enumeration_cap) {
  return run_checks(instance, code, rate, FeasibilityMode::kKey2, witness, enumeration_cap);
}

std::optional<std::vector<Coord>> find_two_stage_witness(const NetworkInstance& instance,
                                                         const NetworkCode& code,
                                                         const Rational& rate, int witness_cap) {
  const AssignmentLayout layout(instance, code);
  const int l = layout.total_bits();
  if (l > witness_cap) {
    fail(ErrorCode::kSpaceLimit, "l = " + std::to_string(l) + " exceeds the witness-search cap " +
                                     std::to_string(witness_cap));
  }
  // Rate, decoding, and secrecy do not depend on M.
  const FeasibilityReport base = check_two_stage_feasibility(instance, code, rate, {}, witness_cap);
  if (!base.rate_ok.ok || !base.decoding_ok.ok || !base.secrecy_ok.ok) return std::nullopt;

  // M must consist of bits every terminal can recover individually.
  const std::vector<Coord> all = layout.all_coords();
  std::vector<std::vector<Variable>> groups;
  for (const auto& d : instance.terminals) {
    std::vector<Variable> vars{Variable::terminal_view(d)};
    for (const Coord& c : all) vars.push_back(Variable::source_bit(c.source, c.bit));
    groups.push_back(std::move(vars));
  }
  std::vector<Coord> decodable;
  if (!all.empty()) {
    const auto tables = joint_counts_many(instance, code, groups, witness_cap);
    const std::array<int, 1> view{0};
    for (std::size_t i = 0; i < all.size(); ++i) {
      const std::array<int, 1> bit{static_cast<int>(i) + 1};
      bool everyone = true;
      for (const auto& table : tables) everyone = everyone && is_determined(table, view, bit);
      if (everyone) decodable.push_back(all[i]);
    }
  }

  // Smallest subset first, lexicographic in assignment order within a size.
  const CompiledCode compiled(instance, code);
  const std::uint64_t count = std::uint64_t{1} << l;
  std::vector<std::uint64_t> keys(count);
  for (std::uint64_t m = 0; m < count; ++m) keys[m] = compiled.key(m);
  std::vector<std::uint64_t> shifts;
  for (const Coord& c : decodable) shifts.push_back(std::uint64_t{1} << layout.shift_of(c));

  const int d = static_cast<int>(decodable.size());
  std::vector<std::int64_t> seen(count);
  for (int size = 0; size <= d; ++size) {
    std::vector<int> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      std::uint64_t mask = 0;
      for (int i : pick) mask |= shifts[i];
      std::fill(seen.begin(), seen.end(), -1);
      bool function_of_m = true;
      for (std::uint64_t m = 0; m < count && function_of_m; ++m) {
        auto& slot = seen[m & mask];
        if (slot < 0) {
          slot = static_cast<std::int64_t>(keys[m]);
        } else if (static_cast<std::uint64_t>(slot) != keys[m]) {
          function_of_m = false;
        }
      }
      if (function_of_m) {
        std::vector<Coord> witness;
        for (int i : pick) witness.push_back(decodable[i]);
        if (check_two_stage_feasibility(instance, code, rate, witness, witness_cap).overall()) {
          return witness;
        }
      }
      // Next combination in lexicographic order.
      int i = size - 1;
      while (i >= 0 && pick[i] == d - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace keycast
