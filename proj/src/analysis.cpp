#include "keycast/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include <omp.h>

#include "keycast/error.hpp"

namespace keycast {

std::string Variable::label() const {
  switch (kind) {
    case Kind::kEdge: return "edge:" + name;
    case Kind::kTerminalView: return "view:" + name;
    case Kind::kDecoderOutput: return "decoder:" + name;
    case Kind::kKey: return "key";
    case Kind::kSourceBit: return "bit:" + name + ":" + std::to_string(bit);
    case Kind::kSourceBits: return "source:" + name;
  }
  return "?";
}

CountTable::CountTable(std::vector<Variable> variables, std::vector<int> widths, std::uint64_t total,
                       std::map<Tuple, std::uint64_t> counts)
    : variables_(std::move(variables)),
      widths_(std::move(widths)),
      total_(total),
      counts_(std::move(counts)) {
  if (variables_.size() != widths_.size()) {
    fail(ErrorCode::kInvalidArgument, "count table needs one width per variable");
  }
  std::uint64_t sum = 0;
  for (const auto& [tuple, count] : counts_) {
    if (tuple.size() != widths_.size()) fail(ErrorCode::kInvalidArgument, "tuple arity mismatch");
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (tuple[i] > low_mask(widths_[i])) {
        fail(ErrorCode::kWidthMismatch, "tuple component exceeds its variable width");
      }
    }
    sum += count;
  }
  if (sum != total_) {
    fail(ErrorCode::kInvalidArgument,
         "counts sum to " + std::to_string(sum) + ", expected " + std::to_string(total_));
  }
}

CountTable CountTable::marginal(std::span<const int> positions) const {
  std::vector<Variable> vars;
  std::vector<int> widths;
  for (int p : positions) {
    vars.push_back(variables_.at(p));
    widths.push_back(widths_.at(p));
  }
  std::map<Tuple, std::uint64_t> counts;
  Tuple key(positions.size());
  for (const auto& [tuple, count] : counts_) {
    for (std::size_t i = 0; i < positions.size(); ++i) key[i] = tuple[positions[i]];
    counts[key] += count;
  }
  return CountTable(std::move(vars), std::move(widths), total_, std::move(counts));
}

namespace {

struct Extractor {
  Variable::Kind kind;
  int index = 0;  // edge, terminal position, node, or layout slot
  int shift = 0;  // kSourceBit
  int width = 0;
};

struct Group {
  std::vector<Extractor> extractors;
  std::vector<int> widths;
};

class Enumerator {
 public:
  Enumerator(const NetworkInstance& instance, const NetworkCode& code,
             const std::vector<std::vector<Variable>>& groups, int enumeration_cap)
      : instance_(instance), compiled_(instance, code), groups_in_(groups) {
    if (compiled_.total_bits() > enumeration_cap) {
      fail(ErrorCode::kSpaceLimit, "l = " + std::to_string(compiled_.total_bits()) +
                                       " exceeds the enumeration cap " +
                                       std::to_string(enumeration_cap));
    }
    for (const auto& vars : groups) {
      Group g;
      int total_width = 0;
      for (const Variable& v : vars) {
        g.extractors.push_back(resolve(v));
        g.widths.push_back(g.extractors.back().width);
        total_width += g.extractors.back().width;
      }
      if (total_width > 64) {
        fail(ErrorCode::kSpaceLimit, "joint variable width " + std::to_string(total_width) +
                                         " exceeds 64 bits");
      }
      groups_.push_back(std::move(g));
    }
  }

  std::uint64_t assignment_count() const { return std::uint64_t{1} << compiled_.total_bits(); }

  // Adds the packed tuple of every group for assignment m to tallies.
  void visit(std::uint64_t m, std::vector<std::uint64_t>& messages,
             std::vector<std::unordered_map<std::uint64_t, std::uint64_t>>& tallies) const {
    compiled_.run(m, messages);
    for (std::size_t g = 0; g < groups_.size(); ++g) ++tallies[g][pack(g, m, messages)];
  }

  // Tuple of group g for m; messages must already hold run(m).
  std::uint64_t pack(std::size_t g, std::uint64_t m, const std::vector<std::uint64_t>& messages) const {
    std::uint64_t packed = 0;
    for (const Extractor& x : groups_[g].extractors) {
      packed = x.width == 64 ? value(x, m, messages) : (packed << x.width) | value(x, m, messages);
    }
    return packed;
  }

  std::uint64_t pack_tuple(std::size_t g, const CountTable::Tuple& tuple) const {
    const auto& widths = groups_[g].widths;
    if (tuple.size() != widths.size()) fail(ErrorCode::kInvalidArgument, "tuple arity mismatch");
    std::uint64_t packed = 0;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      packed = widths[i] == 64 ? tuple[i] : (packed << widths[i]) | tuple[i];
    }
    return packed;
  }

  void run(std::uint64_t m, std::vector<std::uint64_t>& messages) const { compiled_.run(m, messages); }

  std::vector<CountTable> tables(
      const std::vector<std::unordered_map<std::uint64_t, std::uint64_t>>& tallies) const {
    std::vector<CountTable> out;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& widths = groups_[g].widths;
      std::map<CountTable::Tuple, std::uint64_t> counts;
      for (const auto& [packed, count] : tallies[g]) {
        CountTable::Tuple tuple(widths.size());
        std::uint64_t rest = packed;
        for (std::size_t i = widths.size(); i-- > 0;) {
          tuple[i] = rest & low_mask(widths[i]);
          rest = widths[i] >= 64 ? 0 : rest >> widths[i];
        }
        counts.emplace(std::move(tuple), count);
      }
      out.emplace_back(groups_in_[g], widths, assignment_count(), std::move(counts));
    }
    return out;
  }

  std::size_t group_count() const { return groups_.size(); }
  int edge_count() const { return compiled_.edge_count(); }

 private:
  Extractor resolve(const Variable& v) const {
    using K = Variable::Kind;
    switch (v.kind) {
      case K::kEdge: {
        const int e = instance_.edge_index(v.name);
        return {v.kind, e, 0, compiled_.edge_width(e)};
      }
      case K::kTerminalView: {
        const int node = instance_.node_index(v.name);
        return {v.kind, node, 0, compiled_.node_input_width(node)};
      }
      case K::kDecoderOutput: {
        for (std::size_t j = 0; j < instance_.terminals.size(); ++j) {
          if (instance_.terminals[j] == v.name) {
            return {v.kind, static_cast<int>(j), 0, compiled_.key_bits()};
          }
        }
        fail(ErrorCode::kUnknownNode, "'" + v.name + "' is not a terminal");
      }
      case K::kKey:
        return {v.kind, 0, 0, compiled_.key_bits()};
      case K::kSourceBit:
        return {v.kind, 0, compiled_.layout().shift_of({v.name, v.bit}), 1};
      case K::kSourceBits: {
        const auto& slots = compiled_.layout().slots();
        for (std::size_t s = 0; s < slots.size(); ++s) {
          if (slots[s].node == v.name) return {v.kind, static_cast<int>(s), 0, slots[s].width};
        }
        fail(ErrorCode::kBadCoords, "'" + v.name + "' is not a source");
      }
    }
    fail(ErrorCode::kInvalidArgument, "unknown variable kind");
  }

  std::uint64_t value(const Extractor& x, std::uint64_t m,
                      const std::vector<std::uint64_t>& messages) const {
    using K = Variable::Kind;
    switch (x.kind) {
      case K::kEdge: return messages[x.index];
      case K::kTerminalView: return compiled_.node_input(x.index, m, messages);
      case K::kDecoderOutput: return compiled_.decoder_output(x.index, m, messages);
      case K::kKey: return compiled_.key(m);
      case K::kSourceBit: return (m >> x.shift) & 1u;
      case K::kSourceBits: return compiled_.layout().source_value(m, x.index);
    }
    return 0;
  }

  const NetworkInstance& instance_;
  CompiledCode compiled_;
  const std::vector<std::vector<Variable>>& groups_in_;
  std::vector<Group> groups_;
};

using Tally = std::unordered_map<std::uint64_t, std::uint64_t>;

}  // namespace

std::vector<CountTable> joint_counts_many(const NetworkInstance& instance, const NetworkCode& code,
                                          const std::vector<std::vector<Variable>>& groups,
                                          int enumeration_cap) {
  const Enumerator enumerator(instance, code, groups, enumeration_cap);
  const auto count = static_cast<std::int64_t>(enumerator.assignment_count());
  std::vector<Tally> merged(enumerator.group_count());

#pragma omp parallel
  {
    std::vector<Tally> local(enumerator.group_count());
    std::vector<std::uint64_t> messages(enumerator.edge_count());
#pragma omp for schedule(static)
    for (std::int64_t m = 0; m < count; ++m) {
      enumerator.visit(static_cast<std::uint64_t>(m), messages, local);
    }
#pragma omp critical(keycast_joint_counts_merge)
    {
      for (std::size_t g = 0; g < local.size(); ++g)
        for (const auto& [packed, c] : local[g]) merged[g][packed] += c;
    }
  }
  return enumerator.tables(merged);
}

std::vector<CountTable> joint_counts_many_serial(const NetworkInstance& instance,
                                                 const NetworkCode& code,
                                                 const std::vector<std::vector<Variable>>& groups,
                                                 int enumeration_cap) {
  const Enumerator enumerator(instance, code, groups, enumeration_cap);
  std::vector<Tally> tallies(enumerator.group_count());
  std::vector<std::uint64_t> messages(enumerator.edge_count());
  for (std::uint64_t m = 0; m < enumerator.assignment_count(); ++m) {
    enumerator.visit(m, messages, tallies);
  }
  return enumerator.tables(tallies);
}

std::optional<std::uint64_t> first_assignment_with(const NetworkInstance& instance,
                                                   const NetworkCode& code,
                                                   const std::vector<Variable>& variables,
                                                   const CountTable::Tuple& tuple,
                                                   int enumeration_cap) {
  const std::vector<std::vector<Variable>> groups{variables};
  const Enumerator enumerator(instance, code, groups, enumeration_cap);
  const std::uint64_t wanted = enumerator.pack_tuple(0, tuple);
  std::vector<std::uint64_t> messages(enumerator.edge_count());
  for (std::uint64_t m = 0; m < enumerator.assignment_count(); ++m) {
    enumerator.run(m, messages);
    if (enumerator.pack(0, m, messages) == wanted) return m;
  }
  return std::nullopt;
}

CountTable joint_counts(const NetworkInstance& instance, const NetworkCode& code,
                        const std::vector<Variable>& variables, int enumeration_cap) {
  return std::move(joint_counts_many(instance, code, {variables}, enumeration_cap).front());
}

namespace {

std::vector<int> concat(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

bool is_independent(const CountTable& table, std::span<const int> part_a,
                    std::span<const int> part_b) {
  const CountTable a = table.marginal(part_a);
  const CountTable b = table.marginal(part_b);
  const CountTable joint = table.marginal(concat(part_a, part_b));
  using u128 = unsigned __int128;
  // Matching every supported cell forces full product support, because both
  // sides then sum to the same total.
  CountTable::Tuple ka(part_a.size());
  CountTable::Tuple kb(part_b.size());
  for (const auto& [tuple, count] : joint.counts()) {
    std::copy(tuple.begin(), tuple.begin() + part_a.size(), ka.begin());
    std::copy(tuple.begin() + part_a.size(), tuple.end(), kb.begin());
    const u128 lhs = static_cast<u128>(count) * table.total();
    const u128 rhs = static_cast<u128>(a.counts().at(ka)) * b.counts().at(kb);
    if (lhs != rhs) return false;
  }
  return true;
}

bool is_determined(const CountTable& table, std::span<const int> given,
                   std::span<const int> target) {
  const CountTable joint = table.marginal(concat(given, target));
  // Tuples are sorted, so rows sharing a `given` prefix are adjacent.
  const CountTable::Tuple* previous = nullptr;
  for (const auto& [tuple, count] : joint.counts()) {
    if (count == 0) continue;
    if (previous && std::equal(tuple.begin(), tuple.begin() + given.size(), previous->begin())) {
      return false;
    }
    previous = &tuple;
  }
  return true;
}

bool is_uniform(const CountTable& table, int position) {
  const int width = table.widths().at(position);
  if (width >= 63) return false;
  const std::array<int, 1> pos{position};
  const CountTable m = table.marginal(pos);
  const std::uint64_t values = std::uint64_t{1} << width;
  if (m.counts().size() != values) return false;
  if (table.total() % values != 0) return false;
  const std::uint64_t each = table.total() / values;
  for (const auto& [tuple, count] : m.counts())
    if (count != each) return false;
  return true;
}

double entropy_bits(const CountTable& table, std::span<const int> positions) {
  const CountTable m = table.marginal(positions);
  const long double total = static_cast<long double>(table.total());
  long double weighted = 0;
  for (const auto& [tuple, count] : m.counts()) {
    const long double c = static_cast<long double>(count);
    weighted += c * std::log2(c);
  }
  const long double h = std::log2(total) - weighted / total;
  return static_cast<double>(h < 0 ? 0 : h);
}

double conditional_entropy_bits(const CountTable& table, std::span<const int> target,
                                std::span<const int> given) {
  const double h = entropy_bits(table, concat(given, target)) - entropy_bits(table, given);
  return h < 0 ? 0.0 : h;
}

double mutual_information_bits(const CountTable& table, std::span<const int> part_a,
                               std::span<const int> part_b) {
  const double i = entropy_bits(table, part_a) + entropy_bits(table, part_b) -
                   entropy_bits(table, concat(part_a, part_b));
  return i < 0 ? 0.0 : i;
}

}  // namespace keycast
