#include "keycast/transforms.hpp"

#include <array>

#include "keycast/analysis.hpp"
#include "keycast/error.hpp"
#include "keycast/evaluate.hpp"

namespace keycast {

bool Permutation::is_bijection() const {
  if (table.size() != (std::size_t{1} << bits)) return false;
  std::vector<bool> hit(table.size(), false);
  for (std::uint64_t v : table) {
    if (v >= hit.size() || hit[v]) return false;
    hit[v] = true;
  }
  return true;
}

Permutation preencoding_permutation(const KeyMap& f, int key_bits) {
  const TruthTable table = f.to_table();
  const int l = table.in_bits();
  if (table.out_bits() != key_bits || key_bits > l) {
    fail(ErrorCode::kNotUniform, "a " + std::to_string(table.out_bits()) + "-bit map on " +
                                     std::to_string(l) + " bits cannot be a uniform " +
                                     std::to_string(key_bits) + "-bit key");
  }
  const std::size_t values = std::size_t{1} << key_bits;
  const std::size_t block = std::size_t{1} << (l - key_bits);
  std::vector<std::vector<std::uint64_t>> preimages(values);
  for (std::uint64_t m = 0; m < table.table().size(); ++m) preimages[table(m)].push_back(m);
  for (std::size_t v = 0; v < values; ++v) {
    if (preimages[v].size() != block) {
      fail(ErrorCode::kNotUniform, "key value " + std::to_string(v) + " has " +
                                       std::to_string(preimages[v].size()) + " preimages, expected " +
                                       std::to_string(block));
    }
  }
  Permutation pi{l, std::vector<std::uint64_t>(table.table().size())};
  for (std::uint64_t m = 0; m < pi.table.size(); ++m) {
    pi.table[m] = preimages[m >> (l - key_bits)][m & (block - 1)];
  }
  return pi;
}

namespace {

// fn with the `width`-bit input field at `shift` replaced by pi(field).
TruthTable compose_field(const EdgeFunction& fn, int shift, int width, const Permutation& pi) {
  const TruthTable base = fn.to_table();
  const std::uint64_t mask = low_mask(width) << shift;
  std::vector<std::uint64_t> out(base.table().size());
  for (std::uint64_t x = 0; x < out.size(); ++x) {
    const std::uint64_t field = (x & mask) >> shift;
    out[x] = base((x & ~mask) | (pi(field) << shift));
  }
  return TruthTable(base.in_bits(), base.out_bits(), std::move(out));
}

int slot_of(const AssignmentLayout& layout, std::string_view source) {
  for (std::size_t i = 0; i < layout.slots().size(); ++i)
    if (layout.slots()[i].node == source) return static_cast<int>(i);
  fail(ErrorCode::kBadCoords, "'" + std::string(source) + "' is not a source");
}

}  // namespace

NetworkCode preencode_source(const NetworkInstance& instance, const NetworkCode& code,
                             std::string_view source, const Permutation& pi) {
  validate_code(instance, code);
  const AssignmentLayout layout(instance, code);
  const SourceSlot& slot = layout.slots()[slot_of(layout, source)];
  if (pi.bits != slot.width || !pi.is_bijection()) {
    fail(ErrorCode::kWidthMismatch, "pre-encoding must be a bijection on the " +
                                        std::to_string(slot.width) + " bits of '" +
                                        std::string(source) + "'");
  }
  NetworkCode out = code;
  if (slot.width == 0) return out;
  // The source's own bits are the least significant field of X_In(source).
  for (int e : instance.out_edges(source)) {
    auto& fn = out.edge_encoders.at(instance.edges[e].id);
    fn = compose_field(fn, 0, slot.width, pi);
  }
  if (auto it = out.decoders.find(std::string(source)); it != out.decoders.end()) {
    it->second = compose_field(it->second, 0, slot.width, pi);
  }
  const int shift = layout.total_bits() - slot.offset - slot.width;
  out.key = compose_field(out.key, shift, slot.width, pi);
  out.message_coords.clear();
  return out;
}

NetworkCode apply_preencoding(const NetworkInstance& instance, const NetworkCode& code,
                              const Permutation& pi) {
  if (instance.sources.size() != 1) {
    fail(ErrorCode::kMultiSource, "pre-encoding needs exactly one source, instance has " +
                                      std::to_string(instance.sources.size()));
  }
  return preencode_source(instance, code, instance.sources.front().node, pi);
}

ColumnReduction zero_redundant_columns(const Gf2Matrix& a) {
  Gf2Matrix current = a;
  const int rank = a.rank();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int c = current.cols() - 1; c >= 0; --c) {
      if (current.column_is_zero(c)) continue;
      Gf2Matrix trial = current;
      trial.zero_column(c);
      if (trial.rank() == rank) {
        current = std::move(trial);
        changed = true;
        break;
      }
    }
  }
  ColumnReduction out{current, {}};
  for (int c = 0; c < current.cols(); ++c)
    if (!current.column_is_zero(c)) out.kept.push_back(c);
  return out;
}

SecureCode linear_key_to_secure(const NetworkInstance& instance, const NetworkCode& code) {
  if (!instance.eavesdrop_sets.empty()) {
    fail(ErrorCode::kNonzeroB, "column zeroing only preserves feasibility when B is empty");
  }
  if (!is_linear(code)) fail(ErrorCode::kNotLinear, "every encoder, decoder, and the key must be GF(2)");
  validate_code(instance, code);
  const Gf2Matrix& a = *code.key.as_matrix();
  const int k = a.rows();
  if (a.rank() != k) {
    fail(ErrorCode::kRankDeficient, "key matrix has rank " + std::to_string(a.rank()) +
                                        " < " + std::to_string(k) + ", so the key is not uniform");
  }
  const ColumnReduction reduction = zero_redundant_columns(a);
  const AssignmentLayout layout(instance, code);

  // Kept bits per source, renumbered densely.
  SecureCode out{code, {}};
  std::vector<std::vector<int>> kept_local(layout.slots().size());
  for (int column : reduction.kept) {
    for (std::size_t s = 0; s < layout.slots().size(); ++s) {
      const SourceSlot& slot = layout.slots()[s];
      if (column >= slot.offset && column < slot.offset + slot.width) {
        kept_local[s].push_back(column - slot.offset);
        out.message_coords.push_back({slot.node, static_cast<int>(kept_local[s].size()) - 1});
      }
    }
  }

  // Drop the frozen own-bit columns from every function a source evaluates.
  auto drop_own_bits = [&](const Gf2Matrix& m, std::size_t s) {
    const int own_start = m.cols() - layout.slots()[s].width;
    std::vector<int> columns;
    for (int c = 0; c < own_start; ++c) columns.push_back(c);
    for (int j : kept_local[s]) columns.push_back(own_start + j);
    return m.select_columns(columns);
  };
  for (std::size_t s = 0; s < layout.slots().size(); ++s) {
    const std::string& node = layout.slots()[s].node;
    if (layout.slots()[s].width == 0) continue;
    out.code.source_bits[node] = static_cast<int>(kept_local[s].size());
    for (int e : instance.out_edges(node)) {
      auto& fn = out.code.edge_encoders.at(instance.edges[e].id);
      fn = drop_own_bits(*fn.as_matrix(), s);
    }
    if (auto it = out.code.decoders.find(node); it != out.code.decoders.end()) {
      it->second = drop_own_bits(*it->second.as_matrix(), s);
    }
  }

  const Gf2Matrix block = a.select_columns(reduction.kept);
  const auto block_inverse = block.inverse();
  if (!block_inverse) fail(ErrorCode::kRankDeficient, "surviving key columns are not invertible");
  for (auto& [terminal, fn] : out.code.decoders) fn = *block_inverse * *fn.as_matrix();
  out.code.key = Gf2Matrix::identity(k);
  out.code.message_coords = out.message_coords;
  return out;
}

NetworkInstance reduce_secure_to_key(const NetworkInstance& secure, const Rational& rate) {
  require_valid(secure);
  if (rate <= 0) fail(ErrorCode::kBadRate, "rate must be positive, got " + format_rational(rate));
  const SourceDecl* message_source = nullptr;
  int message_sources = 0;
  for (const SourceDecl& s : secure.sources) {
    if (holds_messages(s.role)) {
      message_source = &s;
      ++message_sources;
    }
  }
  if (message_sources != 1) {
    fail(ErrorCode::kMultiMessageSource, "need exactly one message source, found " +
                                             std::to_string(message_sources));
  }
  if (secure.find_node(kKeyTerminal) || secure.find_edge(kKeyEdge)) {
    fail(ErrorCode::kInvalidInstance, "instance already uses the reserved ids d_key/e_key");
  }
  NetworkInstance reduced = secure;
  reduced.nodes.emplace_back(kKeyTerminal);
  reduced.terminals.emplace_back(kKeyTerminal);
  reduced.edges.push_back({std::string(kKeyEdge), message_source->node, std::string(kKeyTerminal), rate});
  return reduced;
}

NetworkInstance strip_key_terminal(const NetworkInstance& reduced) {
  const auto edge = reduced.find_edge(kKeyEdge);
  if (!edge || !reduced.find_node(kKeyTerminal)) {
    fail(ErrorCode::kInvalidInstance, "instance has no d_key terminal");
  }
  NetworkInstance original = reduced;
  std::erase_if(original.nodes, [](const std::string& n) { return n == kKeyTerminal; });
  std::erase_if(original.terminals, [](const std::string& n) { return n == kKeyTerminal; });
  std::erase_if(original.edges, [](const Edge& e) { return e.id == kKeyEdge; });
  return original;
}

NetworkCode lift_secure_code(const NetworkInstance& secure, const NetworkCode& code,
                             const std::vector<Coord>& message_coords, const Rational& rate) {
  const NetworkInstance reduced = reduce_secure_to_key(secure, rate);
  validate_code(secure, code);
  const Edge& key_edge = reduced.edges.back();
  const int width = edge_width(key_edge, code.blocklength);
  const int k = static_cast<int>(message_coords.size());
  if (k != code.key.out_bits()) {
    fail(ErrorCode::kBadCoords, std::to_string(k) + " message coords for a " +
                                    std::to_string(code.key.out_bits()) + "-bit key");
  }
  if (k > width) {
    fail(ErrorCode::kCapacityExceeded, std::to_string(k) + " key bits exceed the " +
                                           std::to_string(width) + "-bit edge to d_key");
  }
  const std::string& s = key_edge.tail;
  const int in_width = node_input_width(secure, code, s);
  const int own_bits = code.source_bits.count(s) ? code.source_bits.at(s) : 0;
  Gf2Matrix send(width, in_width);
  for (int t = 0; t < k; ++t) {
    const Coord& c = message_coords[t];
    if (c.source != s || c.bit < 0 || c.bit >= own_bits) {
      fail(ErrorCode::kBadCoords, "message coord " + c.source + ":" + std::to_string(c.bit) +
                                      " is not a bit of the message source '" + s + "'");
    }
    send.set(t, in_width - own_bits + c.bit, true);
  }
  Gf2Matrix receive(k, width);
  for (int t = 0; t < k; ++t) receive.set(t, t, true);

  NetworkCode lifted = code;
  lifted.edge_encoders[std::string(kKeyEdge)] = send;
  lifted.decoders[std::string(kKeyTerminal)] = receive;
  lifted.message_coords.clear();
  validate_code(reduced, lifted);
  return lifted;
}

SecureCode restrict_key_code_to_secure(const NetworkInstance& reduced, const NetworkCode& key_code) {
  const NetworkInstance secure = strip_key_terminal(reduced);
  validate_code(reduced, key_code);
  const std::string s = reduced.edges[reduced.edge_index(kKeyEdge)].tail;

  const CountTable table =
      joint_counts(reduced, key_code, {Variable::source_bits(s), Variable::key()});
  const std::array<int, 1> given{0};
  const std::array<int, 1> target{1};
  if (!is_determined(table, given, target)) {
    fail(ErrorCode::kKeyNotSourceFunction, "the key depends on bits outside source '" + s + "'");
  }

  // Key as a function of s's bits alone (other bits fixed to zero).
  const AssignmentLayout layout(reduced, key_code);
  const SourceSlot& slot = layout.slots()[slot_of(layout, s)];
  const int shift = layout.total_bits() - slot.offset - slot.width;
  const int k = key_code.key.out_bits();
  std::vector<std::uint64_t> local(std::size_t{1} << slot.width);
  for (std::uint64_t v = 0; v < local.size(); ++v) local[v] = key_code.key.apply(v << shift);
  const Permutation pi = preencoding_permutation(TruthTable(slot.width, k, std::move(local)), k);

  NetworkCode code = preencode_source(reduced, key_code, s, pi);
  code.edge_encoders.erase(std::string(kKeyEdge));
  code.decoders.erase(std::string(kKeyTerminal));

  SecureCode out{std::move(code), {}};
  Gf2Matrix projection(k, layout.total_bits());
  for (int t = 0; t < k; ++t) {
    out.message_coords.push_back({s, t});
    projection.set(t, slot.offset + t, true);
  }
  out.code.key = projection;
  out.code.message_coords = out.message_coords;
  validate_code(secure, out.code);
  return out;
}

}  // namespace keycast
