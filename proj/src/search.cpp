#include "keycast/search.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "keycast/constructions.hpp"
#include "keycast/error.hpp"
#include "keycast/function.hpp"

namespace keycast {

namespace {

int parse_int(std::string_view text, std::string_view field) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    fail(ErrorCode::kParse, "shape field '" + std::string(field) + "' needs a nonnegative integer, got '" +
                                std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<int> CodeShape::bits_for(const NetworkInstance& instance) const {
  if (source_bits.size() == 1) return std::vector<int>(instance.sources.size(), source_bits.front());
  if (source_bits.size() != instance.sources.size()) {
    fail(ErrorCode::kInvalidArgument, "shape lists " + std::to_string(source_bits.size()) +
                                          " source widths for " +
                                          std::to_string(instance.sources.size()) + " sources");
  }
  return source_bits;
}

CodeShape parse_shape(std::string_view text) {
  CodeShape shape;
  if (text.empty()) return shape;
  for (std::string_view item : split(text, ',')) {
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kParse, "shape item '" + std::string(item) + "' has no '='");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "n") {
      shape.blocklength = parse_int(value, key);
      if (shape.blocklength < 1) fail(ErrorCode::kParse, "blocklength must be positive");
    } else if (key == "l") {
      shape.source_bits.clear();
      for (std::string_view v : split(value, ':')) shape.source_bits.push_back(parse_int(v, key));
    } else if (key == "family") {
      if (value == "tables") {
        shape.family = EncoderFamily::kAllTables;
      } else if (value == "linear") {
        shape.family = EncoderFamily::kLinear;
      } else {
        fail(ErrorCode::kParse, "family must be tables or linear, got '" + std::string(value) + "'");
      }
    } else if (key == "sources") {
      if (value == "forward") {
        shape.sources = SourceBehavior::kForward;
      } else if (value == "free") {
        shape.sources = SourceBehavior::kFree;
      } else {
        fail(ErrorCode::kParse, "sources must be forward or free, got '" + std::string(value) + "'");
      }
    } else if (key == "kmax") {
      shape.max_key_bits = parse_int(value, key);
    } else {
      fail(ErrorCode::kParse, "unknown shape field '" + std::string(key) + "'");
    }
  }
  return shape;
}

std::string format_shape(const CodeShape& shape) {
  std::string out = "n=" + std::to_string(shape.blocklength) + ",l=";
  for (std::size_t i = 0; i < shape.source_bits.size(); ++i) {
    if (i) out += ':';
    out += std::to_string(shape.source_bits[i]);
  }
  out += shape.family == EncoderFamily::kAllTables ? ",family=tables" : ",family=linear";
  out += shape.sources == SourceBehavior::kForward ? ",sources=forward" : ",sources=free";
  if (shape.max_key_bits) out += ",kmax=" + std::to_string(*shape.max_key_bits);
  return out;
}

struct Field {
  bool from_edge;
  int index;  // edge index, or source slot
  int width;
};

struct CodeStream::Plan {
  NetworkInstance instance;
  CodeShape shape;
  std::vector<int> bits;        // per source slot
  std::vector<int> slot_shift;  // shift of each slot's field inside m
  int total_bits = 0;

  std::vector<int> out_width;  // per edge
  std::vector<int> in_width;   // per edge: width of X_In(tail)
  std::vector<int> tail_node;
  std::vector<bool> forwarded;
  std::vector<int> enumerated;        // edge indices, in edge order
  std::vector<std::uint64_t> radix;   // options per enumerated edge
  std::optional<std::uint64_t> size;

  std::vector<int> order;  // edges in evaluation order
  std::vector<std::vector<Field>> node_fields;
  std::vector<int> node_width;
  std::vector<int> terminal_nodes;
  std::vector<std::vector<Field>> view_fields;  // per eavesdrop set
};

namespace {

using Plan = CodeStream::Plan;

std::uint64_t gather(const Plan& p, const std::vector<Field>& fields, std::uint64_t m,
                     const std::uint64_t* messages) {
  std::uint64_t x = 0;
  for (const Field& f : fields) {
    const std::uint64_t part = f.from_edge ? messages[f.index]
                                           : (m >> p.slot_shift[f.index]) & low_mask(f.width);
    x = (x << f.width) | part;
  }
  return x;
}

int fields_width(const std::vector<Field>& fields) {
  int w = 0;
  for (const Field& f : fields) w += f.width;
  return w;
}

std::unique_ptr<Plan> make_plan(const NetworkInstance& instance, const CodeShape& shape) {
  require_valid(instance);
  auto p = std::make_unique<Plan>();
  p->instance = instance;
  p->shape = shape;
  p->bits = shape.bits_for(instance);
  for (int b : p->bits) p->total_bits += b;
  if (p->total_bits > 63) fail(ErrorCode::kSpaceLimit, "shape generates more than 63 source bits");
  int offset = 0;
  for (int b : p->bits) {
    p->slot_shift.push_back(p->total_bits - offset - b);
    offset += b;
  }

  const auto& edges = instance.edges;
  const int n = shape.blocklength;
  for (const Edge& e : edges) p->out_width.push_back(edge_width(e, n));

  p->node_fields.resize(instance.nodes.size());
  for (std::size_t v = 0; v < instance.nodes.size(); ++v) {
    for (int e : instance.in_edges(instance.nodes[v])) p->node_fields[v].push_back({true, e, p->out_width[e]});
    if (auto s = instance.find_source(instance.nodes[v]); s && p->bits[*s] > 0) {
      p->node_fields[v].push_back({false, *s, p->bits[*s]});
    }
    p->node_width.push_back(fields_width(p->node_fields[v]));
    if (p->node_width.back() > 64) fail(ErrorCode::kSpaceLimit, "node input wider than 64 bits");
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const int tail = instance.node_index(edges[e].tail);
    p->tail_node.push_back(tail);
    p->in_width.push_back(p->node_width[tail]);
    if (p->in_width.back() > kMaxTableInputBits) {
      fail(ErrorCode::kSpaceLimit, "edge '" + edges[e].id + "' reads " + std::to_string(p->in_width.back()) + " bits");
    }
    const auto s = instance.find_source(edges[e].tail);
    const bool forward = shape.sources == SourceBehavior::kForward && s.has_value();
    p->forwarded.push_back(forward);
    if (forward) {
      if (p->out_width[e] != p->bits[*s]) {
        fail(ErrorCode::kInvalidArgument,
             "FORWARD needs edge '" + edges[e].id + "' to carry exactly the " +
                 std::to_string(p->bits[*s]) + " bits of its source, it carries " +
                 std::to_string(p->out_width[e]));
      }
      continue;
    }
    p->enumerated.push_back(static_cast<int>(e));
    const int o = p->out_width[e];
    const int w = p->in_width[e];
    // Options: (2^o)^(2^w) tables or 2^(o*w) matrices.
    int log_options = -1;
    if (shape.family == EncoderFamily::kLinear) {
      log_options = o * w;
    } else if (w < 63) {
      const unsigned __int128 exponent = static_cast<unsigned __int128>(o) << w;
      log_options = exponent < 64 ? static_cast<int>(exponent) : 64;
    } else {
      log_options = o == 0 ? 0 : 64;
    }
    p->radix.push_back(log_options < 64 ? std::uint64_t{1} << log_options : 0);
  }

  if (edges.empty()) {
    p->size = 0;
  } else {
    unsigned __int128 total = 1;
    bool fits = true;
    for (std::uint64_t r : p->radix) {
      if (r == 0) {
        fits = false;
        break;
      }
      total *= r;
      if (total > ~std::uint64_t{0}) {
        fits = false;
        break;
      }
    }
    if (fits) p->size = static_cast<std::uint64_t>(total);
  }

  // Evaluation order: edges grouped by the topological position of the tail.
  std::vector<int> position(instance.nodes.size());
  const auto topo = topological_order(instance);
  for (std::size_t i = 0; i < topo.size(); ++i) position[instance.node_index(topo[i])] = static_cast<int>(i);
  p->order.resize(edges.size());
  std::iota(p->order.begin(), p->order.end(), 0);
  std::stable_sort(p->order.begin(), p->order.end(),
                   [&](int a, int b) { return position[p->tail_node[a]] < position[p->tail_node[b]]; });

  for (const auto& d : instance.terminals) p->terminal_nodes.push_back(instance.node_index(d));
  for (const auto& set : instance.eavesdrop_sets) {
    std::vector<Field> fields;
    for (const auto& e : set.edges) {
      const int idx = instance.edge_index(e);
      fields.push_back({true, idx, p->out_width[idx]});
    }
    for (const auto& s : set.observed_sources) {
      const int slot = *instance.find_source(s);
      fields.push_back({false, slot, p->bits[slot]});
    }
    if (fields_width(fields) > 64) fail(ErrorCode::kSpaceLimit, "eavesdrop view wider than 64 bits");
    p->view_fields.push_back(std::move(fields));
  }
  return p;
}

std::vector<std::uint64_t> digits_of(const Plan& p, std::uint64_t index) {
  std::vector<std::uint64_t> d(p.enumerated.size());
  for (std::size_t i = p.enumerated.size(); i-- > 0;) {
    d[i] = index % p.radix[i];
    index /= p.radix[i];
  }
  return d;
}

// Truth table of edge e under option `digit` (ignored for forwarded edges).
void fill_table(const Plan& p, int e, std::uint64_t digit, std::vector<std::uint64_t>& out) {
  const int o = p.out_width[e];
  const int w = p.in_width[e];
  const std::uint64_t entries = std::uint64_t{1} << w;
  out.resize(entries);
  if (p.forwarded[e]) {
    for (std::uint64_t x = 0; x < entries; ++x) out[x] = x & low_mask(o);
  } else if (p.shape.family == EncoderFamily::kAllTables) {
    for (std::uint64_t x = 0; x < entries; ++x) {
      const std::uint64_t shift = static_cast<std::uint64_t>(o) * (entries - 1 - x);
      out[x] = shift >= 64 ? 0 : (digit >> shift) & low_mask(o);
    }
  } else {
    for (std::uint64_t x = 0; x < entries; ++x) {
      std::uint64_t y = 0;
      for (int r = 0; r < o; ++r) {
        const std::uint64_t row = (digit >> (static_cast<std::uint64_t>(o - 1 - r) * w)) & low_mask(w);
        y = (y << 1) | (std::popcount(row & x) & 1u);
      }
      out[x] = y;
    }
  }
}

EdgeFunction edge_function(const Plan& p, int e, std::uint64_t digit) {
  const int o = p.out_width[e];
  const int w = p.in_width[e];
  if (p.forwarded[e]) {
    Gf2Matrix m(o, w);
    for (int r = 0; r < o; ++r) m.set(r, w - o + r, true);
    return m;
  }
  if (p.shape.family == EncoderFamily::kLinear) {
    Gf2Matrix m(o, w);
    for (int r = 0; r < o; ++r) {
      const std::uint64_t row = (digit >> (static_cast<std::uint64_t>(o - 1 - r) * w)) & low_mask(w);
      for (int c = 0; c < w; ++c) m.set(r, c, (row >> (w - 1 - c)) & 1u);
    }
    return m;
  }
  std::vector<std::uint64_t> table;
  fill_table(p, e, digit, table);
  return TruthTable(w, o, std::move(table));
}

NetworkCode base_code(const Plan& p, std::uint64_t index) {
  const auto& inst = p.instance;
  NetworkCode code;
  code.blocklength = p.shape.blocklength;
  for (std::size_t s = 0; s < inst.sources.size(); ++s) code.source_bits[inst.sources[s].node] = p.bits[s];
  const auto d = digits_of(p, index);
  std::vector<std::uint64_t> digit(inst.edges.size(), 0);
  for (std::size_t i = 0; i < p.enumerated.size(); ++i) digit[p.enumerated[i]] = d[i];
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    code.edge_encoders[inst.edges[e].id] = edge_function(p, static_cast<int>(e), digit[e]);
  }
  for (std::size_t j = 0; j < inst.terminals.size(); ++j) {
    code.decoders[inst.terminals[j]] = Gf2Matrix(0, p.node_width[p.terminal_nodes[j]]);
  }
  code.key = Gf2Matrix(0, p.total_bits);
  return code;
}

// Dense class ids in order of first appearance.
int compress(const std::vector<std::uint64_t>& values, std::vector<int>& ids,
             std::unordered_map<std::uint64_t, int>& scratch) {
  scratch.clear();
  ids.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [it, inserted] = scratch.try_emplace(values[i], static_cast<int>(scratch.size()));
    ids[i] = it->second;
  }
  return static_cast<int>(scratch.size());
}

// What one candidate admits: its largest key and the key value per assignment.
struct Outcome {
  int key_bits = 0;
  std::vector<std::uint64_t> key;  // per assignment, empty when key_bits == 0
  std::vector<Coord> coords;
};

class Evaluator {
 public:
  Evaluator(const Plan& p, FeasibilityMode mode) : p_(p), mode_(mode) {
    count_ = std::uint64_t{1} << p.total_bits;
    tables_.resize(p.instance.edges.size());
    messages_.resize(count_ * p.instance.edges.size());
    gap_ = gap_alpha(p.instance).has_value();
    const AssignmentLayout layout = layout_of(p);
    all_coords_ = layout.all_coords();
    for (const Coord& c : all_coords_) {
      coord_shift_.push_back(layout.shift_of(c));
      const auto& decl = p.instance.sources[*p.instance.find_source(c.source)];
      coord_message_.push_back(holds_messages(decl.role));
    }
    kmax_ = p.total_bits;
    for (int t : p.terminal_nodes) kmax_ = std::min(kmax_, p.node_width[t]);
    if (p.shape.max_key_bits) kmax_ = std::min(kmax_, *p.shape.max_key_bits);
  }

  // Largest k above `floor` (searched from kmax down), or nullopt.
  std::optional<Outcome> best(std::uint64_t index, int floor) {
    load(index);
    switch (mode_) {
      case FeasibilityMode::kKey: return keyed(floor, key_blocks());
      case FeasibilityMode::kKey2: return keyed(floor, two_stage_blocks());
      case FeasibilityMode::kSec: return secure(floor);
    }
    return std::nullopt;
  }

  int kmax() const { return kmax_; }
  const std::vector<std::vector<int>>& terminal_classes() const { return term_cls_; }
  std::uint64_t terminal_view(int j, std::uint64_t m) const {
    return gather(p_, p_.node_fields[p_.terminal_nodes[j]], m, &messages_[m * tables_.size()]);
  }

 private:
  static AssignmentLayout layout_of(const Plan& p) {
    NetworkCode stub;
    for (std::size_t s = 0; s < p.instance.sources.size(); ++s) {
      stub.source_bits[p.instance.sources[s].node] = p.bits[s];
    }
    return AssignmentLayout(p.instance, stub);
  }

  void load(std::uint64_t index) {
    const auto d = digits_of(p_, index);
    std::vector<std::uint64_t> digit(tables_.size(), 0);
    for (std::size_t i = 0; i < p_.enumerated.size(); ++i) digit[p_.enumerated[i]] = d[i];
    for (std::size_t e = 0; e < tables_.size(); ++e) fill_table(p_, static_cast<int>(e), digit[e], tables_[e]);

    const std::size_t edges = tables_.size();
    for (std::uint64_t m = 0; m < count_; ++m) {
      std::uint64_t* msg = &messages_[m * edges];
      for (int e : p_.order) msg[e] = tables_[e][gather(p_, p_.node_fields[p_.tail_node[e]], m, msg)];
    }

    std::vector<std::uint64_t> values(count_);
    term_cls_.resize(p_.terminal_nodes.size());
    for (std::size_t j = 0; j < p_.terminal_nodes.size(); ++j) {
      for (std::uint64_t m = 0; m < count_; ++m) values[m] = terminal_view(static_cast<int>(j), m);
      compress(values, term_cls_[j], scratch_);
    }
    view_cls_.resize(p_.view_fields.size());
    view_size_.resize(p_.view_fields.size());
    for (std::size_t b = 0; b < p_.view_fields.size(); ++b) {
      for (std::uint64_t m = 0; m < count_; ++m) values[m] = gather(p_, p_.view_fields[b], m, &messages_[m * edges]);
      const int classes = compress(values, view_cls_[b], scratch_);
      view_size_[b].assign(classes, 0);
      for (int c : view_cls_[b]) ++view_size_[b][c];
    }
  }

  // Bits every terminal determines, as indices into all_coords_.
  std::vector<int> decodable_bits() const {
    std::vector<int> out;
    std::vector<int> seen;
    for (std::size_t i = 0; i < all_coords_.size(); ++i) {
      bool everyone = true;
      for (const auto& cls : term_cls_) {
        seen.assign(count_, -1);
        for (std::uint64_t m = 0; m < count_ && everyone; ++m) {
          const int bit = static_cast<int>((m >> coord_shift_[i]) & 1u);
          int& slot = seen[cls[m]];
          if (slot < 0) {
            slot = bit;
          } else if (slot != bit) {
            everyone = false;
          }
        }
        if (!everyone) break;
      }
      if (everyone) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  // Assignments that some terminal cannot tell apart must share a key value.
  std::vector<int> key_blocks() const {
    std::vector<std::uint64_t> parent(count_);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::uint64_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<std::int64_t> first;
    for (const auto& cls : term_cls_) {
      first.assign(count_, -1);
      for (std::uint64_t m = 0; m < count_; ++m) {
        if (first[cls[m]] < 0) {
          first[cls[m]] = static_cast<std::int64_t>(m);
        } else {
          const std::uint64_t a = find(m);
          const std::uint64_t b = find(static_cast<std::uint64_t>(first[cls[m]]));
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
    std::vector<std::uint64_t> roots(count_);
    for (std::uint64_t m = 0; m < count_; ++m) roots[m] = find(m);
    std::vector<int> ids;
    std::unordered_map<std::uint64_t, int> scratch;
    compress(roots, ids, scratch);
    return ids;
  }

  // The key is a function of the bits every terminal decodes.
  std::vector<int> two_stage_blocks() {
    std::uint64_t mask = 0;
    for (int i : decodable_bits()) mask |= std::uint64_t{1} << coord_shift_[i];
    std::vector<std::uint64_t> values(count_);
    for (std::uint64_t m = 0; m < count_; ++m) values[m] = m & mask;
    std::vector<int> ids;
    compress(values, ids, scratch_);
    return ids;
  }

  std::optional<Outcome> keyed(int floor, const std::vector<int>& block_of) {
    const int blocks = block_of.empty() ? 0 : *std::max_element(block_of.begin(), block_of.end()) + 1;
    std::vector<std::uint64_t> size(blocks, 0);
    for (int b : block_of) ++size[b];
    // Per eavesdrop set and block: (view class, multiplicity).
    const std::size_t sets = view_cls_.size();
    std::vector<std::vector<std::vector<std::pair<int, std::uint64_t>>>> touch(
        sets, std::vector<std::vector<std::pair<int, std::uint64_t>>>(blocks));
    for (std::size_t b = 0; b < sets; ++b) {
      std::vector<std::pair<int, int>> pairs(count_);
      for (std::uint64_t m = 0; m < count_; ++m) pairs[m] = {block_of[m], view_cls_[b][m]};
      std::sort(pairs.begin(), pairs.end());
      for (std::size_t i = 0; i < pairs.size();) {
        std::size_t j = i;
        while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
        touch[b][pairs[i].first].push_back({pairs[i].second, j - i});
        i = j;
      }
    }

    for (int k = kmax_; k > floor; --k) {
      std::vector<int> labels;
      if (!balanced_labeling(k, size, touch, labels)) continue;
      Outcome out;
      out.key_bits = k;
      out.key.resize(count_);
      for (std::uint64_t m = 0; m < count_; ++m) out.key[m] = static_cast<std::uint64_t>(labels[block_of[m]]);
      assert_converse(k);
      return out;
    }
    return std::nullopt;
  }

  // First restricted-growth labeling of the blocks with 2^k equally sized
  // values that splits every eavesdrop class evenly across key values.
  bool balanced_labeling(int k, const std::vector<std::uint64_t>& size,
                         const std::vector<std::vector<std::vector<std::pair<int, std::uint64_t>>>>& touch,
                         std::vector<int>& labels) const {
    const std::uint64_t values = std::uint64_t{1} << k;
    const std::uint64_t quota = count_ >> k;
    std::vector<std::vector<std::uint64_t>> cap(view_size_.size());
    for (std::size_t b = 0; b < view_size_.size(); ++b) {
      for (std::uint64_t s : view_size_[b]) {
        if (s % values) return false;
        cap[b].push_back(s / values);
      }
    }
    const int blocks = static_cast<int>(size.size());
    std::vector<std::uint64_t> filled(values, 0);
    std::vector<std::vector<std::uint64_t>> used(view_size_.size());
    for (std::size_t b = 0; b < view_size_.size(); ++b) used[b].assign(view_size_[b].size() * values, 0);
    labels.assign(blocks, -1);

    auto fits = [&](int block, std::uint64_t v) {
      if (filled[v] + size[block] > quota) return false;
      for (std::size_t b = 0; b < touch.size(); ++b) {
        for (const auto& [c, mult] : touch[b][block]) {
          if (used[b][c * values + v] + mult > cap[b][c]) return false;
        }
      }
      return true;
    };
    auto place = [&](int block, std::uint64_t v, bool add) {
      filled[v] = add ? filled[v] + size[block] : filled[v] - size[block];
      for (std::size_t b = 0; b < touch.size(); ++b) {
        for (const auto& [c, mult] : touch[b][block]) {
          auto& u = used[b][c * values + v];
          u = add ? u + mult : u - mult;
        }
      }
    };

    // Iterative depth-first search; distinct[i] = values used by blocks < i.
    std::vector<std::uint64_t> distinct(blocks + 1, 0);
    int i = 0;
    std::uint64_t next = 0;
    while (i >= 0) {
      if (i == blocks) return true;
      const std::uint64_t limit = std::min(distinct[i] + 1, values);
      bool advanced = false;
      for (std::uint64_t v = next; v < limit; ++v) {
        if (!fits(i, v)) continue;
        place(i, v, true);
        labels[i] = static_cast<int>(v);
        distinct[i + 1] = std::max(distinct[i], v + 1);
        ++i;
        next = 0;
        advanced = true;
        break;
      }
      if (advanced) continue;
      labels[i] = -1;
      --i;
      if (i < 0) break;
      place(i, static_cast<std::uint64_t>(labels[i]), false);
      next = static_cast<std::uint64_t>(labels[i]) + 1;
    }
    return false;
  }

  std::optional<Outcome> secure(int floor) {
    std::vector<int> candidates;
    for (int i : decodable_bits())
      if (coord_message_[i]) candidates.push_back(i);
    const int d = static_cast<int>(candidates.size());
    std::vector<std::uint64_t> key(count_);
    for (int k = std::min(kmax_, d); k > floor; --k) {
      std::vector<int> pick(k);
      std::iota(pick.begin(), pick.end(), 0);
      for (;;) {
        for (std::uint64_t m = 0; m < count_; ++m) {
          std::uint64_t x = 0;
          for (int i : pick) x = (x << 1) | ((m >> coord_shift_[candidates[i]]) & 1u);
          key[m] = x;
        }
        if (independent_of_views(k, key)) {
          Outcome out{k, key, {}};
          for (int i : pick) out.coords.push_back(all_coords_[candidates[i]]);
          return out;
        }
        int i = k - 1;
        while (i >= 0 && pick[i] == d - k + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
    return std::nullopt;
  }

  bool independent_of_views(int k, const std::vector<std::uint64_t>& key) const {
    const std::uint64_t values = std::uint64_t{1} << k;
    std::vector<std::uint64_t> joint;
    for (std::size_t b = 0; b < view_cls_.size(); ++b) {
      joint.assign(view_size_[b].size() * values, 0);
      for (std::uint64_t m = 0; m < count_; ++m) ++joint[view_cls_[b][m] * values + key[m]];
      for (std::size_t c = 0; c < view_size_[b].size(); ++c) {
        for (std::uint64_t v = 0; v < values; ++v) {
          if (joint[c * values + v] * values != view_size_[b][c]) return false;
        }
      }
    }
    return true;
  }

  void assert_converse(int k) const {
    if (gap_ && k > p_.shape.blocklength) {
      throw InternalError("gap instance admits a " + std::to_string(k) + "-bit secret key at n = " +
                             std::to_string(p_.shape.blocklength));
    }
  }

  const Plan& p_;
  FeasibilityMode mode_;
  std::uint64_t count_ = 0;
  bool gap_ = false;
  int kmax_ = 0;
  std::vector<Coord> all_coords_;
  std::vector<int> coord_shift_;
  std::vector<bool> coord_message_;
  std::vector<std::vector<std::uint64_t>> tables_;
  std::vector<std::uint64_t> messages_;
  std::vector<std::vector<int>> term_cls_;
  std::vector<std::vector<int>> view_cls_;
  std::vector<std::vector<std::uint64_t>> view_size_;
  std::unordered_map<std::uint64_t, int> scratch_;
};

struct Range {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t total = 0;
};

Range plan_range(const Plan& p, const SearchOptions& options) {
  if (p.total_bits > options.enumeration_cap) {
    fail(ErrorCode::kSpaceLimit, "shape generates " + std::to_string(p.total_bits) +
                                     " source bits, search cap is " + std::to_string(options.enumeration_cap));
  }
  if (!p.size) fail(ErrorCode::kBudgetExceeded, "candidate count does not fit in 64 bits");
  Range r;
  r.total = *p.size;
  if (options.cursor > r.total) {
    fail(ErrorCode::kInvalidArgument, "cursor " + std::to_string(options.cursor) + " is past the " +
                                          std::to_string(r.total) + " candidates");
  }
  r.begin = options.cursor;
  r.end = options.limit ? r.begin + std::min(*options.limit, r.total - r.begin) : r.total;
  if (r.end - r.begin > options.budget) {
    fail(ErrorCode::kBudgetExceeded, std::to_string(r.end - r.begin) + " candidates exceed the budget of " +
                                         std::to_string(options.budget));
  }
  return r;
}

// Rebuilds the winning code and re-checks it with the feasibility checker.
SearchResult finish(const Plan& p, FeasibilityMode mode, const Range& range, int best_k,
                    std::optional<std::uint64_t> best_index) {
  SearchResult result;
  result.mode = mode;
  result.total_candidates = range.total;
  result.candidates_examined = range.end - range.begin;
  result.next_cursor = range.end;
  result.exhaustive = range.begin == 0 && range.end == range.total;
  if (range.begin == range.end) return result;
  if (!best_index) best_index = range.begin;

  const Rational rate(best_k, p.shape.blocklength);
  NetworkCode code = base_code(p, *best_index);
  if (best_k > 0) {
    Evaluator eval(p, mode);
    const auto outcome = eval.best(*best_index, best_k - 1);
    if (!outcome || outcome->key_bits != best_k) throw InternalError("search witness did not reproduce");
    if (mode == FeasibilityMode::kSec) {
      const AssignmentLayout layout(p.instance, code);
      Gf2Matrix key(best_k, p.total_bits);
      for (int t = 0; t < best_k; ++t) key.set(t, p.total_bits - 1 - layout.shift_of(outcome->coords[t]), true);
      code.key = key;
      code.message_coords = outcome->coords;
    } else {
      code.key = TruthTable(p.total_bits, best_k, outcome->key);
    }
    const std::uint64_t count = std::uint64_t{1} << p.total_bits;
    for (std::size_t j = 0; j < p.terminal_nodes.size(); ++j) {
      const int width = p.node_width[p.terminal_nodes[j]];
      std::vector<std::uint64_t> table(std::uint64_t{1} << width, 0);
      for (std::uint64_t m = 0; m < count; ++m) {
        table[eval.terminal_view(static_cast<int>(j), m)] = outcome->key[m];
      }
      code.decoders[p.instance.terminals[j]] = TruthTable(width, best_k, std::move(table));
    }
  }

  const int cap = std::max(p.total_bits, 1);
  bool verified = false;
  switch (mode) {
    case FeasibilityMode::kKey:
      verified = check_key_feasibility(p.instance, code, rate, cap).overall();
      break;
    case FeasibilityMode::kSec:
      verified = check_secure_feasibility(p.instance, code, rate, code.message_coords, cap).overall();
      result.witness_coords = code.message_coords;
      break;
    case FeasibilityMode::kKey2:
      if (auto m = find_two_stage_witness(p.instance, code, rate, cap)) {
        verified = check_two_stage_feasibility(p.instance, code, rate, *m, cap).overall();
        result.witness_coords = *m;
      }
      break;
  }
  if (!verified) throw InternalError("search witness failed its feasibility re-check");

  result.best_rate = rate;
  result.key_bits = best_k;
  result.witness = std::move(code);
  result.witness_index = best_index;
  return result;
}

}  // namespace

CodeStream::CodeStream(const NetworkInstance& instance, const CodeShape& shape)
    : plan_(make_plan(instance, shape)) {}
CodeStream::~CodeStream() = default;
CodeStream::CodeStream(CodeStream&&) noexcept = default;
CodeStream& CodeStream::operator=(CodeStream&&) noexcept = default;

std::optional<std::uint64_t> CodeStream::size() const { return plan_->size; }

NetworkCode CodeStream::at(std::uint64_t index) const {
  if (!plan_->size || index >= *plan_->size) {
    fail(ErrorCode::kInvalidArgument, "candidate " + std::to_string(index) + " is out of range");
  }
  return base_code(*plan_, index);
}

std::optional<NetworkCode> CodeStream::next() {
  if (!plan_->size || cursor_ >= *plan_->size) return std::nullopt;
  return at(cursor_++);
}

CodeStream enumerate_codes(const NetworkInstance& instance, const CodeShape& shape, std::uint64_t budget) {
  CodeStream stream(instance, shape);
  if (!stream.size() || *stream.size() > budget) {
    fail(ErrorCode::kBudgetExceeded, "candidate stream is longer than the budget of " + std::to_string(budget));
  }
  return stream;
}

SearchResult max_feasible_rate(const NetworkInstance& instance, FeasibilityMode mode,
                               const CodeShape& shape, const SearchOptions& options) {
  const auto plan = make_plan(instance, shape);
  const Range range = plan_range(*plan, options);

  int best_k = 0;
  std::optional<std::uint64_t> best_index;
  std::exception_ptr error;
  bool stop = false;
  const int threads = options.jobs > 0 ? options.jobs : omp_get_max_threads();
  const auto begin = static_cast<std::int64_t>(range.begin);
  const auto end = static_cast<std::int64_t>(range.end);

#pragma omp parallel num_threads(threads)
  {
    int local_k = 0;
    std::optional<std::uint64_t> local_index;
    std::optional<Evaluator> eval;
    try {
      eval.emplace(*plan, mode);
    } catch (...) {
#pragma omp critical(keycast_search_error)
      if (!error) error = std::current_exception();
    }
    // Chunks reach each thread in increasing order, so a thread only needs
    // keys strictly longer than its own best so far.
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = begin; i < end; ++i) {
      bool skip = false;
#pragma omp atomic read
      skip = stop;
      if (skip || !eval) continue;
      if (local_k >= eval->kmax()) continue;
      try {
        const auto idx = static_cast<std::uint64_t>(i);
        if (auto outcome = eval->best(idx, local_k)) {
          local_k = outcome->key_bits;
          local_index = idx;
        }
      } catch (...) {
#pragma omp critical(keycast_search_error)
        if (!error) error = std::current_exception();
#pragma omp atomic write
        stop = true;
      }
    }
#pragma omp critical(keycast_search_merge)
    {
      if (local_index && (local_k > best_k || (local_k == best_k && (!best_index || *local_index < *best_index)))) {
        best_k = local_k;
        best_index = local_index;
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return finish(*plan, mode, range, best_k, best_index);
}

SearchResult max_feasible_rate_serial(const NetworkInstance& instance, FeasibilityMode mode,
                                      const CodeShape& shape, const SearchOptions& options) {
  const auto plan = make_plan(instance, shape);
  const Range range = plan_range(*plan, options);
  Evaluator eval(*plan, mode);
  int best_k = 0;
  std::optional<std::uint64_t> best_index;
  for (std::uint64_t i = range.begin; i < range.end; ++i) {
    const auto outcome = eval.best(i, 0);
    const int k = outcome ? outcome->key_bits : 0;
    if (k > best_k) {
      best_k = k;
      best_index = i;
    }
  }
  return finish(*plan, mode, range, best_k, best_index);
}

}  // namespace keycast
