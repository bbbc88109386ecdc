#include "keycast/json_io.hpp"

#include <cmath>
#include <istream>

#include "keycast/error.hpp"

namespace keycast {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

void expect_format(const Json& j, const char* format) {
  if (!j.is_object()) fail(ErrorCode::kParse, std::string("expected a ") + format + " object");
  if (j.contains("format") && j.at("format") != format) {
    fail(ErrorCode::kParse, "format is " + j.at("format").dump() + ", expected \"" + format + "\"");
  }
}

Json function_to_json(const EdgeFunction& fn) {
  if (const Gf2Matrix* m = fn.as_matrix()) {
    return Json{{"type", "gf2"}, {"rows", m->to_bitstrings()}, {"cols", m->cols()}};
  }
  const TruthTable& t = *fn.as_table();
  return Json{{"type", "table"}, {"in_bits", t.in_bits()}, {"out_bits", t.out_bits()}, {"table", t.table()}};
}

EdgeFunction function_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gf2") {
    const auto rows = j.at("rows").get<std::vector<std::string>>();
    int cols = 0;
    if (j.contains("cols")) {
      cols = j.at("cols").get<int>();
    } else if (!rows.empty()) {
      cols = static_cast<int>(rows.front().size());
    }
    return Gf2Matrix::from_bitstrings(rows, cols);
  }
  if (type == "table") {
    auto table = j.at("table").get<std::vector<std::uint64_t>>();
    int in_bits = 0;
    if (j.contains("in_bits")) {
      in_bits = j.at("in_bits").get<int>();
    } else {
      while ((std::size_t{1} << in_bits) < table.size()) ++in_bits;
    }
    return TruthTable(in_bits, j.at("out_bits").get<int>(), std::move(table));
  }
  fail(ErrorCode::kParse, "function type must be table or gf2, got '" + type + "'");
}

Json verdict_to_json(const Verdict& v, int total_bits) {
  Json j{{"applicable", v.applicable}, {"ok", v.ok}};
  if (v.counterexample) {
    const Counterexample& c = *v.counterexample;
    Json cj{{"reason", c.reason}};
    if (c.assignment) cj["assignment"] = hex_assignment(*c.assignment, total_bits);
    if (c.eavesdrop_set) cj["eavesdrop_set"] = *c.eavesdrop_set;
    if (c.terminal) cj["terminal"] = *c.terminal;
    j["counterexample"] = std::move(cj);
  }
  return j;
}

// Advisory floats, rounded so that reports stay byte-stable.
double tidy(double x) {
  const double r = std::round(x * 1e12) / 1e12;
  return r == 0 ? 0.0 : r;
}

Json coords_to_json(const std::vector<Coord>& coords) {
  Json out = Json::array();
  for (const Coord& c : coords) out.push_back(c.source + ":" + std::to_string(c.bit));
  return out;
}

}  // namespace

std::string hex_assignment(std::uint64_t m, int bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const int digits = std::max(1, (bits + 3) / 4);
  std::string out(digits, '0');
  for (int i = digits - 1; i >= 0 && m; --i, m >>= 4) out[i] = kDigits[m & 0xf];
  return "0x" + out;
}

Json rational_to_json(const Rational& r) { return Json{{"num", r.numerator()}, {"den", r.denominator()}}; }

Rational rational_from_json(const Json& j) {
  return guarded("rational", [&] {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    const auto den = j.at("den").get<std::int64_t>();
    if (den <= 0) fail(ErrorCode::kParse, "denominator must be positive");
    return Rational(j.at("num").get<std::int64_t>(), den);
  });
}

Json instance_to_json(const NetworkInstance& instance) {
  Json edges = Json::array();
  for (const Edge& e : instance.edges) {
    edges.push_back({{"id", e.id}, {"tail", e.tail}, {"head", e.head}, {"capacity", rational_to_json(e.capacity)}});
  }
  Json sources = Json::array();
  for (const SourceDecl& s : instance.sources) sources.push_back({{"node", s.node}, {"role", to_string(s.role)}});
  Json sets = Json::array();
  for (const EavesdropSet& b : instance.eavesdrop_sets) {
    sets.push_back({{"edges", b.edges}, {"observed_sources", b.observed_sources}});
  }
  return Json{{"format", kInstanceFormat},
              {"nodes", instance.nodes},
              {"edges", std::move(edges)},
              {"sources", std::move(sources)},
              {"terminals", instance.terminals},
              {"eavesdrop_sets", std::move(sets)}};
}

NetworkInstance instance_from_json(const Json& j) {
  expect_format(j, kInstanceFormat);
  return guarded("instance", [&] {
    NetworkInstance g;
    g.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const Json& e : j.at("edges")) {
      g.edges.push_back({e.at("id").get<std::string>(), e.at("tail").get<std::string>(),
                         e.at("head").get<std::string>(), rational_from_json(e.at("capacity"))});
    }
    for (const Json& s : j.at("sources")) {
      SourceDecl decl{s.at("node").get<std::string>(), SourceRole::kBoth};
      if (s.contains("role")) decl.role = parse_source_role(s.at("role").get<std::string>());
      g.sources.push_back(std::move(decl));
    }
    g.terminals = j.at("terminals").get<std::vector<std::string>>();
    if (j.contains("eavesdrop_sets")) {
      for (const Json& b : j.at("eavesdrop_sets")) {
        EavesdropSet set;
        if (b.contains("edges")) set.edges = b.at("edges").get<std::vector<std::string>>();
        if (b.contains("observed_sources")) {
          set.observed_sources = b.at("observed_sources").get<std::vector<std::string>>();
        }
        g.eavesdrop_sets.push_back(std::move(set));
      }
    }
    return g;
  });
}

Json code_to_json(const NetworkCode& code) {
  Json encoders = Json::object();
  for (const auto& [id, fn] : code.edge_encoders) encoders[id] = function_to_json(fn);
  Json decoders = Json::object();
  for (const auto& [d, fn] : code.decoders) decoders[d] = function_to_json(fn);
  Json j{{"format", kCodeFormat},
         {"blocklength", code.blocklength},
         {"source_bits", code.source_bits},
         {"edge_encoders", std::move(encoders)},
         {"decoders", std::move(decoders)},
         {"key", function_to_json(code.key)}};
  if (!code.message_coords.empty()) j["message_coords"] = coords_to_json(code.message_coords);
  return j;
}

NetworkCode code_from_json(const Json& j) {
  expect_format(j, kCodeFormat);
  return guarded("code", [&] {
    NetworkCode code;
    code.blocklength = j.at("blocklength").get<int>();
    if (code.blocklength < 1) fail(ErrorCode::kParse, "blocklength must be positive");
    code.source_bits = j.at("source_bits").get<std::map<std::string, int>>();
    for (const auto& [id, fn] : j.at("edge_encoders").items()) code.edge_encoders[id] = function_from_json(fn);
    for (const auto& [d, fn] : j.at("decoders").items()) code.decoders[d] = function_from_json(fn);
    code.key = function_from_json(j.at("key"));
    if (j.contains("message_coords")) {
      const Json& mc = j.at("message_coords");
      if (mc.is_string()) {
        code.message_coords = parse_coords(mc.get<std::string>());
      } else {
        std::string text;
        for (const Json& c : mc) text += (text.empty() ? "" : ",") + c.get<std::string>();
        code.message_coords = parse_coords(text);
      }
    }
    return code;
  });
}

Json validation_to_json(const ValidationReport& report) {
  auto list = [](const std::vector<Violation>& items) {
    Json out = Json::array();
    for (const Violation& v : items) out.push_back({{"code", v.code}, {"message", v.message}});
    return out;
  };
  return Json{{"format", "keycast-validation/1"},
              {"ok", report.ok()},
              {"violations", list(report.violations)},
              {"notes", list(report.notes)}};
}

Json report_to_json(const FeasibilityReport& report, const NetworkInstance& instance) {
  Json leakage = Json::array();
  for (double x : report.entropies.leakage) leakage.push_back(tidy(x));
  Json equivocation = Json::object();
  for (std::size_t j = 0; j < report.entropies.equivocation.size() && j < instance.terminals.size(); ++j) {
    equivocation[instance.terminals[j]] = tidy(report.entropies.equivocation[j]);
  }
  Json verdicts{{"rate_ok", verdict_to_json(report.rate_ok, report.total_bits)},
                {"decoding_ok", verdict_to_json(report.decoding_ok, report.total_bits)},
                {"secrecy_ok", verdict_to_json(report.secrecy_ok, report.total_bits)},
                {"witness_ok", verdict_to_json(report.witness_ok, report.total_bits)}};
  return Json{{"format", kReportFormat},
              {"mode", to_string(report.mode)},
              {"rate", rational_to_json(report.rate)},
              {"blocklength", report.blocklength},
              {"key_bits", report.key_bits},
              {"total_bits", report.total_bits},
              {"coords", coords_to_json(report.coords)},
              {"verdicts", std::move(verdicts)},
              {"overall", report.overall()},
              {"entropies",
               {{"key", tidy(report.entropies.key)},
                {"leakage", std::move(leakage)},
                {"equivocation", std::move(equivocation)}}}};
}

Json search_to_json(const SearchResult& result, const CodeShape& shape) {
  Json j{{"format", kSearchFormat},
         {"mode", to_string(result.mode)},
         {"shape", format_shape(shape)},
         {"best_rate", rational_to_json(result.best_rate)},
         {"key_bits", result.key_bits},
         {"candidates_examined", result.candidates_examined},
         {"total_candidates", result.total_candidates},
         {"next_cursor", result.next_cursor},
         {"exhaustive", result.exhaustive},
         {"witness_coords", coords_to_json(result.witness_coords)},
         {"witness_index", nullptr},
         {"witness", nullptr}};
  if (result.witness_index) j["witness_index"] = *result.witness_index;
  if (result.witness) j["witness"] = code_to_json(*result.witness);
  return j;
}

Json permutation_to_json(const Permutation& pi) { return Json(pi.table); }

Permutation permutation_from_json(const Json& j) {
  return guarded("permutation", [&] {
    Permutation pi;
    pi.table = j.get<std::vector<std::uint64_t>>();
    while ((std::size_t{1} << pi.bits) < pi.table.size()) ++pi.bits;
    if (!pi.is_bijection()) fail(ErrorCode::kParse, "permutation is not a bijection on 2^l values");
    return pi;
  });
}

Json parse_json(std::istream& in) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace keycast
