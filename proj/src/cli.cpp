#include "keycast/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "keycast/constructions.hpp"
#include "keycast/error.hpp"
#include "keycast/evaluate.hpp"
#include "keycast/feasibility.hpp"
#include "keycast/json_io.hpp"
#include "keycast/search.hpp"
#include "keycast/transforms.hpp"

namespace keycast {

namespace {

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

Json read_json(const Streams& io, const std::string& path) {
  if (path == "-") return parse_json(io.in);
  std::ifstream file(path);
  if (!file) fail(ErrorCode::kInvalidArgument, "cannot open '" + path + "'");
  return parse_json(file);
}

void write_text(const Streams& io, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    io.out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) fail(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  file << text;
}

void emit(const Streams& io, const std::string& path, const Json& j) { write_text(io, path, dump_json(j)); }

std::optional<std::uint64_t> env_number(const char* name) {
  const char* text = std::getenv(name);
  if (!text || !*text) return std::nullopt;
  std::uint64_t value = 0;
  const std::string_view s(text);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::kInvalidArgument, std::string(name) + " must be a nonnegative integer");
  }
  return value;
}

int enumeration_cap(int fallback) {
  if (auto cap = env_number("KEYCAST_ENUM_CAP")) return static_cast<int>(std::min<std::uint64_t>(*cap, 63));
  return fallback;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

EavesdropMode eavesdrop_mode(bool node_all) {
  return node_all ? EavesdropMode::kNodeAll : EavesdropMode::kEdgeSets;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  const Streams io{in, out, err};
  CLI::App app{"keycast: key dissemination and secure multicast over coded networks", "keycast"};
  app.require_subcommand(1);

  std::string out_path;
  std::string instance_path = "-";
  std::string code_path;
  int alpha = 2;
  bool node_all = false;

  // gen
  auto* gen = app.add_subcommand("gen", "Build a canonical instance or code");
  gen->require_subcommand(1);
  auto* gen_gap = gen->add_subcommand("gap", "Gap instance with r = alpha + 1 sources");
  auto* gen_fig1b = gen->add_subcommand("fig1b", "Two sources into one terminal, source eavesdroppers");
  auto* gen_fig1b_code = gen->add_subcommand("fig1b-code", "Forwarding code with key b1 xor b2 for fig1b");
  auto* gen_sum = gen->add_subcommand("sum-code", "Sum-of-sources code for the gap instance");
  auto* gen_two = gen->add_subcommand("two-stage-code", "n = 2 two-stage code for the gap instance");
  std::string fig1b_code_out;
  for (CLI::App* sub : {gen_gap, gen_sum, gen_two}) {
    sub->add_option("--alpha", alpha, "Gap parameter, r = alpha + 1")->required();
    sub->add_flag("--node-all", node_all, "Also let the eavesdropper observe each source");
  }
  gen_fig1b->add_option("--code-out", fig1b_code_out, "Also write the fig1b code here");
  for (CLI::App* sub : {gen_gap, gen_fig1b, gen_fig1b_code, gen_sum, gen_two}) {
    sub->add_option("-o,--out", out_path, "Output file (default stdout)");
  }

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check instance invariants");
  validate_cmd->add_option("-i,--instance", instance_path, "Instance file, - for stdin");
  validate_cmd->add_option("-o,--out", out_path, "Output file");

  // mincut
  auto* mincut = app.add_subcommand("mincut", "Exact min cut from a source set to a sink");
  std::string cut_sources;
  std::string cut_sink;
  mincut->add_option("-i,--instance", instance_path, "Instance file, - for stdin");
  mincut->add_option("--sources", cut_sources, "Comma-separated source set")->required();
  mincut->add_option("--sink", cut_sink, "Sink node")->required();
  mincut->add_option("-o,--out", out_path, "Output file");

  // check
  auto* check = app.add_subcommand("check", "Verify a code against a feasibility definition");
  std::string mode_text = "key";
  std::string rate_text;
  std::string coords_text;
  std::string witness_text;
  check->add_option("-i,--instance", instance_path, "Instance file, - for stdin");
  check->add_option("-c,--code", code_path, "Code file")->required();
  check->add_option("--mode", mode_text, "key, sec, or key2");
  check->add_option("--rate", rate_text, "Rate as P/Q")->required();
  check->add_option("--coords", coords_text, "Message coords for sec, e.g. s1:0,s2:0");
  check->add_option("--witness", witness_text, "Two-stage collection M for key2");
  check->add_option("-o,--out", out_path, "Output file");

  // search
  auto* search = app.add_subcommand("search", "Exhaustive fixed-blocklength search");
  std::string shape_text;
  std::optional<std::uint64_t> budget;
  std::uint64_t cursor = 0;
  std::optional<std::uint64_t> limit;
  int jobs = 0;
  bool serial = false;
  std::string witness_out;
  search->add_option("-i,--instance", instance_path, "Instance file, - for stdin");
  search->add_option("--mode", mode_text, "key, sec, or key2");
  search->add_option("--shape", shape_text, "n=1,l=1,family=tables|linear,sources=forward|free,kmax=K");
  search->add_option("--budget", budget, "Maximum encoder candidates to examine");
  search->add_option("--cursor", cursor, "First candidate index");
  search->add_option("--limit", limit, "Candidates to examine from the cursor");
  search->add_option("--jobs", jobs, "Worker threads (0: default)");
  search->add_flag("--serial", serial, "Use the single-threaded reference search");
  search->add_option("--witness-out", witness_out, "Write the witness code here");
  search->add_option("-o,--out", out_path, "Output file");

  // transform
  auto* transform = app.add_subcommand("transform", "Constructive code and instance transforms");
  transform->require_subcommand(1);
  auto* preencode = transform->add_subcommand("preencode", "Pre-encode the only source so the key is a prefix");
  auto* zero_columns = transform->add_subcommand("zero-columns", "Zero redundant key columns");
  auto* reduce = transform->add_subcommand("reduce", "Secure instance to key instance with d_key");
  auto* lift = transform->add_subcommand("lift", "Secure code to a key code on the reduced instance");
  auto* restrict_cmd = transform->add_subcommand("restrict", "Key code on a reduced instance to a secure code");
  std::string perm_out;
  std::string matrix_text;
  std::string instance_out;
  preencode->add_option("-i,--instance", instance_path, "Instance file, - for stdin");
  preencode->add_option("-c,--code", code_path, "Code file")->required();
  preencode->add_option("--perm-out", perm_out, "Write the permutation here");
  zero_columns->add_option("--matrix", matrix_text, "Rows as comma-separated bitstrings");
  zero_columns->add_option("-i,--instance", instance_path, "Instance file (B empty), - for stdin");
  zero_columns->add_option("-c,--code", code_path, "Linear key code");
  reduce->add_option("-i,--instance", instance_path, "Secure instance, - for stdin");
  reduce->add_option("--rate", rate_text, "Capacity of the edge to d_key, P/Q")->required();
  lift->add_option("-i,--instance", instance_path, "Secure instance, - for stdin");
  lift->add_option("-c,--code", code_path, "Secure code")->required();
  lift->add_option("--rate", rate_text, "Capacity of the edge to d_key, P/Q")->required();
  lift->add_option("--coords", coords_text, "Message coords (default: from the code)");
  restrict_cmd->add_option("-i,--instance", instance_path, "Reduced instance, - for stdin");
  restrict_cmd->add_option("-c,--code", code_path, "Key code on the reduced instance")->required();
  restrict_cmd->add_option("--instance-out", instance_out, "Write the original instance here");
  for (CLI::App* sub : {preencode, zero_columns, reduce, lift, restrict_cmd}) {
    sub->add_option("-o,--out", out_path, "Output file");
  }

  // report
  auto* report = app.add_subcommand("report", "Advisory entropies of a code");
  report->add_option("-i,--instance", instance_path, "Instance file, - for stdin");
  report->add_option("-c,--code", code_path, "Code file")->required();
  report->add_option("-o,--out", out_path, "Output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (gen_gap->parsed()) emit(io, out_path, instance_to_json(gap_instance(alpha, eavesdrop_mode(node_all))));
      if (gen_fig1b->parsed() || gen_fig1b_code->parsed()) {
        const auto [instance, code] = fig1b_instance_and_code();
        if (gen_fig1b->parsed()) {
          emit(io, out_path, instance_to_json(instance));
          if (!fig1b_code_out.empty()) emit(io, fig1b_code_out, code_to_json(code));
        } else {
          emit(io, out_path, code_to_json(code));
        }
      }
      if (gen_sum->parsed()) emit(io, out_path, code_to_json(sum_code(gap_instance(alpha, eavesdrop_mode(node_all)))));
      if (gen_two->parsed()) {
        emit(io, out_path, code_to_json(two_stage_gap_code(gap_instance(alpha, eavesdrop_mode(node_all)))));
      }
      return kExitOk;
    }

    if (validate_cmd->parsed()) {
      const ValidationReport r = validate(instance_from_json(read_json(io, instance_path)));
      emit(io, out_path, validation_to_json(r));
      return r.ok() ? kExitOk : kExitFail;
    }

    if (mincut->parsed()) {
      const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
      require_valid(instance);
      const auto sources = split_list(cut_sources);
      const Rational value = min_cut(instance, sources, cut_sink);
      emit(io, out_path,
           Json{{"format", "keycast-mincut/1"},
                {"sources", sources},
                {"sink", cut_sink},
                {"value", format_rational(value)}});
      return kExitOk;
    }

    if (check->parsed()) {
      const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
      const NetworkCode code = code_from_json(read_json(io, code_path));
      const FeasibilityMode mode = parse_mode(mode_text);
      const Rational rate = parse_rational(rate_text);
      const int cap = enumeration_cap(kDefaultEnumerationCap);
      FeasibilityReport r;
      if (mode == FeasibilityMode::kKey) {
        r = check_key_feasibility(instance, code, rate, cap);
      } else if (mode == FeasibilityMode::kSec) {
        const auto coords = coords_text.empty() ? code.message_coords : parse_coords(coords_text);
        r = check_secure_feasibility(instance, code, rate, coords, cap);
      } else {
        std::vector<Coord> witness;
        if (!witness_text.empty()) {
          witness = parse_coords(witness_text);
        } else if (auto found = find_two_stage_witness(instance, code, rate,
                                                       enumeration_cap(kDefaultWitnessSearchCap))) {
          witness = *found;
        }
        r = check_two_stage_feasibility(instance, code, rate, witness, cap);
      }
      emit(io, out_path, report_to_json(r, instance));
      return r.overall() ? kExitOk : kExitFail;
    }

    if (search->parsed()) {
      const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
      const FeasibilityMode mode = parse_mode(mode_text);
      const CodeShape shape = parse_shape(shape_text);
      SearchOptions options;
      options.budget = budget ? *budget : env_number("KEYCAST_BUDGET").value_or(kDefaultSearchBudget);
      options.enumeration_cap = enumeration_cap(kDefaultSearchCap);
      options.cursor = cursor;
      options.limit = limit;
      options.jobs = jobs;
      const SearchResult result = serial ? max_feasible_rate_serial(instance, mode, shape, options)
                                         : max_feasible_rate(instance, mode, shape, options);
      if (!witness_out.empty() && result.witness) emit(io, witness_out, code_to_json(*result.witness));
      emit(io, out_path, search_to_json(result, shape));
      return kExitOk;
    }

    if (transform->parsed()) {
      if (preencode->parsed()) {
        const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
        const NetworkCode code = code_from_json(read_json(io, code_path));
        if (instance.sources.size() != 1) {
          fail(ErrorCode::kMultiSource, "pre-encoding needs exactly one source");
        }
        const TruthTable f = global_key_map(instance, code, enumeration_cap(kDefaultEnumerationCap));
        const Permutation pi = preencoding_permutation(f, f.out_bits());
        if (!perm_out.empty()) emit(io, perm_out, permutation_to_json(pi));
        emit(io, out_path, code_to_json(apply_preencoding(instance, code, pi)));
        return kExitOk;
      }
      if (zero_columns->parsed()) {
        if (!matrix_text.empty()) {
          const auto rows = split_list(matrix_text);
          const int cols = rows.empty() ? 0 : static_cast<int>(rows.front().size());
          const ColumnReduction r = zero_redundant_columns(Gf2Matrix::from_bitstrings(rows, cols));
          emit(io, out_path, Json{{"matrix", r.matrix.to_bitstrings()}, {"kept", r.kept}});
          return kExitOk;
        }
        if (code_path.empty()) fail(ErrorCode::kInvalidArgument, "zero-columns needs --matrix or -c CODE");
        const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
        const NetworkCode code = code_from_json(read_json(io, code_path));
        emit(io, out_path, code_to_json(linear_key_to_secure(instance, code).code));
        return kExitOk;
      }
      if (reduce->parsed()) {
        const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
        emit(io, out_path, instance_to_json(reduce_secure_to_key(instance, parse_rational(rate_text))));
        return kExitOk;
      }
      if (lift->parsed()) {
        const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
        const NetworkCode code = code_from_json(read_json(io, code_path));
        const auto coords = coords_text.empty() ? code.message_coords : parse_coords(coords_text);
        emit(io, out_path, code_to_json(lift_secure_code(instance, code, coords, parse_rational(rate_text))));
        return kExitOk;
      }
      if (restrict_cmd->parsed()) {
        const NetworkInstance reduced = instance_from_json(read_json(io, instance_path));
        const NetworkCode code = code_from_json(read_json(io, code_path));
        const SecureCode secure = restrict_key_code_to_secure(reduced, code);
        if (!instance_out.empty()) emit(io, instance_out, instance_to_json(strip_key_terminal(reduced)));
        emit(io, out_path, code_to_json(secure.code));
        return kExitOk;
      }
    }

    if (report->parsed()) {
      const NetworkInstance instance = instance_from_json(read_json(io, instance_path));
      const NetworkCode code = code_from_json(read_json(io, code_path));
      const Rational rate(code.key.out_bits(), code.blocklength);
      const FeasibilityReport r =
          check_key_feasibility(instance, code, rate, enumeration_cap(kDefaultEnumerationCap));
      Json j = report_to_json(r, instance)["entropies"];
      j["format"] = "keycast-entropies/1";
      j["key_bits"] = r.key_bits;
      j["total_bits"] = r.total_bits;
      emit(io, out_path, j);
      return kExitOk;
    }
  } catch (const KeycastError& e) {
    err << "keycast: " << e.what() << "\n";
    return is_resource_limit(e.code()) ? kExitResource : kExitUsage;
  } catch (const InternalError& e) {
    err << "keycast: internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "keycast: " << e.what() << "\n";
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace keycast
