#include <doctest.h>

#include <array>
#include <cmath>

#include "check_error.hpp"
#include "keycast/analysis.hpp"
#include "keycast/constructions.hpp"

using namespace keycast;

namespace {

// One source s with ell bits, no edges; the key is `key`.
std::pair<NetworkInstance, NetworkCode> bare_source(int ell, KeyMap key) {
  NetworkInstance g;
  g.nodes = {"s"};
  g.sources = {{"s", SourceRole::kBoth}};
  NetworkCode code;
  code.source_bits = {{"s", ell}};
  code.key = std::move(key);
  return {g, code};
}

CountTable table_of(std::map<CountTable::Tuple, std::uint64_t> counts, std::vector<int> widths) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < widths.size(); ++i) vars.push_back(Variable::source_bit("x", static_cast<int>(i)));
  std::uint64_t total = 0;
  for (const auto& [t, c] : counts) total += c;
  return CountTable(vars, widths, total, counts);
}

constexpr std::array<int, 1> kFirst{0};
constexpr std::array<int, 1> kSecond{1};

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("joint counts examples") {
    auto [g, xor_code] = bare_source(2, Gf2Matrix::from_bitstrings({"11"}, 2));
    const auto key = joint_counts(g, xor_code, {Variable::key()});
    CHECK(key.total() == 4);
    CHECK(key.counts() == std::map<CountTable::Tuple, std::uint64_t>{{{0}, 2}, {{1}, 2}});

    auto [g1, id_code] = bare_source(1, Gf2Matrix::identity(1));
    const auto pair = joint_counts(g1, id_code, {Variable::source_bit("s", 0), Variable::key()});
    CHECK(pair.counts() == std::map<CountTable::Tuple, std::uint64_t>{{{0, 0}, 1}, {{1, 1}, 1}});

    const auto gap = gap_instance(2);
    const auto sum = joint_counts(gap, sum_code(gap), {Variable::key(), Variable::edge("ubar1_d1")});
    REQUIRE(sum.counts().size() == 4);
    for (const auto& [t, c] : sum.counts()) CHECK(c == 2);

    CHECK_KEYCAST_ERROR(joint_counts(gap, sum_code(gap), {Variable::key()}, 2), ErrorCode::kSpaceLimit);
  }

  TEST_CASE("independence") {
    // K = b1 xor b2 against b1: one-time pad.
    auto [g, code] = bare_source(2, Gf2Matrix::from_bitstrings({"11"}, 2));
    const auto t = joint_counts(g, code, {Variable::key(), Variable::source_bit("s", 0)});
    CHECK(is_independent(t, kFirst, kSecond));
    CHECK(mutual_information_bits(t, kFirst, kSecond) == doctest::Approx(0.0));

    auto [g1, id] = bare_source(1, Gf2Matrix::identity(1));
    const auto same = joint_counts(g1, id, {Variable::key(), Variable::source_bit("s", 0)});
    CHECK_FALSE(is_independent(same, kFirst, kSecond));
    CHECK(mutual_information_bits(same, kFirst, kSecond) == doctest::Approx(1.0));

    const auto gap = gap_instance(2);
    const auto view = joint_counts(gap, sum_code(gap),
                                   {Variable::key(), Variable::edge("s2_ubar1"), Variable::edge("s3_ubar1")});
    const std::array<int, 2> ubar_view{1, 2};
    CHECK(is_independent(view, kFirst, ubar_view));
  }

  TEST_CASE("determination") {
    auto [g, code] = bare_source(2, Gf2Matrix::from_bitstrings({"11"}, 2));
    const auto t = joint_counts(g, code, {Variable::source_bit("s", 0), Variable::source_bit("s", 1), Variable::key()});
    const std::array<int, 2> both{0, 1};
    const std::array<int, 1> key{2};
    CHECK(is_determined(t, both, key));
    CHECK_FALSE(is_determined(t, kFirst, kSecond));
    CHECK(conditional_entropy_bits(t, kSecond, kFirst) == doctest::Approx(1.0));

    const auto gap = gap_instance(2);
    const auto d1 = joint_counts(gap, sum_code(gap), {Variable::terminal_view("d1"), Variable::key()});
    CHECK(is_determined(d1, kFirst, kSecond));
  }

  TEST_CASE("uniformity and entropy") {
    auto [g, code] = bare_source(2, Gf2Matrix::from_bitstrings({"11"}, 2));
    CHECK(is_uniform(joint_counts(g, code, {Variable::key()}), 0));

    auto [g_and, and_code] = bare_source(2, TruthTable(2, 1, {0, 0, 0, 1}));
    CHECK_FALSE(is_uniform(joint_counts(g_and, and_code, {Variable::key()}), 0));

    auto [g0, empty] = bare_source(2, Gf2Matrix(0, 2));
    const auto zero = joint_counts(g0, empty, {Variable::key()});
    CHECK(is_uniform(zero, 0));
    CHECK(entropy_bits(zero, kFirst) == 0.0);

    auto [g3, id3] = bare_source(3, Gf2Matrix::identity(3));
    CHECK(entropy_bits(joint_counts(g3, id3, {Variable::key()}), kFirst) == doctest::Approx(3.0));
    CHECK(entropy_bits(joint_counts(g3, id3, {Variable::source_bits("s")}), kFirst) == doctest::Approx(3.0));

    // (b1, b1 xor b2) has zero mutual information.
    const auto pair = table_of({{{0, 0}, 1}, {{0, 1}, 1}, {{1, 1}, 1}, {{1, 0}, 1}}, {1, 1});
    CHECK(mutual_information_bits(pair, kFirst, kSecond) == 0.0);
  }

  TEST_CASE("count table invariants") {
    CHECK_THROWS(CountTable({Variable::key()}, {1}, 4, {{{0}, 1}}));
    CHECK_THROWS(CountTable({Variable::key()}, {1}, 2, {{{2}, 2}}));
    const auto t = table_of({{{0, 1}, 3}, {{1, 1}, 1}}, {1, 1});
    const std::array<int, 1> second{1};
    const auto m = t.marginal(second);
    CHECK(m.counts() == std::map<CountTable::Tuple, std::uint64_t>{{{1}, 4}});
  }

  TEST_CASE("first assignment with a value") {
    const auto gap = gap_instance(2);
    const auto m = first_assignment_with(gap, sum_code(gap), {Variable::key()}, {1});
    REQUIRE(m.has_value());
    CHECK(*m == 1);
  }
}
