#include <doctest.h>

#include "check_error.hpp"
#include "generators.hpp"
#include "keycast/constructions.hpp"
#include "keycast/feasibility.hpp"
#include "keycast/transforms.hpp"

using namespace keycast;

namespace {

NetworkInstance one_message_source(NetworkInstance g) {
  for (auto& s : g.sources) s.role = s.node == g.sources[0].node ? SourceRole::kMessage : SourceRole::kRandom;
  return g;
}

// s (2 bits) -> t over a capacity-2 edge; the key is both bits.
std::pair<NetworkInstance, NetworkCode> wide_pipe() {
  NetworkInstance g;
  g.nodes = {"s", "t"};
  g.edges = {{"s_t", "s", "t", Rational(2)}};
  g.sources = {{"s", SourceRole::kMessage}};
  g.terminals = {"t"};
  NetworkCode code;
  code.source_bits = {{"s", 2}};
  code.edge_encoders["s_t"] = Gf2Matrix::identity(2);
  code.decoders["t"] = Gf2Matrix::identity(2);
  code.key = Gf2Matrix::identity(2);
  code.message_coords = {{"s", 0}, {"s", 1}};
  return {g, code};
}

}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("pre-encoding permutation examples") {
    // Key 0 has preimages {00, 11}, key 1 has {01, 10}.
    const auto pi = preencoding_permutation(Gf2Matrix::from_bitstrings({"11"}, 2), 1);
    CHECK(pi.table == std::vector<std::uint64_t>{0, 3, 1, 2});
    CHECK(pi.is_bijection());

    const auto id = preencoding_permutation(Gf2Matrix::identity(3), 3);
    CHECK(id.table == std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7});

    const auto trivial = preencoding_permutation(Gf2Matrix(0, 2), 0);
    CHECK(trivial.table == std::vector<std::uint64_t>{0, 1, 2, 3});

    CHECK_KEYCAST_ERROR(preencoding_permutation(TruthTable(2, 1, {0, 0, 0, 1}), 1), ErrorCode::kNotUniform);
    CHECK_FALSE(Permutation{2, {0, 1, 1, 3}}.is_bijection());
  }

  TEST_CASE("pre-encoding turns a balanced map into a prefix") {
    testing::Rng rng(29);
    for (int trial = 0; trial < 60; ++trial) {
      const int l = 1 + static_cast<int>(rng() % 8);
      const int k = static_cast<int>(rng() % (l + 1));
      const auto f = testing::random_balanced_map(rng, l, k);
      const auto pi = preencoding_permutation(f, k);
      REQUIRE(pi.is_bijection());
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << l); ++m) CHECK(f(pi(m)) == m >> (l - k));
    }
  }

  TEST_CASE("apply_preencoding keeps the verdict and makes the key a prefix") {
    testing::Rng rng(31);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const auto g = testing::random_desk_instance(rng, {1, SourceRole::kBoth, 0, 2, 2, 2, 0.6});
      const auto base = testing::random_table_encoders(rng, g, 1, {3});
      const auto key = testing::random_decodable_key(rng, g, base, 1);
      if (!key) continue;
      const auto code = testing::with_key_and_derived_decoders(g, base, *key);
      const auto pi = preencoding_permutation(code.key, 1);
      const auto pre = apply_preencoding(g, code, pi);
      CHECK(check_key_feasibility(g, pre, Rational(1)).overall() ==
            check_key_feasibility(g, code, Rational(1)).overall());
      for (std::uint64_t m = 0; m < 8; ++m) CHECK(pre.key.apply(m) == m >> 2);
      ++checked;
    }
    CHECK(checked > 0);

    const auto gap = gap_instance(2);
    const auto sum = sum_code(gap);
    CHECK_KEYCAST_ERROR(apply_preencoding(gap, sum, preencoding_permutation(global_key_map(gap, sum), 1)),
                        ErrorCode::kMultiSource);
  }

  TEST_CASE("zero redundant columns") {
    const auto r = zero_redundant_columns(Gf2Matrix::from_bitstrings({"101", "011"}, 3));
    CHECK(r.matrix.to_bitstrings() == std::vector<std::string>{"100", "010"});
    CHECK(r.kept == std::vector<int>{0, 1});

    const auto zeros = zero_redundant_columns(Gf2Matrix(2, 3));
    CHECK(zeros.kept.empty());

    testing::Rng rng(37);
    for (int trial = 0; trial < 150; ++trial) {
      Gf2Matrix a(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 10));
      for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a.set(i, j, rng() % 3 == 0);
      const auto z = zero_redundant_columns(a);
      CHECK(z.matrix.rank() == a.rank());
      CHECK(static_cast<int>(z.kept.size()) == a.rank());
      CHECK(z.matrix.select_columns(z.kept).rank() == a.rank());
      for (int j = 0; j < a.cols(); ++j) {
        const bool kept = std::find(z.kept.begin(), z.kept.end(), j) != z.kept.end();
        const std::vector<int> col{j};
        CHECK(z.matrix.select_columns(col) == (kept ? a.select_columns(col) : Gf2Matrix(a.rows(), 1)));
      }
    }
  }

  TEST_CASE("linear key to secure") {
    testing::Rng rng(41);
    int converted = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const auto g = testing::random_desk_instance(rng, {2, SourceRole::kBoth, 0, 2, 2, 2, 0.6});
      const auto base = testing::random_linear_encoders(rng, g, 1, {2});
      const auto keyed = testing::with_linear_key(rng, g, base, 1);
      if (!keyed) continue;
      REQUIRE(check_key_feasibility(g, *keyed, Rational(1)).overall());
      const auto secure = linear_key_to_secure(g, *keyed);
      CHECK(secure.message_coords.size() == 1);
      CHECK(check_secure_feasibility(g, secure.code, Rational(1), secure.message_coords).overall());
      ++converted;
    }
    CHECK(converted > 0);

    auto [f, fcode] = fig1b_instance_and_code();
    CHECK_KEYCAST_ERROR(linear_key_to_secure(f, fcode), ErrorCode::kNonzeroB);
    f.eavesdrop_sets.clear();
    CHECK_KEYCAST_ERROR(linear_key_to_secure(f, linear_to_general(fcode)), ErrorCode::kNotLinear);
    const auto secure = linear_key_to_secure(f, fcode);
    CHECK(secure.message_coords == std::vector<Coord>{{"s1", 0}});
    CHECK(secure.code.source_bits.at("s2") == 0);
    CHECK(check_secure_feasibility(f, secure.code, Rational(1), secure.message_coords).overall());
  }

  TEST_CASE("reduce and strip") {
    const auto g = one_message_source(gap_instance(2));
    const auto reduced = reduce_secure_to_key(g, Rational(1, 2));
    CHECK(reduced.terminals.back() == "d_key");
    CHECK(reduced.edges.back().tail == "s1");
    CHECK(reduced.edges.back().capacity == Rational(1, 2));
    CHECK(reduced.sources.size() == g.sources.size());
    CHECK(reduced.eavesdrop_sets.size() == g.eavesdrop_sets.size());
    const auto back = strip_key_terminal(reduced);
    CHECK(back.nodes == g.nodes);
    CHECK(back.terminals == g.terminals);
    CHECK(back.edges.size() == g.edges.size());

    CHECK_KEYCAST_ERROR(reduce_secure_to_key(gap_instance(2), Rational(1)), ErrorCode::kMultiMessageSource);
    CHECK_KEYCAST_ERROR(reduce_secure_to_key(g, Rational(0)), ErrorCode::kBadRate);
    CHECK_KEYCAST_ERROR(reduce_secure_to_key(reduced, Rational(1)), ErrorCode::kInvalidInstance);
    CHECK_KEYCAST_ERROR(strip_key_terminal(g), ErrorCode::kInvalidInstance);
  }

  TEST_CASE("lift and restrict round trip") {
    testing::Rng rng(43);
    int trips = 0;
    for (int trial = 0; trial < 40; ++trial) {
      auto g = testing::random_desk_instance(rng, {1, SourceRole::kMessage, 1, 2, 2, 2, 0.6});
      const auto base = testing::random_linear_encoders(rng, g, 1, {2, 1});
      const auto secure = testing::with_linear_message(rng, g, base, 1);
      if (!secure) continue;
      g = testing::with_secret_views(rng, g, secure->code, 3, true);
      REQUIRE(check_secure_feasibility(g, secure->code, Rational(1), secure->message_coords).overall());

      const auto reduced = reduce_secure_to_key(g, Rational(1));
      const auto lifted = lift_secure_code(g, secure->code, secure->message_coords, Rational(1));
      CHECK(check_key_feasibility(reduced, lifted, Rational(1)).overall());

      const auto back = restrict_key_code_to_secure(reduced, lifted);
      CHECK(check_secure_feasibility(g, back.code, Rational(1), back.message_coords).overall());
      ++trips;
    }
    CHECK(trips > 0);
  }

  TEST_CASE("lift and restrict errors") {
    const auto [g, code] = wide_pipe();
    CHECK(check_secure_feasibility(g, code, Rational(2), code.message_coords).overall());
    CHECK_KEYCAST_ERROR(lift_secure_code(g, code, code.message_coords, Rational(1)), ErrorCode::kCapacityExceeded);
    const std::vector<Coord> one{{"s", 0}};
    CHECK_KEYCAST_ERROR(lift_secure_code(g, code, one, Rational(2)), ErrorCode::kBadCoords);
    const auto lifted = lift_secure_code(g, code, code.message_coords, Rational(2));
    CHECK(check_key_feasibility(reduce_secure_to_key(g, Rational(2)), lifted, Rational(2)).overall());

    // The key on the reduced gap instance is the parity of every source.
    const auto gap = one_message_source(gap_instance(2));
    const auto reduced = reduce_secure_to_key(gap, Rational(1));
    auto parity = sum_code(gap);
    parity.edge_encoders["e_key"] = Gf2Matrix::identity(1);
    parity.decoders["d_key"] = Gf2Matrix::identity(1);
    CHECK_KEYCAST_ERROR(restrict_key_code_to_secure(reduced, parity), ErrorCode::kKeyNotSourceFunction);
  }
}
