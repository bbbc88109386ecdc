#include <doctest.h>

#include "check_error.hpp"
#include "generators.hpp"
#include "keycast/constructions.hpp"
#include "keycast/evaluate.hpp"

using namespace keycast;

TEST_SUITE("code") {
  TEST_CASE("fig1b trace") {
    const auto [g, code] = fig1b_instance_and_code();
    const auto trace = evaluate(g, code, 0b11);
    CHECK(trace.edge_messages.at("s1_d") == 1);
    CHECK(trace.edge_messages.at("s2_d") == 1);
    CHECK(trace.decoder_outputs.at("d") == 0);
    CHECK(trace.key_value == 0);
  }

  TEST_CASE("sum code traces") {
    const auto g = gap_instance(2);
    const auto code = sum_code(g);
    const auto zero = evaluate(g, code, 0);
    for (const auto& [id, value] : zero.edge_messages) CHECK(value == 0);
    CHECK(zero.key_value == 0);

    // (b1, b2, b3) = (1, 0, 1)
    const auto t = evaluate(g, code, 0b101);
    CHECK(t.edge_messages.at("u1_d1") == 1);
    CHECK(t.edge_messages.at("u2_d2") == 0);
    CHECK(t.edge_messages.at("u3_d3") == 1);
    CHECK(t.edge_messages.at("ubar1_d1") == 1);
    CHECK(t.key_value == 0);
    CHECK(evaluate(g, code, 0b111).key_value == 1);
  }

  TEST_CASE("global key map") {
    const auto [g, code] = fig1b_instance_and_code();
    CHECK(global_key_map(g, code).table() == std::vector<std::uint64_t>{0, 1, 1, 0});

    NetworkInstance single;
    single.nodes = {"s"};
    single.sources = {{"s", SourceRole::kBoth}};
    NetworkCode id;
    id.source_bits = {{"s", 1}};
    id.key = Gf2Matrix::identity(1);
    CHECK(global_key_map(single, id).table() == std::vector<std::uint64_t>{0, 1});

    const auto gap = gap_instance(2);
    CHECK(global_key_map(gap, sum_code(gap)).table() == std::vector<std::uint64_t>{0, 1, 1, 0, 1, 0, 0, 1});
    CHECK_KEYCAST_ERROR(global_key_map(gap, sum_code(gap), 2), ErrorCode::kSpaceLimit);
  }

  TEST_CASE("linear to general") {
    CHECK(EdgeFunction(Gf2Matrix::from_bitstrings({"10"}, 2)).to_table().table() ==
          std::vector<std::uint64_t>{0, 0, 1, 1});
    CHECK(EdgeFunction(Gf2Matrix::identity(2)).to_table().table() == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(EdgeFunction(Gf2Matrix(1, 2)).to_table().table() == std::vector<std::uint64_t>{0, 0, 0, 0});

    testing::Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = testing::random_desk_instance(rng, {2, SourceRole::kBoth, 0, 2, 2, 2, 0.5});
      const auto code = testing::random_linear_encoders(rng, g, 1, {2, 1});
      const auto general = linear_to_general(code);
      CHECK(is_linear(code));
      CHECK_FALSE(is_linear(general));
      for (std::uint64_t m = 0; m < 8; ++m) {
        const auto a = evaluate(g, code, m);
        const auto b = evaluate(g, general, m);
        CHECK(a.edge_messages == b.edge_messages);
        CHECK(a.decoder_outputs == b.decoder_outputs);
        CHECK(a.key_value == b.key_value);
      }
    }
  }

  TEST_CASE("linear codes have linear traces") {
    testing::Rng rng(19);
    for (int trial = 0; trial < 30; ++trial) {
      const auto g = testing::random_desk_instance(rng, {2, SourceRole::kBoth, 0, 3, 2, 2, 0.5});
      const auto code = testing::random_linear_encoders(rng, g, 1, {2, 2});
      for (std::uint64_t m1 = 0; m1 < 16; ++m1) {
        const std::uint64_t m2 = rng() % 16;
        const auto a = evaluate(g, code, m1);
        const auto b = evaluate(g, code, m2);
        const auto c = evaluate(g, code, m1 ^ m2);
        for (const auto& [id, value] : c.edge_messages) CHECK(value == (a.edge_messages.at(id) ^ b.edge_messages.at(id)));
      }
    }
  }

  TEST_CASE("evaluation is deterministic across compiled copies") {
    const auto g = gap_instance(3, EavesdropMode::kNodeAll);
    const auto code = linear_to_general(sum_code(g));
    for (std::uint64_t m = 0; m < 16; ++m) {
      const auto a = evaluate(g, code, m);
      const auto b = evaluate(g, code, m);
      CHECK(a.edge_messages == b.edge_messages);
      CHECK(a.key_value == b.key_value);
    }
  }

  TEST_CASE("width validation") {
    auto [g, code] = fig1b_instance_and_code();
    auto wide = code;
    wide.edge_encoders["s1_d"] = Gf2Matrix::identity(2);
    CHECK_KEYCAST_ERROR(validate_code(g, wide), ErrorCode::kWidthMismatch);

    auto missing = code;
    missing.decoders.clear();
    CHECK_KEYCAST_ERROR(validate_code(g, missing), ErrorCode::kWidthMismatch);

    auto half = g;
    half.edges[0].capacity = Rational(1, 2);
    CHECK_KEYCAST_ERROR(validate_code(half, code), ErrorCode::kNonintegralAlphabet);
    CHECK(edge_width(half.edges[0], 2) == 1);
  }

  TEST_CASE("coords") {
    const auto coords = parse_coords("s1:0,s2:1");
    REQUIRE(coords.size() == 2);
    CHECK(coords[1] == Coord{"s2", 1});
    CHECK(format_coords(coords) == "s1:0,s2:1");
    CHECK(parse_coords("").empty());
    CHECK_KEYCAST_ERROR(parse_coords("s1"), ErrorCode::kParse);

    const auto [g, code] = fig1b_instance_and_code();
    const AssignmentLayout layout(g, code);
    CHECK(layout.total_bits() == 2);
    CHECK(layout.shift_of({"s1", 0}) == 1);
    CHECK(layout.shift_of({"s2", 0}) == 0);
    CHECK_KEYCAST_ERROR(layout.shift_of({"s1", 1}), ErrorCode::kBadCoords);
  }
}
