#include <doctest.h>

#include "check_error.hpp"
#include "keycast/constructions.hpp"
#include "keycast/feasibility.hpp"

using namespace keycast;

TEST_SUITE("constructions") {
  TEST_CASE("gap instance shape") {
    for (int alpha = 1; alpha <= 6; ++alpha) {
      const int r = alpha + 1;
      const auto g = gap_instance(alpha);
      CHECK(g.nodes.size() == static_cast<std::size_t>(4 * r));
      CHECK(g.sources.size() == static_cast<std::size_t>(r));
      CHECK(g.terminals.size() == static_cast<std::size_t>(r));
      // s_i -> u_i, r - 1 edges into each ubar_i, and two into each d_i.
      CHECK(g.edges.size() == static_cast<std::size_t>(r + r * (r - 1) + 2 * r));
      CHECK(g.eavesdrop_sets.size() == static_cast<std::size_t>(2 * r));
      CHECK(gap_instance(alpha, EavesdropMode::kNodeAll).eavesdrop_sets.size() == static_cast<std::size_t>(3 * r));
      for (const Edge& e : g.edges) CHECK(e.capacity == Rational(1));
      CHECK(gap_alpha(g) == alpha);
      CHECK(gap_alpha(gap_instance(alpha, EavesdropMode::kNodeAll)) == alpha);
    }
    CHECK_KEYCAST_ERROR(gap_instance(0), ErrorCode::kBadAlpha);
    CHECK_FALSE(gap_alpha(fig1b_instance_and_code().first).has_value());

    auto edited = gap_instance(2);
    edited.edges.pop_back();
    CHECK_FALSE(gap_alpha(edited).has_value());
  }

  TEST_CASE("sum code is key-feasible at rate one") {
    for (int alpha = 1; alpha <= 5; ++alpha) {
      for (auto mode : {EavesdropMode::kEdgeSets, EavesdropMode::kNodeAll}) {
        const auto g = gap_instance(alpha, mode);
        const auto code = sum_code(g);
        CHECK(code.blocklength == 1);
        CHECK(check_key_feasibility(g, code, Rational(1)).overall());
      }
    }
    CHECK_KEYCAST_ERROR(sum_code(fig1b_instance_and_code().first), ErrorCode::kNotGapInstance);
  }

  TEST_CASE("two-stage code passes at rate one half") {
    for (int alpha = 1; alpha <= 2; ++alpha) {
      const auto g = gap_instance(alpha);
      const auto code = two_stage_gap_code(g);
      CHECK(code.blocklength == 2);
      std::vector<Coord> all;
      for (const auto& s : g.sources) all.push_back({s.node, 0});
      CHECK(check_two_stage_feasibility(g, code, Rational(1, 2), all).overall());
      CHECK(check_key_feasibility(g, code, Rational(1, 2)).overall());
    }
    CHECK_KEYCAST_ERROR(two_stage_gap_code(gap_instance(3)), ErrorCode::kUnsupportedR);
  }

  TEST_CASE("fig1b") {
    const auto [g, code] = fig1b_instance_and_code();
    CHECK(validate(g).ok());
    CHECK(g.eavesdrop_sets.size() == 2);
    const auto r = check_key_feasibility(g, code, Rational(1));
    CHECK(r.overall());
    CHECK(r.entropies.leakage == std::vector<double>{0.0, 0.0});
  }
}
