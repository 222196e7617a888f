#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "fevbot/thermal.hpp"
#include "oracles.hpp"

using namespace fevbot;
using namespace fevbot::thermal;

namespace {

sim::ThermalFrame flat(double t)
{
  sim::ThermalFrame f;
  std::fill(f.temps.begin(), f.temps.end(), t);
  return f;
}

}  // namespace

TEST_SUITE("thermal") {

TEST_CASE("detection pixels map onto the thermal grid")
{
  CHECK(map_to_thermal(320.0, 240.0) == ThermalPoint{80, 60});
  CHECK(map_to_thermal(0.0, 0.0) == ThermalPoint{0, 0});
  CHECK(map_to_thermal(640.0, 480.0) == ThermalPoint{159, 119});
  CHECK(map_to_thermal(3.9, 7.99) == ThermalPoint{0, 1});
  CHECK_THROWS_AS(map_to_thermal(-1.0, 10.0), std::out_of_range);
  CHECK_THROWS_AS(map_to_thermal(10.0, 481.0), std::out_of_range);
}

TEST_CASE("nine-point sampling")
{
  auto f = flat(20.0);
  for (int v = 0; v < 120; ++v)
    for (int u = 0; u < 160; ++u)
      f.at(u, v) = u + 1000.0 * v;

  SUBCASE("interior")
  {
    const auto s = sample_nine(f, {10, 20});
    CHECK(s[0] == 9.0 + 19000.0);
    CHECK(s[4] == 10.0 + 20000.0);
    CHECK(s[8] == 11.0 + 21000.0);
  }
  SUBCASE("corner clamps to the edge")
  {
    const auto s = sample_nine(f, {0, 0});
    CHECK(s[0] == 0.0);
    CHECK(s[1] == 0.0);
    CHECK(s[2] == 1.0);
    CHECK(s[6] == 1000.0);
    CHECK(s[8] == 1001.0);
  }
  SUBCASE("opposite corner")
  {
    const auto s = sample_nine(f, {159, 119});
    CHECK(s[8] == 159.0 + 119000.0);
    CHECK(s[0] == 158.0 + 118000.0);
  }
}

TEST_CASE("maximum of the samples")
{
  std::array<double, 9> s{36.1, 36.4, 37.9, 36.0, 38.4, 36.2, 35.0, 36.6, 36.8};
  CHECK(max_temperature(s) == 38.4);
  s.fill(-5.0);
  CHECK(max_temperature(s) == -5.0);
}

TEST_CASE("debounce examples")
{
  DebounceState s;
  SUBCASE("three readings over the threshold")
  {
    auto r = debounce_update(s, 38.4);
    CHECK_FALSE(r.fever);
    r = debounce_update(r.state, 38.5);
    CHECK_FALSE(r.fever);
    r = debounce_update(r.state, 38.6);
    CHECK(r.fever);
    CHECK(r.state.consecutive_over == 0);
    CHECK(r.state.last_reading == 38.6);
  }
  SUBCASE("a dip resets the run")
  {
    auto r = debounce_update(s, 38.4);
    r = debounce_update(r.state, 37.0);
    CHECK(r.state.consecutive_over == 0);
    r = debounce_update(r.state, 38.4);
    r = debounce_update(r.state, 38.4);
    CHECK_FALSE(r.fever);
    r = debounce_update(r.state, 38.4);
    CHECK(r.fever);
  }
  SUBCASE("exactly the threshold is not over it")
  {
    auto r = debounce_update(s, 38.0);
    r = debounce_update(r.state, 38.0);
    r = debounce_update(r.state, 38.0);
    CHECK_FALSE(r.fever);
    CHECK(r.state.consecutive_over == 0);
  }
}

TEST_CASE("debounce agrees with the run-length oracle")
{
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int required = 1 + static_cast<int>(rng.below(5));
    const int n = 1 + static_cast<int>(rng.below(60));
    std::vector<double> readings(static_cast<std::size_t>(n));
    for (auto& r : readings)
      r = rng.uniform(37.0, 39.0);
    const auto expected = oracle::debounce_triggers(readings, 38.0, required);

    DebounceState s;
    s.required = required;
    for (std::size_t i = 0; i < readings.size(); ++i) {
      const auto r = debounce_update(s, readings[i]);
      CHECK(r.fever == expected[i]);
      CHECK(r.state.consecutive_over >= 0);
      CHECK(r.state.consecutive_over < required);
      s = r.state;
    }
  }
}

TEST_CASE("isolated spikes never trigger")
{
  Rng rng(8);
  DebounceState s;
  for (int i = 0; i < 2000; ++i) {
    // at most two hot readings in a row, then a cool one
    const bool hot = (i % 3) != 2 && rng.uniform() < 0.7;
    const auto r = debounce_update(s, hot ? rng.uniform(45.0, 60.0) : rng.uniform(35.0, 37.5));
    CHECK_FALSE(r.fever);
    s = r.state;
  }
}

TEST_CASE("screening a tracked person")
{
  auto frame = flat(20.0);
  for (int v = 55; v <= 65; ++v)
    for (int u = 75; u <= 85; ++u)
      frame.at(u, v) = 38.6;
  const sim::Detection d{7, 300, 200, 340, 280};

  SUBCASE("fever after three frames")
  {
    DebounceState s;
    ScreenResult r;
    for (int k = 0; k < 3; ++k) {
      r = screen_tick(frame, d, s);
      REQUIRE(r.reading.has_value());
      CHECK(*r.reading == 38.6);
      s = r.state;
    }
    CHECK(r.fever);
    REQUIRE(r.event.has_value());
    CHECK(r.event->person_id == 7);
    CHECK(r.event->reading == 38.6);
  }
  SUBCASE("losing the detection resets the counter")
  {
    DebounceState s;
    s = screen_tick(frame, d, s).state;
    s = screen_tick(frame, d, s).state;
    const auto gone = screen_tick(frame, std::nullopt, s);
    CHECK_FALSE(gone.reading.has_value());
    CHECK(gone.state.consecutive_over == 0);
    const auto again = screen_tick(frame, d, gone.state);
    CHECK_FALSE(again.fever);
  }
  SUBCASE("a normal temperature never flags")
  {
    DebounceState s;
    const auto cool = flat(36.6);
    for (int k = 0; k < 10; ++k) {
      const auto r = screen_tick(cool, d, s);
      CHECK_FALSE(r.fever);
      CHECK_FALSE(r.event.has_value());
      s = r.state;
    }
  }
}

}
