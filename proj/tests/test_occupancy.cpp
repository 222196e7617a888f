#include <doctest.h>

#include <cmath>
#include <string>

#include "fevbot/occupancy.hpp"

using namespace fevbot;
using namespace fevbot::nav;

namespace {

OccupancyGrid small_grid()
{
  GridGeometry g;
  g.resolution = 0.1;
  g.width = 40;
  g.height = 20;
  return OccupancyGrid::create(g);
}

sim::LidarScan single_beam(double angle, double range)
{
  sim::LidarScan s;
  s.angles = {angle};
  s.ranges = {range};
  return s;
}

}  // namespace

TEST_SUITE("occupancy") {

TEST_CASE("a fresh grid is unknown")
{
  const auto g = small_grid();
  CHECK(g.log_odds.size() == 800);
  CHECK(g.probability({3, 3}) == 0.5);
  CHECK_FALSE(g.is_observed({3, 3}));
}

TEST_CASE("a scan without returns changes nothing")
{
  auto g = small_grid();
  sim::LidarScan s;
  for (int i = 0; i < 720; ++i) {
    s.angles.push_back(-kPi + i * sim::kLidarStep);
    s.ranges.push_back(sim::kNoReturn);
  }
  const auto before = g;
  integrate_scan(g, {1.05, 1.05, 0.0}, s);
  CHECK(g.log_odds == before.log_odds);
  CHECK(g.observed == before.observed);
}

TEST_CASE("one beam clears its path and marks its end")
{
  auto g = small_grid();
  integrate_scan(g, {0.55, 1.05, 0.0}, single_beam(0.0, 2.0));
  CHECK(g.value({5, 10}) == doctest::Approx(kLogOddsFree));
  CHECK(g.value({20, 10}) == doctest::Approx(kLogOddsFree));
  CHECK(g.value({25, 10}) == doctest::Approx(kLogOddsHit));
  CHECK(g.value({26, 10}) == 0.0);
  CHECK(g.value({15, 11}) == 0.0);
  CHECK(g.is_observed({25, 10}));
  CHECK_FALSE(g.is_observed({26, 10}));
  CHECK(g.probability({25, 10}) > 0.65);
}

TEST_CASE("repeated scans saturate")
{
  auto g = small_grid();
  for (int i = 0; i < 10; ++i)
    integrate_scan(g, {0.55, 1.05, 0.0}, single_beam(0.0, 2.0));
  CHECK(g.value({25, 10}) == kLogOddsLimit);
  CHECK(g.value({10, 10}) == -kLogOddsLimit);
  for (const double l : g.log_odds)
    CHECK(std::abs(l) <= kLogOddsLimit);
}

TEST_CASE("beams leaving the grid are cut off")
{
  auto g = small_grid();
  CHECK_NOTHROW(integrate_scan(g, {3.95, 1.05, 0.0}, single_beam(0.0, 5.0)));
  CHECK(g.value({39, 10}) == doctest::Approx(kLogOddsFree));
}

TEST_CASE("update_occupancy leaves its input alone")
{
  const auto g = small_grid();
  const auto next = update_occupancy(g, {0.55, 1.05, 0.0}, single_beam(kPi / 2.0, 0.5));
  CHECK(g.value({5, 15}) == 0.0);
  CHECK(next.value({5, 15}) == doctest::Approx(kLogOddsHit));
}

TEST_CASE("line tracing")
{
  CHECK(trace_line({0, 0}, {0, 0}) == std::vector<CellIndex>{{0, 0}});
  CHECK(trace_line({0, 0}, {3, 0}) == std::vector<CellIndex>{{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  CHECK(trace_line({2, 2}, {0, 0}) == std::vector<CellIndex>{{2, 2}, {1, 1}, {0, 0}});
  for (int x = -7; x <= 7; ++x)
    for (int y = -7; y <= 7; ++y) {
      const auto cells = trace_line({0, 0}, {x, y});
      CHECK(cells.front() == CellIndex{0, 0});
      CHECK(cells.back() == CellIndex{x, y});
      CHECK(cells.size() == static_cast<std::size_t>(std::max(std::abs(x), std::abs(y)) + 1));
      for (std::size_t i = 1; i < cells.size(); ++i) {
        CHECK(std::abs(cells[i].x - cells[i - 1].x) <= 1);
        CHECK(std::abs(cells[i].y - cells[i - 1].y) <= 1);
      }
    }
}

TEST_CASE("pgm export")
{
  auto g = small_grid();
  integrate_scan(g, {0.55, 1.05, 0.0}, single_beam(0.0, 2.0));
  const auto pgm = to_pgm(g);
  REQUIRE(pgm.rfind("P5\n# fevbot.map/1 ", 0) == 0);
  const auto dims = pgm.find("\n40 20\n255\n");
  REQUIRE(dims != std::string::npos);
  const auto body = pgm.substr(dims + std::string("\n40 20\n255\n").size());
  REQUIRE(body.size() == 800);
  // top row in the file is the largest y
  const auto pixel = [&](int x, int y) { return static_cast<unsigned char>(body[(19 - y) * 40 + x]); };
  CHECK(pixel(0, 0) == 205);
  CHECK(pixel(10, 10) == static_cast<int>(std::lround(255.0 * (1.0 - g.probability({10, 10})))));
  CHECK(pixel(25, 10) < 128);
}

}
