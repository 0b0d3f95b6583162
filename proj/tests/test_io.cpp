#include <gtest/gtest.h>

#include <filesystem>

#include "shadowkit/shadowkit.hpp"

using namespace shadowkit;

TEST(Io, PseudoOrbitRoundTrip) {
  const CatMap cat;
  const auto x = orbit_map(cat.system(), Vec2{0.1, 0.7}, -3, 4);
  const json j = to_json(x, "cat");
  EXPECT_EQ(j["system_id"], "cat");
  EXPECT_EQ(j["extension"], "orbit-capped");
  const auto y = pseudo_orbit_from_json<Vec2>(json::parse(j.dump()));
  EXPECT_EQ(y.lo(), x.lo());
  EXPECT_EQ(y.entries(), x.entries());
  EXPECT_EQ(y.extension(), x.extension());
}

TEST(Io, SequencePointRoundTrip) {
  const auto S = SequenceSystem::discrete(3);
  Rng rng(2);
  const PseudoOrbit<SeqPoint> x(-1, {S.random_point(rng, 3), S.random_point(rng, 2), S.random_point(rng, 1)},
                                Extension::Periodic);
  const auto y = pseudo_orbit_from_json<SeqPoint>(json::parse(to_json(x, S.id()).dump()));
  ASSERT_EQ(y.size(), 3);
  for (int i = -1; i <= 1; ++i) EXPECT_EQ(y[i], x[i]);
  EXPECT_EQ(y.extension(), Extension::Periodic);
}

TEST(Io, RejectsMalformedOrbit) {
  json j = to_json(PseudoOrbit<double>(0, {0.1, 0.2}), "ns-circle");
  j["hi"] = 5;
  EXPECT_THROW(pseudo_orbit_from_json<double>(j), std::invalid_argument);
  j["hi"] = 1;
  j["extension"] = "mirror";
  EXPECT_THROW(pseudo_orbit_from_json<double>(j), std::invalid_argument);
}

TEST(Io, ReportJsonHandlesInfiniteSlack) {
  CheckReport r;
  r.name = "empty";
  r.finalize();
  const json j = to_json(r);
  EXPECT_TRUE(j["worst_slack"].is_null());
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_NE(summary_line(r).find("PASS"), std::string::npos);
}

TEST(Io, ShadowResultJson) {
  const CatMap cat;
  BowenShadower<Vec2> bw(cat.system(), cat.bracket());
  const auto r = bw.shadow(orbit_map(cat.system(), Vec2{0.3, 0.3}, -5, 5));
  const json j = to_json(r);
  EXPECT_EQ(j["point"].size(), 2u);
  EXPECT_TRUE(j.contains("per_index_bound"));
  EXPECT_EQ(j["per_index_error"]["lo"], r.per_index_error->lo);
}

TEST(Io, RunConfigRoundTripAndDefaults) {
  RunConfig c;
  c.system = "ns-circle";
  c.seed = 99;
  c.delta = 2.5e-4;
  c.assert_lemmas = false;
  EXPECT_EQ(run_config_from_json(json::parse(to_json(c).dump())), c);
  const RunConfig d = run_config_from_json(json::parse(R"({"window": 7})"));
  EXPECT_EQ(d.window, 7);
  EXPECT_EQ(d.system, RunConfig{}.system);
  EXPECT_THROW(run_config_from_json(json::parse(R"({"schema": "other/9"})")), std::invalid_argument);
}

TEST(Io, AtomicWriteAndRead) {
  const auto dir = std::filesystem::temp_directory_path() / "shadowkit_io_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.json").string();
  write_atomic(path, "first");
  write_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_THROW(read_file((dir / "missing").string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Io, SeriesCsvAlignsColumns) {
  IndexedSeries a{-1, {1.0, 2.0}}, b{0, {5.0, 6.0}};
  const std::string csv = series_csv({"a", "b"}, {a, b});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,a,b");
  // three rows for indices -1..1, plus the header
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Determinism, SameSeedSameOrbit) {
  const CatMap cat;
  GenParams g;
  g.lo = -10;
  g.hi = 10;
  g.delta = 1e-4;
  Rng r1(123), r2(123), r3(124);
  const auto a = generate(cat.system(), torus::perturber(), Vec2{0.2, 0.2}, g, r1);
  const auto b = generate(cat.system(), torus::perturber(), Vec2{0.2, 0.2}, g, r2);
  const auto c = generate(cat.system(), torus::perturber(), Vec2{0.2, 0.2}, g, r3);
  EXPECT_EQ(to_json(a, "cat").dump(), to_json(b, "cat").dump());
  EXPECT_NE(to_json(a, "cat").dump(), to_json(c, "cat").dump());
}
