#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "milboundary/rng.hpp"
#include "milboundary/seeds.hpp"

using namespace milb;

namespace {

MultiGridF indicator_cams(const GridU8& mask, int C) {
  MultiGridF cams(C, static_cast<int>(mask.rows()), static_cast<int>(mask.cols()));
  for (int y = 0; y < mask.rows(); ++y)
    for (int x = 0; x < mask.cols(); ++x)
      if (mask(y, x) < C) cams[mask(y, x)](y, x) = 1.f;
  return cams;
}

// Independent window-majority oracle.
ConfidentLabelMap oracle_majority(const ConfidentLabelMap& in, int k) {
  ConfidentLabelMap out = in;
  const int r = k / 2;
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      if (in.is_ignore(y, x)) continue;
      std::vector<int> counts(static_cast<size_t>(in.num_classes) + 1, 0);
      int total = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int ny = y + dy, nx = x + dx;
          if (ny < 0 || ny >= in.height() || nx < 0 || nx >= in.width()) continue;
          if (in.is_ignore(ny, nx)) continue;
          counts[in.states(ny, nx)]++;
          total++;
        }
      int best = 0;
      for (size_t s = 1; s < counts.size(); ++s)
        if (counts[s] > counts[static_cast<size_t>(best)]) best = static_cast<int>(s);
      if (static_cast<double>(counts[static_cast<size_t>(best)]) >= 0.6 * total)
        out.states(y, x) = static_cast<uint8_t>(best);
      else
        out.states(y, x) = ConfidentLabelMap::kIgnore;
    }
  }
  return out;
}

ConfidentLabelMap random_label_map(Rng& rng, int h, int w, int C) {
  ConfidentLabelMap m(h, w, C);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto v = rng.next_int(0, C + 1);
      if (v == C + 1)
        m.set_ignore(y, x);
      else if (v == C)
        m.set_background(y, x);
      else
        m.set_class(y, x, static_cast<int>(v));
    }
  return m;
}

}  // namespace

TEST_CASE("confident_regions on an indicator CAM") {
  GridU8 mask = GridU8::Constant(8, 8, 3);  // 3 = background marker here
  for (int y = 2; y < 6; ++y)
    for (int x = 2; x < 6; ++x) mask(y, x) = 0;
  MultiGridF cams = indicator_cams(mask, 3);
  const ConfidentLabelMap m = confident_regions(cams, {0}, SeedThresholds{});
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      if (mask(y, x) == 0)
        CHECK(m.class_at(y, x) == 0);
      else
        CHECK(m.is_background(y, x));
      CHECK_FALSE(m.is_ignore(y, x));
    }
}

TEST_CASE("confident_regions score bands") {
  MultiGridF cams(2, 1, 3);
  // pixel 0: best 0.2 -> ignore; pixel 1: (0.6, 0.4) -> class 0;
  // pixel 2: tie (0.5, 0.5) -> class 0 by lowest-id tie-break
  cams[0](0, 0) = 0.2f;
  cams[1](0, 0) = 0.1f;
  cams[0](0, 1) = 0.6f;
  cams[1](0, 1) = 0.4f;
  cams[0](0, 2) = 0.5f;
  cams[1](0, 2) = 0.5f;
  const ConfidentLabelMap m = confident_regions(cams, {0, 1}, SeedThresholds{});
  CHECK(m.is_ignore(0, 0));
  CHECK(m.class_at(0, 1) == 0);
  CHECK(m.class_at(0, 2) == 0);
}

TEST_CASE("confident_regions rejects empty labels and never assigns absent classes") {
  MultiGridF cams(3, 4, 4);
  CHECK_THROWS_AS(confident_regions(cams, {}, SeedThresholds{}), InvalidInputError);

  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    MultiGridF r(3, 6, 6);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) r[c](y, x) = static_cast<float>(rng.next_double());
    const ConfidentLabelMap m = confident_regions(r, {0, 2}, SeedThresholds{});
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) CHECK(m.class_at(y, x) != 1);
  }
}

TEST_CASE("raising bg_keep_fraction only grows the background region") {
  Rng rng(6);
  MultiGridF cams(2, 10, 10);
  for (int c = 0; c < 2; ++c)
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) cams[c](y, x) = static_cast<float>(rng.next_double());
  SeedThresholds lo{0.70, 0.05}, hi{0.70, 0.20};
  const ConfidentLabelMap a = confident_regions(cams, {0, 1}, lo);
  const ConfidentLabelMap b = confident_regions(cams, {0, 1}, hi);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x)
      if (a.is_background(y, x)) CHECK(b.is_background(y, x));
}

TEST_CASE("output partitions every pixel into exactly one state") {
  Rng rng(8);
  MultiGridF cams(3, 12, 12);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 12; ++y)
      for (int x = 0; x < 12; ++x) cams[c](y, x) = static_cast<float>(rng.next_double());
  const ConfidentLabelMap m = confident_regions(cams, {0, 1, 2}, SeedThresholds{});
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) {
      const int states = (m.is_ignore(y, x) ? 1 : 0) + (m.is_background(y, x) ? 1 : 0) +
                         (m.class_at(y, x) >= 0 ? 1 : 0);
      CHECK(states == 1);
    }
}

TEST_CASE("identity refiner returns input unchanged") {
  Rng rng(9);
  const ConfidentLabelMap m = random_label_map(rng, 7, 7, 2);
  const auto refiner = make_refiner("identity");
  const ConfidentLabelMap out = refiner->refine(m, Image8(7, 7));
  CHECK(out.states == m.states);
}

TEST_CASE("majority refiner flips an isolated island and keeps uniform maps") {
  ConfidentLabelMap m(5, 5, 1);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) m.set_background(y, x);
  m.set_class(2, 2, 0);
  const MajorityRefiner ref(3);
  const ConfidentLabelMap out = ref.refine(m, Image8(5, 5));
  CHECK(out.is_background(2, 2));  // 8 background vs 1 class-0 in the window

  ConfidentLabelMap uniform(6, 6, 2);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) uniform.set_class(y, x, 1);
  for (int k : {1, 3, 5}) {
    const MajorityRefiner r2(k);
    CHECK(r2.refine(uniform, Image8(6, 6)).states == uniform.states);
  }
}

TEST_CASE("majority refiner equals the brute-force window counter") {
  Rng rng(10);
  for (int t = 0; t < 25; ++t) {
    const ConfidentLabelMap m = random_label_map(rng, 9, 8, 3);
    const MajorityRefiner ref(3);
    const ConfidentLabelMap got = ref.refine(m, Image8(9, 8));
    const ConfidentLabelMap want = oracle_majority(m, 3);
    CHECK(got.states == want.states);
    // Ignore pixels stay ignore; flips must pass the majority test.
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 8; ++x)
        if (m.is_ignore(y, x)) CHECK(got.is_ignore(y, x));
  }
}

TEST_CASE("refiner factory") {
  CHECK(make_refiner("majority:5")->name() == "majority:5");
  CHECK_THROWS_AS(make_refiner("crf"), ConfigError);
  CHECK_THROWS_AS(make_refiner("majority:4"), ConfigError);
}
