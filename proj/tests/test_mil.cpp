#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "milboundary/mil.hpp"
#include "test_util.hpp"

using namespace milb;
using namespace milb::testutil;

namespace {

// Hand-built segment sets over a small grid: records get explicit labels.
SegmentSets make_sets(int C, double gamma, std::vector<SegmentRecord> records) {
  SegmentSets sets;
  sets.num_classes = C;
  sets.gamma = gamma;
  sets.all = std::move(records);
  sets.positive_per_class.assign(static_cast<size_t>(C), {});
  for (uint32_t i = 0; i < sets.all.size(); ++i) {
    if (sets.all[i].label_mask != 0) {
      sets.positive_union.push_back(i);
      for (int c = 0; c < C; ++c)
        if ((sets.all[i].label_mask >> c) & 1u)
          sets.positive_per_class[static_cast<size_t>(c)].push_back(i);
    }
  }
  return sets;
}

SegmentSets random_labeled_sets(Rng& rng, int h, int w, int C, double gamma) {
  const ConfidentLabelMap m = random_confident_map(rng, h, w, C);
  SegmentSets sets = enumerate_valid_segments(m, gamma);
  label_segments(sets, m);
  return sets;
}

}  // namespace

TEST_CASE("bag_score max and tie-break") {
  GridD map = GridD::Zero(1, 3);
  map << 0.2, 0.9, 0.5;
  LineSegment seg{{0, 0}, {2, 0}, rasterize_line({0, 0}, {2, 0}), 0};
  const auto b = bag_score(map, seg);
  CHECK(b.value == 0.9);
  CHECK(b.argmax_pixel == PixelCoord{1, 0});

  GridD flat = GridD::Constant(1, 3, 0.4);
  const auto t = bag_score(flat, seg);
  CHECK(t.value == 0.4);
  CHECK(t.argmax_pixel == seg.pixels.front());  // first occurrence wins ties

  LineSegment empty{{0, 0}, {2, 0}, {}, 0};
  CHECK_THROWS_AS(bag_score(map, empty), std::logic_error);
}

TEST_CASE("bag_score equals a linear-scan oracle on random segments") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    GridD map = random_grid<double>(rng, 10, 10);
    const PixelCoord a{static_cast<int16_t>(rng.next_int(0, 9)),
                       static_cast<int16_t>(rng.next_int(0, 9))};
    const PixelCoord b{static_cast<int16_t>(rng.next_int(0, 9)),
                       static_cast<int16_t>(rng.next_int(0, 9))};
    LineSegment seg{a, b, rasterize_line(a, b), 0};
    double best = -1;
    PixelCoord arg{};
    for (const auto& p : seg.pixels)
      if (map(p.y, p.x) > best) {
        best = map(p.y, p.x);
        arg = p;
      }
    const auto got = bag_score(map, seg);
    CHECK(got.value == best);
    CHECK(got.argmax_pixel == arg);
  }
}

TEST_CASE("loss_ag single-term examples") {
  // One positive segment with b = 0.9 and no negatives.
  GridD map = GridD::Zero(2, 4);
  map(0, 1) = 0.9;
  SegmentSets sets = make_sets(1, 5.0, {{{0, 0}, {3, 0}, 1u}});
  const auto r = loss_ag(map, sets);
  CHECK(r.value == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(0.10536051565782628).epsilon(1e-9));
  CHECK(r.grad(0, 1) == doctest::Approx(-1.0 / 0.9).epsilon(1e-9));
  CHECK(r.warn_empty_negative);
  CHECK_FALSE(r.warn_empty_positive);

  // Perfect prediction: positive at 1-eps, negative at eps.
  GridD perfect = GridD::Zero(2, 4);
  perfect.row(0).setConstant(1.0 - kProbClamp);
  perfect.row(1).setConstant(kProbClamp);
  SegmentSets both = make_sets(1, 5.0, {{{0, 0}, {3, 0}, 1u}, {{0, 1}, {3, 1}, 0u}});
  const auto p = loss_ag(perfect, both);
  CHECK(p.value <= 1e-6);
  CHECK(p.value >= 0.0);
}

TEST_CASE("loss_ag gradient matches central finite differences") {
  Rng rng(7);
  int done = 0;
  uint64_t salt = 0;
  while (done < 5) {
    Rng inst = Rng::for_index(7000 + salt++, static_cast<uint64_t>(done));
    SegmentSets sets = random_labeled_sets(inst, 8, 8, 2, 4.0);
    if (sets.all.size() < 20 || sets.num_positive_union() == 0 ||
        sets.num_negative_intersection() == 0)
      continue;
    GridD map = random_grid<double>(rng, 8, 8);
    if (min_bag_tie_gap(map, sets) < 1e-4) continue;
    const auto r = loss_ag(map, sets);
    const double h = 1e-6;
    double max_rel = 0.0;
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        GridD up = map, dn = map;
        up(y, x) += h;
        dn(y, x) -= h;
        const double fd = (loss_ag(up, sets).value - loss_ag(dn, sets).value) / (2 * h);
        const double an = r.grad(y, x);
        const double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
        max_rel = std::max(max_rel, rel);
      }
    }
    CHECK(max_rel < 1e-4);
    ++done;
  }
}

TEST_CASE("loss_aw hand-evaluated two-class instance") {
  // Segments A (positive for class 0) and B (negative for both classes);
  // every bag value is 0.5 on both channels.
  // class 0: -ln(.5) - ln(.5); class 1: mean over {A,B} of -ln(.5).
  // L_aw = (1/2)(2 ln2 + ln2) = 1.5 ln 2.
  MultiGridD maps(2, 2, 4);
  maps[0].setConstant(0.5);
  maps[1].setConstant(0.5);
  SegmentSets sets = make_sets(2, 5.0, {{{0, 0}, {3, 0}, 0b01u}, {{0, 1}, {3, 1}, 0u}});
  const auto r = loss_aw(maps, sets);
  CHECK(r.value == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(1.0397207708399179).epsilon(1e-9));
  CHECK(r.warn_empty_positive);  // class 1 has no positive bags

  // All bags perfectly predicted.
  MultiGridD perfect(2, 2, 4);
  perfect[0].setConstant(kProbClamp);
  perfect[1].setConstant(kProbClamp);
  perfect[0].row(0).setConstant(1.0 - kProbClamp);
  const auto p = loss_aw(perfect, sets);
  CHECK(p.value <= 1e-6);
  CHECK(p.value >= 0.0);

  MultiGridD none(0, 0, 0);
  CHECK_THROWS_AS(loss_aw(none, sets), InvalidInputError);
}

TEST_CASE("loss_aw gradient matches central finite differences") {
  Rng rng(9);
  int done = 0;
  uint64_t salt = 0;
  while (done < 5) {
    Rng inst = Rng::for_index(9000 + salt++, static_cast<uint64_t>(done));
    SegmentSets sets = random_labeled_sets(inst, 10, 10, 3, 4.0);
    if (sets.all.size() < 30) continue;
    MultiGridD maps = random_multigrid<double>(rng, 3, 10, 10);
    bool tie = false;
    for (int c = 0; c < 3; ++c) tie |= min_bag_tie_gap(maps[c], sets) < 1e-4;
    if (tie) continue;
    const auto r = loss_aw(maps, sets);
    const double h = 1e-6;
    double max_rel = 0.0;
    Rng pick(31 + salt);
    for (int probe = 0; probe < 120; ++probe) {
      const int c = static_cast<int>(pick.next_int(0, 2));
      const int y = static_cast<int>(pick.next_int(0, 9));
      const int x = static_cast<int>(pick.next_int(0, 9));
      MultiGridD up = maps, dn = maps;
      up[c](y, x) += h;
      dn[c](y, x) -= h;
      const double fd = (loss_aw(up, sets).value - loss_aw(dn, sets).value) / (2 * h);
      const double an = r.grad[c](y, x);
      max_rel = std::max(max_rel, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    CHECK(max_rel < 1e-4);
    ++done;
  }
}

TEST_CASE("total_loss composition") {
  Rng rng(21);
  SegmentSets sets = random_labeled_sets(rng, 8, 8, 2, 4.0);
  GridD b_ag = random_grid<double>(rng, 8, 8);
  MultiGridD b_aw = random_multigrid<double>(rng, 2, 8, 8);

  const auto zero = total_loss(b_ag, b_aw, sets, 0.0);
  CHECK(zero.total == zero.loss_aw);
  CHECK(zero.grad_ag.isZero(0.0));

  const auto ag = loss_ag(b_ag, sets);
  const auto aw = loss_aw(b_aw, sets);
  const auto one = total_loss(b_ag, b_aw, sets, 1.0);
  CHECK(one.total == doctest::Approx(ag.value + aw.value).epsilon(1e-15));

  const auto quarter = total_loss(b_ag, b_aw, sets, 0.25);
  CHECK(quarter.total == aw.value + 0.25 * ag.value);  // exact composition
  CHECK_THROWS_AS(total_loss(b_ag, b_aw, sets, -0.1), InvalidInputError);
}

TEST_CASE("gradient sparsity: at most one nonzero pixel per bag") {
  Rng rng(23);
  SegmentSets sets = random_labeled_sets(rng, 12, 12, 2, 4.0);
  GridD b_ag = random_grid<double>(rng, 12, 12);
  MultiGridD b_aw = random_multigrid<double>(rng, 2, 12, 12);
  const auto r = total_loss(b_ag, b_aw, sets, 0.25);
  const auto count_nonzero = [](const GridD& g) {
    int n = 0;
    for (int y = 0; y < g.rows(); ++y)
      for (int x = 0; x < g.cols(); ++x)
        if (g(y, x) != 0.0) ++n;
    return n;
  };
  CHECK(count_nonzero(r.grad_ag) <= static_cast<int>(sets.size()));
  for (int c = 0; c < 2; ++c)
    CHECK(count_nonzero(r.grad_aw[c]) <= static_cast<int>(sets.size()));
}

TEST_CASE("duplicating every segment leaves loss_ag unchanged") {
  Rng rng(25);
  SegmentSets sets = random_labeled_sets(rng, 10, 10, 2, 4.0);
  REQUIRE(sets.size() > 0);
  GridD map = random_grid<double>(rng, 10, 10);
  std::vector<SegmentRecord> doubled = sets.all;
  doubled.insert(doubled.end(), sets.all.begin(), sets.all.end());
  SegmentSets dup = make_sets(2, sets.gamma, std::move(doubled));
  CHECK(loss_ag(map, sets).value == doctest::Approx(loss_ag(map, dup).value).epsilon(1e-12));
}

TEST_CASE("per-class isolation: channel perturbation touches only that class term") {
  Rng rng(27);
  SegmentSets sets = random_labeled_sets(rng, 10, 10, 3, 4.0);
  MultiGridD maps = random_multigrid<double>(rng, 3, 10, 10);
  const auto base = loss_aw(maps, sets);
  MultiGridD bumped = maps;
  bumped[1] = random_grid<double>(rng, 10, 10);
  const auto after = loss_aw(bumped, sets);
  CHECK(after.per_class[0] == base.per_class[0]);
  CHECK(after.per_class[2] == base.per_class[2]);
}

TEST_CASE("losses are non-negative") {
  Rng rng(29);
  for (int t = 0; t < 20; ++t) {
    SegmentSets sets = random_labeled_sets(rng, 9, 9, 2, 3.5);
    GridD b_ag = random_grid<double>(rng, 9, 9, 0.001, 0.999);
    MultiGridD b_aw = random_multigrid<double>(rng, 2, 9, 9, 0.001, 0.999);
    const auto r = total_loss(b_ag, b_aw, sets, 0.25);
    CHECK(r.loss_ag >= 0.0);
    CHECK(r.loss_aw >= 0.0);
    CHECK(r.total >= 0.0);
  }
}
