#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "test_util.hpp"
#include "uctadp/adp.hpp"

using namespace uctadp;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Direct evaluation from the definition, no shared code with forward().
double reference_forward(const Mlp& m, const std::vector<double>& x) {
  double z2 = m.b2;
  for (int j = 0; j < m.hidden; ++j) {
    double z = m.b1[j];
    for (int i = 0; i < m.in; ++i) z += m.w1[static_cast<std::size_t>(j) * m.in + i] * x[i];
    z2 += m.w2[j] * sig(z);
  }
  return sig(z2);
}

std::vector<double> random_input(Rng& rng, int n) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.below(3) == 0 ? 0.0 : rng.uniform(0.0, 2.0);
  return x;
}

}  // namespace

TEST(Encoding, TableRows) {
  using Slots = std::array<double, 5>;
  EXPECT_EQ(encode_slots(0), (Slots{0, 0, 0, 0, 0}));
  EXPECT_EQ(encode_slots(1), (Slots{1, 0, 0, 0, 0}));
  EXPECT_EQ(encode_slots(2), (Slots{1, 1, 0, 0, 0}));
  EXPECT_EQ(encode_slots(3), (Slots{1, 1, 1, 0, 0}));
  EXPECT_EQ(encode_slots(4), (Slots{1, 1, 1, 1, 0}));
  EXPECT_EQ(encode_slots(5), (Slots{1, 1, 1, 1, 0.5}));
  EXPECT_EQ(encode_slots(6), (Slots{1, 1, 1, 1, 1}));
}

TEST(Encoding, Monotone) {
  for (int n = 0; n < 20; ++n) {
    const auto a = encode_slots(n), b = encode_slots(n + 1);
    for (int i = 0; i < kSlotsPerPattern; ++i) EXPECT_LE(a[i], b[i]);
  }
}

TEST(Encoding, EmptyCountsOnlySetTheOneHot) {
  PatternCounts zero{};
  const auto x = encode_input(zero, zero, Player::Black);
  ASSERT_EQ(x.size(), 322u);
  for (int i = 0; i < 320; ++i) EXPECT_EQ(x[i], 0.0);
  EXPECT_EQ(x[320], 1.0);
  EXPECT_EQ(x[321], 0.0);
  const auto y = encode_input(zero, zero, Player::White);
  EXPECT_EQ(y[320], 0.0);
  EXPECT_EQ(y[321], 1.0);
}

TEST(Encoding, SideToMoveComesFirst) {
  PatternCounts self{}, opp{};
  self[3] = 1;
  opp[5] = 2;
  const auto x = encode_input(self, opp, Player::White);
  EXPECT_EQ(x[3 * 5], 1.0);
  EXPECT_EQ(x[160 + 5 * 5], 1.0);
  EXPECT_EQ(x[160 + 5 * 5 + 1], 1.0);
  EXPECT_EQ(x[160 + 5 * 5 + 2], 0.0);
}

TEST(Forward, ZeroWeightsGiveHalf) {
  const Mlp m = Mlp::zeros(kInputSize, kDefaultHidden);
  Rng rng(1);
  EXPECT_EQ(forward(m, random_input(rng, kInputSize)), 0.5);
}

TEST(Forward, HandSetUnitNetwork) {
  Mlp m = Mlp::zeros(1, 1);
  m.w1[0] = 1;
  m.w2[0] = 1;
  const double x[] = {1.0};
  const double s1 = 1.0 / (1.0 + std::exp(-1.0));
  EXPECT_NEAR(s1, 0.731059, 1e-6);
  EXPECT_NEAR(forward(m, x), 1.0 / (1.0 + std::exp(-s1)), 1e-15);
  EXPECT_NEAR(forward(m, x), 0.6750, 1e-4);
}

TEST(Forward, MatchesReferenceAndStaysInOpenInterval) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const Mlp m = Mlp::random(20, 7, rng.next(), 3.0);
    const auto x = random_input(rng, 20);
    const double v = forward(m, x);
    EXPECT_NEAR(v, reference_forward(m, x), 1e-12);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Forward, ShapeMismatch) {
  const Mlp m = Mlp::zeros(4, 2);
  const double x[3] = {};
  EXPECT_THROW(forward(m, x), ShapeError);
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(314);
  const double h = 1e-6;
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    Mlp m = Mlp::random(6, 4, rng.next(), 1.0);
    const auto x = random_input(rng, 6);
    const double target = rng.uniform01();
    const auto g = loss_gradient(m, x, target);
    ASSERT_EQ(g.size(), m.num_params());
    auto loss = [&](const Mlp& mm) {
      const double e = target - reference_forward(mm, x);
      return 0.5 * e * e;
    };
    for (std::size_t i = 0; i < m.num_params(); ++i) {
      const double orig = m.param(i);
      m.param(i) = orig + h;
      const double up = loss(m);
      m.param(i) = orig - h;
      const double down = loss(m);
      m.param(i) = orig;
      const double fd = (up - down) / (2 * h);
      const double scale = std::max({std::abs(fd), std::abs(g[i]), 1e-6});
      EXPECT_LE(std::abs(fd - g[i]) / scale, 1e-5) << "model " << t << " param " << i;
      ++checked;
    }
  }
  EXPECT_GT(checked, 3000);
}

TEST(TdUpdate, ZeroErrorIsAFixedPoint) {
  const Mlp before = Mlp::random(kInputSize, 8, 5);
  Mlp m = before;
  Rng rng(6);
  const auto x = random_input(rng, kInputSize);
  const double v = forward(m, x);
  TdConfig cfg;
  EXPECT_EQ(td_update(m, x, v, v, 0.0, cfg), 0.0);
  EXPECT_TRUE(m == before);
}

TEST(TdUpdate, TerminalWinRaisesValue) {
  Mlp m = Mlp::random(kInputSize, 8, 7);
  Rng rng(8);
  const auto x = random_input(rng, kInputSize);
  const double v = forward(m, x);
  TdConfig cfg;
  const double e = td_update(m, x, v, 0.0, 1.0, cfg);
  EXPECT_NEAR(e, cfg.alpha * (1.0 - v), 1e-15);
  EXPECT_GT(forward(m, x), v);
}

TEST(TdUpdate, IsAStepAlongTheValueGradient) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    Mlp m = Mlp::random(10, 5, rng.next(), 0.5);
    const Mlp before = m;
    const auto x = random_input(rng, 10);
    const double v = forward(m, x), vn = rng.uniform01(), r = rng.below(2) ? 1.0 : 0.0;
    TdConfig cfg;
    cfg.gamma = 1.0;
    const auto grad = value_gradient(before, x);
    const double e = td_update(m, x, v, vn, r, cfg);
    EXPECT_NEAR(e, cfg.alpha * (r + vn - v), 1e-15);
    for (std::size_t i = 0; i < m.num_params(); ++i) EXPECT_NEAR(m.param(i), before.param(i) + e * grad[i], 1e-14);
  }
}

TEST(TdUpdate, RejectsNonFinite) {
  Mlp m = Mlp::random(4, 2, 1);
  const double x[4] = {1, 0, 0, 1};
  TdConfig cfg;
  EXPECT_THROW(td_update(m, x, 0.5, std::nan(""), 0.0, cfg), NumericError);
  EXPECT_THROW(td_update(m, x, 0.5, 0.5, INFINITY, cfg), NumericError);
}

TEST(EvaluateBoard, TerminalOverride) {
  const Board b = test::board_from_rows({"XXXXX", "OOOO"});
  ASSERT_EQ(b.side_to_move(), Player::White);
  const Mlp m = Mlp::random(kInputSize, 8, 3);
  EXPECT_EQ(evaluate_board(m, b), 0.0);
}

TEST(EvaluateBoard, FreshModelInOpenInterval) {
  const Mlp m = Mlp::random(kInputSize, kDefaultHidden, 4);
  const double v = evaluate_board(m, Board{});
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
}

TEST(Training, ZeroGamesReturnsInitialModel) {
  TdConfig cfg;
  cfg.games = 0;
  const auto r = self_play_train(cfg);
  EXPECT_TRUE(r.model == Mlp::random(kInputSize, cfg.hidden, derive_seed(cfg.seed, 0)));
  EXPECT_TRUE(r.log.empty());
}

TEST(Training, ReproducibleForASeed) {
  TdConfig cfg;
  cfg.games = 20;
  cfg.log_every = 10;
  cfg.eval_games = 2;
  const auto a = self_play_train(cfg), b = self_play_train(cfg);
  EXPECT_TRUE(a.model == b.model);
  ASSERT_EQ(a.log.size(), 2u);
  EXPECT_EQ(a.log[1].game_index, 20);
  cfg.seed = 2;
  EXPECT_FALSE(self_play_train(cfg).model == a.model);
}

TEST(Training, LogFormat) {
  const std::string csv = format_train_log({{100, 0.25, 0.5}});
  EXPECT_EQ(csv, "game_index,avg_abs_td_error,win_rate_vs_random\n100,0.25,0.5\n");
}

TEST(Training, RelativeDrift) {
  std::vector<double> flat(100, 2.0);
  EXPECT_NEAR(relative_drift(flat, 100), 0.0, 1e-12);
  std::vector<double> ramp;
  for (int i = 0; i < 100; ++i) ramp.push_back(1.0 + 0.01 * i);
  // slope 0.01 over 100 points relative to mean 1.495.
  EXPECT_NEAR(relative_drift(ramp, 100), 0.01 * 100 / 1.495, 1e-9);
}

TEST(ModelFile, RoundTripIsBitExact) {
  const Mlp m = Mlp::random(kInputSize, kDefaultHidden, 99, 0.7);
  const Mlp back = load_model(save_model(m));
  EXPECT_TRUE(back == m);
  for (std::size_t i = 0; i < m.num_params(); ++i) ASSERT_EQ(std::bit_cast<std::uint64_t>(back.param(i)), std::bit_cast<std::uint64_t>(m.param(i)));
}

TEST(ModelFile, Header) {
  const std::string text = save_model(Mlp::zeros(kInputSize, kDefaultHidden));
  EXPECT_EQ(text.substr(0, text.find('\n')), "UCTADP-MLP v1 in=322 hidden=64");
}

TEST(ModelFile, Truncated) {
  const std::string text = save_model(Mlp::random(kInputSize, 8, 1));
  EXPECT_THROW(load_model(text.substr(0, text.size() / 2)), FormatError);
  EXPECT_THROW(load_model(""), FormatError);
}

TEST(ModelFile, MissingRow) {
  std::string text = save_model(Mlp::random(kInputSize, kDefaultHidden, 1));
  const auto w1 = text.find("W1\n") + 3;
  const auto row_end = text.find('\n', w1);
  text.erase(w1, row_end - w1 + 1);  // 63 rows left under hidden=64
  EXPECT_THROW(load_model(text), FormatError);
}

TEST(ModelFile, BadMagicAndVersion) {
  std::string text = save_model(Mlp::random(4, 2, 1));
  std::string bad = text;
  bad.replace(0, 6, "XXXXXX");
  EXPECT_THROW(load_model(bad), FormatError);
  bad = text;
  bad.replace(bad.find("v1"), 2, "v9");
  EXPECT_THROW(load_model(bad), FormatError);
}

TEST(Greedy, PicksAnImmediateWin) {
  const Board b = test::board_from_rows({"XXXX.", "OOO.........O"});
  const Mlp m = Mlp::random(kInputSize, 8, 1);
  Rng rng(1);
  EXPECT_EQ(greedy_move(m, b, rng), (Move{4, 0}));
}
