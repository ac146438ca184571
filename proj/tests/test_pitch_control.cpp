#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"

using namespace spacefield;
using fixtures::player;

namespace {

GameState duel(Vec2 a, Vec2 d, Vec2 ball) {
    GameState s;
    s.attackers.push_back(player(Team::Home, 0, a));
    s.defenders.push_back(player(Team::Away, 0, d));
    s.ball = ball;
    return s;
}

// Closed-form integral of lambda * logistic from a to b.
double logistic_mass(double tau, double s, double lambda, double a, double b) {
    const double k = M_PI / (std::sqrt(3.0) * s);
    auto F = [&](double t) { return std::log1p(std::exp(k * (t - tau))) / k; };
    return lambda * (F(b) - F(a));
}

}  // namespace

TEST(Ppcf, NormalizedOnRandomFrames) {
    const auto c = SportConfig::soccer();
    const auto p = PitchControlParams::from_sport(c);
    const auto spec = GridSpec::for_field(c, 25, 16);
    std::mt19937_64 rng(21);
    for (int f = 0; f < 5; ++f) {
        const auto s = fixtures::random_state(rng, c, 11);
        const auto g = ppcf_grid(s, spec, p);
        for (std::size_t cell = 0; cell < g.size(); ++cell) {
            const double total = g.attack[cell] + g.defend[cell];
            EXPECT_LE(total, 1.0 + 1e-6);
            EXPECT_GE(g.attack[cell], 0.0);
            EXPECT_GE(g.defend[cell], 0.0);
            const Vec2 t = spec.center(cell);
            const double tf = ball_flight_time(*s.ball, t, p.ball);
            double mass = 0.0;
            for (const auto& side : {s.attackers, s.defenders})
                for (const auto& pl : side)
                    mass += logistic_mass(fixtures::oracle_tau(pl.position, pl.velocity, t, 0.7, 5.0), 0.45, 4.3, tf,
                                          10.0);
            if (mass >= std::log(100.0)) {
                EXPECT_GE(total, 0.99) << "cell " << cell;
            }
        }
    }
}

TEST(Ppcf, MatchesRk4Oracle) {
    const auto c = SportConfig::soccer();
    auto p = PitchControlParams::from_sport(c);
    p.integration.convergence = 1.0;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(-50, 50), uy(-32, 32);
    for (int f = 0; f < 3; ++f) {
        const auto s = fixtures::random_state(rng, c, 11);
        for (int k = 0; k < 5; ++k) {
            const Vec2 t{ux(rng), uy(rng)};
            std::vector<double> tau, lambda;
            for (const auto& side : {s.attackers, s.defenders})
                for (const auto& pl : side) {
                    tau.push_back(fixtures::oracle_tau(pl.position, pl.velocity, t, 0.7, 5.0));
                    lambda.push_back(4.3);
                }
            const auto ref = fixtures::rk4_race(tau, lambda, 0.45, ball_flight_time(*s.ball, t, 15.0), 10.0, 0.001);
            const auto pc = solve_ppcf_at(s, t, p);
            for (std::size_t j = 0; j < 11; ++j) {
                EXPECT_NEAR(pc.attackers[j], ref[j], 1e-3);
                EXPECT_NEAR(pc.defenders[j], ref[11 + j], 1e-3);
            }
        }
    }
}

TEST(Ppcf, EulerStepperAlsoConverges) {
    const auto c = SportConfig::soccer();
    auto p = PitchControlParams::from_sport(c);
    p.integration.stepper = Stepper::Euler;
    p.integration.dt = 0.01;
    const auto s = duel({-5, 0}, {8, 3}, {-5, 0});
    const auto pc = solve_ppcf_at(s, {0, 0}, p);
    EXPECT_LE(pc.total(), 1.0 + 1e-9);
    EXPECT_GE(pc.total(), 0.99);
    auto q = PitchControlParams::from_sport(c);
    EXPECT_NEAR(pc.attack, solve_ppcf_at(s, {0, 0}, q).attack, 0.02);
}

TEST(Ppcf, SymmetricDuelIsEven) {
    const auto p = PitchControlParams::from_sport(SportConfig::soccer());
    const auto pc = solve_ppcf_at(duel({-10, 0}, {10, 0}, {0, -20}), {0, 0}, p);
    EXPECT_NEAR(pc.attack, 0.5, 1e-3);
    EXPECT_NEAR(pc.defend, 0.5, 1e-3);
}

TEST(Ppcf, PointMirrorGivesMirroredSurface) {
    const auto c = SportConfig::soccer();
    const auto p = PitchControlParams::from_sport(c);
    const auto spec = GridSpec::for_field(c, 20, 13);
    std::mt19937_64 rng(8);
    const auto s = fixtures::random_state(rng, c, 11);
    const auto a = ppcf_grid(s, spec, p), b = ppcf_grid(mirrored(s), spec, p);
    for (std::size_t cell = 0; cell < a.size(); ++cell) {
        EXPECT_NEAR(a.attack[cell], b.attack[spec.mirror_cell(cell)], 1e-9);
        EXPECT_NEAR(a.defend[cell], b.defend[spec.mirror_cell(cell)], 1e-9);
    }
}

TEST(Ppcf, SingleCellGridSitsAtCenter) {
    const auto c = SportConfig::soccer();
    const auto spec = GridSpec::for_field(c, 1, 1);
    EXPECT_EQ(spec.center(0), (Vec2{0.0, 0.0}));
    const auto g = ppcf_grid(duel({-10, 0}, {10, 0}, {0, -20}), spec, PitchControlParams::from_sport(c));
    EXPECT_NEAR(g.attack[0], 0.5, 1e-3);
}

TEST(Ppcf, CloserDefenderNeverHelpsAttack) {
    const auto p = PitchControlParams::from_sport(SportConfig::soccer());
    double prev = 1.0;
    for (double d = 30.0; d >= 0.0; d -= 2.5) {
        const double a = solve_ppcf_at(duel({-8, 0}, {d, 0}, {-8, 0}), {0, 0}, p).attack;
        EXPECT_LE(a, prev + 1e-12);
        prev = a;
    }
}

TEST(Ppcf, ExcludedAttackerGetsNothing) {
    const auto p = PitchControlParams::from_sport(SportConfig::soccer());
    auto s = duel({0, 0}, {20, 0}, {0, 0});
    s.attackers.push_back(player(Team::Home, 1, {15, 5}));
    const auto pc = solve_ppcf_at(s, {1, 0}, p, 0);
    EXPECT_EQ(pc.attackers[0], 0.0);
    EXPECT_GT(pc.attackers[1], 0.0);
}

TEST(Ppcf, OpponentsOnlyInterference) {
    auto p = PitchControlParams::from_sport(SportConfig::soccer());
    p.interference = Interference::Opponents;
    const auto pc = solve_ppcf_at(duel({-10, 0}, {10, 0}, {0, -20}), {0, 0}, p);
    EXPECT_NEAR(pc.attack, pc.defend, 1e-12);
    // Teammates no longer block each other, so only each side is bounded by 1.
    EXPECT_LE(pc.attack, 1.0);
    EXPECT_GT(pc.total(), solve_ppcf_at(duel({-10, 0}, {10, 0}, {0, -20}), {0, 0},
                                        PitchControlParams::from_sport(SportConfig::soccer())).total());
}

TEST(Ppcf, ShortHorizonFlagsCells) {
    auto p = PitchControlParams::from_sport(SportConfig::soccer());
    p.integration.t_max = 1.0;
    const auto g = ppcf_grid(duel({-40, 0}, {40, 0}, {0, 30}), GridSpec::for_field(SportConfig::soccer(), 4, 2), p);
    EXPECT_EQ(g.count_flag(kCellNotConverged), g.size());
}

TEST(Ppcf, MissingBallOrBadParams) {
    auto s = duel({0, 0}, {1, 1}, {0, 0});
    s.ball.reset();
    const auto spec = GridSpec::for_field(SportConfig::soccer(), 2, 2);
    EXPECT_THROW(ppcf_grid(s, spec, PitchControlParams::from_sport(SportConfig::soccer())), InputError);
    auto p = PitchControlParams::from_sport(SportConfig::soccer());
    p.integration.dt = 0.0;
    s.ball = Vec2{};
    EXPECT_THROW(ppcf_grid(s, spec, p), ParameterError);
}

TEST(Ppcf, MaskedCellsSkipped) {
    auto spec = GridSpec::for_field(SportConfig::soccer(), 3, 1);
    spec.mask = {true, false, true};
    const auto g = ppcf_grid(duel({-1, 0}, {30, 0}, {0, 0}), spec, PitchControlParams::from_sport(SportConfig::soccer()));
    EXPECT_EQ(g.attack[0], 0.0);
    EXPECT_GT(g.attack[1], 0.5);
    EXPECT_EQ(g.count_flag(kCellMasked), 2u);
    const auto sum = team_control_summary(g);
    EXPECT_EQ(sum.cells, 1u);
    EXPECT_EQ(sum.mean, g.attack[1]);
}

TEST(Ppcf, PlayerGridSumsToTeam) {
    const auto c = SportConfig::soccer();
    std::mt19937_64 rng(2);
    const auto s = fixtures::random_state(rng, c, 3);
    const auto spec = GridSpec::for_field(c, 6, 4);
    const auto p = PitchControlParams::from_sport(c);
    const auto g = ppcf_grid(s, spec, p);
    std::vector<double> sum(spec.size(), 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
        const auto v = ppcf_player_grid(s, spec, p, j);
        for (std::size_t cell = 0; cell < v.size(); ++cell) sum[cell] += v[cell];
    }
    for (std::size_t cell = 0; cell < sum.size(); ++cell) EXPECT_NEAR(sum[cell], g.attack[cell], 1e-12);
    EXPECT_THROW(ppcf_player_grid(s, spec, p, 3), RangeError);
}

TEST(Ppcf, DefenderRateFactor) {
    const auto c = SportConfig::soccer();
    const auto strong = PitchControlParams::from_sport(c, 2.0);
    EXPECT_DOUBLE_EQ(strong.defender.control_rate, 8.6);
    const auto s = duel({-10, 0}, {10, 0}, {0, -20});
    EXPECT_LT(solve_ppcf_at(s, {0, 0}, strong).attack, 0.5);
    EXPECT_NE(strong.fingerprint(), PitchControlParams::from_sport(c).fingerprint());
}

TEST(GridExport, CsvRows) {
    const auto spec = GridSpec::for_field(SportConfig::soccer(), 2, 1);
    ControlGrid g(spec, "ppcf");
    g.attack = {0.25, 0.75};
    g.defend = {0.75, 0.25};
    std::ostringstream out;
    write_grid_csv(out, g);
    EXPECT_EQ(out.str(), "cx,cy,attack,defend\n-26.25,0,0.25,0.75\n26.25,0,0.75,0.25\n");
}

TEST(GridExport, BinaryRoundTrip) {
    const auto c = SportConfig::soccer();
    const auto spec = GridSpec::for_field(c, 7, 3);
    ControlGrid g(spec, "ppcf");
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.attack[i] = 1.0 / (3.0 + i);
        g.defend[i] = 1.0 - g.attack[i];
    }
    std::stringstream io;
    write_grid_binary(io, g);
    EXPECT_EQ(io.str().size(), 12 + 2 * 8 * g.size());
    const auto back = read_grid_binary(io, GridSpec::for_field(c, 1, 1));
    EXPECT_EQ(back.spec.nx, 7);
    EXPECT_EQ(back.attack, g.attack);
    EXPECT_EQ(back.defend, g.defend);
    std::istringstream bad("XXXX");
    EXPECT_THROW(read_grid_binary(bad, spec), ParseError);
}

TEST(GridSpec, CentersAndMirror) {
    const auto spec = GridSpec::for_field(SportConfig::soccer(), 50, 32);
    EXPECT_NEAR(spec.center(0).x, -52.5 + 1.05, 1e-12);
    EXPECT_NEAR(spec.center(0).y, -34.0 + 1.0625, 1e-12);
    for (std::size_t c = 0; c < spec.size(); c += 37) EXPECT_EQ(spec.center(spec.mirror_cell(c)), -spec.center(c));
    EXPECT_EQ(GridSpec::default_for(SportConfig::ultimate()).nx, 55);
    EXPECT_THROW(GridSpec::for_field(SportConfig::soccer(), 0, 3), ConfigError);
}

TEST(Ppcf, UncontestedAttackerAtTarget) {
    const auto p = PitchControlParams::from_sport(SportConfig::soccer());
    const auto pc = solve_ppcf_at(duel({5, 5}, {-47, 5}, {0, 0}), {5, 5}, p);
    EXPECT_GE(pc.attack, 0.99);
}

TEST(Ppcf, EmptyHalfGoesToFirstArrival) {
    const auto c = SportConfig::soccer();
    std::mt19937_64 rng(30);
    std::uniform_real_distribution<double> ux(-50, -5), uy(-30, 30);
    GameState s;
    for (int i = 0; i < 11; ++i) s.attackers.push_back(player(Team::Home, i, {ux(rng), uy(rng)}));
    for (int i = 0; i < 11; ++i) s.defenders.push_back(player(Team::Away, i, {ux(rng), uy(rng)}));
    s.ball = s.attackers[0].position;
    const auto spec = GridSpec::for_field(c, 50, 32);
    // The far corners are 50+ m from everyone, out of reach within the default 10 s horizon.
    auto p = PitchControlParams::from_sport(c);
    p.integration.t_max = 30.0;
    const auto g = ppcf_grid(s, spec, p);
    for (std::size_t cell : {spec.index(49, 0), spec.index(49, 31)}) {
        const Vec2 t = spec.center(cell);
        double ta = 1e9, td = 1e9;
        for (const auto& q : s.attackers) ta = std::min(ta, fixtures::oracle_tau(q.position, q.velocity, t, 0.7, 5.0));
        for (const auto& q : s.defenders) td = std::min(td, fixtures::oracle_tau(q.position, q.velocity, t, 0.7, 5.0));
        EXPECT_GE(g.attack[cell] + g.defend[cell], 0.99);
        if (ta < td) EXPECT_GT(g.attack[cell], g.defend[cell]);
        else EXPECT_GT(g.defend[cell], g.attack[cell]);
    }
}

TEST(Ppcf, TeamSwapMirrorSwapsChannels) {
    const auto c = SportConfig::soccer();
    const auto p = PitchControlParams::from_sport(c);
    const auto spec = GridSpec::for_field(c, 16, 10);
    std::mt19937_64 rng(12);
    const auto s = fixtures::random_state(rng, c, 11);
    const auto a = ppcf_grid(s, spec, p), b = ppcf_grid(mirrored(s, true), spec, p);
    for (std::size_t cell = 0; cell < a.size(); ++cell) {
        EXPECT_NEAR(a.attack[cell], b.defend[spec.mirror_cell(cell)], 1e-9);
        EXPECT_NEAR(a.defend[cell], b.attack[spec.mirror_cell(cell)], 1e-9);
    }
}

TEST(ControlSummary, UniformAndSingleCell) {
    const auto spec = GridSpec::for_field(SportConfig::soccer(), 5, 4);
    ControlGrid g(spec);
    std::fill(g.attack.begin(), g.attack.end(), 0.5);
    auto s = team_control_summary(g);
    EXPECT_DOUBLE_EQ(s.mean, 0.5);
    EXPECT_DOUBLE_EQ(s.max, 0.5);
    std::fill(g.attack.begin(), g.attack.end(), 0.0);
    g.attack[7] = 1.0;
    s = team_control_summary(g);
    EXPECT_DOUBLE_EQ(s.mean, 1.0 / 20);
    EXPECT_DOUBLE_EQ(s.mass, 1.0);
    auto masked = spec;
    masked.mask.assign(spec.size(), true);
    EXPECT_THROW(team_control_summary(ControlGrid(masked)), InputError);
}
