#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prefdiff/align.hpp"
#include "prefdiff/diagnostics.hpp"

using namespace prefdiff;

namespace {

// A small, fast fixture: T=120 schedule, tiny net, short pretraining.
struct Fixture {
    NoiseSchedule sched = NoiseSchedule::linear(120, 1e-4, 0.02);
    ToyTarget target;
    ToyTarget pretrain_dist;
    DenoiserNet net;

    Fixture() {
        target = ToyTarget::two_modes(3.0, 0.02);
        pretrain_dist = target;
        pretrain_dist.modes[0].mean[1] += 2.0;
        pretrain_dist.modes[1].mean[1] -= 2.0;
        DenoiserConfig cfg;
        cfg.hidden_dim = 16;
        cfg.n_hidden_layers = 2;
        Rng rng(4242);
        net = pretrain(cfg, pretrain_dist, sched, 800, 32, {3e-3, 0.9, 0.999, 1e-8}, rng).net;
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("toy target: validation and sampling") {
    ToyTarget t = ToyTarget::two_modes(3.0, 0.05);
    t.validate();
    CHECK(t.dim() == 2);
    CHECK(t.n_conditions() == 2);

    Rng rng(1);
    const Tensor x = t.sample_condition(0, rng);
    CHECK(x.size() == 2);
    CHECK(std::abs(x[0] - (-1.5)) < 2.0);
    CHECK_THROWS_AS(t.sample_condition(5, rng), std::invalid_argument);

    ToyTarget bad = t;
    bad.modes[0].weight = 0.9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("reward_oracle: maximum at the mode, unit offset, rotation invariance") {
    const ToyTarget t = ToyTarget::two_modes(3.0, 0.05);
    const Tensor at_mode = t.modes[0].mean;
    CHECK(reward_oracle(t, 0, at_mode) == 0.0);

    Tensor off = at_mode;
    off[0] += 1.0;
    CHECK(reward_oracle(t, 0, off) == doctest::Approx(-1.0));

    // any point at distance r from the mode scores -r^2
    Rng rng(2);
    for (int i = 0; i < 25; ++i) {
        const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double r = rng.uniform(0.0, 2.0);
        Tensor x = at_mode;
        x[0] += r * std::cos(ang);
        x[1] += r * std::sin(ang);
        CHECK(reward_oracle(t, 0, x) == doctest::Approx(-r * r).epsilon(1e-12));
    }
    CHECK_THROWS_AS(reward_oracle(t, 9, at_mode), std::invalid_argument);
}

TEST_CASE("gen_pairs: winner ranked at least as high; deterministic under seed") {
    const Fixture& f = fixture();
    Rng a(10);
    const std::vector<PreferencePair> pairs = gen_pairs(f.net, f.target, f.sched, 20, a);
    CHECK(pairs.size() == 20);
    for (const PreferencePair& p : pairs) {
        CHECK(p.reward_w >= p.reward_l);
        CHECK(p.provenance == Provenance::OnPolicy);
        CHECK(p.reward_w == doctest::Approx(reward_oracle(f.target, p.c, p.x0_w)));
    }
    Rng b(10);
    const std::vector<PreferencePair> again = gen_pairs(f.net, f.target, f.sched, 20, b);
    for (size_t i = 0; i < pairs.size(); ++i) {
        CHECK(pairs[i].x0_w[0] == again[i].x0_w[0]);
        CHECK(pairs[i].x0_l[1] == again[i].x0_l[1]);
    }
}

TEST_CASE("gen_unlike_pairs: provenance, winners near target modes, positive reward gap") {
    const Fixture& f = fixture();
    Rng rng(11);
    const std::vector<PreferencePair> pairs = gen_unlike_pairs(f.target, f.net, f.sched, 64, rng);
    double gap = 0.0;
    for (const PreferencePair& p : pairs) {
        CHECK(p.provenance == Provenance::Unlike);
        CHECK(p.reward_w >= p.reward_l);
        gap += p.reward_w - p.reward_l;
    }
    CHECK(gap / 64.0 > 0.5);  // pretraining is far from the target, so the
                              // oracle gap is decisively positive
}

TEST_CASE("align: zero steps is a no-op; ref stays frozen; logs are complete") {
    const Fixture& f = fixture();
    Rng prng(12);
    const std::vector<PreferencePair> pairs = gen_pairs(f.net, f.target, f.sched, 16, prng);

    RunConfig cfg;
    cfg.method = Method::Sdpo;
    cfg.loss.beta = 0.02;
    cfg.opt = {3e-4, 0.9, 0.95, 1e-8};
    cfg.steps = 0;
    cfg.seed = 99;
    const AlignResult r0 = align(f.net, f.net, pairs, f.sched, cfg);
    CHECK(r0.net.param_hash() == f.net.param_hash());

    cfg.steps = 40;
    cfg.diag_cadence = 10;
    const std::uint64_t ref_hash = f.net.param_hash();
    const AlignResult r = align(f.net, f.net, pairs, f.sched, cfg);
    CHECK(f.net.param_hash() == ref_hash);
    CHECK(r.net.param_hash() != ref_hash);
    CHECK(r.log.size() == 40);
    CHECK(r.weight_log.size() == 80);         // two rows per sdpo step
    CHECK(r.trace.size() == 1 + 40 / 10);     // step-0 row plus cadence rows
    for (const TrainLogRow& row : r.log) {
        CHECK(row.t >= 2);
        CHECK(row.t <= f.sched.T);
        CHECK(std::isfinite(row.loss));
        CHECK(row.w_clipped >= 0.8);
        CHECK(row.w_clipped <= 1.2);
    }
}

TEST_CASE("align: window restricts every logged timestep") {
    const Fixture& f = fixture();
    Rng prng(13);
    const std::vector<PreferencePair> pairs = gen_pairs(f.net, f.target, f.sched, 8, prng);
    RunConfig cfg;
    cfg.method = Method::DiffusionDpo;
    cfg.loss.beta = 2.0;
    cfg.loss.timestep_window = {{40, 70}};
    cfg.steps = 60;
    cfg.seed = 5;
    const AlignResult r = align(f.net, f.net, pairs, f.sched, cfg);
    for (const TrainLogRow& row : r.log) {
        CHECK(row.t >= 40);
        CHECK(row.t <= 70);
        CHECK(row.w_raw == 1.0);  // plain dpo logs no weights
    }
    CHECK(r.weight_log.empty());
}

TEST_CASE("align: all three methods run and are reproducible under the seed") {
    const Fixture& f = fixture();
    Rng prng(14);
    const std::vector<PreferencePair> pairs = gen_pairs(f.net, f.target, f.sched, 12, prng);
    for (const Method m : {Method::DiffusionDpo, Method::DpoCm, Method::Sdpo}) {
        RunConfig cfg;
        cfg.method = m;
        cfg.loss.beta = m == Method::DiffusionDpo ? 2.0 : 0.02;
        cfg.steps = 30;
        cfg.seed = 77;
        const AlignResult a = align(f.net, f.net, pairs, f.sched, cfg);
        const AlignResult b = align(f.net, f.net, pairs, f.sched, cfg);
        CHECK(a.net.param_hash() == b.net.param_hash());
        for (size_t i = 0; i < a.log.size(); ++i) {
            CHECK(a.log[i].loss == b.log[i].loss);
            CHECK(a.log[i].t == b.log[i].t);
        }
    }
}

TEST_CASE("align: cm hard mask zeroes masked contributions") {
    const Fixture& f = fixture();
    Rng prng(15);
    const std::vector<PreferencePair> pairs = gen_unlike_pairs(f.target, f.net, f.sched, 12, prng);
    RunConfig cfg;
    cfg.method = Method::DpoCm;
    cfg.loss.beta = 0.02;
    cfg.loss.hard_mask_threshold = 0.98;
    cfg.steps = 80;
    cfg.seed = 3;
    const AlignResult r = align(f.net, f.net, pairs, f.sched, cfg);
    int masked = 0;
    for (size_t i = 0; i < r.log.size(); ++i) {
        if (r.weight_log[i].raw < 0.98) {
            CHECK(r.log[i].loss == 0.0);
            CHECK(r.log[i].w_clipped == 0.0);
            ++masked;
        }
    }
    CHECK(masked > 0);  // unlike pairs at a shifted pretraining make low raws common
}

TEST_CASE("mean_oracle_reward and iterative_align bookkeeping") {
    const Fixture& f = fixture();
    Rng eval_rng(16);
    const double base = mean_oracle_reward(f.net, f.target, f.sched, 64, eval_rng);
    CHECK(base < 0.0);

    RunConfig cfg;
    cfg.method = Method::Sdpo;
    cfg.loss.beta = 0.02;
    cfg.opt = {3e-4, 0.9, 0.95, 1e-8};
    cfg.seed = 21;
    cfg.diag_cadence = 1000;
    const IterativeResult it = iterative_align(f.net, f.net, f.target, f.sched, 3, 8, 2, cfg);
    CHECK(it.rounds.size() == 3);
    CHECK(it.rounds[0].round == 1);
    CHECK(it.rounds[2].round == 3);
    for (const RoundMetric& r : it.rounds) CHECK(std::isfinite(r.mean_reward));
    CHECK(it.net.param_hash() != f.net.param_hash());
}

TEST_CASE("weight_curve: bins cover the range; near-oracle model gives ~1 everywhere") {
    const Fixture& f = fixture();
    Rng prng(17);
    const std::vector<PreferencePair> pairs = gen_pairs(f.net, f.target, f.sched, 24, prng);
    const std::vector<WeightCurveRow> rows = weight_curve(f.net, pairs, f.sched, 6, Rng(31));
    CHECK(rows.size() == 6);
    CHECK(rows.front().t_lo == 2);
    CHECK(rows.back().t_hi == f.sched.T);
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].t_lo == rows[i - 1].t_hi + 1);
    // the pretrained model is well-fit on its own samples: raw weights land
    // near 1 at mid/late bins
    CHECK(rows.back().mean_raw == doctest::Approx(1.0).epsilon(0.05));
    CHECK_THROWS_AS(weight_curve(f.net, pairs, f.sched, 1, Rng(1)), std::invalid_argument);
}

TEST_CASE("weight_curve: matched seeds give matched bin draws") {
    const Fixture& f = fixture();
    Rng prng(18);
    const std::vector<PreferencePair> a = gen_pairs(f.net, f.target, f.sched, 10, prng);
    const std::vector<WeightCurveRow> r1 = weight_curve(f.net, a, f.sched, 4, Rng(55));
    const std::vector<WeightCurveRow> r2 = weight_curve(f.net, a, f.sched, 4, Rng(55));
    for (size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].mean_raw == r2[i].mean_raw);
}

TEST_CASE("pretraining loss trends downward") {
    const NoiseSchedule sched = NoiseSchedule::linear(120, 1e-4, 0.02);
    const ToyTarget dist = ToyTarget::two_modes(3.0, 0.05);
    DenoiserConfig cfg;
    cfg.hidden_dim = 16;
    Rng rng(77);
    const PretrainResult r = pretrain(cfg, dist, sched, 600, 32, {3e-3, 0.9, 0.999, 1e-8}, rng);
    REQUIRE(r.loss_log.size() >= 6);
    double head = 0.0;
    double tail = 0.0;
    const size_t k = 3;
    for (size_t i = 0; i < k; ++i) {
        head += r.loss_log[i].second;
        tail += r.loss_log[r.loss_log.size() - 1 - i].second;
    }
    CHECK(tail / k < head / k);
}

TEST_CASE("trained sampler reproduces a single-Gaussian target mean") {
    const NoiseSchedule sched = NoiseSchedule::linear(120, 1e-4, 0.02);
    ToyTarget dist;
    dist.modes.push_back({Tensor({2}, {0.8, -0.3}), 0.04, 1.0});
    dist.condition_mode = {0};
    DenoiserConfig cfg;
    cfg.hidden_dim = 24;
    cfg.n_conditions = 1;
    Rng rng(88);
    const DenoiserNet net = pretrain(cfg, dist, sched, 2500, 32, {3e-3, 0.9, 0.999, 1e-8}, rng).net;

    Rng sample_rng(89);
    const int n = 4000;
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const Tensor x = ddpm_sample(net, 0, sched, sample_rng);
        sx += x[0];
        sy += x[1];
        sxx += x[0] * x[0];
        syy += x[1] * x[1];
    }
    const double mx = sx / n;
    const double my = sy / n;
    const double se_x = std::sqrt((sxx / n - mx * mx) / n);
    const double se_y = std::sqrt((syy / n - my * my) / n);
    // sample mean within 3 standard errors plus a small training-bias
    // allowance on each axis
    CHECK(std::abs(mx - 0.8) < 3.0 * se_x + 0.05);
    CHECK(std::abs(my + 0.3) < 3.0 * se_y + 0.05);
}

TEST_CASE("weight curve: late bins closer to 1 than early bins; mid |log w| below early") {
    const Fixture& f = fixture();
    Rng prng(91);
    const std::vector<PreferencePair> pairs = gen_pairs(f.net, f.target, f.sched, 64, prng);
    const std::vector<WeightCurveRow> rows = weight_curve(f.net, pairs, f.sched, 8, Rng(92));
    CHECK(std::abs(rows.back().mean_raw - 1.0) < std::abs(rows.front().mean_raw - 1.0));

    const double early = mean_abs_log_weight(f.net, pairs, f.sched, 2, f.sched.T / 10, Rng(93));
    const double mid =
        mean_abs_log_weight(f.net, pairs, f.sched, f.sched.T / 2, 3 * f.sched.T / 5, Rng(94));
    CHECK(mid < early);
}

TEST_CASE("density probe trace: checkpoint-indexed, winner irrelevant at start") {
    const Fixture& f = fixture();
    Rng prng(19);
    // balanced pairs: same-distribution winners and losers, labels by oracle
    const std::vector<PreferencePair> pairs = gen_pairs(f.net, f.target, f.sched, 32, prng);
    const DensitySnapshot s = density_snapshot(f.net, pairs, f.sched.T / 2, 3 * f.sched.T / 5, f.sched,
                                               Rng(60));
    // before any preference training the winner/loser densities are close
    CHECK(std::abs(s.diff) < 0.35);
    CHECK(s.mean_logp_winner < 5.0);
}
