#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "prefdiff/flow_sde.hpp"

using namespace prefdiff;

TEST_CASE("drift_field: vanishing terms and hand substitution") {
    const InterpolantSchedule s = InterpolantSchedule::linear(0.0);

    // eta == 0 with eps == 0: b = (beta_dot/beta) x
    const DenoiserField zero = [](double, const Tensor& x) { return Tensor::zeros(x.shape()); };
    const Tensor x({1}, {0.8});
    const Tensor b0 = drift_field(0.3, x, zero, s);
    CHECK(b0[0] == doctest::Approx(-1.0 / 0.7 * 0.8).epsilon(1e-14));

    // alpha=t, beta=1-t, t=0.5, x=1, eta=1, eps=0:
    // b = 1*1 + (-1/0.5)(1 - 0.5*1) = 0
    const DenoiserField one = [](double, const Tensor& xx) { return Tensor::full(xx.shape(), 1.0); };
    const Tensor b1 = drift_field(0.5, Tensor({1}, {1.0}), one, s);
    CHECK(b1[0] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("drift_field is affine in eta") {
    const InterpolantSchedule s = InterpolantSchedule::linear(0.25);
    Rng rng(3);
    const Tensor x = rng.normal_tensor({3});
    const Tensor e1v = rng.normal_tensor({3});
    const Tensor e2v = rng.normal_tensor({3});
    const DenoiserField e1 = [&](double, const Tensor&) { return e1v; };
    const DenoiserField e2 = [&](double, const Tensor&) { return e2v; };
    const DenoiserField e12 = [&](double, const Tensor&) { return e1v + e2v; };
    const DenoiserField e0 = [](double, const Tensor& xx) { return Tensor::zeros(xx.shape()); };
    for (const double t : {0.1, 0.45, 0.83}) {
        const Tensor lhs = drift_field(t, x, e12, s) - drift_field(t, x, e1, s);
        const Tensor rhs = drift_field(t, x, e2, s) - drift_field(t, x, e0, s);
        for (int i = 0; i < 3; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
    }
}

TEST_CASE("drift_field: endpoint domain errors") {
    const InterpolantSchedule s = InterpolantSchedule::linear(0.1);
    const DenoiserField zero = [](double, const Tensor& x) { return Tensor::zeros(x.shape()); };
    CHECK_THROWS_AS(drift_field(0.0, Tensor({1}, {1.0}), zero, s), std::domain_error);
    CHECK_THROWS_AS(drift_field(1.0, Tensor({1}, {1.0}), zero, s), std::domain_error);
}

TEST_CASE("em_step: fixed point, deterministic Euler, argument errors") {
    const Tensor x({2}, {1.0, -1.0});
    const Tensor zero = Tensor::zeros({2});
    const Tensor out = em_step(x, 0.5, 0.01, zero, 0.0, zero);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == -1.0);

    const Tensor b = Tensor::full({2}, 3.0);
    const Tensor out2 = em_step(x, 0.5, 0.01, b, 0.0, zero);
    CHECK(out2[0] == doctest::Approx(1.03));
    CHECK(out2[1] == doctest::Approx(-0.97));

    CHECK_THROWS_AS(em_step(x, 0.5, 0.01, b, -0.1, zero), std::invalid_argument);
    CHECK_THROWS_AS(em_step(x, 0.5, 0.0, b, 0.1, zero), std::invalid_argument);
}

TEST_CASE("em_step: increment moments (Monte Carlo)") {
    // b = 0, eps = 0.5, dt = 0.01: increments have mean 0, variance 0.01
    Rng rng(7);
    const Tensor x = Tensor::zeros({1});
    const Tensor zero = Tensor::zeros({1});
    const int n = 100000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const Tensor xi = rng.normal_tensor({1});
        const double d = em_step(x, 0.5, 0.01, zero, 0.5, xi)[0];
        sum += d;
        sq += d * d;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(0.01 / n));
    CHECK(var == doctest::Approx(2.0 * 0.5 * 0.01).epsilon(0.03));
}

TEST_CASE("gaussian closed-form denoisers and their consistency relation") {
    const InterpolantSchedule s = InterpolantSchedule::linear(0.1);
    const DenoiserField data = gaussian_denoiser(s, DenoiserTarget::Data);
    const DenoiserField noise = gaussian_denoiser(s, DenoiserTarget::Noise);
    Rng rng(11);
    for (const double t : {0.2, 0.5, 0.9}) {
        const Tensor x = rng.normal_tensor({2});
        const Tensor ed = data(t, x);
        const Tensor en = noise(t, x);
        const double a = s.alpha(t);
        const double b = s.beta(t);
        for (int i = 0; i < 2; ++i) {
            CHECK(ed[i] == doctest::Approx(a * x[i] / (a * a + b * b)).epsilon(1e-14));
            CHECK(en[i] == doctest::Approx(b * x[i] / (a * a + b * b)).epsilon(1e-14));
            // x = alpha E[x1|x] + beta E[z|x]
            CHECK(a * ed[i] + b * en[i] == doctest::Approx(x[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("sde_sample: same seed gives the identical path") {
    InterpolantSchedule s = InterpolantSchedule::linear(0.1);
    const DenoiserField field = gaussian_denoiser(s, DenoiserTarget::Data);
    Rng a(5);
    Rng b(5);
    const Tensor xa = sde_sample(field, s, 100, 2, a);
    const Tensor xb = sde_sample(field, s, 100, 2, b);
    CHECK(xa[0] == xb[0]);
    CHECK(xa[1] == xb[1]);
}

TEST_CASE("sde_sample: eps == 0 reduces to noise-independent deterministic Euler") {
    const InterpolantSchedule s = InterpolantSchedule::linear(0.0);
    const DenoiserField field = gaussian_denoiser(s, DenoiserTarget::Data);
    const auto run_from = [&](const Tensor& x0, Rng& rng_noise) {
        Tensor x = x0;
        double t = s.t_lo;
        const int n = 64;
        const double dt = (s.t_hi - s.t_lo) / n;
        for (int j = 0; j < n; ++j) {
            const Tensor bfield = drift_field(t, x, field, s);
            x = em_step(x, t, dt, bfield, 0.0, rng_noise.normal_tensor({2}));
            t = s.t_lo + (j + 1) * dt;
        }
        return x;
    };
    Rng n1(100);
    Rng n2(200);
    const Tensor x0({2}, {0.3, -0.7});
    const Tensor r1 = run_from(x0, n1);
    const Tensor r2 = run_from(x0, n2);
    CHECK(std::abs(r1[0] - r2[0]) < 1e-12);
    CHECK(std::abs(r1[1] - r2[1]) < 1e-12);
}

TEST_CASE("sde_sample: first-order convergence at eps == 0") {
    const InterpolantSchedule s = InterpolantSchedule::linear(0.0);
    const DenoiserField field = gaussian_denoiser(s, DenoiserTarget::Data);
    const Tensor x0({2}, {1.1, -0.4});
    const auto endpoint = [&](int n_steps) {
        Tensor x = x0;
        double t = s.t_lo;
        const double dt = (s.t_hi - s.t_lo) / n_steps;
        for (int j = 0; j < n_steps; ++j) {
            x = em_step(x, t, dt, drift_field(t, x, field, s), 0.0, Tensor::zeros({2}));
            t = s.t_lo + (j + 1) * dt;
        }
        return x;
    };
    const Tensor ref = endpoint(16384);
    const Tensor coarse = endpoint(128);
    const Tensor fine = endpoint(256);
    const double e1 = std::sqrt(squared_norm(coarse - ref));
    const double e2 = std::sqrt(squared_norm(fine - ref));
    const double ratio = e1 / e2;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.5);
}

TEST_CASE("sde_sample: closed-form denoiser transports N(0,I) to N(0,I)") {
    InterpolantSchedule s = InterpolantSchedule::linear(0.1);
    const DenoiserField field = gaussian_denoiser(s, DenoiserTarget::Data);
    Rng rng(13);
    const int n = 10000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng stream = rng.split(static_cast<std::uint64_t>(i));
        const Tensor x = sde_sample(field, s, 200, 1, stream);
        sum += x[0];
        sq += x[0] * x[0];
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("train_denoiser: initial loss ~ dim and closed-form recovery") {
    InterpolantSchedule s = InterpolantSchedule::linear(0.1);
    Rng rng(17);
    std::vector<Tensor> data;
    for (int i = 0; i < 1024; ++i) data.push_back(rng.normal_tensor({2}));

    // eta == 0: E|z|^2 = dim per sample
    {
        Rng init(18);
        FlowDenoiserNet net(2, 8, 1, 4, init);
        for (Tensor& p : net.params())
            for (int i = 0; i < p.size(); ++i) p[i] = 0.0;
        Rng probe(19);
        double acc = 0.0;
        const int n = 4000;
        for (int i = 0; i < n; ++i) {
            const Tensor& x1 = data[static_cast<size_t>(probe.uniform_int(0, 1023))];
            const Tensor z = probe.normal_tensor({2});
            const double t = probe.uniform(s.t_lo, s.t_hi);
            Tensor xt = x1;
            for (int k = 0; k < 2; ++k) xt[k] = s.alpha(t) * x1[k] + s.beta(t) * z[k];
            acc += squared_norm(z - net.predict(t, xt));
        }
        CHECK(acc / n == doctest::Approx(2.0).epsilon(0.05));
    }

    // trained noise-target net approximates beta x / (alpha^2 + beta^2)
    // on a probe grid over the data bulk, and correlates with the input
    // near t = 0
    {
        Rng init(21);
        FlowDenoiserNet net(2, 32, 2, 8, init);
        Rng train_rng(22);
        train_denoiser(net, data, s, DenoiserTarget::Noise, 9000, 48, {2.5e-3, 0.9, 0.999, 1e-8}, train_rng);

        double num = 0.0;
        double den = 0.0;
        for (const double t : {0.2, 0.35, 0.5, 0.65, 0.8}) {
            const double a = s.alpha(t);
            const double b = s.beta(t);
            const double scale = b / (a * a + b * b);
            for (double x0 = -1.5; x0 <= 1.5; x0 += 0.5) {
                for (double x1 = -1.5; x1 <= 1.5; x1 += 0.5) {
                    const Tensor x({2}, {x0, x1});
                    const Tensor pred = net.predict(t, x);
                    for (int k = 0; k < 2; ++k) {
                        num += (pred[k] - scale * x[k]) * (pred[k] - scale * x[k]);
                        den += scale * x[k] * scale * x[k];
                    }
                }
            }
        }
        CHECK(std::sqrt(num / den) < 0.1);  // closed form within 10% in rms

        double sxy = 0.0;
        double sxx = 0.0;
        double syy = 0.0;
        Rng probe(23);
        for (int i = 0; i < 400; ++i) {
            const Tensor xe = probe.normal_tensor({2});
            const Tensor pe = net.predict(0.05, xe);
            for (int k = 0; k < 2; ++k) {
                sxy += xe[k] * pe[k];
                sxx += xe[k] * xe[k];
                syy += pe[k] * pe[k];
            }
        }
        CHECK(sxy / std::sqrt(sxx * syy) > 0.9);
    }
}
