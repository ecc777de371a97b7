#include "awgif/error.hpp"
#include "awgif/guided_filter.hpp"
#include "awgif/metrics.hpp"
#include "awgif/parallel.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace awgif;

namespace {

FilterParams params_with(int zeta, double lambda0) {
    FilterParams p;
    p.zeta = zeta;
    p.lambda0 = lambda0;
    return p;
}

ImageGrid step_image(int width, int height, double lo = 0.0, double hi = 1.0) {
    ImageGrid g(width, height);
    for (int v = 0; v < height; ++v)
        for (int u = 0; u < width; ++u) g(u, v) = 2 * u < width ? lo : hi;
    return g;
}

ImageGrid add_noise(ImageGrid g, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, sigma);
    for (double& x : g.values()) x += n(rng);
    return g;
}

} // namespace

TEST_CASE("filter parameter validation") {
    FilterParams p;
    CHECK_NOTHROW(p.validate());
    p.epsilon = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = FilterParams{};
    p.lambda0 = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    CHECK(FilterParams{}.epsilon == doctest::Approx(1.0 / 65025.0));
    CHECK(FilterParams{}.eta == doctest::Approx(2.5e-5));
    CHECK(parse_filter_kind("wgif") == FilterKind::wgif);
    CHECK_THROWS_AS(parse_filter_kind("egif"), InvalidArgument);
}

TEST_CASE("edge_aware_weight") {
    const double eps = FilterParams{}.epsilon;
    SUBCASE("constant guide gives unit weights") {
        const auto gamma = edge_aware_weight(ImageGrid(10, 6, 0.4), eps);
        CHECK(gamma.min() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(gamma.max() == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("weights straddle one") {
        std::mt19937_64 rng(1);
        const auto gamma = edge_aware_weight(oracle::random_grid(12, 12, rng), eps);
        CHECK(gamma.min() <= 1.0);
        CHECK(gamma.max() >= 1.0);
        CHECK(gamma.min() > 0.0);
    }
    SUBCASE("textured half outweighs the flat half and matches direct evaluation") {
        std::mt19937_64 rng(2);
        ImageGrid g(8, 8, 0.5);
        std::uniform_real_distribution<double> tex(0.0, 1.0);
        for (int v = 0; v < 8; ++v)
            for (int u = 4; u < 8; ++u) g(u, v) = tex(rng);
        const auto gamma = edge_aware_weight(g, eps);
        double flat_max = 0.0, textured_min = 1e300;
        for (int v = 0; v < 8; ++v) {
            for (int u = 0; u < 3; ++u) flat_max = std::max(flat_max, gamma(u, v));
            for (int u = 4; u < 8; ++u) textured_min = std::min(textured_min, gamma(u, v));
        }
        CHECK(textured_min > flat_max);
        // flat pixels push gamma into the thousands, so compare relatively
        CHECK(oracle::max_rel_diff(gamma, oracle::edge_weight(g, eps)) < 1e-12);
    }
}

TEST_CASE("adaptive_lambda") {
    CHECK(adaptive_lambda(ImageGrid(9, 9, 0.2), 2, 100.0) == 0.0);

    // Two columns 0.3 / 0.7: every clipped window is balanced, variance 0.04.
    ImageGrid g(2, 6);
    for (int v = 0; v < 6; ++v) {
        g(0, v) = 0.3;
        g(1, v) = 0.7;
    }
    CHECK(adaptive_lambda(g, 1, 10.0) == doctest::Approx(2.0).epsilon(1e-12));

    std::mt19937_64 rng(4);
    const auto r = oracle::random_grid(17, 13, rng);
    CHECK(adaptive_lambda(r, 3, 7.5) == doctest::Approx(oracle::adaptive_lambda(r, 3, 7.5)).epsilon(1e-12));
}

TEST_CASE("solve_coefficients") {
    std::mt19937_64 rng(6);
    const auto G = oracle::random_grid(16, 16, rng);
    const FilterParams p = params_with(2, 1e3);
    const auto gamma = edge_aware_weight(G, p.epsilon);

    SUBCASE("constant input") {
        const auto c = solve_coefficients(ImageGrid(16, 16, 0.6), G, p, gamma, 3.0);
        CHECK(c.a.min() == 0.0);
        CHECK(c.a.max() == 0.0);
        CHECK(c.b == ImageGrid(16, 16, 0.6));
    }
    SUBCASE("identity fit without regularisation") {
        const auto c = solve_coefficients(G, G, p, gamma, 0.0);
        CHECK(oracle::max_abs_diff(c.a, ImageGrid(16, 16, 1.0)) < 1e-9);
        CHECK(oracle::max_abs_diff(c.b, ImageGrid(16, 16, 0.0)) < 1e-9);
    }
    SUBCASE("matches the per-window ridge regression") {
        const auto Z = oracle::random_grid(16, 16, rng);
        const double lambda = adaptive_lambda(G, p.zeta, p.lambda0);
        const auto c = solve_coefficients(Z, G, p, gamma, lambda);
        const auto ref = oracle::ridge_fit(Z, G, gamma, lambda, p.zeta);
        CHECK(oracle::max_abs_diff(c.a, ref.a) < 1e-9);
        CHECK(oracle::max_abs_diff(c.b, ref.b) < 1e-9);
    }
    SUBCASE("flat guide with zero lambda falls back to the window mean") {
        const auto Z = oracle::random_grid(16, 16, rng);
        const ImageGrid flat(16, 16, 0.5);
        const auto c = solve_coefficients(Z, flat, p, ImageGrid(16, 16, 1.0), 0.0);
        CHECK(c.a.max() == 0.0);
        CHECK(oracle::max_abs_diff(c.b, oracle::box_mean(Z, 2)) < 1e-12);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(solve_coefficients(ImageGrid(4, 4), G, p, gamma, 1.0), DimensionMismatch);
    }
}

TEST_CASE("self_guided_coefficients") {
    const FilterParams p = params_with(2, 10.0);
    SUBCASE("constant input") {
        const auto c = self_guided_coefficients(ImageGrid(8, 8, 0.25), p);
        CHECK(c.a.max() == 0.0);
        CHECK(c.b == ImageGrid(8, 8, 0.25));
    }
    SUBCASE("slopes in [0, 1) and identical to the general solver") {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 20; ++trial) {
            const auto Z = oracle::random_grid(14, 11, rng);
            const auto c = self_guided_coefficients(Z, p);
            CHECK(c.a.min() >= 0.0);
            CHECK(c.a.max() < 1.0);
            const auto general = solve_coefficients(Z, Z, p, edge_aware_weight(Z, p.epsilon),
                                                    adaptive_lambda(Z, p.zeta, p.lambda0));
            CHECK(c.a == general.a);
            CHECK(c.b == general.b);
        }
    }
}

TEST_CASE("aggregation_weights") {
    std::mt19937_64 rng(10);
    const auto G = oracle::random_grid(16, 16, rng);
    FilterParams p = params_with(2, 0.0);
    const ImageGrid ones(16, 16, 1.0);

    SUBCASE("exact linear relation gives the maximum weight") {
        ImageGrid Z(16, 16);
        for (std::size_t i = 0; i < Z.size(); ++i) Z[i] = 0.5 * G[i] + 0.1;
        const auto w = aggregation_weights(solve_coefficients(Z, G, p, ones, 0.0), Z, G, p);
        CHECK(w.min() == doctest::Approx(1.001).epsilon(1e-9));
        CHECK(w.max() <= 1.001);
    }
    SUBCASE("large residuals give the floor weight") {
        const auto Z = oracle::random_grid(16, 16, rng);
        const ImageGrid flat(16, 16, 0.5);
        const auto w = aggregation_weights(solve_coefficients(Z, flat, p, ones, 0.0), Z, flat, p);
        CHECK(w.max() == doctest::Approx(0.001).epsilon(1e-12));
        CHECK(w.min() > 0.001 - 1e-15);
    }
    SUBCASE("matches direct residuals on random data") {
        const auto Z = oracle::random_grid(16, 16, rng);
        p.lambda0 = 1e3;
        const auto gamma = edge_aware_weight(G, p.epsilon);
        const auto c = solve_coefficients(Z, G, p, gamma, adaptive_lambda(G, p.zeta, p.lambda0));
        const auto w = aggregation_weights(c, Z, G, p);
        CHECK(oracle::max_abs_diff(w, oracle::residual_weights(c.a, c.b, Z, G, p.eta, p.zeta)) < 1e-12);
    }
    SUBCASE("matches direct residuals near the eta scale") {
        // Residuals of order eta keep the weights away from both limits; the
        // exponent magnifies round-off in the residual by 1/eta = 4e4.
        ImageGrid Z = add_noise(G, 0.005, 12);
        for (double& x : Z.values()) x = 0.8 * x + 0.05;
        p.lambda0 = 1e-3;
        const auto gamma = edge_aware_weight(G, p.epsilon);
        const auto c = solve_coefficients(Z, G, p, gamma, adaptive_lambda(G, p.zeta, p.lambda0));
        const auto w = aggregation_weights(c, Z, G, p);
        const auto ref = oracle::residual_weights(c.a, c.b, Z, G, p.eta, p.zeta);
        CHECK(oracle::max_abs_diff(w, ref) < 1e-10);
        CHECK(w.min() > 0.01);
        CHECK(w.max() < 1.0);
    }
}

TEST_CASE("aggregate_coefficients") {
    std::mt19937_64 rng(14);
    const stats::WindowSpec w(3);
    const CoefficientField c{oracle::random_grid(15, 17, rng), oracle::random_grid(15, 17, rng)};
    const auto weights = oracle::random_grid(15, 17, rng, 0.001, 1.001);

    SUBCASE("constant weights reduce to box means") {
        const auto agg = aggregate_coefficients(c, ImageGrid(15, 17, 0.37), w);
        CHECK(oracle::max_abs_diff(agg.a, stats::box_mean(c.a, w)) < 1e-12);
        CHECK(oracle::max_abs_diff(agg.b, stats::box_mean(c.b, w)) < 1e-12);
    }
    SUBCASE("constant field is preserved exactly") {
        const CoefficientField flat{ImageGrid(15, 17, 0.42), ImageGrid(15, 17, -0.3)};
        const auto agg = aggregate_coefficients(flat, weights, w);
        CHECK(agg.a == flat.a);
        CHECK(agg.b == flat.b);
    }
    SUBCASE("weighted-average oracle") {
        const auto agg = aggregate_coefficients(c, weights, w);
        CHECK(oracle::max_abs_diff(agg.a, oracle::weighted_mean(c.a, weights, 3)) < 1e-12);
        CHECK(oracle::max_abs_diff(agg.b, oracle::weighted_mean(c.b, weights, 3)) < 1e-12);
    }
    SUBCASE("non-positive weights are rejected") {
        CHECK_THROWS_AS(aggregate_coefficients(c, ImageGrid(15, 17, 0.0), w), InvalidArgument);
    }
}

TEST_CASE("awgif composition") {
    std::mt19937_64 rng(16);
    const FilterParams p = params_with(2, 50.0);

    SUBCASE("constant inputs are reproduced exactly") {
        const ImageGrid c(12, 12, 0.731);
        CHECK(awgif_filter(c, c, p).base == c);
        CHECK(awgif_filter(c, ImageGrid(12, 12, 0.2), p).base == c);
    }
    SUBCASE("staged pipeline gives the same bits") {
        const auto Z = oracle::random_grid(20, 18, rng);
        const auto G = oracle::random_grid(20, 18, rng);
        const auto gamma = edge_aware_weight(G, p.epsilon);
        const auto coeff = solve_coefficients(Z, G, p, gamma, adaptive_lambda(G, p.zeta, p.lambda0));
        const auto agg = aggregate_coefficients(coeff, aggregation_weights(coeff, Z, G, p), p.window());
        ImageGrid base(20, 18);
        for (std::size_t i = 0; i < base.size(); ++i) base[i] = agg.a[i] * G[i] + agg.b[i];
        const auto out = awgif_filter(Z, G, p);
        CHECK(out.base == base);
        CHECK(out.a_bar == agg.a);
    }
    SUBCASE("preserves a noisy step edge better than the classic filter") {
        const ImageGrid clean = step_image(64, 64);
        const ImageGrid noisy = add_noise(clean, 0.05, 17);
        const FilterParams demo = params_with(15, 1e3);
        const double adaptive = metrics::rmse(awgif_filter(noisy, noisy, demo).base, clean);
        const double classic = metrics::rmse(gif_filter(noisy, noisy, demo).base, clean);
        CHECK(adaptive < classic);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(awgif_filter(ImageGrid(4, 4), ImageGrid(4, 5), p), DimensionMismatch);
    }
}

TEST_CASE("gif and wgif baselines") {
    std::mt19937_64 rng(18);
    const FilterParams p = params_with(2, 0.05);
    const auto Z = oracle::random_grid(16, 14, rng);
    const auto G = oracle::random_grid(16, 14, rng);

    auto expected = [&](const ImageGrid& gamma) {
        const auto fit = oracle::ridge_fit(Z, G, gamma, p.lambda0, p.zeta);
        const auto a = oracle::box_mean(fit.a, p.zeta);
        const auto b = oracle::box_mean(fit.b, p.zeta);
        ImageGrid base(16, 14);
        for (std::size_t i = 0; i < base.size(); ++i) base[i] = a[i] * G[i] + b[i];
        return base;
    };

    CHECK(oracle::max_abs_diff(gif_filter(Z, G, p).base, expected(ImageGrid(16, 14, 1.0))) < 1e-9);
    CHECK(oracle::max_abs_diff(wgif_filter(Z, G, p).base, expected(oracle::edge_weight(G, p.epsilon))) < 1e-9);

    const ImageGrid c(16, 14, 0.55);
    CHECK(gif_filter(c, c, p).base == c);
    CHECK(wgif_filter(c, c, p).base == c);

    // Heavy regularisation flattens the slope, leaving the box mean.
    const FilterParams heavy = params_with(2, 1e9);
    const auto mean = stats::box_mean(Z, stats::WindowSpec(2));
    CHECK(oracle::max_abs_diff(gif_filter(Z, Z, heavy).base, stats::box_mean(mean, stats::WindowSpec(2))) < 1e-8);
    CHECK(oracle::max_abs_diff(wgif_filter(Z, Z, heavy).base, stats::box_mean(mean, stats::WindowSpec(2))) < 1e-8);
}

TEST_CASE("filter invariants") {
    std::mt19937_64 rng(20);
    const FilterParams p = params_with(3, 20.0);

    SUBCASE("self-guided a_bar stays in [0, 1]") {
        for (int trial = 0; trial < 10; ++trial) {
            const auto Z = oracle::random_grid(24, 24, rng);
            const auto out = awgif_filter(Z, Z, p);
            CHECK(out.a_bar.min() >= 0.0);
            CHECK(out.a_bar.max() <= 1.0);
        }
    }
    SUBCASE("affine guidance is reproduced without regularisation") {
        const auto G = oracle::random_grid(24, 20, rng);
        ImageGrid Z(24, 20);
        for (std::size_t i = 0; i < Z.size(); ++i) Z[i] = -1.7 * G[i] + 0.4;
        const FilterParams exact = params_with(3, 0.0);
        CHECK(oracle::max_abs_diff(awgif_filter(Z, G, exact).base, Z) < 1e-9);
    }
    SUBCASE("grey-level shift passes through") {
        const auto Z = oracle::random_grid(24, 20, rng);
        const auto G = oracle::random_grid(24, 20, rng);
        ImageGrid shifted = Z;
        for (double& x : shifted.values()) x += 0.3;
        for (auto kind : {FilterKind::awgif, FilterKind::gif, FilterKind::wgif}) {
            CAPTURE(to_string(kind));
            ImageGrid expect = apply_filter(kind, Z, G, p).base;
            for (double& x : expect.values()) x += 0.3;
            CHECK(oracle::max_abs_diff(apply_filter(kind, shifted, G, p).base, expect) < 1e-12);
        }
    }
    SUBCASE("slopes peak on a step edge") {
        const ImageGrid step = step_image(40, 24, 0.25, 0.75);
        const auto out = awgif_filter(step, step, p);
        double edge_min = 1e300, flat_max = 0.0;
        for (int v = 0; v < 24; ++v) {
            for (int u = 0; u < 40; ++u) {
                const int dist = u < 20 ? 19 - u : u - 20;
                if (dist < p.zeta) edge_min = std::min(edge_min, out.a_bar(u, v));
                if (dist > 2 * p.zeta) flat_max = std::max(flat_max, out.a_bar(u, v));
            }
        }
        CHECK(edge_min > flat_max);
    }
}

TEST_CASE("results do not depend on the thread count") {
    std::mt19937_64 rng(22);
    const auto Z = oracle::random_grid(300, 280, rng);
    const auto G = oracle::random_grid(300, 280, rng);
    const FilterParams p = params_with(4, 10.0);
    const int before = thread_count();
    set_thread_count(1);
    const auto serial = awgif_filter(Z, G, p);
    set_thread_count(4);
    const auto threaded = awgif_filter(Z, G, p);
    set_thread_count(before);
    CHECK(serial.base == threaded.base);
    CHECK(serial.a_bar == threaded.a_bar);
}
