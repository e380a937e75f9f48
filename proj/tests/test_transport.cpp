#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "depmix/coupling.hpp"
#include "depmix/errors.hpp"
#include "depmix/stats.hpp"
#include "depmix/transport.hpp"

using namespace depmix;

namespace {

EmpiricalMeasure measure1d(std::vector<double> xs, std::vector<double> ms) {
    std::vector<std::vector<double>> pts;
    for (double x : xs) {
        pts.push_back({x});
    }
    return EmpiricalMeasure::from_points(std::move(pts), std::move(ms));
}

EmpiricalMeasure random_measure_1d(std::uint64_t seed, int atoms) {
    std::vector<double> xs, ms;
    double total = 0.0;
    for (int i = 0; i < atoms; ++i) {
        xs.push_back(4.0 * rng::uniform01(seed, 11, static_cast<std::uint64_t>(i)) - 2.0);
        const double w = 0.05 + rng::uniform01(seed, 12, static_cast<std::uint64_t>(i));
        ms.push_back(w);
        total += w;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < ms.size(); ++i) {
        ms[i] /= total;
        acc += ms[i];
    }
    ms.back() = 1.0 - acc;
    return measure1d(xs, ms);
}

} // namespace

TEST_SUITE("transport") {

TEST_CASE("metric validation and geometric weights") {
    const WeightedMetric over{{0.7, 0.7}};
    CHECK_THROWS_AS(over.validate(), InvalidParameter);
    const WeightedMetric negative{{-0.1}};
    CHECK_THROWS_AS(negative.validate(), InvalidParameter);
    const WeightedMetric g = WeightedMetric::geometric(20);
    g.validate();
    CHECK(g.weights[0] == 0.5);
    CHECK(g.weights[4] == doctest::Approx(std::pow(2.0, -5)));
}

TEST_CASE("metric axioms on random triples") {
    const WeightedMetric m = WeightedMetric::geometric(3);
    for (std::uint64_t s = 0; s < 30; ++s) {
        std::vector<double> x(3), y(3), z(3);
        for (int c = 0; c < 3; ++c) {
            x[c] = rng::uniform01(s, 1, c);
            y[c] = rng::uniform01(s, 2, c);
            z[c] = rng::uniform01(s, 3, c);
        }
        CHECK(m.distance(x, y) >= 0.0);
        CHECK(m.distance(x, y) == doctest::Approx(m.distance(y, x)));
        CHECK(m.distance(x, z) <= m.distance(x, y) + m.distance(y, z) + 1e-14);
        CHECK(m.distance(x, x) == 0.0);
    }
}

TEST_CASE("exact 1-d distance on point masses and simple splits") {
    const auto pa = measure1d({2.0}, {1.0});
    const auto pb = measure1d({-1.5}, {1.0});
    CHECK(w1_exact_1d(pa, pb, 1.0) == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(w1_exact_1d(pa, pb, 0.5) == doctest::Approx(1.75).epsilon(1e-14));

    const auto u = measure1d({0.0, 1.0}, {0.5, 0.5});
    const auto skew = measure1d({0.0, 1.0}, {0.75, 0.25});
    CHECK(w1_exact_1d(u, skew, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("lp solver equals the exact 1-d value on random instances") {
    const WeightedMetric m = WeightedMetric::single(1.0);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto p = random_measure_1d(3 * s + 1, 5);
        const auto q = random_measure_1d(3 * s + 2, 5);
        const TransportPlan plan = w1_lp(p, q, m);
        const double exact = w1_exact_1d(p, q, 1.0);
        CHECK(std::fabs(plan.value - exact) < 1e-9);
        CHECK(!plan.subsampled);
        // Coupling rows form a feasible transport: masses balance per side.
        std::vector<double> out(static_cast<std::size_t>(p.size()), 0.0);
        std::vector<double> in(static_cast<std::size_t>(q.size()), 0.0);
        for (const auto& arc : plan.arcs) {
            out[static_cast<std::size_t>(arc.from)] += arc.mass;
            in[static_cast<std::size_t>(arc.to)] += arc.mass;
        }
        for (std::int64_t i = 0; i < p.size(); ++i) {
            CHECK(out[static_cast<std::size_t>(i)] ==
                  doctest::Approx(p.masses[static_cast<std::size_t>(i)]).epsilon(1e-9));
        }
        for (std::int64_t j = 0; j < q.size(); ++j) {
            CHECK(in[static_cast<std::size_t>(j)] ==
                  doctest::Approx(q.masses[static_cast<std::size_t>(j)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("identical measures transport for free with the identity coupling") {
    const auto p = random_measure_1d(77, 5);
    const TransportPlan plan = w1_lp(p, p, WeightedMetric::single(1.0));
    CHECK(plan.value == doctest::Approx(0.0).epsilon(1e-12));
    for (const auto& arc : plan.arcs) {
        CHECK(arc.from == arc.to);
    }
}

TEST_CASE("two-by-two closed form") {
    // P = (a at 0, 1-a at 1), Q = (b at 0, 1-b at 1): W1 = |a - b|.
    const auto p = measure1d({0.0, 1.0}, {0.3, 0.7});
    const auto q = measure1d({0.0, 1.0}, {0.55, 0.45});
    const TransportPlan plan = w1_lp(p, q, WeightedMetric::single(1.0));
    CHECK(plan.value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("coupling export round-trips through csv") {
    const auto p = random_measure_1d(123, 4);
    const auto q = random_measure_1d(124, 4);
    const TransportPlan plan = w1_lp(p, q, WeightedMetric::single(1.0));
    const auto path = std::filesystem::temp_directory_path() / "depmix_coupling.csv";
    write_coupling_csv(plan, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "source_index,target_index,mass");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
    }
    CHECK(rows == plan.arcs.size());
}

TEST_CASE("triangle inequality for w1 on random triples") {
    const WeightedMetric m = WeightedMetric::single(1.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto a = random_measure_1d(5 * s + 1, 4);
        const auto b = random_measure_1d(5 * s + 2, 4);
        const auto c = random_measure_1d(5 * s + 3, 4);
        CHECK(w1_lp(a, c, m).value <=
              w1_lp(a, b, m).value + w1_lp(b, c, m).value + 1e-9);
    }
}

TEST_CASE("input order does not change the solution") {
    // A product-form measure with its support rows permuted is the same
    // measure; the solver must return the same value.
    std::vector<std::vector<double>> pts{{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
    std::vector<double> ms{0.12, 0.28, 0.18, 0.42};
    const auto p = EmpiricalMeasure::from_points(pts, ms);
    const auto p_perm = EmpiricalMeasure::from_points(
        {pts[3], pts[1], pts[0], pts[2]}, {ms[3], ms[1], ms[0], ms[2]});
    const auto q = EmpiricalMeasure::from_points(
        {{0.2, 0.1}, {0.9, 0.8}, {0.4, 0.6}}, {0.5, 0.3, 0.2});
    const WeightedMetric m = WeightedMetric::geometric(2);
    CHECK(w1_lp(p, q, m).value == doctest::Approx(w1_lp(p_perm, q, m).value).epsilon(1e-12));
}

TEST_CASE("kr duality: weak duality and tight 1-d bounds") {
    const WeightedMetric m = WeightedMetric::single(1.0);
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto p = random_measure_1d(7 * s + 1, 5);
        const auto q = random_measure_1d(7 * s + 2, 5);
        const DualityReport rep = kr_duality_gap(p, q, m, 30, s);
        CHECK(rep.gap >= -1e-9);
        CHECK(rep.best_dual <= rep.primal + 1e-9);
        if (rep.primal > 1e-12) {
            CHECK(rep.best_dual >= 0.99 * rep.primal);
        }
    }
}

TEST_CASE("point-mass probes attain the primal exactly") {
    const auto pa = measure1d({0.3}, {1.0});
    const auto pb = measure1d({-1.1}, {1.0});
    const DualityReport rep = kr_duality_gap(pa, pb, WeightedMetric::single(1.0), 8, 3);
    CHECK(rep.best_dual == doctest::Approx(rep.primal).epsilon(1e-12));
}

TEST_CASE("subsampled solves declare their error and stay near the exact value") {
    // 1200 atoms per side exceeds the default cap; compare against the
    // exact 1-d value.
    std::vector<double> xs, ms;
    const std::int64_t atoms = 1200;
    for (std::int64_t i = 0; i < atoms; ++i) {
        xs.push_back(rng::normal(5, 21, static_cast<std::uint64_t>(i)));
        ms.push_back(1.0 / static_cast<double>(atoms));
    }
    const auto p = measure1d(xs, ms);
    std::vector<double> ys;
    for (std::int64_t i = 0; i < atoms; ++i) {
        ys.push_back(0.4 + rng::normal(6, 22, static_cast<std::uint64_t>(i)));
    }
    const auto q = measure1d(ys, ms);
    W1Options opts;
    opts.max_support = 200;
    opts.subsample_repeats = 12;
    opts.seed = 9;
    const TransportPlan plan = w1_lp(p, q, WeightedMetric::single(1.0), opts);
    CHECK(plan.subsampled);
    CHECK(plan.subsample_stderr > 0.0);
    const double exact = w1_exact_1d(p, q, 1.0);
    CHECK(std::fabs(plan.value - exact) < 5.0 * plan.subsample_stderr + 0.05);
}

TEST_CASE("coupled-pair transport obeys the coupling upper bound") {
    const FilterSpec f = FilterSpec::linear_geometric(0.5, InnovationLaw::gaussian(0.0, 1.0));
    const std::int64_t j = 10, k = 1, n = 13, R = 260;
    const CoupledEnsemble ce = tilde_ensemble(f, j, k, n, R, 31);
    const WeightedMetric m = WeightedMetric::geometric(ce.nu);

    const auto px = EmpiricalMeasure::from_samples(ce.x, R, ce.nu);
    const auto pt = EmpiricalMeasure::from_samples(ce.x_tilde, R, ce.nu);
    const TransportPlan plan = w1_lp(px, pt, m);

    const std::vector<double> costs = ce.coupling_costs(m.weights);
    const double mean_cost = stats::mean(costs);
    // Any coupling upper-bounds the optimum; the paired empirical coupling
    // realizes mean_cost exactly.
    CHECK(plan.value <= mean_cost + 1e-9);
}

} // TEST_SUITE
