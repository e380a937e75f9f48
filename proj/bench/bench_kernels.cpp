// Times the OpenMP kernels against the serial reference paths and checks
// that both produce identical output.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "depmix/coupling.hpp"
#include "depmix/mixing.hpp"
#include "depmix/parallel.hpp"
#include "depmix/simulate.hpp"

using namespace depmix;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::fabs(a[i] - b[i]));
    }
    return m;
}

void report(const char* name, double serial_s, double parallel_s, double diff) {
    std::printf("%-28s serial %8.3fs   omp %8.3fs   speedup %5.2fx   max|diff| %g\n", name,
                serial_s, parallel_s, serial_s / parallel_s, diff);
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", parallel::max_threads());

    {
        FilterSpec f = FilterSpec::tv_ar1({0.6, 0.0}, InnovationLaw::gaussian(0.0, 1.0));
        f.centered = true;
        const std::int64_t n = 256, R = 200000;
        const std::vector<std::int64_t> cols{127, 128, 136, 137};
        SimulateOptions serial{.exec = Exec::Serial};
        SimulateOptions par{.exec = Exec::Parallel};

        auto t0 = std::chrono::steady_clock::now();
        const PathEnsemble a = simulate_columns(f, n, R, cols, 7, serial);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const PathEnsemble b = simulate_columns(f, n, R, cols, 7, par);
        const double tp = seconds_since(t0);
        report("simulate_columns (AR1)", ts, tp, max_abs_diff(a.values, b.values));
    }

    {
        const FilterSpec f = FilterSpec::linear_geometric(0.5, InnovationLaw::bernoulli(0.5));
        const std::int64_t R = 400000;
        auto t0 = std::chrono::steady_clock::now();
        const PairSample a = single_swap_pair(f, 0.5, 5, R, 9, Exec::Serial);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const PairSample b = single_swap_pair(f, 0.5, 5, R, 9, Exec::Parallel);
        const double tp = seconds_since(t0);
        report("single_swap_pair", ts, tp,
               std::max(max_abs_diff(a.base, b.base), max_abs_diff(a.star, b.star)));
    }

    {
        FilterSpec f = FilterSpec::tv_ar1({0.6, 0.0}, InnovationLaw::gaussian(0.0, 1.0));
        f.centered = true;
        const std::int64_t R = 400000;
        const std::vector<std::int64_t> cols{127, 128, 131, 132};
        const PathEnsemble ens = simulate_columns(f, 256, R, cols, 5);
        MixingOptions serial;
        serial.exec = Exec::Serial;
        serial.bootstrap_resamples = 20;
        MixingOptions par = serial;
        par.exec = Exec::Parallel;

        auto t0 = std::chrono::steady_clock::now();
        const MixingEstimate a = mixing_estimate(ens, 128, 3, 2, 2, BinScheme::quantile(8), serial);
        const double ts = seconds_since(t0);
        t0 = std::chrono::steady_clock::now();
        const MixingEstimate b = mixing_estimate(ens, 128, 3, 2, 2, BinScheme::quantile(8), par);
        const double tp = seconds_since(t0);
        report("mixing window counting", ts, tp,
               std::max(std::fabs(a.beta_raw - b.beta_raw), std::fabs(a.alpha - b.alpha)));
    }

    return 0;
}
