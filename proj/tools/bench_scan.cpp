// Timing comparison of the serial reference kernels against their OpenMP
// counterparts: the bound-estimation lattice and the brute-force scan.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dbvp/direct_solver.hpp"
#include "dbvp/truncation.hpp"

using namespace dbvp;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool match) {
    std::printf("%-22s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms, match ? "match" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; both columns run serially\n");
#endif

    {
        // Bound estimation over a fat lattice.
        const int T = 64;
        Problem p(TimeScale(T),
                  [](int t, double x, double y) {
                      return std::sin(0.3 * t + x) + std::cos(y) * std::exp(-0.01 * x * x);
                  },
                  1.0);
        Bracket b(GridFunction::constant(0, T + 3, -10.0), GridFunction::constant(0, T + 3, 10.0));
        const int density = 1024;

        auto t0 = std::chrono::steady_clock::now();
        double m_serial = estimate_M_serial(p, b, density);
        double serial_ms = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        double m_parallel = estimate_M(p, b, density);
        double parallel_ms = ms_since(t0);

        report("estimate_M", serial_ms, parallel_ms, m_serial == m_parallel);
    }

    {
        // Brute-force residual scan, T = 2 (four unknowns).
        const int T = 2;
        Problem p(TimeScale(T), [](int, double x, double y) { return 1.0 - 0.1 * x + 0.02 * y; },
                  0.0);
        std::vector<Interval> bounds(static_cast<size_t>(T + 2), Interval{0.0, 8.0});
        const double step = 0.125;  // 65^4 ~ 17.8M cells

        auto t0 = std::chrono::steady_clock::now();
        LatticeScanResult serial = brute_force_scan_serial(p, bounds, step);
        double serial_ms = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        LatticeScanResult parallel = brute_force_scan_parallel(p, bounds, step);
        double parallel_ms = ms_since(t0);

        bool match = serial.index == parallel.index && serial.objective == parallel.objective;
        report("brute_force_scan", serial_ms, parallel_ms, match);
        std::printf("  cells scanned: %lld, best objective %.3e\n", serial.cells,
                    serial.objective);
    }
    return 0;
}
