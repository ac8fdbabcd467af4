// bench_coupling — serial vs OpenMP timing of the spectral coupling
// assembly, with a cross-check that both paths agree bitwise.

#include <chrono>
#include <cstdio>
#include <vector>

#include "vcoup/direct.hpp"
#include "vcoup/parallel.hpp"

using namespace vcoup;

namespace {

template <class F>
double time_call(const F& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

EmitterRoster ring_roster(int n) {
    EmitterRoster roster;
    for (int i = 0; i < n; ++i) {
        const double phi = 2.0 * pi * i / n;
        Emitter e;
        e.position = Vec3(std::cos(phi), std::sin(phi), 0.05 * i);
        e.dipole = Vec3(0.0, 0.0, 1.0);
        roster.push_back(e);
    }
    return roster;
}

} // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 10;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 3;

    FreeSpaceGreens g;
    const auto roster = ring_roster(n);
    const SpectralCutoff cut{CutoffKind::gaussian, 2.0 * pi};

    CouplingMatrix serial, parallel;
    double ts = 1e300, tp = 1e300;
    for (int r = 0; r < reps; ++r) {
        ts = std::min(ts, time_call([&] {
                 serial = coupling_from_spectrum_serial(g, roster, cut);
             }));
        tp = std::min(tp, time_call([&] {
                 parallel = coupling_from_spectrum(g, roster, cut);
             }));
    }

    double max_dev = 0.0;
    for (std::size_t i = 0; i < serial.blocks.size(); ++i)
        max_dev = std::max(
            max_dev,
            (serial.blocks[i] - parallel.blocks[i]).cwiseAbs().maxCoeff());

    std::printf("emitters=%d pairs=%d threads=%d\n", n, n * (n - 1) / 2,
                max_threads());
    std::printf("serial   %.4f s\n", ts);
    std::printf("parallel %.4f s  (speedup %.2fx)\n", tp, ts / tp);
    std::printf("max |serial - parallel| = %.3g\n", max_dev);
    return max_dev == 0.0 ? 0 : 1;
}
