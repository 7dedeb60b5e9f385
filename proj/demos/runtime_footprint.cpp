// Headline device accounting: composite gate times for the two slot presets,
// the variational-run time estimate with its pipelining speedup, and the
// processor / bias-tee footprints.

#include <iomanip>
#include <iostream>

#include "spinpipe/pipeline.hpp"

using namespace spinpipe;

int main() {
    std::cout << std::setprecision(4);
    for (const double tau : {1e-6, 0.1e-6}) {
        const GateTimes g = gate_time_table(tau, tau, 10e-9);
        std::cout << "slots " << tau * 1e6 << " us: tau_1X = " << g.tau_1x * 1e6
                  << " us, tau_2P = " << g.tau_2p * 1e6 << " us, tau_2S = " << g.tau_2s * 1e6
                  << " us\n";
    }

    const RuntimeEstimate est = vqe_runtime(VqeParams{});
    std::cout << "\none configuration: " << est.tau_config_seq / 60.0 << " min sequential, "
              << est.tau_config_pipe << " s pipelined (speedup " << est.speedup << ")\n";
    std::cout << "full run (" << est.n_configs << " configurations x " << est.n_iters
              << " iterations): " << est.tau_run_seq / (30.4375 * 86400.0) << " months vs "
              << est.tau_run_pipe / 86400.0 << " days\n";

    const Footprint f = footprint(25, 3370);
    std::cout << "\nprocessor (25 pipes, depth 3370): " << f.width * 1e6 << " um x "
              << f.length * 1e6 << " um\n";
    const ControlFootprint c = control_footprints(1e4, 100.0, 50e-9, 1e5, 1.0, 50);
    std::cout << "bias tee per qubit: " << c.resistor_length * 1e6 << " um resistor, "
              << c.capacitance * 1e12 << " pF capacitor (" << c.capacitor_side * 1e6
              << " um square); column " << c.column_length * 1e6 << " um x "
              << c.column_width * 1e6 << " um; round-trip cutoff "
              << c.f_cutoff_roundtrip * 1e-3 << " kHz\n";
    return 0;
}
