#pragma once
// Deterministic random logical circuits for end-to-end pipeline tests. The
// generator respects the compile contract: a Z column is placed before any
// global X pulse or non-diagonal native so every segment has a phase knob,
// and native angles stay clear of the solver's degenerate points.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spinpipe/pipeline.hpp"
#include "spinpipe/rng.hpp"

namespace testsup {

inline spinpipe::LogicalCircuit random_circuit(int n, int depth, std::uint64_t seed) {
    using namespace spinpipe;
    CounterRng rng{mix_key(seed, {0xC19Cull}), 0};
    LogicalCircuit c;
    c.n_qubits = n;
    bool has_knob = false;  // a Z column since the last non-commuting boundary
    for (int d = 0; d < depth; ++d) {
        const double u = rng.uniform();
        int type = u < 0.45 ? 0 : (u < 0.70 ? 1 : 2);  // z, x, native
        NativeKind kind = NativeKind::cphase;
        if (type == 2 && n >= 2) {
            const double k = rng.uniform();
            kind = k < 0.25   ? NativeKind::cphase
                   : k < 0.5  ? NativeKind::ising
                   : k < 0.75 ? NativeKind::givens
                              : NativeKind::swap_rot;
        } else if (type == 2) {
            type = 0;
        }
        const bool boundary =
            type == 1 ||
            (type == 2 && (kind == NativeKind::givens || kind == NativeKind::swap_rot));
        if (boundary && !has_knob) type = 0;  // insert the missing phase knob

        std::vector<GateSpec> col(n);
        if (type == 0) {
            for (int r = 0; r < n; ++r) {
                if (rng.uniform() < 0.7) {
                    col[r].tag = GateTag::z;
                    col[r].angle = (2.0 * rng.uniform() - 1.0) * pi;
                }
            }
            has_knob = true;
        } else if (type == 1) {
            for (int r = 0; r < n; ++r) col[r].tag = GateTag::x;
            has_knob = false;
        } else {
            int pairs = 0;
            for (int r = 0; r + 1 < n;) {
                if (rng.uniform() < 0.4) {
                    col[r].tag = GateTag::native_lower;
                    col[r].kind = kind;
                    col[r + 1].tag = GateTag::native_upper;
                    ++pairs;
                    r += 2;
                } else {
                    ++r;
                }
            }
            if (pairs == 0) {
                const int r = static_cast<int>(rng.uniform() * (n - 1));
                col[r].tag = GateTag::native_lower;
                col[r].kind = kind;
                col[r + 1].tag = GateTag::native_upper;
            }
            for (int r = 0; r < n; ++r) {
                if (col[r].tag != GateTag::native_lower) continue;
                switch (kind) {
                    case NativeKind::cphase:
                        col[r].angle = 0.3 + (2.0 * pi - 0.6) * rng.uniform();
                        break;
                    case NativeKind::ising: {
                        double a = 0.0;
                        do {
                            a = 2.0 * pi * rng.uniform();
                        } while (std::abs(a - pi) < 0.3 || a < 0.3 || a > 2.0 * pi - 0.3);
                        col[r].angle = a;
                        break;
                    }
                    case NativeKind::givens:
                        col[r].angle = 0.05 + (0.5 * pi - 0.1) * rng.uniform();
                        break;
                    case NativeKind::swap_rot:
                        col[r].angle = (2.0 * rng.uniform() - 1.0) * pi;
                        break;
                }
            }
            if (kind == NativeKind::givens || kind == NativeKind::swap_rot) has_knob = false;
        }
        c.steps.push_back(std::move(col));
    }
    c.validate();
    return c;
}

struct CompiledRandom {
    spinpipe::LogicalCircuit circuit;
    std::vector<std::vector<double>> site_g;
    spinpipe::PipelineProgram program;
};

// Draws circuits until one compiles; a small fraction of native angle and g
// combinations legitimately exhaust the solver's delta_g range.
inline CompiledRandom random_compiled(int n, int depth, std::uint64_t seed,
                                      const spinpipe::CompileConfig& cfg = {}) {
    using namespace spinpipe;
    for (int attempt = 0; attempt < 50; ++attempt) {
        const std::uint64_t s = seed + 1000ull * static_cast<std::uint64_t>(attempt);
        CompiledRandom out;
        out.circuit = random_circuit(n, depth, s);
        out.site_g = sampled_site_g(physical_column_count(depth), n, 1e-3, s + 7ull);
        try {
            out.program = compile(out.circuit, out.site_g, cfg);
            return out;
        } catch (const compile_error&) {
        }
    }
    throw std::runtime_error("random_compiled: no compiling draw in 50 attempts");
}

inline spinpipe::VecX random_state(int n, std::uint64_t seed) {
    using namespace spinpipe;
    CounterRng rng{mix_key(seed, {0x57A7Eull}), 0};
    VecX v(std::int64_t{1} << n);
    for (std::int64_t i = 0; i < v.size(); ++i) v(i) = c64(rng.normal(), rng.normal());
    v /= v.norm();
    return v;
}

}  // namespace testsup
