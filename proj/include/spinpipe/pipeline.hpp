#pragma once
// Circuit-to-grid compiler for the pipelined processor, plus the pipelined
// scheduler and the runtime/footprint estimators. A logical circuit column
// becomes one preconfigured gate column preceded by three shuttle columns.
// Single-qubit Z rotations are Stark-shift dwells solved per site, X(pi/2) is
// the shared global drive (so X columns must cover every row), and two-qubit
// gates are exchange composites solved by the engineer module. Z phases
// accrued in transit are folded into the next Z column's effective G_q;
// whatever remains at the output edge is recorded as a virtual Z correction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinpipe/constants.hpp"
#include "spinpipe/engineer.hpp"
#include "spinpipe/linalg.hpp"
#include "spinpipe/rng.hpp"
#include "spinpipe/shuttle.hpp"
#include "spinpipe/singlequbit.hpp"
#include "spinpipe/twoqubit.hpp"

namespace spinpipe {

// ---- Logical circuits ----

enum class NativeKind { cphase, ising, givens, swap_rot };

enum class GateTag { idle, z, x, native_lower, native_upper };

struct GateSpec {
    GateTag tag = GateTag::idle;
    NativeKind kind = NativeKind::cphase;  // native_lower only
    double angle = 0.0;                    // z / native_lower only
};

// Row 0 is the topmost pipe and the leftmost tensor factor; a native pair
// (r, r+1) has qubit i on row r. A column must be homogeneous: all-X, or
// Z/idle rows only, or native pairs with idle rows, because the grid
// preconfigures one gate type (and one dwell time) per column.
struct LogicalCircuit {
    int n_qubits = 0;
    std::vector<std::vector<GateSpec>> steps;  // [column][row]

    void validate() const {
        if (n_qubits < 1) throw error("LogicalCircuit: n_qubits must be positive");
        for (std::size_t c = 0; c < steps.size(); ++c) {
            const auto& col = steps[c];
            const std::string where = "LogicalCircuit: column " + std::to_string(c);
            if (static_cast<int>(col.size()) != n_qubits)
                throw error(where + " must have one entry per row");
            int n_x = 0;
            int n_z = 0;
            int n_nat = 0;
            for (int r = 0; r < n_qubits; ++r) {
                const GateSpec& g = col[r];
                if (!std::isfinite(g.angle)) throw error(where + ": non-finite angle");
                switch (g.tag) {
                    case GateTag::idle:
                        break;
                    case GateTag::z:
                        ++n_z;
                        break;
                    case GateTag::x:
                        ++n_x;
                        break;
                    case GateTag::native_lower:
                        if (r + 1 >= n_qubits || col[r + 1].tag != GateTag::native_upper)
                            throw error(where + ", row " + std::to_string(r) +
                                        ": native gate needs an adjacent upper row");
                        ++n_nat;
                        ++r;  // consume the paired row
                        break;
                    case GateTag::native_upper:
                        throw error(where + ", row " + std::to_string(r) +
                                    ": unpaired native upper row");
                }
            }
            if (n_x > 0 && n_x != n_qubits)
                throw error(where + ": the global X drive must cover every row");
            if (n_x > 0 && (n_z > 0 || n_nat > 0))
                throw error(where + ": X columns cannot mix with other gates");
            if (n_z > 0 && n_nat > 0)
                throw error(where + ": single- and two-qubit gates cannot share a column");
        }
    }
};

namespace detail {

inline const char* gate_tag_name(const GateSpec& g) {
    switch (g.tag) {
        case GateTag::idle: return "I";
        case GateTag::z: return "Z";
        case GateTag::x: return "X";
        case GateTag::native_upper: return "PAIR";
        case GateTag::native_lower:
            switch (g.kind) {
                case NativeKind::cphase: return "CPHASE";
                case NativeKind::ising: return "ISING";
                case NativeKind::givens: return "GIVENS";
                case NativeKind::swap_rot: return "SWAP";
            }
    }
    throw error("gate_tag_name: unknown tag");
}

inline GateSpec gate_from_tag(const std::string& tag, double param) {
    GateSpec g;
    g.angle = param;
    if (tag == "I") {
        g.tag = GateTag::idle;
    } else if (tag == "Z") {
        g.tag = GateTag::z;
    } else if (tag == "X") {
        g.tag = GateTag::x;
    } else if (tag == "PAIR") {
        g.tag = GateTag::native_upper;
    } else if (tag == "CPHASE" || tag == "ISING" || tag == "GIVENS" || tag == "SWAP") {
        g.tag = GateTag::native_lower;
        g.kind = tag == "CPHASE"  ? NativeKind::cphase
                 : tag == "ISING" ? NativeKind::ising
                 : tag == "GIVENS" ? NativeKind::givens
                                   : NativeKind::swap_rot;
    } else {
        throw error("LogicalCircuit: unknown gate tag \"" + tag + "\"");
    }
    return g;
}

}  // namespace detail

// Schema: {"n": int, "columns": [[[tag, param], ...], ...]} with tags I, Z, X,
// CPHASE, ISING, GIVENS, SWAP, PAIR; PAIR marks the upper row of the native
// pair below it.
inline LogicalCircuit circuit_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw error(std::string("circuit_from_json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("n") || !j.contains("columns"))
        throw error("circuit_from_json: expected {\"n\": int, \"columns\": [...]}");
    LogicalCircuit c;
    c.n_qubits = j.at("n").get<int>();
    for (const auto& col : j.at("columns")) {
        std::vector<GateSpec> rows;
        for (const auto& entry : col) {
            if (!entry.is_array() || entry.size() != 2)
                throw error("circuit_from_json: each gate must be a [tag, param] pair");
            rows.push_back(detail::gate_from_tag(entry.at(0).get<std::string>(),
                                                 entry.at(1).get<double>()));
        }
        c.steps.push_back(std::move(rows));
    }
    c.validate();
    return c;
}

inline std::string circuit_to_json(const LogicalCircuit& c) {
    c.validate();
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& col : c.steps) {
        nlohmann::json jc = nlohmann::json::array();
        for (const GateSpec& g : col) {
            const bool has_param = g.tag == GateTag::z || g.tag == GateTag::native_lower;
            jc.push_back({detail::gate_tag_name(g), has_param ? g.angle : 0.0});
        }
        cols.push_back(std::move(jc));
    }
    return nlohmann::json{{"n", c.n_qubits}, {"columns", cols}}.dump();
}

// Compile failure tied to a logical column and row.
struct compile_error : error {
    int column;
    int row;
    compile_error(int column_, int row_, const std::string& what)
        : error("column " + std::to_string(column_) + ", row " + std::to_string(row_) + ": " +
                what),
          column(column_),
          row(row_) {}
};

// ---- Protocol times (gate_time_table) ----

struct GateTimes {
    double tau_1x = 0.0;  // composite 1Q rotation slot, s
    double tau_2p = 0.0;  // phase-type two-qubit protocol, s
    double tau_2s = 0.0;  // swap-type two-qubit protocol (the 2Q column dwell), s
};

inline GateTimes gate_time_table(double tau_1q, double tau_2q, double tau_s) {
    if (!(tau_1q > 0.0) || !(tau_2q > 0.0) || !(tau_s >= 0.0))
        throw error("gate_time_table: gate times must be positive and tau_s non-negative");
    GateTimes t;
    t.tau_1x = 3.0 * tau_1q + 8.0 * tau_s;
    t.tau_2p = tau_2q + tau_1q + 3.0 * tau_s;
    t.tau_2s = 3.0 * tau_2q + 2.0 * tau_1q + 12.0 * tau_s;
    return t;
}

// ---- Compiled programs ----

struct CompileConfig {
    double tau_1q = 1e-6;               // single-qubit column dwell, s
    double tau_2q = 1e-6;               // synchronized native interaction slot, s
    double tau_s = 10e-9;               // shuttle step, s
    double b0 = 1.0;                    // T
    double dk = 1e-3 * constants().e;   // charge splitting for the exchange solver, J
    double eps = 0.0;                   // detuning from the symmetric point, J
    double delta_g_max = 1e-4;          // g tuneability bound for native solves
    double k_volts_per_g = 615.0;       // plunger voltage per unit delta_g
    double alpha_ratio = 1.0;           // lever-arm ratio for the mu compensation
    double temperature = 0.073;         // K, initialization bath
    double readout_fidelity = 0.993;
    double readout_time = 4e-6;         // s
    double init_time = 4e-6;            // s, symmetric with readout
    double phase_tol = 1e-9;            // residual allowed at a global-X boundary, rad

    void validate() const {
        if (!(tau_1q > 0.0) || !(tau_2q > 0.0) || !(tau_s > 0.0))
            throw error("CompileConfig: dwell and shuttle times must be positive");
        if (!(b0 > 0.0)) throw error("CompileConfig: b0 must be positive");
        if (!(dk > 0.0)) throw error("CompileConfig: dk must be positive");
        if (!(delta_g_max > 0.0)) throw error("CompileConfig: delta_g_max must be positive");
        if (!(k_volts_per_g > 0.0)) throw error("CompileConfig: k_volts_per_g must be positive");
        if (!(temperature >= 0.0)) throw error("CompileConfig: temperature must be non-negative");
        if (!(readout_fidelity > 0.0) || readout_fidelity > 1.0)
            throw error("CompileConfig: readout fidelity must lie in (0, 1]");
        if (!(readout_time >= 0.0) || !(init_time >= 0.0))
            throw error("CompileConfig: endpoint times must be non-negative");
        if (!(phase_tol > 0.0)) throw error("CompileConfig: phase_tol must be positive");
    }
};

enum class ColumnKind { shuttle, z, x, native };

struct NativeColumnSolve {
    int row = 0;  // lower row of the pair
    NativeKind kind = NativeKind::cphase;
    double angle = 0.0;     // logical parameter
    NativeGateSolve solve;  // device preconfiguration (t_ij, delta_g, ...)
    Mat4 u;                 // assembled physical composite
    Mat4 target;            // the gate as engineered (applied by the oracle)
};

struct CompiledColumn {
    ColumnKind kind = ColumnKind::shuttle;
    int logical_index = -1;  // logic columns: index into LogicalCircuit::steps
    double duration = 0.0;   // column dwell, s
    int phase = 0;           // drive phase wiring, physical column mod 3
    int ac_group = 0;        // ac power-splitter group, physical column mod 5
    std::vector<double> g_site;  // per-row g deviation at this column's sites

    std::vector<StarkSolve> stark;    // z columns: per-row dwell solve
    std::vector<double> z_logical;    // z columns: requested angle per row
    std::vector<double> z_delivered;  // z columns: physical (G + dg) dwell phase
    std::vector<double> x_zeta;       // x columns: site phase split around the pulse
    std::vector<NativeColumnSolve> natives;
};

struct PipelineProgram {
    int n_qubits = 0;
    int n_logic_1q = 0;  // Z and X logic columns
    int n_logic_2q = 0;  // native logic columns
    double tau_1q = 0.0;
    double tau_2q = 0.0;
    double tau_s = 0.0;
    double b0 = 0.0;
    std::vector<CompiledColumn> columns;
    std::vector<double> final_virtual_z;  // per row, applied at the output edge
    double init_fid = 1.0;                // per-qubit initialization fidelity
    double readout_fid = 1.0;             // per-qubit readout fidelity
    double init_time = 0.0;               // s
    double readout_time = 0.0;            // s
};

// Per-site g deviation tables, indexed [physical column][row].
inline std::vector<std::vector<double>> uniform_site_g(int n_columns, int n_rows,
                                                       double value = 0.0) {
    if (n_columns < 0 || n_rows < 1) throw error("uniform_site_g: bad dimensions");
    return std::vector<std::vector<double>>(n_columns, std::vector<double>(n_rows, value));
}

inline std::vector<std::vector<double>> sampled_site_g(int n_columns, int n_rows, double sigma,
                                                       std::uint64_t seed) {
    if (n_columns < 0 || n_rows < 1) throw error("sampled_site_g: bad dimensions");
    if (!(sigma >= 0.0)) throw error("sampled_site_g: sigma must be non-negative");
    auto table = uniform_site_g(n_columns, n_rows);
    for (int c = 0; c < n_columns; ++c) {
        for (int r = 0; r < n_rows; ++r) {
            CounterRng rng{mix_key(seed, {0x9175ull, static_cast<std::uint64_t>(c),
                                          static_cast<std::uint64_t>(r)}),
                           0};
            table[c][r] = sigma * rng.normal();
        }
    }
    return table;
}

// Three shuttle columns precede every logic column.
inline int physical_column_count(int depth) {
    if (depth < 0) throw error("physical_column_count: negative depth");
    return 4 * depth;
}

namespace detail {

inline double wrap_pi(double x) { return std::remainder(x, 2.0 * pi); }

// Solve the native pair at logical column d, lower row r.
inline NativeColumnSolve solve_native_column(const GateSpec& g, int d, int r, double g_i,
                                             double g_j, const CompileConfig& cfg) {
    NativeColumnSolve out;
    out.row = r;
    out.kind = g.kind;
    out.angle = g.angle;
    GateTarget t;
    t.tau2q = cfg.tau_2q;
    t.b0 = cfg.b0;
    t.dk = cfg.dk;
    t.eps = cfg.eps;
    t.g_i = g_i;
    t.g_j = g_j;
    t.delta_g_max = cfg.delta_g_max;
    try {
        switch (g.kind) {
            case NativeKind::cphase:
                // compose_cphase realizes CPhase(-2 alpha); request the negated angle.
                t.kind = GateKind::cphase;
                t.angle = -g.angle;
                out.solve = solve_native_gate(t);
                break;
            case NativeKind::ising:
                t.kind = GateKind::ising;
                t.angle = g.angle;
                out.solve = solve_native_gate(t);
                break;
            case NativeKind::givens:
                t.kind = GateKind::givens_like;
                t.angle = g.angle;
                out.solve = solve_native_gate(t);
                break;
            case NativeKind::swap_rot:
                // SWAP rotations need the chi = pi/4 native; the swap angle enters
                // through the interior Z pair of the composite.
                t.kind = GateKind::givens_like;
                t.angle = 0.25 * pi;
                out.solve = solve_native_gate(t);
                break;
        }
        const CompositeResult comp = g.kind == NativeKind::swap_rot
                                         ? compose_swap_rotation(out.solve.params, g.angle,
                                                                 out.solve.n)
                                         : composite_for_solve(out.solve);
        out.u = comp.u;
        out.target = comp.target;
    } catch (const error& e) {
        throw compile_error(d, r, e.what());
    }
    return out;
}

}  // namespace detail

// Compiles a logical circuit onto the column grid. site_g holds the g
// deviation of every site, indexed [physical column][row] with exactly
// 4 * depth physical columns (three shuttle columns per logic column).
inline PipelineProgram compile(const LogicalCircuit& c,
                               const std::vector<std::vector<double>>& site_g,
                               const CompileConfig& cfg = {}) {
    c.validate();
    cfg.validate();
    const PhysConstants& pc = constants();
    const int n = c.n_qubits;
    const int depth = static_cast<int>(c.steps.size());
    const int n_phys = physical_column_count(depth);
    if (static_cast<int>(site_g.size()) != n_phys)
        throw error("compile: site_g must have one entry per physical column (4 per logic column)");
    for (const auto& col : site_g)
        if (static_cast<int>(col.size()) != n)
            throw error("compile: site_g entries must have one value per row");

    const double rate = pc.mu_B * cfg.b0 / pc.hbar;  // z phase per second per unit g
    const GateTimes gt = gate_time_table(cfg.tau_1q, cfg.tau_2q, cfg.tau_s);

    PipelineProgram p;
    p.n_qubits = n;
    p.tau_1q = cfg.tau_1q;
    p.tau_2q = cfg.tau_2q;
    p.tau_s = cfg.tau_s;
    p.b0 = cfg.b0;
    p.init_fid = init_fidelity(cfg.temperature, cfg.b0);
    p.readout_fid = cfg.readout_fidelity;
    p.init_time = cfg.init_time;
    p.readout_time = cfg.readout_time;
    p.final_virtual_z.assign(n, 0.0);

    // Column skeleton plus the pend-independent native solves.
    for (int d = 0; d < depth; ++d) {
        for (int k = 0; k < 3; ++k) {
            CompiledColumn col;
            col.kind = ColumnKind::shuttle;
            col.duration = cfg.tau_s;
            col.g_site = site_g[4 * d + k];
            p.columns.push_back(std::move(col));
        }
        const auto& logical = c.steps[d];
        CompiledColumn col;
        col.logical_index = d;
        col.g_site = site_g[4 * d + 3];
        const bool has_x = std::any_of(logical.begin(), logical.end(),
                                       [](const GateSpec& g) { return g.tag == GateTag::x; });
        const bool has_nat =
            std::any_of(logical.begin(), logical.end(),
                        [](const GateSpec& g) { return g.tag == GateTag::native_lower; });
        if (has_x) {
            col.kind = ColumnKind::x;
            col.duration = cfg.tau_1q;
            col.x_zeta.assign(n, 0.0);
            for (int r = 0; r < n; ++r) col.x_zeta[r] = col.g_site[r] * rate * cfg.tau_1q;
            ++p.n_logic_1q;
        } else if (has_nat) {
            col.kind = ColumnKind::native;
            col.duration = gt.tau_2s;
            for (int r = 0; r < n; ++r) {
                if (logical[r].tag != GateTag::native_lower) continue;
                col.natives.push_back(detail::solve_native_column(
                    logical[r], d, r, col.g_site[r], col.g_site[r + 1], cfg));
            }
            ++p.n_logic_2q;
        } else {
            col.kind = ColumnKind::z;  // z rotations and solved idle dwells
            col.duration = cfg.tau_1q;
            col.stark.assign(n, StarkSolve{});
            col.z_logical.assign(n, 0.0);
            col.z_delivered.assign(n, 0.0);
            for (int r = 0; r < n; ++r)
                if (logical[r].tag == GateTag::z) col.z_logical[r] = logical[r].angle;
            ++p.n_logic_1q;
        }
        p.columns.push_back(std::move(col));
    }
    for (std::size_t i = 0; i < p.columns.size(); ++i) {
        p.columns[i].phase = static_cast<int>(i % 3);
        p.columns[i].ac_group = static_cast<int>(i % 5);
    }

    // Per-row phase ledger. pend is the physical-minus-logical z phase accrued
    // since the last cancellation point. Each Z dwell is solved lazily so the
    // last knob before a non-commuting boundary (the global X pulse, or a
    // givens/swap native) can also pre-cancel the transit phases ahead of it.
    struct Knob {
        std::size_t col;
        double theta;
        double g;
        double pend_in;
    };
    for (int r = 0; r < n; ++r) {
        double pend = 0.0;
        std::optional<Knob> knob;
        const auto solve_knob = [&](double pend_in) {
            CompiledColumn& col = p.columns[knob->col];
            const double g_eff = knob->g + pend_in / (rate * cfg.tau_1q);
            const StarkSolve s = stark_shift_for_phase(knob->theta, g_eff, cfg.b0, cfg.tau_1q,
                                                       cfg.k_volts_per_g, cfg.alpha_ratio, pc);
            const double delivered = (knob->g + s.delta_g) * rate * cfg.tau_1q;
            col.stark[r] = s;
            col.z_delivered[r] = delivered;
            pend += delivered - knob->theta;
            knob.reset();
        };
        // A boundary needs zero pending phase (mod 2 pi): anticipate it at the
        // last knob, or verify the residual when the segment has no knob.
        const auto close_boundary = [&](int d, const char* what) {
            if (knob) {
                solve_knob(pend);
            } else if (std::abs(detail::wrap_pi(pend)) > cfg.phase_tol) {
                throw compile_error(d, r,
                                    std::string(what) +
                                        " reached with uncancelled transit phase; no Z column "
                                        "since the previous boundary can absorb it");
            }
        };
        for (std::size_t ci = 0; ci < p.columns.size(); ++ci) {
            CompiledColumn& col = p.columns[ci];
            switch (col.kind) {
                case ColumnKind::shuttle:
                    pend += col.g_site[r] * rate * col.duration;
                    break;
                case ColumnKind::z:
                    if (knob) solve_knob(knob->pend_in);
                    knob = Knob{ci, col.z_logical[r], col.g_site[r], pend};
                    break;
                case ColumnKind::x:
                    pend += 0.5 * col.x_zeta[r];
                    close_boundary(col.logical_index, "global X column");
                    pend += 0.5 * col.x_zeta[r];
                    break;
                case ColumnKind::native: {
                    const NativeColumnSolve* mine = nullptr;
                    for (const auto& nat : col.natives)
                        if (nat.row == r || nat.row + 1 == r) mine = &nat;
                    if (mine == nullptr) {
                        pend += col.g_site[r] * rate * col.duration;  // idle dwell
                    } else if (mine->kind == NativeKind::givens ||
                               mine->kind == NativeKind::swap_rot) {
                        close_boundary(col.logical_index, "non-diagonal native column");
                    }
                    // Diagonal natives commute with pending Z phases; the
                    // composite itself is exact, so nothing accrues on the pair.
                    break;
                }
            }
        }
        if (knob) solve_knob(pend);  // output edge: land the net phase exactly
        p.final_virtual_z[r] = -detail::wrap_pi(pend);
    }
    return p;
}

// ---- Statevector engines ----

// Row r maps to bit (n - 1 - r): row 0 is the most significant bit, matching
// the tensor order of the two-qubit basis.
inline void apply_1q(VecX& state, int n, int row, const Mat2& u) {
    const std::int64_t dim = std::int64_t{1} << n;
    const std::int64_t stride = std::int64_t{1} << (n - 1 - row);
    for (std::int64_t base = 0; base < dim; base += 2 * stride) {
        for (std::int64_t off = 0; off < stride; ++off) {
            const std::int64_t i0 = base + off;
            const std::int64_t i1 = i0 + stride;
            const c64 a = state(i0);
            const c64 b = state(i1);
            state(i0) = u(0, 0) * a + u(0, 1) * b;
            state(i1) = u(1, 0) * a + u(1, 1) * b;
        }
    }
}

inline void apply_2q(VecX& state, int n, int row, const Mat4& u) {
    if (row + 1 >= n) throw error("apply_2q: needs an adjacent row below");
    const std::int64_t dim = std::int64_t{1} << n;
    const std::int64_t lo = std::int64_t{1} << (n - 2 - row);  // bit of row + 1
    for (std::int64_t base = 0; base < dim; base += 4 * lo) {
        for (std::int64_t off = 0; off < lo; ++off) {
            const std::int64_t i = base + off;
            c64 v[4] = {state(i), state(i + lo), state(i + 2 * lo), state(i + 3 * lo)};
            for (int a = 0; a < 4; ++a) {
                c64 acc = 0.0;
                for (int b = 0; b < 4; ++b) acc += u(a, b) * v[b];
                state(i + a * lo) = acc;
            }
        }
    }
}

namespace detail {

inline void check_state(const PipelineProgram& p, const VecX& input) {
    if (p.n_qubits < 1 || p.n_qubits > 12)
        throw error("statevector: supports 1 to 12 qubits");
    if (input.size() != (std::int64_t{1} << p.n_qubits))
        throw error("statevector: input dimension must be 2^n_qubits");
}

}  // namespace detail

// Executes the physical program: shuttle transit phases, solved Z dwells, the
// global X pulse between its split site dwell, exchange composites, and the
// final virtual Z corrections.
inline VecX run_statevector(const PipelineProgram& p, const VecX& input) {
    detail::check_state(p, input);
    const double rate = constants().mu_B * p.b0 / constants().hbar;
    const double norm_in = input.norm();
    VecX s = input;
    const int n = p.n_qubits;
    for (const CompiledColumn& col : p.columns) {
        switch (col.kind) {
            case ColumnKind::shuttle:
                for (int r = 0; r < n; ++r)
                    apply_1q(s, n, r, rot_z(col.g_site[r] * rate * col.duration));
                break;
            case ColumnKind::z:
                for (int r = 0; r < n; ++r) apply_1q(s, n, r, rot_z(col.z_delivered[r]));
                break;
            case ColumnKind::x: {
                const Mat2 x90 = rot_x(0.5 * pi);
                for (int r = 0; r < n; ++r) apply_1q(s, n, r, rot_z(0.5 * col.x_zeta[r]));
                for (int r = 0; r < n; ++r) apply_1q(s, n, r, x90);
                for (int r = 0; r < n; ++r) apply_1q(s, n, r, rot_z(0.5 * col.x_zeta[r]));
                break;
            }
            case ColumnKind::native: {
                std::vector<bool> in_pair(n, false);
                for (const NativeColumnSolve& nat : col.natives) {
                    apply_2q(s, n, nat.row, nat.u);
                    in_pair[nat.row] = in_pair[nat.row + 1] = true;
                }
                for (int r = 0; r < n; ++r)
                    if (!in_pair[r])
                        apply_1q(s, n, r, rot_z(col.g_site[r] * rate * col.duration));
                break;
            }
        }
    }
    for (int r = 0; r < n; ++r) apply_1q(s, n, r, rot_z(p.final_virtual_z[r]));
    if (std::abs(s.norm() - norm_in) > 1e-12 * std::max(1.0, norm_in))
        throw error("run_statevector: norm drift beyond 1e-12");
    return s;
}

// Reference execution: ideal logical gates only (Z rotations, the X(pi/2)
// pulse, and each native column's engineered target), no transit bookkeeping.
inline VecX direct_statevector(const PipelineProgram& p, const VecX& input) {
    detail::check_state(p, input);
    VecX s = input;
    const int n = p.n_qubits;
    for (const CompiledColumn& col : p.columns) {
        switch (col.kind) {
            case ColumnKind::shuttle:
                break;
            case ColumnKind::z:
                for (int r = 0; r < n; ++r) apply_1q(s, n, r, rot_z(col.z_logical[r]));
                break;
            case ColumnKind::x: {
                const Mat2 x90 = rot_x(0.5 * pi);
                for (int r = 0; r < n; ++r) apply_1q(s, n, r, x90);
                break;
            }
            case ColumnKind::native:
                for (const NativeColumnSolve& nat : col.natives)
                    apply_2q(s, n, nat.row, nat.target);
                break;
        }
    }
    return s;
}

// Squared overlap |<a|b>|^2 of two normalized states.
inline double state_overlap(const VecX& a, const VecX& b) {
    if (a.size() != b.size()) throw error("state_overlap: dimension mismatch");
    return std::norm(c64(a.dot(b)));
}

// ---- Pipelined scheduling ----

// All scheduling runs on integer picoseconds so the closed-form makespan and
// the discrete-event walk can agree exactly.
inline long long to_picoseconds(double seconds) {
    if (!(seconds >= 0.0) || !std::isfinite(seconds))
        throw error("to_picoseconds: time must be non-negative and finite");
    const double ps = seconds * 1e12;
    if (ps >= 9.0e18) throw error("to_picoseconds: overflow");
    const long long out = std::llround(ps);
    if (seconds > 0.0 && out == 0) throw error("to_picoseconds: sub-picosecond duration");
    return out;
}

struct TimelineEvent {
    long long array = 0;  // which repetition's qubit array
    long long unit = 0;   // logic-column unit index along the pipe
    long long start_ps = 0;
    long long end_ps = 0;
};

// Walks every array through the unit sequence: array k enters at (k + 1) *
// headway (the pipe is primed one headway before the first array), each unit
// starts when both the array and the unit are free. Returns the final
// completion time.
inline long long simulate_pipeline_makespan(const std::vector<long long>& unit_ps,
                                            long long n_reps, long long headway_ps,
                                            std::vector<TimelineEvent>* timeline = nullptr) {
    if (n_reps < 1) throw error("simulate_pipeline_makespan: n_reps must be positive");
    if (headway_ps < 0) throw error("simulate_pipeline_makespan: negative headway");
    for (long long d : unit_ps)
        if (d <= 0) throw error("simulate_pipeline_makespan: unit durations must be positive");
    std::vector<long long> free_at(unit_ps.size(), 0);
    long long makespan = 0;
    for (long long k = 0; k < n_reps; ++k) {
        long long t = (k + 1) * headway_ps;
        for (std::size_t u = 0; u < unit_ps.size(); ++u) {
            const long long start = std::max(t, free_at[u]);
            const long long end = start + unit_ps[u];
            free_at[u] = end;
            if (timeline) timeline->push_back({k, static_cast<long long>(u), start, end});
            t = end;
        }
        makespan = std::max(makespan, t);
    }
    return makespan;
}

struct ScheduleResult {
    long long n_reps = 1;
    int headway_units = 2;       // logic-column units between successive arrays
    long long headway_ps = 0;
    long long unit_1q_ps = 0;    // tau_1q + 3 tau_s
    long long unit_2q_ps = 0;    // tau_2s + 3 tau_s
    long long makespan_ps = 0;   // pipelined closed form
    long long sequential_ps = 0;
    bool simulated = false;      // discrete-event walk ran (small problems)
    long long simulated_ps = 0;
    double makespan_s = 0.0;
    double sequential_s = 0.0;
    double speedup = 0.0;
    double endpoint_time_s = 0.0;    // initialization + readout extension
    double endpoint_fidelity = 1.0;  // (init * readout)^n_qubits
    std::vector<TimelineEvent> timeline;  // populated when small enough
};

inline ScheduleResult schedule(const PipelineProgram& p, long long n_reps,
                               const Filling& filling = Filling::maximal(),
                               long long max_sim_ops = 50'000'000) {
    if (n_reps < 1) throw error("schedule: n_reps must be positive");
    const int m = filling.period - 3;
    if (n_reps > 1 && m < 1)
        throw error("schedule: filling leaves no headway between repetitions");

    const GateTimes gt = gate_time_table(p.tau_1q, p.tau_2q, p.tau_s);
    ScheduleResult out;
    out.n_reps = n_reps;
    out.headway_units = m;
    out.unit_1q_ps = to_picoseconds(p.tau_1q) + 3 * to_picoseconds(p.tau_s);
    out.unit_2q_ps = to_picoseconds(gt.tau_2s) + 3 * to_picoseconds(p.tau_s);
    out.headway_ps = static_cast<long long>(m) * (out.unit_1q_ps + out.unit_2q_ps);

    const auto checked = [](__int128 v) {
        if (v > static_cast<__int128>(4) << 60) throw error("schedule: picosecond overflow");
        return static_cast<long long>(v);
    };
    const __int128 d1 = p.n_logic_1q;
    const __int128 d2 = p.n_logic_2q;
    const __int128 latency = d1 * out.unit_1q_ps + d2 * out.unit_2q_ps;
    out.makespan_ps =
        checked((d1 + static_cast<__int128>(m) * n_reps) * out.unit_1q_ps +
                (d2 + static_cast<__int128>(m) * n_reps) * out.unit_2q_ps);
    out.sequential_ps = checked(static_cast<__int128>(n_reps) * latency);

    std::vector<long long> units;
    units.reserve(p.n_logic_1q + p.n_logic_2q);
    for (const CompiledColumn& col : p.columns) {
        if (col.kind == ColumnKind::shuttle) continue;
        units.push_back(col.kind == ColumnKind::native ? out.unit_2q_ps : out.unit_1q_ps);
    }
    const __int128 ops = static_cast<__int128>(n_reps) * static_cast<__int128>(units.size());
    if (ops <= max_sim_ops) {
        const bool keep_timeline = ops <= 1'000'000;
        out.simulated_ps = simulate_pipeline_makespan(units, n_reps, out.headway_ps,
                                                      keep_timeline ? &out.timeline : nullptr);
        out.simulated = true;
        if (out.simulated_ps != out.makespan_ps)
            throw error("schedule: discrete-event walk disagrees with the closed form");
    }

    out.makespan_s = static_cast<double>(out.makespan_ps) * 1e-12;
    out.sequential_s = static_cast<double>(out.sequential_ps) * 1e-12;
    out.speedup = out.makespan_ps > 0
                      ? static_cast<double>(out.sequential_ps) / static_cast<double>(out.makespan_ps)
                      : 1.0;
    out.endpoint_time_s = p.init_time + p.readout_time;
    out.endpoint_fidelity =
        std::pow(p.init_fid * p.readout_fid, static_cast<double>(p.n_qubits));
    return out;
}

inline std::string timeline_to_csv(const ScheduleResult& s) {
    std::ostringstream os;
    os << "array,unit,start_ps,end_ps\n";
    for (const TimelineEvent& e : s.timeline)
        os << e.array << ',' << e.unit << ',' << e.start_ps << ',' << e.end_ps << '\n';
    return os.str();
}

// ---- Runtime estimators (Tables II-III) ----

struct RuntimeEstimate {
    GateTimes times;
    double tau_config_seq = 0.0;   // one circuit configuration, sequential, s
    double tau_config_pipe = 0.0;  // one circuit configuration, pipelined, s
    double tau_run_seq = 0.0;      // full run, s
    double tau_run_pipe = 0.0;     // full run, s
    double speedup = 0.0;
    long long n_reps_seq = 0;
    long long n_reps_pipe = 0;
    long long n_configs = 0;
    long long n_iters = 0;
    long long d_1q = 0;
    long long d_2q = 0;
};

// The tabulated per-configuration times back-solve to slightly different
// repetition counts (about 1.25e5 sequential, 1.4e5 pipelined), so both are
// explicit inputs rather than one privileged value.
struct VqeParams {
    long long d_1q = 1174;
    long long d_2q = 2196;
    long long n_reps_seq = 125000;
    long long n_reps_pipe = 140000;
    long long n_configs = 3900;
    long long n_iters = 100;
    double tau_1q = 1e-6;
    double tau_2q = 1e-6;
    double tau_s = 10e-9;

    void validate() const {
        if (d_1q < 0 || d_2q < 0 || d_1q + d_2q == 0)
            throw error("VqeParams: circuit depth must be positive");
        if (n_reps_seq < 1 || n_reps_pipe < 1)
            throw error("VqeParams: repetition counts must be positive");
        if (n_configs < 1 || n_iters < 1)
            throw error("VqeParams: configuration and iteration counts must be positive");
    }
};

inline RuntimeEstimate vqe_runtime(const VqeParams& v) {
    v.validate();
    RuntimeEstimate e;
    e.times = gate_time_table(v.tau_1q, v.tau_2q, v.tau_s);
    const double p1 = v.tau_1q + 3.0 * v.tau_s;
    const double p2 = e.times.tau_2s + 3.0 * v.tau_s;
    const double d1 = static_cast<double>(v.d_1q);
    const double d2 = static_cast<double>(v.d_2q);
    e.tau_config_seq = static_cast<double>(v.n_reps_seq) * (d1 * p1 + d2 * p2);
    e.tau_config_pipe = (d1 + 2.0 * static_cast<double>(v.n_reps_pipe)) * p1 +
                        (d2 + 2.0 * static_cast<double>(v.n_reps_pipe)) * p2;
    const double shots = static_cast<double>(v.n_configs) * static_cast<double>(v.n_iters);
    e.tau_run_seq = shots * e.tau_config_seq;
    e.tau_run_pipe = shots * e.tau_config_pipe;
    e.speedup = e.tau_config_seq / e.tau_config_pipe;
    e.n_reps_seq = v.n_reps_seq;
    e.n_reps_pipe = v.n_reps_pipe;
    e.n_configs = v.n_configs;
    e.n_iters = v.n_iters;
    e.d_1q = v.d_1q;
    e.d_2q = v.d_2q;
    return e;
}

inline std::string estimate_to_json(const RuntimeEstimate& e) {
    nlohmann::json j{{"tau_1x", e.times.tau_1x},
                     {"tau_2p", e.times.tau_2p},
                     {"tau_2s", e.times.tau_2s},
                     {"tau_config_seq", e.tau_config_seq},
                     {"tau_config_pipe", e.tau_config_pipe},
                     {"tau_run_seq", e.tau_run_seq},
                     {"tau_run_pipe", e.tau_run_pipe},
                     {"speedup", e.speedup},
                     {"n_reps_seq", e.n_reps_seq},
                     {"n_reps_pipe", e.n_reps_pipe},
                     {"n_configs", e.n_configs},
                     {"n_iters", e.n_iters},
                     {"d_1q", e.d_1q},
                     {"d_2q", e.d_2q}};
    return j.dump();
}

// ---- Footprints ----

struct Footprint {
    double width = 0.0;   // m, across the pipes
    double length = 0.0;  // m, along the shuttle direction
};

inline Footprint footprint(int n_qubits, int depth, double pipe_width = 340e-9,
                           double step_length = 190e-9) {
    if (n_qubits < 1 || depth < 1) throw error("footprint: dimensions must be positive");
    if (!(pipe_width > 0.0) || !(step_length > 0.0))
        throw error("footprint: pitches must be positive");
    return {n_qubits * pipe_width, depth * step_length};
}

struct ControlFootprint {
    double resistor_length = 0.0;     // m
    double capacitance = 0.0;         // F
    double capacitor_area = 0.0;      // m^2
    double capacitor_side = 0.0;      // m, square capacitor
    double per_qubit_area = 0.0;      // m^2, capacitor plus resistor trace
    double column_length = 0.0;       // m, n capacitors stacked
    double column_width = 0.0;        // m
    double f_cutoff_roundtrip = 0.0;  // Hz, 1 / (2 pi R C)
};

// Bias-tee footprint for one column of qubits: a meandered thin-film resistor
// of (R / rho) squares and a parallel-plate capacitor sized by the RC cutoff.
inline ControlFootprint control_footprints(double r, double rho_sheet, double trace_width,
                                           double f_cutoff, double cap_density,
                                           int n_qubits_column) {
    if (!(r > 0.0) || !(rho_sheet > 0.0) || !(trace_width > 0.0) || !(f_cutoff > 0.0) ||
        !(cap_density > 0.0) || n_qubits_column < 1)
        throw error("control_footprints: inputs must be positive");
    ControlFootprint f;
    f.resistor_length = (r / rho_sheet) * trace_width;
    f.capacitance = 1.0 / (2.0 * pi * r * f_cutoff);
    f.capacitor_area = f.capacitance / cap_density;
    f.capacitor_side = std::sqrt(f.capacitor_area);
    f.per_qubit_area = f.capacitor_area + f.resistor_length * trace_width;
    f.column_length = n_qubits_column * f.capacitor_side;
    f.column_width = f.per_qubit_area / f.capacitor_side;
    f.f_cutoff_roundtrip = 1.0 / (2.0 * pi * r * f.capacitance);
    return f;
}

}  // namespace spinpipe
