// spinpipe: command-line front end over the simulator modules. Every run
// writes one output file stamped with the tool version, the full run
// configuration, and a hash of its physical parameters, so identical
// (config, seed) runs produce byte-identical files. Module failures exit
// nonzero with a machine-readable error JSON on stdout.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spinpipe/constants.hpp"
#include "spinpipe/electrostatics.hpp"
#include "spinpipe/engineer.hpp"
#include "spinpipe/noisefid.hpp"
#include "spinpipe/pipeline.hpp"
#include "spinpipe/rng.hpp"
#include "spinpipe/shuttle.hpp"
#include "spinpipe/singlequbit.hpp"
#include "spinpipe/twoqubit.hpp"
#include "spinpipe/version.hpp"

namespace {

using namespace spinpipe;
using nlohmann::json;

struct RunConfig {
    std::uint64_t seed = 1;
    double b0 = 1.0;            // T
    double g_si = 2.0;
    double tau_1q = 1e-6;       // s
    double tau_2q = 1e-6;       // s
    double tau_s = 10e-9;       // s
    double dk = 1e-3 * constants().e;  // J
    double sigma_g = 1e-3 * constants().g_si;
    double sigma_tau = 0.0;     // s
    double sigma_v = 0.0;       // V
    double sigma_tij_rel = 0.0;
    double sigma_b1 = 0.0;      // T
    int n_samples = 1000;
    std::string out;            // output file; empty -> <dir>/<command>.<format>
    std::string format = "csv";

    void validate() const {
        if (!(b0 > 0.0)) throw error("config: b0 must be positive");
        if (!(g_si > 0.0)) throw error("config: g_si must be positive");
        if (!(tau_1q > 0.0) || !(tau_2q > 0.0) || !(tau_s > 0.0))
            throw error("config: gate and shuttle times must be positive");
        if (!(dk > 0.0)) throw error("config: dk must be positive");
        for (double s : {sigma_g, sigma_tau, sigma_v, sigma_tij_rel, sigma_b1})
            if (!(s >= 0.0)) throw error("config: sigmas must be non-negative");
        if (n_samples < 1) throw error("config: samples must be positive");
        if (format != "csv" && format != "json")
            throw error("config: format must be csv or json");
    }
};

json config_json(const RunConfig& c) {
    return json{{"seed", c.seed},
                {"b0", c.b0},
                {"g_si", c.g_si},
                {"tau_1q", c.tau_1q},
                {"tau_2q", c.tau_2q},
                {"tau_s", c.tau_s},
                {"dk", c.dk},
                {"sigma_g", c.sigma_g},
                {"sigma_tau", c.sigma_tau},
                {"sigma_v", c.sigma_v},
                {"sigma_tij_rel", c.sigma_tij_rel},
                {"sigma_b1", c.sigma_b1},
                {"n_samples", c.n_samples},
                {"out", c.out},
                {"format", c.format}};
}

// Hash covers the physical configuration only, not output plumbing.
std::string config_hash(const RunConfig& c) {
    json j = config_json(c);
    j.erase("out");
    j.erase("format");
    return hex64(fnv1a64(j.dump()));
}

// Overrides any flag with the keys present in a JSON config file.
void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("config file not readable: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw error("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw error("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "b0") c.b0 = value.get<double>();
        else if (key == "g_si") c.g_si = value.get<double>();
        else if (key == "tau_1q") c.tau_1q = value.get<double>();
        else if (key == "tau_2q") c.tau_2q = value.get<double>();
        else if (key == "tau_s") c.tau_s = value.get<double>();
        else if (key == "dk") c.dk = value.get<double>();
        else if (key == "sigma_g") c.sigma_g = value.get<double>();
        else if (key == "sigma_tau") c.sigma_tau = value.get<double>();
        else if (key == "sigma_v") c.sigma_v = value.get<double>();
        else if (key == "sigma_tij_rel") c.sigma_tij_rel = value.get<double>();
        else if (key == "sigma_b1") c.sigma_b1 = value.get<double>();
        else if (key == "n_samples") c.n_samples = value.get<int>();
        else if (key == "out") c.out = value.get<std::string>();
        else if (key == "format") c.format = value.get<std::string>();
        else throw error("config file: unknown key \"" + key + "\"");
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

using KvRows = std::vector<std::pair<std::string, std::string>>;

std::string kv_csv(const KvRows& rows) {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : rows) os << k << ',' << v << '\n';
    return os.str();
}

struct Output {
    std::string name;                   // default file stem
    json data;                          // json payload
    std::string csv;                    // csv payload
    std::vector<std::string> comments;  // extra csv header lines
    KvRows summary;                     // echoed to stdout
};

void write_output(const RunConfig& cfg, const Output& out) {
    namespace fs = std::filesystem;
    fs::path path;
    if (!cfg.out.empty()) {
        path = cfg.out;
    } else {
        const char* dir = std::getenv("SPINPIPE_OUT_DIR");
        path = fs::path(dir != nullptr && *dir != '\0' ? dir : ".") /
               (out.name + "." + cfg.format);
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());

    std::ofstream f(path);
    if (!f) throw error("cannot open output file: " + path.string());
    if (cfg.format == "json") {
        const json envelope{{"tool", "spinpipe"},
                            {"version", std::string(version_string)},
                            {"config", config_json(cfg)},
                            {"config_hash", config_hash(cfg)},
                            {"data", out.data}};
        f << envelope.dump(2) << '\n';
    } else {
        f << "# tool spinpipe " << version_string << '\n';
        f << "# config " << config_json(cfg).dump() << '\n';
        f << "# config_hash " << config_hash(cfg) << '\n';
        for (const std::string& c : out.comments) f << "# " << c << '\n';
        f << out.csv;
    }
    if (!f.good()) throw error("failed writing output file: " + path.string());

    std::cout << "wrote " << path.string() << '\n';
    for (const auto& [k, v] : out.summary) std::cout << k << " = " << v << '\n';
}

PhysConstants make_constants(const RunConfig& cfg) {
    PhysConstants pc = constants();
    pc.g_si = cfg.g_si;
    return pc;
}

NoiseModel make_noise_model(const RunConfig& cfg) {
    NoiseModel nm;
    nm.sigma_g = cfg.sigma_g;
    nm.sigma_tau = cfg.sigma_tau;
    nm.sigma_v = cfg.sigma_v;
    nm.sigma_tij_rel = cfg.sigma_tij_rel;
    nm.sigma_b1 = cfg.sigma_b1;
    nm.n_samples = cfg.n_samples;
    nm.seed = cfg.seed;
    nm.b0 = cfg.b0;
    nm.tau_1q = cfg.tau_1q;
    nm.tau_2q = cfg.tau_2q;
    nm.dk = cfg.dk;
    return nm;
}

Output map_output(const std::string& name, const FidelityMap& m) {
    Output out;
    out.name = name;
    out.data = map_to_json(m);
    out.csv = map_to_csv(m);
    out.comments = {"axes " + m.axis1_label + " x " + m.axis2_label};
    double lo = 1.0, hi = 0.0;
    for (const auto& row : m.mean)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    out.summary = {{"cells", fmt(double(m.mean.size() * m.mean.front().size()))},
                   {"mean_min", fmt(lo)},
                   {"mean_max", fmt(hi)},
                   {"solver_errors", fmt(double(m.solver_errors))}};
    return out;
}

LogicalCircuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("circuit file not readable: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return circuit_from_json(buf.str());
}

json program_json(const PipelineProgram& p) {
    json cols = json::array();
    for (std::size_t i = 0; i < p.columns.size(); ++i) {
        const CompiledColumn& c = p.columns[i];
        const char* kind = c.kind == ColumnKind::shuttle ? "shuttle"
                           : c.kind == ColumnKind::z     ? "z"
                           : c.kind == ColumnKind::x     ? "x"
                                                         : "native";
        json jc{{"index", i},
                {"kind", kind},
                {"logical_index", c.logical_index},
                {"duration_s", c.duration},
                {"phase", c.phase},
                {"ac_group", c.ac_group}};
        if (c.kind == ColumnKind::z) {
            json dg = json::array();
            json dv = json::array();
            json delivered = json::array();
            for (int r = 0; r < p.n_qubits; ++r) {
                dg.push_back(c.stark[r].delta_g);
                dv.push_back(c.stark[r].dV_q);
                delivered.push_back(c.z_delivered[r]);
            }
            jc["stark_delta_g"] = dg;
            jc["stark_dv_q"] = dv;
            jc["z_delivered"] = delivered;
            jc["z_logical"] = c.z_logical;
        }
        if (c.kind == ColumnKind::native) {
            json nats = json::array();
            for (const NativeColumnSolve& nat : c.natives) {
                const char* nk = nat.kind == NativeKind::cphase   ? "cphase"
                                 : nat.kind == NativeKind::ising  ? "ising"
                                 : nat.kind == NativeKind::givens ? "givens"
                                                                  : "swap";
                nats.push_back({{"row", nat.row},
                                {"kind", nk},
                                {"angle", nat.angle},
                                {"j_over_h_hz", nat.solve.j_ij / constants().h},
                                {"t_over_h_hz", nat.solve.t_ij / constants().h},
                                {"delta_g", nat.solve.delta_g},
                                {"winding", nat.solve.n},
                                {"tau_realized_s", nat.solve.tau_realized}});
            }
            jc["natives"] = nats;
        }
        cols.push_back(std::move(jc));
    }
    return json{{"n_qubits", p.n_qubits},
                {"n_logic_1q", p.n_logic_1q},
                {"n_logic_2q", p.n_logic_2q},
                {"tau_1q", p.tau_1q},
                {"tau_2q", p.tau_2q},
                {"tau_s", p.tau_s},
                {"b0", p.b0},
                {"init_fidelity", p.init_fid},
                {"readout_fidelity", p.readout_fid},
                {"final_virtual_z", p.final_virtual_z},
                {"columns", cols}};
}

std::string program_csv(const PipelineProgram& p) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "column,kind,logical_index,duration_s,natives\n";
    for (std::size_t i = 0; i < p.columns.size(); ++i) {
        const CompiledColumn& c = p.columns[i];
        const char* kind = c.kind == ColumnKind::shuttle ? "shuttle"
                           : c.kind == ColumnKind::z     ? "z"
                           : c.kind == ColumnKind::x     ? "x"
                                                         : "native";
        os << i << ',' << kind << ',' << c.logical_index << ',' << c.duration << ','
           << c.natives.size() << '\n';
    }
    return os.str();
}

// ---- subcommand handlers ----

struct ZmapArgs {
    std::vector<double> grid_tau{0.0, 4e-11, 8e-11, 1.2e-10, 1.6e-10, 2e-10};
    std::vector<double> grid_v{0.0, 4e-5, 8e-5, 1.2e-4, 1.6e-4, 2e-4};
};

Output run_zmap(const RunConfig& cfg, const ZmapArgs& a) {
    const PhysConstants pc = make_constants(cfg);
    return map_output("zmap", z_gate_fidelity_map(a.grid_tau, a.grid_v, make_noise_model(cfg), pc));
}

struct TwoqArgs {
    std::string kind = "givens-swap";
    std::vector<double> angles;
    std::vector<double> grid_tij{0.0, 0.002, 0.005, 0.01, 0.02};
};

Output run_twoqmap(const RunConfig& cfg, const TwoqArgs& a) {
    const PhysConstants pc = make_constants(cfg);
    TwoQubitMapKind kind = TwoQubitMapKind::givens_swap;
    std::vector<double> angles = a.angles;
    if (a.kind == "ising") {
        kind = TwoQubitMapKind::ising;
        if (angles.empty()) angles = {0.4, 0.9, 1.5, 2.1, 2.7, 3.6, 4.4, 5.2, 5.9};
    } else if (a.kind == "givens-swap") {
        kind = TwoQubitMapKind::givens_swap;
        if (angles.empty()) angles = {0.1, 0.3, 0.5, 0.7854, 1.0, 1.2, 1.45};
    } else if (a.kind == "swap") {
        kind = TwoQubitMapKind::swap_rotation;
        if (angles.empty()) angles = {-3.0, -2.0, -1.0, -0.3, 0.3, 1.0, 2.0, 3.0};
    } else {
        throw error("twoqmap: kind must be ising, givens-swap, or swap");
    }
    return map_output("twoqmap",
                      two_qubit_fidelity_map(kind, angles, a.grid_tij, make_noise_model(cfg), pc));
}

struct X90Args {
    std::vector<double> grid_b1{0.0, 5e-8, 1e-7, 1.5e-7, 2e-7};
    std::vector<double> grid_tau{0.0, 1e-10, 2e-10, 4e-10};
    int bin = 0;
};

Output run_x90map(const RunConfig& cfg, const X90Args& a) {
    const PhysConstants pc = make_constants(cfg);
    return map_output("x90map",
                      x90_fidelity_map(a.grid_b1, a.grid_tau, a.bin, make_noise_model(cfg), pc));
}

struct SolveGateArgs {
    std::string kind;
    double angle = 0.25 * pi;
    double tau = 0.0;  // 0 -> cfg.tau_2q
    double g_i = 0.0;
    double g_j = 0.0;
    bool explicit_pair = false;
    int pairs = 1000;
};

Output run_solve_gate(const RunConfig& cfg, const SolveGateArgs& a) {
    GateTarget t;
    t.tau2q = a.tau > 0.0 ? a.tau : cfg.tau_2q;
    t.b0 = cfg.b0;
    t.dk = cfg.dk;
    if (a.kind == "cphase") {
        t.kind = GateKind::cphase;
    } else if (a.kind == "ising") {
        t.kind = GateKind::ising;
    } else if (a.kind == "givens" || a.kind == "swap") {
        t.kind = GateKind::givens_like;
    } else {
        throw error("solve-gate: kind must be cphase, ising, givens, or swap");
    }
    t.angle = a.kind == "swap" ? 0.25 * pi : a.angle;

    Output out;
    out.name = "solve_gate";
    if (a.explicit_pair) {
        t.g_i = a.g_i;
        t.g_j = a.g_j;
        const NativeGateSolve s = solve_native_gate(t);
        const CompositeResult comp = a.kind == "swap"
                                         ? compose_swap_rotation(s.params, a.angle, s.n)
                                         : composite_for_solve(s);
        const double fid = process_fidelity(comp.u, comp.target);
        out.data = json{{"kind", a.kind},
                        {"angle", a.angle},
                        {"x", s.x},
                        {"winding", s.n},
                        {"j_over_h_hz", s.j_ij / constants().h},
                        {"t_over_h_hz", s.t_ij / constants().h},
                        {"delta_g", s.delta_g},
                        {"tau_realized_s", s.tau_realized},
                        {"delta_tau_s", s.delta_tau},
                        {"chi", s.chi},
                        {"phi", s.phi},
                        {"fallbacks", s.fallbacks},
                        {"fidelity_vs_target", fid}};
        out.csv = kv_csv({{"kind", a.kind},
                          {"angle", fmt(a.angle)},
                          {"x", fmt(s.x)},
                          {"winding", fmt(double(s.n))},
                          {"j_over_h_hz", fmt(s.j_ij / constants().h)},
                          {"t_over_h_hz", fmt(s.t_ij / constants().h)},
                          {"delta_g", fmt(s.delta_g)},
                          {"tau_realized_s", fmt(s.tau_realized)},
                          {"delta_tau_s", fmt(s.delta_tau)},
                          {"chi", fmt(s.chi)},
                          {"phi", fmt(s.phi)},
                          {"fidelity_vs_target", fmt(fid)}});
        out.summary = {{"j_over_h_hz", fmt(s.j_ij / constants().h)},
                       {"winding", fmt(double(s.n))},
                       {"fidelity_vs_target", fmt(fid)}};
        return out;
    }

    // Ensemble over g-factor pairs drawn at sigma_g.
    if (a.pairs < 1) throw error("solve-gate: pairs must be positive");
    double sum_j = 0.0, sum_n = 0.0, sum_dt = 0.0;
    long long failed = 0;
    for (int i = 0; i < a.pairs; ++i) {
        CounterRng rng{mix_key(cfg.seed, {0xE5Bull, std::uint64_t(i)}), 0};
        GateTarget draw = t;
        draw.g_i = cfg.sigma_g * rng.normal();
        draw.g_j = cfg.sigma_g * rng.normal();
        try {
            const NativeGateSolve s = solve_native_gate(draw);
            sum_j += s.j_ij;
            sum_n += s.n;
            sum_dt += std::abs(s.delta_tau);
        } catch (const error&) {
            ++failed;
        }
    }
    const double ok = double(a.pairs - failed);
    if (ok == 0.0) throw error("solve-gate: every ensemble draw failed");
    const double mean_j_hz = sum_j / ok / constants().h;
    const double mean_n = sum_n / ok;
    const double mean_dt = sum_dt / ok;
    out.data = json{{"kind", a.kind},          {"angle", t.angle},
                    {"pairs", a.pairs},        {"failed", failed},
                    {"sigma_g", cfg.sigma_g},  {"mean_j_over_h_hz", mean_j_hz},
                    {"mean_winding", mean_n},  {"mean_abs_delta_tau_s", mean_dt},
                    {"tau_slot_s", t.tau2q}};
    out.csv = kv_csv({{"kind", a.kind},
                      {"angle", fmt(t.angle)},
                      {"pairs", fmt(double(a.pairs))},
                      {"failed", fmt(double(failed))},
                      {"sigma_g", fmt(cfg.sigma_g)},
                      {"mean_j_over_h_hz", fmt(mean_j_hz)},
                      {"mean_winding", fmt(mean_n)},
                      {"mean_abs_delta_tau_s", fmt(mean_dt)},
                      {"tau_slot_s", fmt(t.tau2q)}});
    out.summary = {{"mean_j_over_h_hz", fmt(mean_j_hz)},
                   {"mean_winding", fmt(mean_n)},
                   {"mean_abs_delta_tau_s", fmt(mean_dt)},
                   {"failed", fmt(double(failed))}};
    return out;
}

struct ShuttleArgs {
    double t_over_h = 20e9;  // Hz
    double alpha = 0.1;
    double dv = 25e-3;  // V
    double p_max = 1e-4;
};

Output run_shuttle(const RunConfig& cfg, const ShuttleArgs& a) {
    const PhysConstants pc = make_constants(cfg);
    const double t_ij = pc.h * a.t_over_h;
    const double amp = ramp_amplitude(a.alpha, a.dv, pc);
    const double omega = omega_for_probability(t_ij, amp, a.p_max, {}, pc);
    const double t_min = min_shuttle_time(t_ij, amp, a.p_max, {}, pc);
    const ShuttleSpec spec = make_shuttle_spec(t_ij, a.alpha, a.dv, omega, pc);
    const double p = lz_probability(spec, pc);

    Output out;
    out.name = "shuttle";
    out.data = json{{"t_over_h_hz", a.t_over_h},   {"alpha", a.alpha},
                    {"dv_volt", a.dv},             {"p_max", a.p_max},
                    {"ramp_amplitude_j", amp},     {"omega_rad_s", omega},
                    {"f_hz", omega / (2.0 * pi)},  {"min_shuttle_time_s", t_min},
                    {"p_at_solution", p}};
    out.csv = kv_csv({{"t_over_h_hz", fmt(a.t_over_h)},
                      {"alpha", fmt(a.alpha)},
                      {"dv_volt", fmt(a.dv)},
                      {"p_max", fmt(a.p_max)},
                      {"ramp_amplitude_j", fmt(amp)},
                      {"omega_rad_s", fmt(omega)},
                      {"f_hz", fmt(omega / (2.0 * pi))},
                      {"min_shuttle_time_s", fmt(t_min)},
                      {"p_at_solution", fmt(p)}});
    out.summary = {{"f_hz", fmt(omega / (2.0 * pi))},
                   {"min_shuttle_time_s", fmt(t_min)},
                   {"p_at_solution", fmt(p)}};
    return out;
}

struct FieldArgs {
    std::string layout = "default";
    double x_min = -1e-7;
    double x_max = 1e-7;
    int points = 81;
};

Output run_field(const RunConfig& cfg, const FieldArgs& a) {
    const PhysConstants pc = make_constants(cfg);
    GateLayout layout;
    if (a.layout == "stark") {
        layout = stark_layout();
    } else if (a.layout != "default") {
        throw error("field: layout must be default or stark");
    }
    const FieldDerivatives d = field_derivatives(layout, pc);

    Output out;
    out.name = "field";
    out.csv = field_profile_csv(layout, a.x_min, a.x_max, a.points, pc);
    out.comments = {"derivatives at x_offset " + fmt(layout.x_offset) + ": dEx_dVq " +
                    fmt(d.dEx_dVq) + ", dEx_dVmu " + fmt(d.dEx_dVmu) + ", dEz_dVq " +
                    fmt(d.dEz_dVq) + ", dEz_dVmu " + fmt(d.dEz_dVmu)};
    json profile = json::array();
    for (int i = 0; i < a.points; ++i) {
        GateLayout l = layout;
        l.x_offset = a.x_min + (a.x_max - a.x_min) * double(i) / double(a.points - 1);
        const FieldDerivatives di = field_derivatives(l, pc);
        profile.push_back({{"x", l.x_offset},
                           {"dEx_dVq", di.dEx_dVq},
                           {"dEx_dVmu", di.dEx_dVmu},
                           {"dEz_dVq", di.dEz_dVq},
                           {"dEz_dVmu", di.dEz_dVmu}});
    }
    out.data = json{{"layout", a.layout},
                    {"derivatives_at_layout",
                     {{"dEx_dVq", d.dEx_dVq},
                      {"dEx_dVmu", d.dEx_dVmu},
                      {"dEz_dVq", d.dEz_dVq},
                      {"dEz_dVmu", d.dEz_dVmu}}},
                    {"profile", profile}};
    out.summary = {{"dEx_dVq", fmt(d.dEx_dVq)},
                   {"dEz_dVq", fmt(d.dEz_dVq)},
                   {"dEx_dVmu", fmt(d.dEx_dVmu)}};
    return out;
}

struct StabilityArgs {
    double v_min = -4e-3;
    double v_max = 4e-3;
    int n = 81;
    double vq_offset = 2e-3;
    double dv_q = 0.0;  // plunger step; mu gate compensates automatically
};

Output run_stability(const RunConfig& cfg, const StabilityArgs& a) {
    const PhysConstants pc = make_constants(cfg);
    LeverArmMatrix lam;
    lam.alpha << 0.5, 0.1, 0.05, 0.04,  //
        0.1, 0.5, 0.1, 0.2,             //
        0.05, 0.1, 0.5, 0.04;
    StabilityGridSpec grid;
    grid.v1_min = grid.v2_min = a.v_min;
    grid.v1_max = grid.v2_max = a.v_max;
    grid.n1 = grid.n2 = a.n;
    const double dv_mu = mu_compensation(lam, a.dv_q);
    const std::array<double, 4> v_offset{0.0, a.vq_offset + a.dv_q, 0.0, dv_mu};
    const ChargeStabilityMap m = stability_map(lam, {0.0, 0.0, 0.0}, v_offset, grid, pc);

    Output out;
    out.name = "stability";
    out.csv = stability_map_to_csv(m);
    out.comments = {"dv_q " + fmt(a.dv_q) + " compensated by dv_mu " + fmt(dv_mu)};
    json dots = json::array();
    for (const auto& row : m.dot) dots.push_back(row);
    long long ties = 0;
    for (const auto& row : m.degenerate)
        for (char c : row) ties += c != 0;
    out.data = json{{"v1", m.v1},       {"v2", m.v2},   {"dot", dots},
                    {"dv_q", a.dv_q},   {"dv_mu", dv_mu}, {"degenerate_cells", ties}};
    out.summary = {{"cells", fmt(double(m.dot.size() * m.dot.front().size()))},
                   {"dv_mu", fmt(dv_mu)},
                   {"degenerate_cells", fmt(double(ties))}};
    return out;
}

struct CompileArgs {
    std::string circuit;
    double site_sigma = 1e-3;
};

CompileConfig make_compile_config(const RunConfig& cfg) {
    CompileConfig cc;
    cc.tau_1q = cfg.tau_1q;
    cc.tau_2q = cfg.tau_2q;
    cc.tau_s = cfg.tau_s;
    cc.b0 = cfg.b0;
    cc.dk = cfg.dk;
    return cc;
}

Output run_compile(const RunConfig& cfg, const CompileArgs& a) {
    const LogicalCircuit c = load_circuit(a.circuit);
    const auto site_g = sampled_site_g(physical_column_count(int(c.steps.size())), c.n_qubits,
                                       a.site_sigma, cfg.seed);
    const PipelineProgram p = compile(c, site_g, make_compile_config(cfg));

    Output out;
    out.name = "compile";
    out.data = program_json(p);
    out.csv = program_csv(p);
    out.summary = {{"n_qubits", fmt(double(p.n_qubits))},
                   {"columns", fmt(double(p.columns.size()))},
                   {"logic_1q", fmt(double(p.n_logic_1q))},
                   {"logic_2q", fmt(double(p.n_logic_2q))}};
    return out;
}

struct RunArgs {
    std::string circuit;
    double site_sigma = 1e-3;
    int basis = 0;
    bool random_input = false;
};

Output run_run(const RunConfig& cfg, const RunArgs& a) {
    const LogicalCircuit c = load_circuit(a.circuit);
    const auto site_g = sampled_site_g(physical_column_count(int(c.steps.size())), c.n_qubits,
                                       a.site_sigma, cfg.seed);
    const PipelineProgram p = compile(c, site_g, make_compile_config(cfg));

    const std::int64_t dim = std::int64_t{1} << p.n_qubits;
    VecX input(dim);
    if (a.random_input) {
        CounterRng rng{mix_key(cfg.seed, {0x1A9ull}), 0};
        for (std::int64_t i = 0; i < dim; ++i) input(i) = c64(rng.normal(), rng.normal());
        input /= input.norm();
    } else {
        if (a.basis < 0 || a.basis >= dim)
            throw error("run: basis index out of range for this qubit count");
        input.setZero();
        input(a.basis) = 1.0;
    }
    const VecX out_state = run_statevector(p, input);
    const VecX ref_state = direct_statevector(p, input);
    const double overlap = state_overlap(out_state, ref_state);

    Output out;
    out.name = "run";
    json amps = json::array();
    json refs = json::array();
    std::ostringstream os;
    os << std::setprecision(17);
    os << "index,re,im,direct_re,direct_im\n";
    for (std::int64_t i = 0; i < dim; ++i) {
        amps.push_back({out_state(i).real(), out_state(i).imag()});
        refs.push_back({ref_state(i).real(), ref_state(i).imag()});
        os << i << ',' << out_state(i).real() << ',' << out_state(i).imag() << ','
           << ref_state(i).real() << ',' << ref_state(i).imag() << '\n';
    }
    out.csv = os.str();
    out.comments = {"overlap_vs_direct " + fmt(overlap)};
    out.data = json{{"n_qubits", p.n_qubits},
                    {"overlap_vs_direct", overlap},
                    {"norm", out_state.norm()},
                    {"amplitudes", amps},
                    {"direct_amplitudes", refs}};
    out.summary = {{"overlap_vs_direct", fmt(overlap)}, {"norm", fmt(out_state.norm())}};
    return out;
}

struct RuntimeArgs {
    VqeParams v;
};

Output run_runtime(const RunConfig& cfg, const RuntimeArgs& a) {
    VqeParams v = a.v;
    v.tau_1q = cfg.tau_1q;
    v.tau_2q = cfg.tau_2q;
    v.tau_s = cfg.tau_s;
    const RuntimeEstimate e = vqe_runtime(v);
    const double months = e.tau_run_seq / (30.4375 * 86400.0);
    const double days = e.tau_run_pipe / 86400.0;

    Output out;
    out.name = "runtime";
    out.data = json::parse(estimate_to_json(e));
    out.data["tau_config_seq_min"] = e.tau_config_seq / 60.0;
    out.data["tau_run_seq_months"] = months;
    out.data["tau_run_pipe_days"] = days;
    out.csv = kv_csv({{"tau_1x_s", fmt(e.times.tau_1x)},
                      {"tau_2p_s", fmt(e.times.tau_2p)},
                      {"tau_2s_s", fmt(e.times.tau_2s)},
                      {"tau_config_seq_s", fmt(e.tau_config_seq)},
                      {"tau_config_seq_min", fmt(e.tau_config_seq / 60.0)},
                      {"tau_config_pipe_s", fmt(e.tau_config_pipe)},
                      {"tau_run_seq_s", fmt(e.tau_run_seq)},
                      {"tau_run_seq_months", fmt(months)},
                      {"tau_run_pipe_s", fmt(e.tau_run_pipe)},
                      {"tau_run_pipe_days", fmt(days)},
                      {"speedup", fmt(e.speedup)}});
    out.summary = {{"tau_config_seq_min", fmt(e.tau_config_seq / 60.0)},
                   {"tau_config_pipe_s", fmt(e.tau_config_pipe)},
                   {"speedup", fmt(e.speedup)}};
    return out;
}

struct FootprintArgs {
    int n = 25;
    int depth = 3370;
    double pipe_width = 340e-9;
    double step_length = 190e-9;
    double r_tee = 1e4;
    double rho_sheet = 100.0;
    double trace_width = 50e-9;
    double f_cutoff = 1e5;
    double cap_density = 1.0;  // F/m^2 (= 1 pF/um^2)
    int column_qubits = 50;
};

Output run_footprint(const RunConfig&, const FootprintArgs& a) {
    const Footprint f = footprint(a.n, a.depth, a.pipe_width, a.step_length);
    const ControlFootprint cf = control_footprints(a.r_tee, a.rho_sheet, a.trace_width,
                                                   a.f_cutoff, a.cap_density, a.column_qubits);

    Output out;
    out.name = "footprint";
    out.data = json{{"processor", {{"width_m", f.width}, {"length_m", f.length}}},
                    {"bias_tee",
                     {{"resistor_length_m", cf.resistor_length},
                      {"capacitance_f", cf.capacitance},
                      {"capacitor_area_m2", cf.capacitor_area},
                      {"capacitor_side_m", cf.capacitor_side},
                      {"per_qubit_area_m2", cf.per_qubit_area},
                      {"column_length_m", cf.column_length},
                      {"column_width_m", cf.column_width},
                      {"f_cutoff_roundtrip_hz", cf.f_cutoff_roundtrip}}}};
    out.csv = kv_csv({{"processor_width_m", fmt(f.width)},
                      {"processor_length_m", fmt(f.length)},
                      {"resistor_length_m", fmt(cf.resistor_length)},
                      {"capacitance_f", fmt(cf.capacitance)},
                      {"capacitor_area_m2", fmt(cf.capacitor_area)},
                      {"capacitor_side_m", fmt(cf.capacitor_side)},
                      {"per_qubit_area_m2", fmt(cf.per_qubit_area)},
                      {"column_length_m", fmt(cf.column_length)},
                      {"column_width_m", fmt(cf.column_width)},
                      {"f_cutoff_roundtrip_hz", fmt(cf.f_cutoff_roundtrip)}});
    out.summary = {{"processor_width_m", fmt(f.width)},
                   {"processor_length_m", fmt(f.length)},
                   {"capacitor_side_m", fmt(cf.capacitor_side)}};
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    std::string config_file;
    std::string preset;

    CLI::App app{"spinpipe: pipeline spin-qubit processor simulator"};
    app.require_subcommand(1);
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--b0", cfg.b0, "static field, T");
    app.add_option("--g-si", cfg.g_si, "silicon electron g-factor");
    auto* opt_t1 = app.add_option("--tau1q", cfg.tau_1q, "single-qubit slot, s");
    auto* opt_t2 = app.add_option("--tau2q", cfg.tau_2q, "two-qubit slot, s");
    auto* opt_ts = app.add_option("--tau-s", cfg.tau_s, "shuttle step, s");
    app.add_option("--dk", cfg.dk, "charge splitting, J");
    app.add_option("--sigma-g", cfg.sigma_g, "g-factor scatter");
    app.add_option("--sigma-tau", cfg.sigma_tau, "gate-time jitter, s");
    app.add_option("--sigma-v", cfg.sigma_v, "gate-voltage noise, V");
    app.add_option("--sigma-tij", cfg.sigma_tij_rel, "relative tunnel-coupling drift");
    app.add_option("--sigma-b1", cfg.sigma_b1, "drive-amplitude noise, T");
    app.add_option("--samples", cfg.n_samples, "Monte-Carlo samples per cell");
    app.add_option("--out", cfg.out, "output file (default <SPINPIPE_OUT_DIR>/<cmd>.<format>)");
    app.add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--config", config_file, "JSON config file; overrides flags");
    app.add_option("--preset", preset, "gate-time preset")
        ->check(CLI::IsMember({"paper-1us", "paper-0.1us"}));

    ZmapArgs zmap_args;
    auto* sub_zmap = app.add_subcommand("zmap", "Z-gate fidelity map over noise sigmas");
    sub_zmap->add_option("--sigma-tau", zmap_args.grid_tau, "gate-time jitter grid, s")
        ->delimiter(',');
    sub_zmap->add_option("--sigma-v", zmap_args.grid_v, "voltage noise grid, V")->delimiter(',');

    TwoqArgs twoq_args;
    auto* sub_twoq = app.add_subcommand("twoqmap", "two-qubit fidelity map over angle x drift");
    sub_twoq->add_option("--kind", twoq_args.kind, "ising | givens-swap | swap")
        ->check(CLI::IsMember({"ising", "givens-swap", "swap"}));
    sub_twoq->add_option("--angles", twoq_args.angles, "gate-angle grid, rad")->delimiter(',');
    sub_twoq->add_option("--sigma-tij", twoq_args.grid_tij, "relative t_ij drift grid")
        ->delimiter(',');

    X90Args x90_args;
    auto* sub_x90 = app.add_subcommand("x90map", "global X(pi/2) fidelity map");
    sub_x90->add_option("--sigma-b1", x90_args.grid_b1, "drive noise grid, T")->delimiter(',');
    sub_x90->add_option("--sigma-tau", x90_args.grid_tau, "timing jitter grid, s")
        ->delimiter(',');
    sub_x90->add_option("--bin", x90_args.bin, "g-factor bin index");

    SolveGateArgs sg_args;
    auto* sub_sg = app.add_subcommand("solve-gate", "native two-qubit gate engineering");
    sub_sg->add_option("kind", sg_args.kind, "cphase | ising | givens | swap")
        ->required()
        ->check(CLI::IsMember({"cphase", "ising", "givens", "swap"}));
    auto* opt_angle = sub_sg->add_option("--angle", sg_args.angle, "gate parameter, rad");
    sub_sg->add_option("--chi", sg_args.angle, "mixing angle (givens alias)")
        ->excludes(opt_angle);
    sub_sg->add_option("--tau", sg_args.tau, "interaction slot, s (default --tau2q)");
    auto* opt_gi = sub_sg->add_option("--gi", sg_args.g_i, "qubit i g deviation");
    auto* opt_gj = sub_sg->add_option("--gj", sg_args.g_j, "qubit j g deviation");
    sub_sg->add_option("--pairs", sg_args.pairs, "ensemble size when gi/gj not given");

    ShuttleArgs sh_args;
    auto* sub_sh = app.add_subcommand("shuttle", "Landau-Zener shuttle timing");
    sub_sh->add_option("--t-over-h", sh_args.t_over_h, "tunnel coupling over h, Hz");
    sub_sh->add_option("--alpha", sh_args.alpha, "lever arm");
    sub_sh->add_option("--dv", sh_args.dv, "plunger ramp range, V");
    sub_sh->add_option("--pmax", sh_args.p_max, "transition probability budget");

    FieldArgs field_args;
    auto* sub_field = app.add_subcommand("field", "gate-field derivative profiles");
    sub_field->add_option("--layout", field_args.layout, "default | stark")
        ->check(CLI::IsMember({"default", "stark"}));
    sub_field->add_option("--x-min", field_args.x_min, "profile start, m");
    sub_field->add_option("--x-max", field_args.x_max, "profile end, m");
    sub_field->add_option("--points", field_args.points, "profile points");

    StabilityArgs st_args;
    auto* sub_st = app.add_subcommand("stability", "charge stability map");
    sub_st->add_option("--v-min", st_args.v_min, "plunger sweep start, V");
    sub_st->add_option("--v-max", st_args.v_max, "plunger sweep end, V");
    sub_st->add_option("--n", st_args.n, "grid points per axis");
    sub_st->add_option("--vq-offset", st_args.vq_offset, "static plunger-q offset, V");
    sub_st->add_option("--dvq", st_args.dv_q, "plunger step, mu-compensated, V");

    CompileArgs comp_args;
    auto* sub_comp = app.add_subcommand("compile", "compile a logical circuit");
    sub_comp->add_option("--circuit", comp_args.circuit, "circuit JSON file")->required();
    sub_comp->add_option("--site-sigma", comp_args.site_sigma, "site g-factor scatter");

    RunArgs run_args;
    auto* sub_run = app.add_subcommand("run", "compile and simulate a logical circuit");
    sub_run->add_option("--circuit", run_args.circuit, "circuit JSON file")->required();
    sub_run->add_option("--site-sigma", run_args.site_sigma, "site g-factor scatter");
    sub_run->add_option("--basis", run_args.basis, "computational input index");
    sub_run->add_flag("--random-input", run_args.random_input, "random input state");

    RuntimeArgs rt_args;
    auto* sub_rt = app.add_subcommand("runtime", "gate-time table and VQE runtime estimate");
    sub_rt->add_option("--d1q", rt_args.v.d_1q, "single-qubit circuit depth");
    sub_rt->add_option("--d2q", rt_args.v.d_2q, "two-qubit circuit depth");
    sub_rt->add_option("--nreps-seq", rt_args.v.n_reps_seq, "sequential repetitions");
    sub_rt->add_option("--nreps-pipe", rt_args.v.n_reps_pipe, "pipelined repetitions");
    sub_rt->add_option("--nconfigs", rt_args.v.n_configs, "measurement configurations");
    sub_rt->add_option("--niters", rt_args.v.n_iters, "optimizer iterations");

    FootprintArgs fp_args;
    auto* sub_fp = app.add_subcommand("footprint", "processor and bias-tee dimensions");
    sub_fp->add_option("--n", fp_args.n, "qubits (pipes)");
    sub_fp->add_option("--depth", fp_args.depth, "circuit depth (steps)");
    sub_fp->add_option("--pipe-width", fp_args.pipe_width, "pipe pitch, m");
    sub_fp->add_option("--step-length", fp_args.step_length, "step pitch, m");
    sub_fp->add_option("--r-tee", fp_args.r_tee, "bias-tee resistance, Ohm");
    sub_fp->add_option("--rho-sheet", fp_args.rho_sheet, "sheet resistance, Ohm/sq");
    sub_fp->add_option("--trace-width", fp_args.trace_width, "resistor trace width, m");
    sub_fp->add_option("--f-cutoff", fp_args.f_cutoff, "RC cutoff, Hz");
    sub_fp->add_option("--cap-density", fp_args.cap_density, "capacitance density, F/m^2");
    sub_fp->add_option("--column-qubits", fp_args.column_qubits, "qubits per tee column");

    // Global flags are accepted after the subcommand name as well.
    for (CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; }))
        s->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (preset == "paper-1us") {
            if (opt_t1->count() == 0) cfg.tau_1q = 1e-6;
            if (opt_t2->count() == 0) cfg.tau_2q = 1e-6;
            if (opt_ts->count() == 0) cfg.tau_s = 10e-9;
        } else if (preset == "paper-0.1us") {
            if (opt_t1->count() == 0) cfg.tau_1q = 0.1e-6;
            if (opt_t2->count() == 0) cfg.tau_2q = 0.1e-6;
            if (opt_ts->count() == 0) cfg.tau_s = 10e-9;
        }
        if (!config_file.empty()) apply_config_file(cfg, config_file);
        cfg.validate();
        sg_args.explicit_pair = opt_gi->count() > 0 || opt_gj->count() > 0;

        Output out;
        if (sub_zmap->parsed()) out = run_zmap(cfg, zmap_args);
        else if (sub_twoq->parsed()) out = run_twoqmap(cfg, twoq_args);
        else if (sub_x90->parsed()) out = run_x90map(cfg, x90_args);
        else if (sub_sg->parsed()) out = run_solve_gate(cfg, sg_args);
        else if (sub_sh->parsed()) out = run_shuttle(cfg, sh_args);
        else if (sub_field->parsed()) out = run_field(cfg, field_args);
        else if (sub_st->parsed()) out = run_stability(cfg, st_args);
        else if (sub_comp->parsed()) out = run_compile(cfg, comp_args);
        else if (sub_run->parsed()) out = run_run(cfg, run_args);
        else if (sub_rt->parsed()) out = run_runtime(cfg, rt_args);
        else if (sub_fp->parsed()) out = run_footprint(cfg, fp_args);
        else throw error("no subcommand selected");
        write_output(cfg, out);
    } catch (const compile_error& e) {
        std::cout << json{{"error", e.what()}, {"column", e.column}, {"row", e.row}}.dump()
                  << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << '\n';
        return 1;
    }
    return 0;
}
