// dyncert command-line tool: bounds, score, simulate, wigner, make-figures.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dyncert/classical.hpp"
#include "dyncert/errors.hpp"
#include "dyncert/io.hpp"
#include "dyncert/phasespace.hpp"
#include "dyncert/protocol.hpp"
#include "dyncert/simulate.hpp"

using namespace dyncert;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct RunConfig {
    std::string command;
    std::string model = "harmonic";
    double alpha = 0.0;
    double lambda = 0.0;
    double tau = 1.0;
    std::optional<double> tau_min, tau_max;
    int points = 31;
    std::string scan_axis = "tau";
    std::optional<int> n_max;
    std::optional<int> n_hat;
    std::string policy = "from-tau";
    bool scan = false, scenario = false, optimize_tau = false;
    std::string state = "psi6";
    std::uint64_t rounds = 1000000;
    std::uint64_t seed = 0;
    bool angular = false;
    int grid = 81;
    std::optional<double> q_min, q_max, p_min, p_max, e_max;
    std::string out;
    std::string out_dir;
    int workers = default_workers();
    bool cache = false;
    std::string cache_dir = ".dyncert-cache";

    // which options were set explicitly (flag or config file)
    bool model_given = false, alpha_given = false, lambda_given = false, tau_given = false;

    ModelSystem system() const;
    std::optional<fs::path> cache_path() const {
        if (!cache)
            return std::nullopt;
        return fs::path(cache_dir);
    }
};

ModelSystem RunConfig::system() const {
    ModelKind k = parse_model_kind(model);
    if (alpha_given && k != ModelKind::Kerr && k != ModelKind::Pendulum)
        throw UsageError("--alpha does not apply to model " + model);
    if (lambda_given && k != ModelKind::Morse)
        throw UsageError("--lambda does not apply to model " + model);
    switch (k) {
    case ModelKind::Harmonic: return ModelSystem::harmonic();
    case ModelKind::Kerr: return ModelSystem::kerr(alpha);
    case ModelKind::Pendulum:
        if (!alpha_given)
            throw UsageError("pendulum needs --alpha (negative)");
        return ModelSystem::pendulum(alpha);
    case ModelKind::Morse:
        if (!lambda_given)
            throw UsageError("morse needs --lambda");
        return ModelSystem::morse(lambda);
    case ModelKind::InfiniteWell: return ModelSystem::infinite_well();
    }
    throw UsageError("unknown model");
}

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string g12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_text(const fs::path& p, const std::string& s) {
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw UsageError("cannot write " + p.string());
    out << s;
}

// Prints to --out when given, stdout otherwise.
void emit(const RunConfig& c, const std::string& s) {
    if (c.out.empty())
        std::cout << s;
    else
        write_text(c.out, s);
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 2)
        return {a};
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i)
        x[i] = a + (b - a) * i / (n - 1);
    return x;
}

// ---- slices ---------------------------------------------------------------

SlicePtr cached_slice(const std::optional<fs::path>& dir, const ModelSystem& m, const std::string& selector,
                      const std::function<SpectrumSlice()>& build) {
    std::string key;
    if (dir) {
        key = slice_cache_key(m, selector);
        if (auto hit = cache_load(*dir, key))
            return std::make_shared<SpectrumSlice>(std::move(*hit));
    }
    auto s = std::make_shared<SpectrumSlice>(build());
    if (dir)
        cache_store(*dir, key, *s);
    return s;
}

WindowPolicy policy_of(const RunConfig& c) {
    if (c.policy == "from-tau")
        return WindowPolicy::FromTau;
    if (c.policy == "fixed")
        return WindowPolicy::Fixed;
    throw UsageError("unknown window policy " + c.policy);
}

Truncation truncation_of(const RunConfig& c) {
    Truncation t;
    t.n_max = c.n_max;
    return t;
}

SlicePtr score_slice(const RunConfig& c, const ModelSystem& m, double tau) {
    WindowPolicy pol = policy_of(c);
    Truncation tr = truncation_of(c);
    std::string sel = "policy=" + c.policy + (pol == WindowPolicy::FromTau ? ";tau=" + g17(tau) : "") +
                      ";nmax=" + (c.n_max ? std::to_string(*c.n_max) : "none");
    return cached_slice(c.cache_path(), m, sel, [&] { return slice_for(m, tau, pol, tr); });
}

SlicePtr lowest_levels(const RunConfig& c, const ModelSystem& m, int n) {
    return cached_slice(c.cache_path(), m, "nmax=" + std::to_string(n),
                        [&] { return build_slice(m, levels_upto(m, n)); });
}

// ---- states ---------------------------------------------------------------

struct ResolvedState {
    QuantumState state;
    double tau;
    std::string label;
};

ResolvedState resolve_state(const RunConfig& c) {
    if (c.state.rfind("file:", 0) == 0) {
        fs::path path = c.state.substr(5);
        QuantumState st = load_state(path);
        if (c.model_given) {
            ModelSystem m = c.system();
            const ModelSystem& f = st.slice->model;
            if (m.kind != f.kind || m.alpha != f.alpha || m.lambda != f.lambda)
                throw ModelMismatchError("state file holds a " + f.name() + " state that does not match --model " +
                                         m.name() + " and its parameters");
        }
        double tau = c.tau;
        if (!c.tau_given) {
            std::ifstream in(path);
            json j = json::parse(in);
            if (j.contains("tau") && j["tau"].is_number())
                tau = j["tau"].get<double>();
        }
        return {st, tau, c.state};
    }
    ModelSystem m = c.system();
    if (c.state == "optimal") {
        SlicePtr s = score_slice(c, m, c.tau);
        return {max_score(s, c.tau).state, c.tau, "optimal"};
    }
    ReferenceKind k = parse_reference_kind(c.state);
    SlicePtr s = lowest_levels(c, m, k == ReferenceKind::Psi6 ? 6 : 4);
    double tau = c.tau_given ? c.tau : harmonic_reference_tau(k);
    return {reference_state(k, s), tau, c.state};
}

// ---- bounds ---------------------------------------------------------------

double energy_top(const ModelSystem& m, const RunConfig& c) {
    if (c.e_max)
        return *c.e_max;
    switch (m.kind) {
    case ModelKind::Kerr:
        return m.alpha < 0.0 ? 0.5 / std::abs(m.alpha) : 20.0;
    case ModelKind::Pendulum:
        return 1.0 / (8.0 * std::abs(m.alpha));
    case ModelKind::Morse:
        return m.lambda;
    default:
        return 20.0;
    }
}

struct TrappingCurve {
    std::vector<double> energy, dt_plus, dt_minus;
    double max_plus = 0.0, min_minus = kInf;
};

// Linear sweep plus a geometric approach to the floor, where the extremes of some models sit.
TrappingCurve trapping_curve(const ModelSystem& m, double top, int n_linear) {
    double floor = m.energy_floor();
    std::vector<double> es{floor};
    for (int i = 80; i >= 0; --i)
        es.push_back(floor + (top - floor) * std::pow(10.0, -2.0 - 18.0 * i / 80.0));
    for (int i = 1; i <= n_linear; ++i)
        es.push_back(floor + (top - floor) * i / n_linear);
    TrappingCurve out;
    for (double e : es) {
        std::optional<TrappingTimes> t;
        try {
            t = trapping_times(m, e);
        } catch (const DomainError&) {
            continue;
        } catch (const LibrationError&) {
            continue;
        }
        out.energy.push_back(e);
        out.dt_plus.push_back(t->dt_plus.value());
        out.dt_minus.push_back(t->dt_minus.value());
        out.max_plus = std::max(out.max_plus, t->dt_plus.value());
        out.min_minus = std::min(out.min_minus, t->dt_minus.value());
    }
    return out;
}

std::string trapping_csv(const TrappingCurve& t) {
    std::string s = "energy,dt_plus,dt_minus\n";
    for (std::size_t i = 0; i < t.energy.size(); ++i)
        s += g12(t.energy[i]) + "," + g12(t.dt_plus[i]) + "," +
             (std::isfinite(t.dt_minus[i]) ? g12(t.dt_minus[i]) : std::string("inf")) + "\n";
    return s;
}

int cmd_bounds(const RunConfig& c) {
    ModelSystem m = c.system();
    TauRange r = admissible_tau(m);
    EnergyWindow w = energy_window(m, c.tau);
    TrappingCurve t = trapping_curve(m, energy_top(m, c), std::max(c.points, 2) * 10);
    json curve = json::array();
    for (std::size_t i = 0; i < t.energy.size(); ++i)
        curve.push_back({{"energy", t.energy[i]}, {"dt_plus", num(t.dt_plus[i])}, {"dt_minus", num(t.dt_minus[i])}});
    json j;
    j["command"] = "bounds";
    j["model"] = to_json(m);
    j["tau"] = c.tau;
    j["admissible_tau"] = {{"lo", r.lo}, {"hi", num(r.hi)}};
    j["window"] = to_json(w);
    j["dt_extrema"] = {{"max_dt_plus", num(t.max_plus)}, {"min_dt_minus", num(t.min_minus)}};
    j["curve"] = curve;
    emit(c, j.dump(2) + "\n");
    return 0;
}

// ---- score ----------------------------------------------------------------

std::vector<double> scan_grid(const RunConfig& c, const ModelSystem& m) {
    TauRange r = admissible_tau(m);
    double lo = c.tau_given ? c.tau : r.lo;
    double hi = c.tau_max ? *c.tau_max : (std::isfinite(r.hi) ? r.hi : 1.0);
    if (!(hi > lo))
        throw UsageError("scan needs --tau-max above --tau");
    if (c.scan_axis == "tau")
        return linspace(lo, hi, c.points);
    if (c.scan_axis != "inverse")
        throw UsageError("--scan-axis must be tau or inverse");
    std::vector<double> inv = linspace(1.0 / hi, 1.0 / lo, c.points), out;
    for (auto it = inv.rbegin(); it != inv.rend(); ++it)
        out.push_back(1.0 / *it);
    return out;
}

std::vector<ScanPoint> scan_points(const RunConfig& c, const ModelSystem& m, const std::vector<double>& grid) {
    std::vector<ScanPoint> pts(grid.size());
    parallel_for(grid.size(), c.workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            pts[i] = {grid[i], std::nan(""), 0, ""};
            try {
                SlicePtr s = score_slice(c, m, grid[i]);
                pts[i].dim = static_cast<int>(s->dim());
                pts[i].p3_max = max_score_value(*s, grid[i]);
            } catch (const Error& err) {
                pts[i].error = err.code() + ": " + err.what();
            }
        }
    });
    return pts;
}

std::string scan_csv(const std::vector<ScanPoint>& pts) {
    std::string s = "tau,inverse_tau,p3_max,dim,error\n";
    for (const auto& p : pts) {
        std::string err = p.error;
        std::replace(err.begin(), err.end(), ',', ';');
        s += g12(p.tau) + "," + g12(1.0 / p.tau) + "," + (p.error.empty() ? g12(p.p3_max) : std::string()) + "," +
             std::to_string(p.dim) + "," + err + "\n";
    }
    return s;
}

Maximum optimize_tau(const RunConfig& c, const ModelSystem& m) {
    TauRange r = admissible_tau(m);
    double lo = c.tau_min ? *c.tau_min : r.lo, hi = c.tau_max ? *c.tau_max : r.hi;
    if (!std::isfinite(hi) || !(hi > lo) || !(lo > 0.0))
        throw UsageError("--optimize-tau needs a finite interval; give --tau-min and --tau-max");
    WindowPolicy pol = policy_of(c);
    Truncation tr = truncation_of(c);
    return golden_maximize(
        [&](double tau) {
            try {
                return max_score_value(slice_for(m, tau, pol, tr), tau);
            } catch (const EmptyWindowError&) {
                return 0.0;
            }
        },
        lo, hi, 16, 1e-8);
}

int cmd_score(const RunConfig& c) {
    ModelSystem m = c.system();
    if (c.scenario) {
        if (!c.n_hat)
            throw UsageError("--scenario needs --nhat 4 or 6");
        json j;
        j["command"] = "scenario";
        j["model"] = to_json(m);
        j["n_hat"] = *c.n_hat;
        json table = to_json(scenario_compare(m, *c.n_hat));
        for (auto& [k, v] : table.items())
            j[k] = v;
        emit(c, j.dump(2) + "\n");
        return 0;
    }
    if (c.scan) {
        emit(c, scan_csv(scan_points(c, m, scan_grid(c, m))));
        return 0;
    }
    double tau = c.optimize_tau ? optimize_tau(c, m).x : c.tau;
    ScoreResult r = max_score(score_slice(c, m, tau), tau);
    if (policy_of(c) == WindowPolicy::FromTau)
        r.window = energy_window(m, tau);
    json j = to_json(r);
    j["dim"] = r.state.slice->dim();
    j["violates"] = r.p3_max > 2.0 / 3.0 + 1e-9;
    emit(c, j.dump(2) + "\n");
    return 0;
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const RunConfig& c) {
    ResolvedState rs = resolve_state(c);
    SimulationOptions opt;
    opt.workers = c.workers;
    McEstimate e = run_protocol(rs.state, rs.tau, c.rounds, c.seed, opt);
    json j;
    j["command"] = "simulate";
    j["model"] = to_json(rs.state.slice->model);
    j["state"] = rs.label;
    j["state_hash"] = state_hash(rs.state);
    j["tau"] = rs.tau;
    json est = to_json(e);
    for (auto& [k, v] : est.items())
        j[k] = v;
    j["p3_exact"] = score_state(rs.state, rs.tau);
    emit(c, j.dump(2) + "\n");
    return 0;
}

// ---- wigner ---------------------------------------------------------------

struct Extent {
    double lo, hi;
};

// Where the state lives in position: densities at the three probing times above 1e-6 of their peak.
Extent position_extent(const QuantumState& st, double tau) {
    double lo = kInf, hi = -kInf;
    for (int k = 0; k < 3; ++k) {
        WavefunctionSynth psi(st, k, tau);
        auto [a, b] = psi.support();
        RealGrid g = marginal_density(st, k, tau, RealGrid::uniform(a, b, 4001));
        double peak = *std::max_element(g.values.begin(), g.values.end());
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.values[i] > 1e-6 * peak) {
                lo = std::min(lo, g.points[i]);
                hi = std::max(hi, g.points[i]);
            }
    }
    const ModelSystem& m = st.slice->model;
    double pad = 0.05 * (hi - lo);
    return {std::max(lo - pad, m.q_min()), std::min(hi + pad, m.q_max())};
}

double momentum_extent(const QuantumState& st) {
    const ModelSystem& m = st.slice->model;
    double e_top = *std::max_element(st.slice->energies.begin(), st.slice->energies.end());
    double span = e_top - m.energy_floor();
    if (m.kind == ModelKind::Kerr)
        span = e_top;
    return std::sqrt(2.0 * m.mass() * (2.0 * span + 2.0)) + 1.0;
}

json write_wigner_set(const RunConfig& c, const ResolvedState& rs, const fs::path& dir) {
    const QuantumState& st = rs.state;
    const ModelSystem& m = st.slice->model;
    if (!m.cartesian() && !c.angular)
        throw ModelMismatchError("pendulum states need --angular (discrete angular-momentum Wigner function)");
    int n = std::max(c.grid, 2);
    std::vector<double> q_axis;
    json grid_meta, files = json::array(), marg_files = json::array(), mins = json::array(), norms = json::array();
    int m_lo = 0, m_hi = 0;
    std::vector<double> p_axis;
    if (c.angular) {
        double a = c.q_min.value_or(-pi), b = c.q_max.value_or(pi);
        q_axis = linspace(a, b, n);
        for (int k = 0; k < 3; ++k) {
            int m0 = 0;
            auto coeffs = angular_coefficients(st, m0, k, rs.tau);
            int last = m0 + static_cast<int>(coeffs.size()) - 1;
            m_lo = k == 0 ? m0 - 2 : std::min(m_lo, m0 - 2);
            m_hi = k == 0 ? last + 2 : std::max(m_hi, last + 2);
        }
        grid_meta = {{"phi", {a, b, n}}, {"m", {m_lo, m_hi}}};
    } else {
        Extent ex = position_extent(st, rs.tau);
        double pm = momentum_extent(st);
        double a = c.q_min.value_or(ex.lo), b = c.q_max.value_or(ex.hi);
        double pa = c.p_min.value_or(-pm), pb = c.p_max.value_or(pm);
        q_axis = linspace(a, b, n);
        p_axis = linspace(pa, pb, n);
        grid_meta = {{"q", {a, b, n}}, {"p", {pa, pb, n}}};
    }
    for (int k = 0; k < 3; ++k) {
        WignerGrid w = c.angular ? wigner_angular(st, q_axis, m_lo, m_hi, k, rs.tau)
                                 : wigner_cartesian(st, q_axis, p_axis, k, rs.tau);
        std::string wf = "wigner_t" + std::to_string(k) + ".csv", mf = "marginal_t" + std::to_string(k) + ".csv";
        write_text(dir / wf, grid_csv(w));
        write_text(dir / mf, density_csv(marginal_density(st, k, rs.tau, RealGrid(q_axis, std::vector<double>(q_axis.size())))));
        files.push_back(wf);
        marg_files.push_back(mf);
        mins.push_back(w.min());
        norms.push_back(w.cell_integral());
    }
    json meta;
    meta["model"] = to_json(m);
    meta["alpha"] = m.kind == ModelKind::Kerr || m.kind == ModelKind::Pendulum ? json(m.alpha) : json(nullptr);
    meta["tau"] = rs.tau;
    meta["state_hash"] = state_hash(st);
    meta["state"] = rs.label;
    meta["p3"] = score_state(st, rs.tau);
    meta["representation"] = c.angular ? "angular" : "cartesian";
    meta["probing_times"] = {0.0, rs.tau / 3.0, 2.0 * rs.tau / 3.0};
    meta["grid"] = grid_meta;
    meta["wigner_files"] = files;
    meta["marginal_files"] = marg_files;
    meta["wigner_min"] = mins;
    meta["cell_integral"] = norms;
    write_text(dir / "meta.json", meta.dump(2) + "\n");
    return meta;
}

int cmd_wigner(const RunConfig& c) {
    ResolvedState rs = resolve_state(c);
    fs::path dir = c.out_dir.empty() ? fs::path("wigner") : fs::path(c.out_dir);
    json meta = write_wigner_set(c, rs, dir);
    std::cout << meta.dump(2) << "\n";
    return 0;
}

// ---- make-figures ---------------------------------------------------------

std::string row(std::initializer_list<double> xs) {
    std::string s;
    for (double x : xs)
        s += (s.empty() ? "" : ",") + (std::isfinite(x) ? g12(x) : std::string());
    return s + "\n";
}

// P3 at tau = 1 and optimized over [3/4, 3/2] for a family of models.
std::string anharmonicity_csv(const RunConfig& c, const std::vector<ModelSystem>& ms, const std::vector<double>& xs) {
    Truncation tr;
    tr.n_max = c.n_max.value_or(40);
    std::vector<std::string> rows(ms.size());
    parallel_for(ms.size(), c.workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            auto at = [&](double tau) {
                try {
                    return max_score_value(slice_for(ms[i], tau, WindowPolicy::FromTau, tr), tau);
                } catch (const EmptyWindowError&) {
                    return std::nan("");
                }
            };
            Maximum best = golden_maximize([&](double tau) { double v = at(tau); return std::isnan(v) ? 0.0 : v; },
                                           0.75, 1.5);
            rows[i] = row({xs[i], at(1.0), best.value, best.x});
        }
    });
    std::string s = "alpha,p3_tau1,p3_opt,tau_opt\n";
    for (const auto& r : rows)
        s += r;
    return s;
}

std::string scenario_csv(const RunConfig& c, const std::vector<ModelSystem>& ms, const std::vector<double>& xs,
                         int n_hat) {
    std::vector<std::string> rows(ms.size());
    parallel_for(ms.size(), c.workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            ScenarioTable t = scenario_compare(ms[i], n_hat);
            rows[i] = row({xs[i], t.optimal.score, t.optimal.tau, t.reference_opt.score, t.reference_opt.tau,
                           t.reference_fixed.score, t.reference_fixed.tau});
        }
    });
    std::string s = "alpha,optimal_score,optimal_tau,reference_opt_score,reference_opt_tau,reference_fixed_score,"
                    "reference_fixed_tau\n";
    for (const auto& r : rows)
        s += r;
    return s;
}

int cmd_make_figures(const RunConfig& c) {
    fs::path root = c.out_dir.empty() ? fs::path("figures") : fs::path(c.out_dir);
    int pts = std::max(c.points, 2);
    json index = json::array();
    auto note = [&](const std::string& path, const std::string& what) {
        index.push_back({{"path", path}, {"content", what}});
    };

    // trapping times
    const std::pair<std::string, ModelSystem> trapped[] = {
        {"harmonic", ModelSystem::harmonic()},          {"kerr_+0.02", ModelSystem::kerr(0.02)},
        {"kerr_-0.02", ModelSystem::kerr(-0.02)},       {"pendulum_-0.02", ModelSystem::pendulum(-0.02)},
        {"morse_10", ModelSystem::morse(10)},           {"well", ModelSystem::infinite_well()}};
    for (const auto& [name, m] : trapped) {
        RunConfig cc = c;
        cc.e_max.reset();
        write_text(root / "trapping" / (name + ".csv"), trapping_csv(trapping_curve(m, energy_top(m, cc), 10 * pts)));
    }
    note("trapping/", "trapping times dt+ and dt- against energy");

    // harmonic P3 against tau
    {
        RunConfig cc = c;
        cc.policy = "fixed";
        cc.n_max = c.n_max.value_or(100);
        cc.tau_given = false;
        cc.tau_max.reset();
        cc.points = pts;
        write_text(root / "harmonic_tau" / "p3_vs_tau.csv",
                   scan_csv(scan_points(cc, ModelSystem::harmonic(), scan_grid(cc, ModelSystem::harmonic()))));
        note("harmonic_tau/p3_vs_tau.csv", "maximum score against tau, harmonic, n <= " + std::to_string(*cc.n_max));
    }

    // reference states
    for (std::string ref : {"psi6", "psi4"}) {
        RunConfig cc = c;
        cc.state = ref;
        cc.model = "harmonic";
        cc.alpha_given = cc.lambda_given = cc.tau_given = false;
        cc.angular = false;
        cc.q_min = cc.q_max = cc.p_min = cc.p_max = std::nullopt;
        write_wigner_set(cc, resolve_state(cc), root / ("harmonic_" + ref));
        note("harmonic_" + ref + "/", "Wigner grids and densities at the probing times");
    }

    // anharmonicity sweeps
    {
        std::vector<double> xs = linspace(-0.1, 0.1, pts);
        std::vector<ModelSystem> ms;
        for (double a : xs)
            ms.push_back(ModelSystem::kerr(a));
        write_text(root / "kerr_alpha" / "p3_vs_alpha.csv", anharmonicity_csv(c, ms, xs));
        note("kerr_alpha/p3_vs_alpha.csv", "Kerr maximum score at tau = 1 and optimized tau");

        std::vector<double> ps = linspace(-0.1, -0.005, pts);
        ms.clear();
        for (double a : ps)
            ms.push_back(ModelSystem::pendulum(a));
        write_text(root / "pendulum_alpha" / "p3_vs_alpha.csv", anharmonicity_csv(c, ms, ps));
        note("pendulum_alpha/p3_vs_alpha.csv", "pendulum maximum score at tau = 1 and optimized tau");
    }

    // weak-anharmonicity scenarios
    for (int n_hat : {6, 4}) {
        std::vector<double> xs = linspace(-0.02, 0.02, pts);
        std::vector<ModelSystem> kerr, pend;
        std::vector<double> pxs;
        for (double a : xs) {
            kerr.push_back(ModelSystem::kerr(a));
            if (a < 0.0) {
                pend.push_back(ModelSystem::pendulum(a));
                pxs.push_back(a);
            }
        }
        std::string tag = "n" + std::to_string(n_hat) + ".csv";
        write_text(root / "kerr_scenarios" / tag, scenario_csv(c, kerr, xs, n_hat));
        write_text(root / "pendulum_scenarios" / tag, scenario_csv(c, pend, pxs, n_hat));
        // Morse anharmonicity 1/(2 lambda)
        std::vector<double> mxs = linspace(n_hat == 6 ? 4e-3 : 4e-4, n_hat == 6 ? 4e-4 : 4e-5, pts);
        std::vector<ModelSystem> morse;
        for (double a : mxs)
            morse.push_back(ModelSystem::morse(1.0 / (2.0 * a)));
        write_text(root / "morse_scenarios" / tag, scenario_csv(c, morse, mxs, n_hat));
    }
    note("kerr_scenarios/", "three-scenario scores and taus against alpha, n_hat = 6 and 4");
    note("pendulum_scenarios/", "three-scenario scores and taus against alpha, n_hat = 6 and 4");
    note("morse_scenarios/", "three-scenario scores and taus against alpha = 1/(2 lambda), n_hat = 6 and 4");

    // infinite well against 1/tau
    {
        RunConfig cc = c;
        cc.policy = "from-tau";
        cc.n_max.reset();
        cc.tau = 1.0 / 30.0;
        cc.tau_given = true;
        cc.tau_max = 1.0;
        cc.scan_axis = "inverse";
        cc.points = pts;
        ModelSystem well = ModelSystem::infinite_well();
        write_text(root / "well_inverse_tau" / "p3_vs_inverse_tau.csv", scan_csv(scan_points(cc, well, scan_grid(cc, well))));
        note("well_inverse_tau/p3_vs_inverse_tau.csv", "infinite well maximum score against 1/tau");
    }

    json j = {{"command", "make-figures"}, {"out_dir", root.string()}, {"points", pts}, {"files", index}};
    write_text(root / "index.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- entry ----------------------------------------------------------------

int emit_error(const std::string& code, const std::string& message, int exit_code,
               std::optional<double> residual = std::nullopt) {
    json j = {{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}};
    if (residual)
        j["error"]["residual"] = *residual;
    std::cout << j.dump(2) << "\n";
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig c;
    CLI::App app{"Dynamics-based quantumness certification: classical bounds, quantum scores, simulation and "
                 "phase-space data"};
    app.set_config("--config", "", "Flat key = value file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1, 1);

    auto* model = app.add_option("--model", c.model, "harmonic | kerr | pendulum | morse | well")->capture_default_str();
    auto* alpha = app.add_option("--alpha", c.alpha, "Anharmonicity (Kerr any sign, pendulum negative)");
    auto* lambda = app.add_option("--lambda", c.lambda, "Morse depth 2 D_e / hbar omega0");
    auto* tau = app.add_option("--tau", c.tau, "Probing ratio T / T0 (scan start with --scan)")->capture_default_str();
    app.add_option("--tau-min", c.tau_min, "Lower end for --optimize-tau");
    app.add_option("--tau-max", c.tau_max, "Upper end for --scan and --optimize-tau");
    app.add_option("--points", c.points, "Grid points for scans and figure curves")
        ->check(CLI::Range(1, 100000))
        ->capture_default_str();
    app.add_option("--scan-axis", c.scan_axis, "tau | inverse (uniform in 1/tau)")->capture_default_str();
    app.add_option("--nmax", c.n_max, "Keep levels n <= nmax")->check(CLI::NonNegativeNumber);
    app.add_option("--nhat", c.n_hat, "Scenario truncation (4 or 6)");
    app.add_option("--policy", c.policy, "Window policy: from-tau | fixed")->capture_default_str();
    app.add_option("--state", c.state, "psi6 | psi4 | optimal | file:PATH")->capture_default_str();
    app.add_option("--rounds", c.rounds, "Monte Carlo rounds")
        ->check(CLI::Range(std::uint64_t{1}, std::numeric_limits<std::uint64_t>::max()))
        ->capture_default_str();
    app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app.add_option("--grid", c.grid, "Wigner grid points per axis")->check(CLI::Range(2, 4001))->capture_default_str();
    app.add_option("--q-min", c.q_min, "Position (or phi) axis start");
    app.add_option("--q-max", c.q_max, "Position (or phi) axis end");
    app.add_option("--p-min", c.p_min, "Momentum axis start");
    app.add_option("--p-max", c.p_max, "Momentum axis end");
    app.add_option("--e-max", c.e_max, "Top of the bounds energy grid");
    app.add_option("--out", c.out, "Write the record to this file instead of stdout");
    app.add_option("--out-dir", c.out_dir, "Directory for wigner and make-figures output");
    app.add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1, 4096))->capture_default_str();
    app.add_flag("--cache", c.cache, "Reuse spectrum slices from the cache directory");
    app.add_option("--cache-dir", c.cache_dir, "Cache directory")->envname("DYNCERT_CACHE_DIR")->capture_default_str();
    app.add_flag("--angular", c.angular, "Discrete angular-momentum Wigner function (pendulum)");
    auto* scan = app.add_flag("--scan", c.scan, "Emit the score against tau as CSV");
    auto* scenario = app.add_flag("--scenario", c.scenario, "Emit the three-scenario comparison");
    auto* opt = app.add_flag("--optimize-tau", c.optimize_tau, "Maximize the score over tau as well");
    scan->excludes(scenario);
    scan->excludes(opt);
    scenario->excludes(opt);

    const std::pair<const char*, const char*> commands[] = {
        {"bounds", "Trapping times against energy and the energy window for tau"},
        {"score", "Maximum quantum score, tau scan or scenario table"},
        {"simulate", "Monte Carlo run of the measurement protocol"},
        {"wigner", "Wigner grids and position densities at the three probing times"},
        {"make-figures", "Regenerate every curve and grid into a directory tree"}};
    for (auto [name, help] : commands)
        app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("usage_error", e.what(), 2);
    }
    c.command = app.get_subcommands().front()->get_name();
    c.model_given = model->count() > 0;
    c.alpha_given = alpha->count() > 0;
    c.lambda_given = lambda->count() > 0;
    c.tau_given = tau->count() > 0;

    try {
        if (c.command == "bounds")
            return cmd_bounds(c);
        if (c.command == "score")
            return cmd_score(c);
        if (c.command == "simulate")
            return cmd_simulate(c);
        if (c.command == "wigner")
            return cmd_wigner(c);
        return cmd_make_figures(c);
    } catch (const ConvergenceError& e) {
        return emit_error(e.code(), e.what(), e.exit_code(), e.residual);
    } catch (const Error& e) {
        return emit_error(e.code(), e.what(), e.exit_code());
    } catch (const json::exception& e) {
        return emit_error("usage_error", e.what(), 2);
    } catch (const std::exception& e) {
        return emit_error("numerical_failure", e.what(), 3);
    }
}
