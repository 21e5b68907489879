#include "dyncert/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dyncert/errors.hpp"

namespace dyncert {

namespace {

json number_or_null(double x) {
    if (std::isfinite(x))
        return x;
    return nullptr;
}

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

json to_json(const ModelSystem& m) {
    json j;
    j["kind"] = m.name();
    if (m.kind == ModelKind::Kerr || m.kind == ModelKind::Pendulum)
        j["alpha"] = m.alpha;
    if (m.kind == ModelKind::Morse)
        j["lambda"] = m.lambda;
    return j;
}

ModelSystem model_from_json(const json& j) {
    ModelSystem m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.alpha = j.value("alpha", 0.0);
    m.lambda = j.value("lambda", 0.0);
    m.validate();
    return m;
}

json to_json(const EnergyWindow& w) { return {{"e_min", w.e_min}, {"e_max", number_or_null(w.e_max)}}; }

json to_json(const Duration& d) { return number_or_null(d.value()); }

json to_json(const SpectrumSlice& s) {
    json j;
    j["model"] = to_json(s.model);
    j["indices"] = s.indices;
    j["energies"] = s.energies;
    std::vector<double> flat;
    flat.reserve(s.dim() * s.dim());
    for (Eigen::Index a = 0; a < s.sgn.rows(); ++a)
        for (Eigen::Index c = 0; c < s.sgn.cols(); ++c)
            flat.push_back(s.sgn(a, c));
    j["sgn_matrix"] = flat;
    return j;
}

SpectrumSlice slice_from_json(const json& j) {
    SpectrumSlice s;
    s.model = model_from_json(j.at("model"));
    s.indices = j.at("indices").get<std::vector<int>>();
    s.energies = j.at("energies").get<std::vector<double>>();
    auto flat = j.at("sgn_matrix").get<std::vector<double>>();
    std::size_t d = s.indices.size();
    if (flat.size() != d * d)
        throw DomainError("serialized sgn matrix has the wrong size");
    s.sgn.resize(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t c = 0; c < d; ++c)
            s.sgn(a, c) = flat[a * d + c];
    s.validate();
    return s;
}

json amplitudes_json(const Eigen::VectorXcd& a) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < a.size(); ++i)
        arr.push_back({a(i).real(), a(i).imag()});
    return arr;
}

json to_json(const ScoreResult& r) {
    json j;
    j["model"] = to_json(r.state.slice->model);
    j["tau"] = r.tau;
    j["window"] = r.window ? to_json(*r.window) : json(nullptr);
    j["p3_max"] = r.p3_max;
    j["residual"] = r.residual;
    j["indices"] = r.state.slice->indices;
    j["energies"] = r.state.slice->energies;
    j["amplitudes"] = amplitudes_json(r.state.amplitudes);
    return j;
}

json to_json(const McEstimate& e) {
    return {{"seed", e.seed}, {"n_rounds", e.n_rounds}, {"p3_hat", e.p3_hat}, {"stderr", e.std_error}};
}

json to_json(const ScenarioTable& t) {
    json recs = json::array();
    for (const ScenarioRecord* r : {&t.optimal, &t.reference_opt, &t.reference_fixed})
        recs.push_back({{"scenario", r->label}, {"score", r->score}, {"tau", r->tau}});
    return {{"records", recs}, {"tau_range", {{"lo", t.tau_range.lo}, {"hi", t.tau_range.hi}}}, {"warnings", t.warnings}};
}

QuantumState load_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open state file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("state file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.contains("model") || !j.contains("indices") || !j.contains("amplitudes"))
        throw UsageError("state file needs model, indices and amplitudes");
    ModelSystem m = model_from_json(j["model"]);
    auto idx = j["indices"].get<std::vector<int>>();
    Levels lv;
    lv.indices = idx;
    if (m.kind == ModelKind::Pendulum) {
        auto all = levels_upto(m, idx.back());
        for (int n : idx)
            lv.energies.push_back(all.energies[n]);
    } else {
        for (int n : idx)
            lv.energies.push_back(level_energy(m, n));
    }
    auto slice = std::make_shared<SpectrumSlice>(build_slice(m, lv));
    Eigen::VectorXcd a(idx.size());
    const json& amp = j["amplitudes"];
    if (amp.size() != idx.size())
        throw UsageError("state file amplitudes do not match its indices");
    for (std::size_t i = 0; i < idx.size(); ++i)
        a(i) = {amp[i][0].get<double>(), amp[i][1].get<double>()};
    a /= a.norm();
    QuantumState st{slice, a};
    st.validate();
    return st;
}

std::string state_hash(const QuantumState& st) {
    json j = {{"model", to_json(st.slice->model)}, {"indices", st.slice->indices}, {"amplitudes", amplitudes_json(st.amplitudes)}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

std::string slice_cache_key(const ModelSystem& m, const std::string& selector) {
    std::string s = m.name() + "|" + fmt17(m.alpha) + "|" + fmt17(m.lambda) + "|" + selector + "|v" +
                    std::to_string(kToleranceVersion);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

std::optional<SpectrumSlice> cache_load(const std::filesystem::path& dir, const std::string& key) {
    auto path = dir / ("slice-" + key + ".json");
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    try {
        return slice_from_json(json::parse(in));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void cache_store(const std::filesystem::path& dir, const std::string& key, const SpectrumSlice& s) {
    std::filesystem::create_directories(dir);
    auto tmp = dir / ("slice-" + key + ".json.tmp");
    {
        std::ofstream out(tmp);
        out << to_json(s).dump();
    }
    std::filesystem::rename(tmp, dir / ("slice-" + key + ".json"));
}

std::string grid_csv(const WignerGrid& g) {
    std::ostringstream out;
    out.precision(10);
    out << (g.angular ? "phi\\m" : "q\\p");
    for (double p : g.p_axis)
        out << ',' << p;
    out << '\n';
    for (std::size_t i = 0; i < g.q_axis.size(); ++i) {
        out << g.q_axis[i];
        for (std::size_t j = 0; j < g.p_axis.size(); ++j)
            out << ',' << g.values(i, j);
        out << '\n';
    }
    return out.str();
}

std::string density_csv(const RealGrid& g) {
    std::ostringstream out;
    out.precision(10);
    out << "q,density\n";
    for (std::size_t i = 0; i < g.size(); ++i)
        out << g.points[i] << ',' << g.values[i] << '\n';
    return out.str();
}

} // namespace dyncert
