#include "rflab/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>

#include "rflab/collapse.hpp"
#include "rflab/curvature.hpp"
#include "rflab/dilation.hpp"
#include "rflab/error.hpp"
#include "rflab/flow.hpp"
#include "rflab/gh.hpp"
#include "rflab/io.hpp"
#include "rflab/pinching.hpp"
#include "rflab/virtual_limit.hpp"

namespace rflab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- config access -------------------------------------------------------

template <class T>
T get(const json& j, const std::string& key, const T& fallback) {
    if (!j.is_object() || !j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

template <class T>
T need(const json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError("missing config key '" + key + "'");
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

void check(bool cond, const std::string& what) {
    if (!cond) throw ConfigError(what);
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path q(p);
    return q.is_absolute() || base.empty() ? q : base / q;
}

std::vector<double> number_list(const json& j, const std::string& key,
                                 const std::vector<double>& fallback) {
    if (!j.contains(key)) return fallback;
    if (j[key].is_number()) return {j[key].get<double>()};
    return get<std::vector<double>>(j, key, fallback);
}

void check_decreasing(const std::vector<double>& v, const std::string& name) {
    check(!v.empty(), name + " must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        check(std::isfinite(v[i]) && v[i] > 0.0, name + " entries must be positive");
        check(i == 0 || v[i] < v[i - 1], name + " must be strictly decreasing");
    }
}

void check_increasing(const std::vector<double>& v, const std::string& name) {
    check(!v.empty(), name + " must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        check(std::isfinite(v[i]) && v[i] > 0.0, name + " entries must be positive");
        check(i == 0 || v[i] > v[i - 1], name + " must be strictly increasing");
    }
}

// ---- sources -------------------------------------------------------------

struct ProfileSpec {
    std::string kind = "cigar";
    double r0 = 0.0, r1 = 8.0;
    std::size_t n = 201;
    double scale = 1.0;
    fs::path path;
};

ProfileSpec parse_profile(const json& j, const fs::path& base) {
    check(j.is_object(), "'profile' must be an object");
    ProfileSpec s;
    s.kind = get<std::string>(j, "kind", "cigar");
    s.scale = get<double>(j, "scale", 1.0);
    check(std::isfinite(s.scale) && s.scale > 0.0, "profile scale must be positive");
    if (s.kind == "csv") {
        s.path = resolve(base, need<std::string>(j, "path"));
        check(fs::exists(s.path), "profile file not found: " + s.path.string());
        return s;
    }
    if (s.kind == "sphere") {
        s.r0 = 0.0;
        s.r1 = std::numbers::pi * s.scale;
    } else if (s.kind == "cigar" || s.kind == "disk" || s.kind == "cylinder") {
        s.r0 = 0.0;
        s.r1 = get<double>(j, "r1", s.kind == "cigar" ? 8.0 : 1.0);
    } else if (s.kind == "tanh") {
        s.r0 = get<double>(j, "r0", 0.5);
        s.r1 = get<double>(j, "r1", 8.0);
        check(s.r0 > 0.0, "open tanh profile needs r0 > 0");
    } else {
        throw ConfigError("unknown profile kind '" + s.kind + "'");
    }
    check(std::isfinite(s.r0) && std::isfinite(s.r1) && s.r1 > s.r0, "profile range is empty");
    if (j.contains("h")) {
        const double h = get<double>(j, "h", 0.0);
        check(std::isfinite(h) && h > 0.0, "grid spacing h must be positive");
        s.n = static_cast<std::size_t>(std::llround((s.r1 - s.r0) / h)) + 1;
    } else {
        const auto n = get<long long>(j, "n", 201);
        check(n >= 5, "grid size n must be at least 5");
        s.n = static_cast<std::size_t>(n);
    }
    check(s.n >= 5 && s.n <= 1000000, "grid size out of range");
    return s;
}

RadialProfile build_profile(const ProfileSpec& s) {
    const double L = s.scale;
    auto one = [](double) { return 1.0; };
    RadialProfile::Options closed;
    closed.closed_tip = true;
    if (s.kind == "csv") return io::read_profile(s.path);
    if (s.kind == "cigar")
        return make_profile(s.r0, s.r1, s.n, [L](double r) { return L * std::tanh(r / L); }, one,
                            closed);
    if (s.kind == "sphere") {
        RadialProfile::Options o = closed;
        o.closed_end = true;
        auto r = uniform_grid(s.r0, s.r1, s.n);
        std::vector<double> f(s.n), phi(s.n, 1.0);
        for (std::size_t j = 0; j < s.n; ++j) f[j] = L * std::sin(r[j] / L);
        f.front() = f.back() = 0.0;
        return RadialProfile(std::move(r), std::move(phi), std::move(f), o);
    }
    if (s.kind == "disk") return make_profile(s.r0, s.r1, s.n, [](double r) { return r; }, one, closed);
    if (s.kind == "cylinder") return make_profile(s.r0, s.r1, s.n, [L](double) { return L; }, one);
    return make_profile(s.r0, s.r1, s.n, [L](double r) { return L * std::tanh(r / L); }, one);
}

struct FlowSpec {
    EvolveOptions opts;
    double t_end = 1.0;
};

FlowSpec parse_flow(const json& j) {
    FlowSpec f;
    const json fl = j.value("flow", json::object());
    f.opts.flow.cfl_fraction = get<double>(fl, "cfl", 0.2);
    f.opts.flow.curvature_ceiling = get<double>(fl, "curvature_ceiling", 1e6);
    f.opts.flow.renormalize_tip = get<bool>(fl, "renormalize_tip", true);
    f.opts.record_interval = get<double>(j, "record_interval", 0.05);
    f.t_end = get<double>(j, "t_end", 1.0);
    check(f.opts.flow.cfl_fraction > 0.0 && f.opts.flow.cfl_fraction <= 1.0,
          "cfl must lie in (0, 1]");
    check(f.opts.flow.curvature_ceiling > 0.0, "curvature_ceiling must be positive");
    check(std::isfinite(f.t_end) && f.t_end > 0.0, "t_end must be positive");
    check(f.opts.record_interval >= 0.0, "record_interval must be nonnegative");
    return f;
}

/// Either a stored solution directory or a profile evolved on the fly.
struct SolutionSource {
    std::optional<fs::path> dir;
    ProfileSpec profile;
    FlowSpec flow;
};

SolutionSource parse_source(const json& j, const fs::path& base) {
    SolutionSource s;
    if (j.contains("solution")) {
        s.dir = resolve(base, need<std::string>(j, "solution"));
        check(fs::exists(*s.dir / "index.json"), "solution index not found in " + s.dir->string());
    } else {
        s.profile = parse_profile(j.value("profile", json::object()), base);
        s.flow = parse_flow(j);
    }
    return s;
}

SamplingWindow parse_window(const json& j, SamplingWindow fallback) {
    if (!j.contains("window")) return fallback;
    const json& w = j["window"];
    SamplingWindow out{get<double>(w, "r_lo", fallback.r_lo), get<double>(w, "r_hi", fallback.r_hi)};
    check(std::isfinite(out.r_lo) && std::isfinite(out.r_hi) && out.r_hi > out.r_lo,
          "sampling window is empty");
    return out;
}

GraphResolution parse_resolution(const json& j) {
    GraphResolution g;
    if (!j.contains("resolution")) return g;
    const json& r = j["resolution"];
    g.dr = get<double>(r, "dr", g.dr);
    g.n_theta = get<std::size_t>(r, "n_theta", g.n_theta);
    g.n_u = get<std::size_t>(r, "n_u", g.n_u);
    check(g.dr > 0.0 && g.n_theta >= 4 && g.n_u >= 2, "bad graph resolution");
    return g;
}

std::optional<Twist> parse_twist(const json& j) {
    if (!j.contains("twist") || j["twist"].is_null()) return std::nullopt;
    Twist t{get<double>(j["twist"], "a", 0.0), get<double>(j["twist"], "b", 1.0)};
    check(t.b != 0.0, "twist b must be nonzero");
    return t;
}

// ---- stage runner --------------------------------------------------------

class Stages {
public:
    explicit Stages(fs::path out) : out_(std::move(out)) {}

    template <class F>
    auto operator()(const std::string& name, F&& f) {
        try {
            return f();
        } catch (const PipelineError&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineError(name, e.what());
        }
    }

    const fs::path& out() const { return out_; }

private:
    fs::path out_;
};

SurfaceSolution obtain_solution(Stages& st, const SolutionSource& src, bool write) {
    if (src.dir) return st("load", [&] { return io::read_solution(*src.dir); });
    auto sol = st("simulate", [&] {
        return evolve(build_profile(src.profile), src.flow.t_end, src.flow.opts);
    });
    if (write) st("write", [&] { io::write_solution(sol, st.out() / "solution"); });
    return sol;
}

// ---- commands ------------------------------------------------------------

struct SimulateCfg {
    ProfileSpec profile;
    FlowSpec flow;
};

void run_simulate(const SimulateCfg& c, Stages& st) {
    SolutionSource src{std::nullopt, c.profile, c.flow};
    const auto sol = obtain_solution(st, src, true);
    st("area", [&] {
        std::vector<std::pair<double, double>> rows;
        for (const auto& p : sol.profiles()) rows.emplace_back(p.time_stamp(), area(p));
        io::write_columns(rows, "t,area", st.out() / "area.csv");
        json s = {{"profiles", sol.size()}, {"t_final", sol.times().back()},
                  {"blowup_time", sol.blowup_time() ? json(*sol.blowup_time()) : json(nullptr)},
                  {"max_K_final", 0.0}};
        const auto K = gauss_curvature(sol.back());
        s["max_K_final"] = *std::max_element(K.begin(), K.end());
        io::write_json(s, st.out() / "summary.json");
    });
}

struct CollapseCfg {
    SolutionSource src;
    std::vector<double> epsilons;
    std::optional<Twist> twist;
    SamplingWindow window;
    GraphResolution res;
    std::size_t samples = 64;
    bool sample = true;
};

json family_summary(const CollapseFamily& fam, std::size_t time_index) {
    json members = json::array();
    for (std::size_t i = 0; i < fam.epsilons.size(); ++i) {
        const auto& m = fam.members[i][time_index];
        const double inj = inj_proxy(m, 0);
        json e = {{"epsilon", fam.epsilons[i]}, {"inj_proxy_tip", inj}};
        if (!m.twisted()) {
            const auto spec = spectrum_product(m);
            e["rm_norm_tip"] = spec.rm_norm()[0];
            e["rm_inj2_tip"] = spec.rm_norm()[0] * inj * inj;
        } else {
            const auto q = quotient_metric(m.base, m.twist_a, m.twist_b);
            const auto K = gauss_curvature(q);
            e["quotient_min_K"] = *std::min_element(K.begin(), K.end());
        }
        members.push_back(e);
    }
    json j = {{"time", fam.base_solution.times()[time_index]}, {"members", members}};
    if (fam.twist) j["twist"] = {{"a", fam.twist->a}, {"b", fam.twist->b}};
    return j;
}

void run_collapse(const CollapseCfg& c, Stages& st, std::uint64_t seed) {
    const auto sol = obtain_solution(st, c.src, !c.src.dir);
    const auto fam = st("family", [&] { return make_family(sol, c.epsilons, c.twist); });
    const std::size_t last = sol.size() - 1;
    st("family", [&] { io::write_json(family_summary(fam, last), st.out() / "family.json"); });
    if (!c.sample) return;
    st("sample", [&] {
        json meta = {{"seed", seed}, {"window", io::to_json(c.window)},
                     {"time", sol.times()[last]},
                     {"resolution", {{"dr", c.res.dr}, {"n_theta", c.res.n_theta}, {"n_u", c.res.n_u}}}};
        const auto B = sample_space(sol[last], c.samples, seed, c.window, c.res);
        meta["kind"] = "base";
        io::write_space(B, st.out() / "spaces" / "base.csv", meta);
        for (std::size_t i = 0; i < fam.epsilons.size(); ++i) {
            const auto A = sample_space(fam.members[i][last], c.samples, seed, c.window, c.res);
            meta["kind"] = "member";
            meta["epsilon"] = fam.epsilons[i];
            char name[32];
            std::snprintf(name, sizeof name, "member_%02zu.csv", i);
            io::write_space(A, st.out() / "spaces" / name, meta);
        }
    });
}

struct DilateCfg {
    SolutionSource src;
    std::vector<double> T;
    std::vector<double> eps;
    std::optional<double> beta, psi;
    double rho = 1.0;
};

void run_dilate(const DilateCfg& c, Stages& st, const json& provenance_extra) {
    const auto sol = obtain_solution(st, c.src, !c.src.dir);
    const auto hist = st("history", [&] { return history_from_solution(sol); });
    std::vector<DilationRecord> recs;
    st("select", [&] {
        json out = json::array();
        for (std::size_t i = 0; i < c.T.size(); ++i) {
            recs.push_back(select_point(hist, c.T[i], c.eps[std::min(i, c.eps.size() - 1)]));
            out.push_back(io::to_json(recs.back()));
        }
        io::write_json(out, st.out() / "dilation_records.json");
    });
    st("rescale", [&] {
        const auto& rec = recs.back();
        const double beta = c.beta.value_or(-0.5 * rec.alpha_i);
        const double psi = c.psi.value_or(0.5 * rec.omega_i);
        const auto res = rescale(sol, rec, beta, psi);
        json prov = {{"source_record", io::to_json(rec)}, {"beta", beta}, {"psi", psi}};
        prov.update(provenance_extra);
        io::write_solution(res, st.out() / "rescaled", prov);
        const auto chk = dilatable_check(hist, rec, beta, psi, c.rho);
        io::write_json({{"C", chk.C}, {"ball_in_grid", chk.ball_in_grid},
                        {"times_used", chk.times_used}, {"rho", c.rho}},
                       st.out() / "dilatable.json");
    });
}

struct GhCfg {
    fs::path a, b;
    std::size_t iterations = 16;
    bool pointed = true;
};

void run_gh(const GhCfg& c, Stages& st, std::uint64_t seed) {
    const auto A = st("load", [&] { return io::read_space(c.a); });
    const auto B = st("load", [&] { return io::read_space(c.b); });
    st("gh", [&] {
        const GhMode mode = c.pointed ? GhMode::Pointed : GhMode::Unpointed;
        const auto g = gh_bound(A, B, c.iterations, seed, mode);
        json j = io::to_json(g);
        j["seed"] = seed;
        j["iterations"] = c.iterations;
        j["pointed"] = c.pointed;
        if (A.size() <= kExactGhLimit && B.size() <= kExactGhLimit) j["exact"] = gh_exact(A, B, mode);
        for (auto [key, X] : {std::pair{"dim_a", &A}, std::pair{"dim_b", &B}}) {
            try {
                j[key] = io::to_json(dim_estimate(*X));
            } catch (const Error& e) {
                j[key] = {{"error", e.what()}};
            }
        }
        io::write_json(j, st.out() / "gh.json");
    });
}

struct GlueCfg {
    ProfileSpec profile;
    double unit = 1.0;
    double ds = 0.0;
    double noise = 0.0;
    GlueOptions opts;
    bool extend = true;
};

std::vector<ProfileWindow> add_noise(std::vector<ProfileWindow> ws, double amp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& w : ws) {
        std::vector<double> f(w.profile.f().begin(), w.profile.f().end());
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            const bool pinned = (j == 0 && w.profile.closed_tip()) ||
                                (j + 1 == f.size() && w.profile.closed_end());
            if (!pinned) f[j] = std::max(f[j] + amp * (2.0 * u - 1.0), 0.5 * f[j]);
        }
        auto o = w.profile.options();
        o.tip_tolerance = 1e9;
        w.profile = RadialProfile({w.profile.r().begin(), w.profile.r().end()},
                                  {w.profile.phi().begin(), w.profile.phi().end()}, std::move(f), o);
    }
    return ws;
}

json windows_json(const std::vector<ProfileWindow>& ws) {
    json out = json::array();
    for (const auto& w : ws) {
        json j = {{"center_r", w.center_r}, {"r_lo", w.profile.r().front()},
                  {"r_hi", w.profile.r().back()}, {"points", w.profile.size()}};
        if (w.overlap_left) j["overlap_left"] = io::to_json(*w.overlap_left);
        if (w.overlap_right) j["overlap_right"] = io::to_json(*w.overlap_right);
        out.push_back(j);
    }
    return out;
}

RadialProfile glue_stages(Stages& st, const RadialProfile& p, double unit, double noise,
                          const GlueOptions& opts, std::uint64_t seed, bool extend,
                          const fs::path& dir) {
    auto windows = st("cut", [&] { return cut_windows(p, unit); });
    if (noise > 0.0) windows = st("cut", [&] { return add_noise(std::move(windows), noise, seed); });
    const auto g = st("glue", [&] { return glue(std::move(windows), opts); });
    st("glue", [&] {
        io::write_profile(g.profile, dir / "glued.csv");
        io::write_json({{"windows", windows_json(g.windows)}, {"max_residual", g.max_residual},
                        {"unit", unit}, {"noise", noise}},
                       dir / "windows.json");
    });
    if (!extend) return g.profile;
    const auto disk = st("extend", [&] { return extend_to_disk(g.profile); });
    st("extend", [&] { io::write_profile(disk, dir / "disk.csv"); });
    return disk;
}

void run_glue(const GlueCfg& c, Stages& st, std::uint64_t seed) {
    auto p = st("load", [&] { return build_profile(c.profile); });
    if (c.ds > 0.0) p = st("reparametrize", [&] { return reparametrize_by_arclength(p, c.ds); });
    glue_stages(st, p, c.unit, c.noise, c.opts, seed, c.extend && (p.closed_tip() != p.closed_end()),
                st.out());
}

struct CompareCfg {
    std::optional<SolutionSource> src;
    std::optional<ProfileSpec> profile;
    CigarOptions opts;
};

void write_cigar(Stages& st, const CigarReport& rep, const fs::path& dir) {
    io::write_json(io::to_json(rep), dir / "cigar_report.json");
    io::write_columns(rep.curve, "s,K_over_K_tip", dir / "cigar_curve.csv");
    (void)st;
}

void run_compare(const CompareCfg& c, Stages& st) {
    CigarReport rep;
    if (c.profile) {
        const auto p = st("load", [&] { return build_profile(*c.profile); });
        rep = st("compare", [&] { return cigar_compare(p, c.opts); });
    } else {
        const auto sol = obtain_solution(st, *c.src, !c.src->dir);
        rep = st("compare", [&] { return cigar_compare(sol, c.opts); });
    }
    st("compare", [&] { write_cigar(st, rep, st.out()); });
}

struct ModelQuery {
    int m;
    GammaDescriptor gamma;
    double a, b;
    bool fixed_point;
};

struct ClassifyCfg {
    std::vector<ModelQuery> models;
    std::optional<std::pair<std::vector<OrbifoldPoint>, double>> singular;
};

void run_classify(const ClassifyCfg& c, Stages& st) {
    st("classify", [&] {
        json out = json::array();
        for (const auto& q : c.models) {
            json j = {{"m", q.m}, {"gamma", to_string(q.gamma)}, {"a", q.a}, {"b", q.b},
                      {"has_fixed_point", q.fixed_point}};
            try {
                j["model"] = io::to_json(classify_local_model(q.m, q.gamma, q.a, q.b, q.fixed_point));
            } catch (const Error& e) {
                j["error"] = e.what();
            }
            out.push_back(j);
        }
        io::write_json(out, st.out() / "local_models.json");
    });
    if (c.singular)
        st("singular", [&] {
            io::write_json(io::to_json(detect_singular_points(c.singular->first, c.singular->second)),
                           st.out() / "singular.json");
        });
}

struct Type2bCfg {
    ProfileSpec profile;
    FlowSpec flow;
    std::vector<double> epsilons{0.2, 0.1, 0.05};
    std::vector<double> T{0.5, 0.75, 1.0};
    std::vector<double> selection_eps{0.1};
    std::optional<double> beta, psi;
    double ds = 0.05;
    double unit = 1.0;
    GlueOptions glue;
    CigarOptions cigar;
    double max_deviation = 0.05;
};

void run_type2b(const Type2bCfg& c, Stages& st, std::uint64_t seed) {
    SolutionSource src{std::nullopt, c.profile, c.flow};
    const auto sol = obtain_solution(st, src, true);
    const auto fam = st("family", [&] { return make_family(sol, c.epsilons); });
    st("family", [&] { io::write_json(family_summary(fam, sol.size() - 1), st.out() / "family.json"); });

    const auto hist = st("history", [&] { return history_from_solution(sol); });
    std::vector<DilationRecord> recs;
    st("select", [&] {
        json out = json::array();
        for (std::size_t i = 0; i < c.T.size(); ++i) {
            recs.push_back(select_point(hist, c.T[i],
                                        c.selection_eps[std::min(i, c.selection_eps.size() - 1)]));
            out.push_back(io::to_json(recs.back()));
        }
        io::write_json(out, st.out() / "dilation_records.json");
    });

    const auto& rec = recs.back();
    const double beta = c.beta.value_or(-0.5 * rec.alpha_i);
    const double psi = c.psi.value_or(0.5 * rec.omega_i);
    const auto scaled = st("rescale", [&] { return rescale(sol, rec, beta, psi); });
    st("rescale", [&] {
        io::write_solution(scaled, st.out() / "rescaled",
                           {{"source_record", io::to_json(rec)}, {"beta", beta}, {"psi", psi}});
    });

    const auto model = st("reparametrize", [&] {
        const auto& times = scaled.times();
        std::size_t k = 0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i]) < std::abs(times[k])) k = i;
        return reparametrize_by_arclength(scaled[k], c.ds);
    });
    const auto disk = glue_stages(st, model, c.unit, 0.0, c.glue, seed, true,
                                  st.out() / "virtual_limit");

    const auto rep = st("compare", [&] { return cigar_compare(disk, c.cigar); });
    st("compare", [&] {
        write_cigar(st, rep, st.out());
        io::write_json({{"recipe", "type2b"}, {"seed", seed}, {"deviation", rep.deviation},
                        {"max_deviation", c.max_deviation}, {"cone_order", disk.cone_order()},
                        {"selected", io::to_json(rec)}},
                       st.out() / "summary.json");
    });
    if (!(rep.deviation < c.max_deviation))
        throw PipelineError("compare", "cigar deviation " + std::to_string(rep.deviation) +
                                           " exceeds " + std::to_string(c.max_deviation));
}

GlueOptions parse_glue_options(const json& j) {
    GlueOptions o;
    o.seam_tolerance = get<double>(j, "seam_tolerance", o.seam_tolerance);
    o.overlap_tolerance = get<double>(j, "overlap_tolerance", o.overlap_tolerance);
    o.search_half_width = get<double>(j, "search_half_width", o.search_half_width);
    check(o.seam_tolerance > 0.0 && o.overlap_tolerance > 0.0 && o.search_half_width > 0.0,
          "glue tolerances must be positive");
    return o;
}

CigarOptions parse_cigar_options(const json& j) {
    CigarOptions o;
    o.trim_end = get<std::size_t>(j, "trim_end", o.trim_end);
    o.s_max = get<double>(j, "s_max", o.s_max);
    check(o.s_max >= 0.0, "s_max must be nonnegative");
    return o;
}

}  // namespace

void run(const std::string& command, const std::string& recipe, const json& config,
         const fs::path& out, std::uint64_t seed, const fs::path& base_dir) {
    check(config.is_object(), "config must be a JSON object");
    const json& j = config;
    std::function<void(Stages&)> body;

    // Parse and validate everything before touching the output directory.
    if (command == "simulate") {
        SimulateCfg c{parse_profile(j.value("profile", json::object()), base_dir), parse_flow(j)};
        body = [c](Stages& st) { run_simulate(c, st); };
    } else if (command == "collapse") {
        CollapseCfg c;
        c.src = parse_source(j, base_dir);
        c.epsilons = number_list(j, "epsilons", {0.2, 0.1, 0.05});
        check_decreasing(c.epsilons, "epsilons");
        c.twist = parse_twist(j);
        c.window = parse_window(j, {0.0, 3.0});
        c.res = parse_resolution(j);
        const auto n = get<long long>(j, "samples", 64);
        check(n >= 2 && n <= 4096, "samples must lie in [2, 4096]");
        c.samples = static_cast<std::size_t>(n);
        c.sample = get<bool>(j, "sample", true);
        body = [c, seed](Stages& st) { run_collapse(c, st, seed); };
    } else if (command == "dilate") {
        DilateCfg c;
        c.src = parse_source(j, base_dir);
        c.T = number_list(j, "T_schedule", {0.5, 0.75, 1.0});
        check_increasing(c.T, "T_schedule");
        c.eps = number_list(j, "selection_epsilon", {0.1});
        for (double e : c.eps) check(e > 0.0 && e < 1.0, "selection_epsilon must lie in (0, 1)");
        if (j.contains("beta")) c.beta = get<double>(j, "beta", 0.0);
        if (j.contains("psi")) c.psi = get<double>(j, "psi", 0.0);
        c.rho = get<double>(j, "rho", 1.0);
        check(c.rho > 0.0, "rho must be positive");
        if (!c.src.dir) check(c.src.flow.t_end >= c.T.back(), "t_end must cover the T schedule");
        body = [c](Stages& st) { run_dilate(c, st, json::object()); };
    } else if (command == "gh") {
        GhCfg c;
        c.a = resolve(base_dir, need<std::string>(j, "a"));
        c.b = resolve(base_dir, need<std::string>(j, "b"));
        check(fs::exists(c.a) && fs::exists(c.b), "metric space file not found");
        const auto it = get<long long>(j, "iterations", 16);
        check(it >= 1, "iterations must be positive");
        c.iterations = static_cast<std::size_t>(it);
        c.pointed = get<bool>(j, "pointed", true);
        body = [c, seed](Stages& st) { run_gh(c, st, seed); };
    } else if (command == "glue") {
        GlueCfg c;
        c.profile = parse_profile(j.value("profile", json::object()), base_dir);
        c.unit = get<double>(j, "unit", 1.0);
        c.ds = get<double>(j, "arclength_ds", 0.0);
        c.noise = get<double>(j, "noise", 0.0);
        c.opts = parse_glue_options(j);
        c.extend = get<bool>(j, "extend", true);
        check(c.unit > 0.0 && c.ds >= 0.0 && c.noise >= 0.0, "bad glue parameters");
        body = [c, seed](Stages& st) { run_glue(c, st, seed); };
    } else if (command == "compare") {
        CompareCfg c;
        if (j.contains("profile") && !j.contains("flow") && !j.contains("t_end"))
            c.profile = parse_profile(j["profile"], base_dir);
        else
            c.src = parse_source(j, base_dir);
        c.opts = parse_cigar_options(j);
        body = [c](Stages& st) { run_compare(c, st); };
    } else if (command == "classify") {
        ClassifyCfg c;
        for (const auto& m : j.value("models", json::array())) {
            const auto g = parse_gamma(need<std::string>(m, "gamma"), get<int>(m, "p", 1));
            check(g.has_value(), "unknown gamma descriptor");
            c.models.push_back({need<int>(m, "m"), *g, get<double>(m, "a", 0.0),
                                get<double>(m, "b", 1.0), get<bool>(m, "has_fixed_point", false)});
        }
        if (j.contains("singular")) {
            std::vector<OrbifoldPoint> pts;
            for (const auto& p : j["singular"].value("points", json::array()))
                pts.push_back({get<std::size_t>(p, "index", pts.size()), get<double>(p, "position", 0.0),
                               get<int>(p, "cone_order", 1), get<bool>(p, "dihedral", false)});
            c.singular = std::pair{pts, need<double>(j["singular"], "min_K")};
        }
        check(!c.models.empty() || c.singular, "nothing to classify");
        body = [c](Stages& st) { run_classify(c, st); };
    } else if (command == "pipeline") {
        check(recipe == "type2b", "unknown pipeline recipe '" + recipe + "'");
        Type2bCfg c;
        c.profile = parse_profile(j.value("profile", json::object()), base_dir);
        c.flow = parse_flow(j);
        c.epsilons = number_list(j, "epsilons", c.epsilons);
        check_decreasing(c.epsilons, "epsilons");
        c.T = number_list(j, "T_schedule", c.T);
        check_increasing(c.T, "T_schedule");
        check(c.flow.t_end >= c.T.back(), "t_end must cover the T schedule");
        c.selection_eps = number_list(j, "selection_epsilon", c.selection_eps);
        for (double e : c.selection_eps)
            check(e > 0.0 && e < 1.0, "selection_epsilon must lie in (0, 1)");
        if (j.contains("beta")) c.beta = get<double>(j, "beta", 0.0);
        if (j.contains("psi")) c.psi = get<double>(j, "psi", 0.0);
        c.ds = get<double>(j, "arclength_ds", c.ds);
        c.unit = get<double>(j, "window_unit", c.unit);
        check(c.ds > 0.0 && c.unit > 0.0, "arclength_ds and window_unit must be positive");
        c.glue = parse_glue_options(j);
        c.cigar = parse_cigar_options(j);
        c.max_deviation = get<double>(j, "max_deviation", c.max_deviation);
        check(c.max_deviation > 0.0, "max_deviation must be positive");
        body = [c, seed](Stages& st) { run_type2b(c, st, seed); };
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }

    try {
        fs::create_directories(out);
    } catch (const fs::filesystem_error& e) {
        throw PipelineError("setup", e.what());
    }
    Stages st(out);
    io::write_json({{"command", command}, {"recipe", recipe}, {"seed", seed}, {"config", config}},
                   out / "run.json");
    try {
        body(st);
    } catch (...) {
        try {
            io::write_manifest(out);
        } catch (...) {
        }
        throw;
    }
    st("manifest", [&] { io::write_manifest(out); });
}

int run_main(const std::string& command, const std::string& recipe, const fs::path& config_path,
             const fs::path& out, std::uint64_t seed) {
    try {
        json config;
        {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot open config " + config_path.string());
            try {
                config = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
        }
        run(command, recipe, config, out, seed, config_path.parent_path());
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PipelineError& e) {
        std::cerr << "pipeline error: " << e.what() << '\n';
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "pipeline error: stage 'setup' failed: " << e.what() << '\n';
        return kExitPipeline;
    }
}

}  // namespace rflab::cli
