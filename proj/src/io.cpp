#include "rflab/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rflab/error.hpp"

namespace rflab::io {

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoError, "cannot read " + path.string());
    return in;
}

double parse_double(std::string_view s, const fs::path& where) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::IoError,
            "bad number '" + std::string(s) + "' in " + where.string());
    return v;
}

std::vector<double> split_row(const std::string& line, const fs::path& where) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(parse_double(std::string_view(line).substr(start, comma - start), where));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

fs::path sidecar(const fs::path& csv) {
    fs::path p = csv;
    return p.replace_extension(".json");
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json to_json(const RadialProfile::Options& o) {
    return {{"closed_tip", o.closed_tip},       {"closed_end", o.closed_end},
            {"cone_order", o.cone_order},       {"time_stamp", o.time_stamp},
            {"theta_period", o.theta_period},   {"tip_tolerance", o.tip_tolerance}};
}

RadialProfile::Options options_from_json(const json& j) {
    RadialProfile::Options o;
    o.closed_tip = j.value("closed_tip", false);
    o.closed_end = j.value("closed_end", false);
    o.cone_order = j.value("cone_order", 1);
    o.time_stamp = j.value("time_stamp", 0.0);
    o.theta_period = j.value("theta_period", 1.0);
    o.tip_tolerance = j.value("tip_tolerance", kDefaultTipTolerance);
    return o;
}

json to_json(const DilationRecord& r) {
    return {{"point_index", r.point_index}, {"time_index", r.time_index},
            {"t_i", r.t_i},                 {"K_i", r.K_i},
            {"T_i", r.T_i},                 {"epsilon_i", r.epsilon_i},
            {"alpha_i", r.alpha_i},         {"omega_i", r.omega_i},
            {"selection_ratio", r.selection_ratio}};
}

DilationRecord dilation_record_from_json(const json& j) {
    DilationRecord r;
    r.point_index = j.at("point_index").get<std::size_t>();
    r.time_index = j.at("time_index").get<std::size_t>();
    r.t_i = j.at("t_i").get<double>();
    r.K_i = j.at("K_i").get<double>();
    r.T_i = j.at("T_i").get<double>();
    r.epsilon_i = j.at("epsilon_i").get<double>();
    r.alpha_i = j.at("alpha_i").get<double>();
    r.omega_i = j.at("omega_i").get<double>();
    r.selection_ratio = j.value("selection_ratio", 1.0);
    return r;
}

json to_json(const PinchingReport& r) {
    json v = json::array();
    for (const auto& x : r.violations)
        v.push_back({{"point_index", x.point_index}, {"time_index", x.time_index},
                     {"lambda1", x.lambda1}, {"scalar", x.scalar}, {"threshold", x.threshold}});
    return {{"holds", r.holds()}, {"violations", v}};
}

json to_json(const OriginKind& k) {
    if (const auto* b = std::get_if<BumpLike>(&k))
        return {{"kind", "BumpLike"}, {"c", b->c}, {"threshold", b->threshold}};
    const auto& s = std::get<SplitLike>(k);
    return {{"kind", "SplitLike"}, {"ratio", s.ratio}, {"threshold", s.threshold}};
}

json to_json(const SequenceVerdict& v) {
    return {{"kind", to_string(v.kind)}, {"tK", v.tK}};
}

json to_json(const LocalModel& m) {
    if (m.excluded) return {{"excluded", true}, {"case", m.case_id}, {"reason", m.exclusion}};
    json j = {{"excluded", false},          {"case", m.case_id},
              {"gamma", m.gamma},           {"g_infty0", m.g_infty0},
              {"local_topology", m.local_topology}};
    if (m.p > 0) j["p"] = m.p;
    return j;
}

json to_json(const SingularReport& r) {
    json pts = json::array();
    for (const auto& p : r.singular)
        pts.push_back({{"index", p.index}, {"position", p.position},
                       {"cone_order", p.cone_order}, {"dihedral", p.dihedral}});
    return {{"singular_points", pts}, {"rule_violation", r.rule_violation},
            {"diagnostic", r.diagnostic}};
}

json to_json(const CigarReport& r) {
    return {{"deviation", r.deviation},           {"final_deviation", r.final_deviation},
            {"k_tip_drift", r.k_tip_drift},       {"sup_scalar_drift", r.sup_scalar_drift},
            {"sigma", r.sigma}};
}

json to_json(const OverlapFit& f) {
    return {{"r0", f.r0}, {"theta_scale", f.theta_scale}, {"residual", f.residual},
            {"overlap_length", f.overlap_length}};
}

json to_json(const GhBounds& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

json to_json(const DimensionEstimate& d) {
    return {{"dimension", d.dimension}, {"residual", d.residual}, {"r_min", d.r_min},
            {"r_max", d.r_max}, {"scales_used", d.scales_used}};
}

json to_json(const SamplingWindow& w) { return {{"r_lo", w.r_lo}, {"r_hi", w.r_hi}}; }

void write_json(const json& j, const fs::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    require(out.good(), ErrorCode::IoError, "write failed: " + path.string());
}

json read_json(const fs::path& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
    }
}

void write_profile(const RadialProfile& p, const fs::path& csv) {
    {
        auto out = open_out(csv);
        out << "r,phi,f\n";
        for (std::size_t j = 0; j < p.size(); ++j)
            out << format_double(p.r()[j]) << ',' << format_double(p.phi()[j]) << ','
                << format_double(p.f()[j]) << '\n';
        require(out.good(), ErrorCode::IoError, "write failed: " + csv.string());
    }
    write_json(to_json(p.options()), sidecar(csv));
}

RadialProfile read_profile(const fs::path& csv) {
    auto in = open_in(csv);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "r,phi,f", ErrorCode::IoError, "expected header r,phi,f in " + csv.string());
    std::vector<double> r, phi, f;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto row = split_row(line, csv);
        require(row.size() == 3, ErrorCode::IoError, "expected 3 columns in " + csv.string());
        r.push_back(row[0]);
        phi.push_back(row[1]);
        f.push_back(row[2]);
    }
    RadialProfile::Options o;
    if (fs::exists(sidecar(csv))) o = options_from_json(read_json(sidecar(csv)));
    return RadialProfile(std::move(r), std::move(phi), std::move(f), o);
}

void write_solution(const SurfaceSolution& sol, const fs::path& dir, const json& provenance) {
    fs::create_directories(dir);
    json files = json::array();
    for (std::size_t i = 0; i < sol.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "profile_%05zu.csv", i);
        write_profile(sol[i], dir / name);
        files.push_back(name);
    }
    json idx = {{"times", sol.times()}, {"files", files}};
    if (sol.size() > 0) {
        const auto& p = sol[0];
        idx["grid"] = {{"r0", p.r().front()}, {"r1", p.r().back()}, {"n", p.size()},
                       {"h", p.h()}, {"closed_tip", p.closed_tip()},
                       {"closed_end", p.closed_end()}};
    }
    idx["blowup_time"] = sol.blowup_time() ? json(*sol.blowup_time()) : json(nullptr);
    if (!provenance.is_null()) idx["provenance"] = provenance;
    write_json(idx, dir / "index.json");
}

SurfaceSolution read_solution(const fs::path& dir) {
    const json idx = read_json(dir / "index.json");
    std::vector<RadialProfile> profiles;
    for (const auto& name : idx.at("files")) profiles.push_back(read_profile(dir / name.get<std::string>()));
    std::optional<double> blowup;
    if (idx.contains("blowup_time") && !idx["blowup_time"].is_null())
        blowup = idx["blowup_time"].get<double>();
    return SurfaceSolution(std::move(profiles), blowup);
}

void write_space(const FiniteMetricSpace& A, const fs::path& csv, const json& meta) {
    {
        auto out = open_out(csv);
        for (std::size_t i = 0; i < A.size(); ++i) {
            for (std::size_t j = 0; j < A.size(); ++j) {
                if (j) out << ',';
                out << format_double(A(i, j));
            }
            out << '\n';
        }
        require(out.good(), ErrorCode::IoError, "write failed: " + csv.string());
    }
    json m = meta.is_null() ? json::object() : meta;
    m["n"] = A.size();
    m["base"] = A.base();
    write_json(m, sidecar(csv));
}

FiniteMetricSpace read_space(const fs::path& csv) {
    auto in = open_in(csv);
    std::vector<double> d;
    std::size_t n = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto row = split_row(line, csv);
        if (n == 0) n = row.size();
        require(row.size() == n, ErrorCode::IoError, "ragged matrix in " + csv.string());
        d.insert(d.end(), row.begin(), row.end());
    }
    require(d.size() == n * n, ErrorCode::IoError, "matrix is not square in " + csv.string());
    std::size_t base = 0;
    if (fs::exists(sidecar(csv))) base = read_json(sidecar(csv)).value("base", std::size_t{0});
    return FiniteMetricSpace(n, std::move(d), base);
}

void write_columns(const std::vector<std::pair<double, double>>& rows, const std::string& header,
                   const fs::path& path) {
    auto out = open_out(path);
    out << header << '\n';
    for (const auto& [a, b] : rows) out << format_double(a) << ',' << format_double(b) << '\n';
    require(out.good(), ErrorCode::IoError, "write failed: " + path.string());
}

std::string sha256_file(const fs::path& path) {
    auto in = open_in(path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    require(ctx != nullptr, ErrorCode::IoError, "digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

void write_manifest(const fs::path& root) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().filename() != "manifest.json")
            files.push_back(fs::relative(e.path(), root));
    std::sort(files.begin(), files.end());
    json list = json::array();
    for (const auto& f : files)
        list.push_back({{"path", f.generic_string()}, {"sha256", sha256_file(root / f)},
                        {"bytes", fs::file_size(root / f)}});
    write_json({{"files", list}}, root / "manifest.json");
}

}  // namespace rflab::io
