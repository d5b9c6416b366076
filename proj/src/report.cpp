#include "ttomo/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ttomo {

bool VerificationReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {
// JSON has no inf/nan; failures that produce them are stored as null
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
double from_number(const nlohmann::json& j) { return j.is_null() ? NAN : j.get<double>(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path);
}
}  // namespace

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json j;
    j["suite"] = r.suite;
    j["seed"] = r.seed;
    j["header"] = r.header;
    j["aggregate_pass"] = r.pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks) {
        j["checks"].push_back({{"name", c.name},
                               {"anchor", c.anchor},
                               {"comparison", c.lower_bound ? ">" : "<="},
                               {"residual", number(c.residual)},
                               {"tolerance", number(c.tolerance)},
                               {"pass", c.pass},
                               {"wall_time", number(c.wall_time)},
                               {"note", c.note}});
    }
    return j;
}

VerificationReport report_from_json(const nlohmann::json& j) {
    VerificationReport r;
    r.suite = j.at("suite").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.header = j.value("header", "");
    for (const auto& c : j.at("checks")) {
        CheckResult k;
        k.name = c.at("name").get<std::string>();
        k.anchor = c.value("anchor", "");
        k.lower_bound = c.value("comparison", "<=") == ">";
        k.residual = from_number(c.at("residual"));
        k.tolerance = from_number(c.at("tolerance"));
        k.pass = c.at("pass").get<bool>();
        k.wall_time = from_number(c.value("wall_time", nlohmann::json(0.0)));
        k.note = c.value("note", "");
        r.checks.push_back(std::move(k));
    }
    return r;
}

std::string to_json_string(const VerificationReport& r) { return to_json(r).dump(2) + "\n"; }

std::string to_csv(const VerificationReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "name,anchor,comparison,residual,tolerance,pass,wall_time,note\n";
    for (const auto& c : r.checks)
        os << csv_field(c.name) << ',' << csv_field(c.anchor) << ',' << (c.lower_bound ? ">" : "<=") << ','
           << c.residual << ',' << c.tolerance << ',' << (c.pass ? "true" : "false") << ',' << c.wall_time << ','
           << csv_field(c.note) << '\n';
    return os.str();
}

HeatmapInfo write_ppm(const GridField& f, std::size_t comp, const std::string& path) {
    if (f.dim() != 2) throw std::invalid_argument("write_ppm: 2-D fields only");
    if (comp >= f.components()) throw std::out_of_range("write_ppm: component out of range");
    const int N = f.grid().N;
    const auto& v = f.comp(comp);
    HeatmapInfo info{INFINITY, 0.0, N, N};
    for (double x : v) {
        info.min = std::min(info.min, std::abs(x));
        info.max = std::max(info.max, std::abs(x));
    }
    const double span = info.max - info.min;
    std::ostringstream os;
    os << "P6\n# |f| min " << info.min << " max " << info.max << "\n" << N << ' ' << N << "\n255\n";
    std::string pixels;
    pixels.reserve(3 * static_cast<std::size_t>(N) * N);
    for (int row = 0; row < N; ++row) {
        const int j1 = N - 1 - row;
        for (int j0 = 0; j0 < N; ++j0) {
            const int j[2] = {j0, j1};
            double a = std::abs(v[f.index(j)]);
            int g = span > 0 ? static_cast<int>(std::lround(255.0 * (a - info.min) / span)) : 0;
            char c = static_cast<char>(std::clamp(g, 0, 255));
            pixels.append(3, c);
        }
    }
    write_file(path, os.str() + pixels);
    return info;
}

void emit(const VerificationReport& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir + "/report.json", to_json_string(r));
    write_file(dir + "/residuals.csv", to_csv(r));
}

}  // namespace ttomo
