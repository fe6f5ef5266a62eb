#include "arratia/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace arratia {

const char* const kToolVersion = "arratia 1.0.0";

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Coalescing: return "coalescing";
        case RunMode::Smooth: return "smooth";
        case RunMode::Compare: return "compare";
        case RunMode::Verify: return "verify";
        case RunMode::Ito: return "ito";
        case RunMode::SheetCheck: return "sheet-check";
        case RunMode::MassStats: return "mass-stats";
    }
    return "?";
}

std::optional<RunMode> parse_mode(const std::string& name) {
    for (RunMode m : {RunMode::Coalescing, RunMode::Smooth, RunMode::Compare, RunMode::Verify,
                      RunMode::Ito, RunMode::SheetCheck, RunMode::MassStats}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& source, int line, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) fail(source, line, "trailing junk in number '" + value + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(source, line, "not a number: '" + value + "'");
    }
}

long parse_int(const std::string& source, int line, const std::string& value) {
    try {
        std::size_t used = 0;
        const long x = std::stol(value, &used);
        if (used != value.size()) fail(source, line, "trailing junk in integer '" + value + "'");
        return x;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        fail(source, line, "not an integer: '" + value + "'");
    }
}

bool parse_bool(const std::string& source, int line, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(source, line, "not a boolean: '" + value + "'");
}

std::vector<double> parse_list(const std::string& source, int line, const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string token;
    while (in >> token) out.push_back(parse_double(source, line, token));
    if (out.empty()) fail(source, line, "empty list");
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source) {
    std::map<std::string, std::pair<std::string, int>> entries;
    {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string stripped = trim(raw);
            if (stripped.empty()) continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) fail(source, line, "expected 'key = value'");
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            if (key.empty()) fail(source, line, "empty key");
            if (value.empty()) fail(source, line, "empty value for key '" + key + "'");
            if (entries.count(key)) fail(source, line, "duplicate key '" + key + "'");
            entries[key] = {value, line};
        }
    }

    RunConfig cfg;
    bool sigma_given = false, epsilon_given = false;
    const auto take = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        auto out = it->second;
        entries.erase(it);
        return out;
    };

    if (auto e = take("mode")) {
        const auto mode = parse_mode(e->first);
        if (!mode) fail(source, e->second, "unknown mode '" + e->first + "'");
        cfg.mode = *mode;
    }
    if (auto e = take("grid.m_space")) cfg.grid.m_space = static_cast<int>(parse_int(source, e->second, e->first));
    if (auto e = take("grid.k_time")) cfg.grid.k_time = static_cast<int>(parse_int(source, e->second, e->first));
    if (auto e = take("grid.horizon_t")) cfg.grid.horizon_t = parse_double(source, e->second, e->first);
    if (auto e = take("initial.kind")) {
        if (e->first == "uniform") cfg.initial.kind = InitialSpec::Kind::Uniform;
        else if (e->first == "list") cfg.initial.kind = InitialSpec::Kind::List;
        else if (e->first == "gaussian") cfg.initial.kind = InitialSpec::Kind::Gaussian;
        else if (e->first == "constant") cfg.initial.kind = InitialSpec::Kind::Constant;
        else fail(source, e->second, "unknown initial.kind '" + e->first + "'");
    }
    if (auto e = take("initial.values"))
        cfg.initial.list_values = parse_list(source, e->second, e->first);
    if (auto e = take("initial.constant"))
        cfg.initial.constant = parse_double(source, e->second, e->first);
    if (auto e = take("sigma")) {
        cfg.sigma = parse_double(source, e->second, e->first);
        sigma_given = true;
    }
    if (auto e = take("epsilon")) {
        cfg.epsilon = parse_double(source, e->second, e->first);
        epsilon_given = true;
    }
    if (auto e = take("eta")) cfg.eta = parse_double(source, e->second, e->first);
    if (auto e = take("seed")) cfg.seed = parse_int(source, e->second, e->first);
    if (auto e = take("replicas")) cfg.replicas = static_cast<int>(parse_int(source, e->second, e->first));
    if (auto e = take("refine_depth")) cfg.refine_depth = static_cast<int>(parse_int(source, e->second, e->first));
    if (auto e = take("isotonic_repair")) cfg.isotonic_repair = parse_bool(source, e->second, e->first);
    if (auto e = take("compare.sigmas")) cfg.compare_sigmas = parse_list(source, e->second, e->first);
    if (auto e = take("compare.epsilons")) cfg.compare_epsilons = parse_list(source, e->second, e->first);
    if (auto e = take("mass.beta")) cfg.mass_beta = parse_double(source, e->second, e->first);
    if (auto e = take("mass.t_points")) cfg.mass_t_points = parse_list(source, e->second, e->first);
    if (auto e = take("output_dir")) cfg.output_dir = e->first;
    take("tool_version");  // manifests round-trip through the parser
    take("config_hash");

    if (!entries.empty()) {
        const auto& [key, value] = *entries.begin();
        fail(source, value.second, "unknown key '" + key + "'");
    }

    // Mode-specific validation with the best line info we have.
    const auto require = [&](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(source + ":1: " + what);
    };
    require(cfg.grid.m_space > 0 && cfg.grid.k_time > 0 && cfg.grid.horizon_t > 0,
            "grid must have positive cells and horizon");
    require(cfg.replicas > 0, "replicas must be positive");
    if (cfg.mode == RunMode::Smooth) {
        require(sigma_given && epsilon_given, "smooth mode requires sigma and epsilon");
        require(cfg.sigma > 0 && cfg.epsilon > 0, "sigma and epsilon must be positive");
    }
    if (cfg.mode == RunMode::Compare)
        require(cfg.compare_sigmas.size() == cfg.compare_epsilons.size(),
                "compare.sigmas and compare.epsilons must have equal length");
    if (cfg.initial.kind == InitialSpec::Kind::List) {
        require(!cfg.initial.list_values.empty(), "initial.kind=list requires initial.values");
        require(static_cast<int>(cfg.initial.list_values.size()) == cfg.grid.m_space,
                "initial.values length must equal grid.m_space");
        require(std::is_sorted(cfg.initial.list_values.begin(), cfg.initial.list_values.end()),
                "initial.values must be non-decreasing");
    }
    if (cfg.eta) require(*cfg.eta > 0 && *cfg.eta < cfg.sigma / 3.0, "need 0 < eta < sigma/3");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ":0: cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

namespace {

std::string list_text(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        out += format_double(xs[i]);
    }
    return out;
}

std::string manifest_body(const RunConfig& cfg) {
    std::ostringstream out;
    out << "mode = " << to_string(cfg.mode) << '\n';
    out << "grid.m_space = " << cfg.grid.m_space << '\n';
    out << "grid.k_time = " << cfg.grid.k_time << '\n';
    out << "grid.horizon_t = " << format_double(cfg.grid.horizon_t) << '\n';
    switch (cfg.initial.kind) {
        case InitialSpec::Kind::Uniform: out << "initial.kind = uniform\n"; break;
        case InitialSpec::Kind::List:
            out << "initial.kind = list\n";
            out << "initial.values = " << list_text(cfg.initial.list_values) << '\n';
            break;
        case InitialSpec::Kind::Gaussian: out << "initial.kind = gaussian\n"; break;
        case InitialSpec::Kind::Constant:
            out << "initial.kind = constant\n";
            out << "initial.constant = " << format_double(cfg.initial.constant) << '\n';
            break;
    }
    out << "sigma = " << format_double(cfg.sigma) << '\n';
    out << "epsilon = " << format_double(cfg.epsilon) << '\n';
    out << "eta = " << format_double(cfg.eta ? *cfg.eta : cfg.sigma / 4.0) << '\n';
    out << "seed = " << cfg.seed << '\n';
    out << "replicas = " << cfg.replicas << '\n';
    out << "refine_depth = " << cfg.refine_depth << '\n';
    out << "isotonic_repair = " << (cfg.isotonic_repair ? "true" : "false") << '\n';
    out << "compare.sigmas = " << list_text(cfg.compare_sigmas) << '\n';
    out << "compare.epsilons = " << list_text(cfg.compare_epsilons) << '\n';
    out << "mass.beta = " << format_double(cfg.mass_beta) << '\n';
    out << "mass.t_points = " << list_text(cfg.mass_t_points) << '\n';
    out << "tool_version = " << kToolVersion << '\n';
    return out.str();
}

}  // namespace

std::string config_hash(const RunConfig& cfg) {
    const std::string body = manifest_body(cfg);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : body) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string manifest_text(const RunConfig& cfg) {
    return manifest_body(cfg) + "config_hash = " + config_hash(cfg) + "\n";
}

}  // namespace arratia
