#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cbo::cli {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const ConfigValue& v, const std::string& why) {
    throw ConfigError(v.origin + ": key '" + key + "': " + why + " (got '" + v.text + "')");
}

template <typename T>
T parse_number(const std::string& key, const ConfigValue& v) {
    T out{};
    const std::string& s = v.text;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        if constexpr (std::is_floating_point_v<T>)
            bad(key, v, "expected a real number");
        else
            bad(key, v, "expected a non-negative integer");
    }
    return out;
}

std::vector<double> parse_list(const std::string& key, const ConfigValue& v) {
    std::vector<double> out;
    std::stringstream ss(v.text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, {trim(item), v.origin}));
    if (out.empty()) bad(key, v, "expected a number or comma-separated list");
    return out;
}

}  // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "objective",   "B",          "C",           "dim",       "n_particles",
        "lambda",      "sigma",      "beta",        "h",         "scheme",
        "noise_mode",  "seed",       "init_seed",   "init_low",  "init_high",
        "max_steps",   "diameter_tol", "record_stride", "success_radius",
        "out_csv",     "out_jsonl",  "out_positions"};
    return keys;
}

KeyValues parse_config_text(const std::string& text, const std::string& source) {
    const auto& keys = known_keys();
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError(where + ": unknown key '" + key + "'");
        if (kv.count(key))
            throw ConfigError(where + ": key '" + key + "' already set at " + kv[key].origin);
        kv[key] = {value, where};
    }
    return kv;
}

KeyValues read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

RunConfig build_run_config(const KeyValues& kv) {
    RunConfig c;
    c.params.scheme = Scheme::semi_exact;
    auto get = [&](const std::string& key) -> const ConfigValue* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    const ConfigValue* obj = get("objective");
    if (!obj) throw ConfigError("missing required key 'objective'");
    c.objective = obj->text;

    if (auto v = get("dim")) c.params.dim = parse_number<std::size_t>("dim", *v);
    if (auto v = get("n_particles")) c.params.n_particles = parse_number<std::size_t>("n_particles", *v);
    if (auto v = get("lambda")) c.params.lambda = parse_number<double>("lambda", *v);
    if (auto v = get("sigma")) c.params.sigma = parse_number<double>("sigma", *v);
    if (auto v = get("beta")) c.params.beta = parse_number<double>("beta", *v);
    if (auto v = get("h")) c.params.h = parse_number<double>("h", *v);
    if (auto v = get("scheme")) {
        const auto s = parse_scheme(v->text);
        if (!s) bad("scheme", *v, "expected euler, semi_exact or deterministic");
        c.params.scheme = *s;
    }
    if (auto v = get("noise_mode")) {
        const auto m = parse_noise_mode(v->text);
        if (!m) bad("noise_mode", *v, "expected common or independent");
        c.params.noise_mode = *m;
    }
    if (auto v = get("seed")) c.seed = parse_number<std::uint64_t>("seed", *v);
    if (auto v = get("init_seed")) c.init_seed = parse_number<std::uint64_t>("init_seed", *v);
    if (auto v = get("max_steps")) c.max_steps = parse_number<std::int64_t>("max_steps", *v);
    if (auto v = get("diameter_tol")) c.diameter_tol = parse_number<double>("diameter_tol", *v);
    if (auto v = get("record_stride")) c.record_stride = parse_number<std::int64_t>("record_stride", *v);
    if (auto v = get("success_radius")) c.success_radius = parse_number<double>("success_radius", *v);
    if (auto v = get("out_csv")) c.out_csv = v->text;
    if (auto v = get("out_jsonl")) c.out_jsonl = v->text;
    if (auto v = get("out_positions")) c.out_positions = v->text;

    try {
        validate_params(c.params);
    } catch (const ParamError& e) {
        throw ConfigError(std::string("invalid parameters: ") + e.what());
    }
    if (c.max_steps < 1) bad("max_steps", *get("max_steps"), "must be >= 1");
    if (c.record_stride < 1) bad("record_stride", *get("record_stride"), "must be >= 1");
    if (!(c.diameter_tol >= 0.0)) bad("diameter_tol", *get("diameter_tol"), "must be >= 0");
    if (!(c.success_radius > 0.0)) bad("success_radius", *get("success_radius"), "must be > 0");

    const std::size_t d = c.params.dim;
    auto box = [&](const char* key, double fallback) {
        const ConfigValue* v = get(key);
        if (!v) return std::vector<double>(d, fallback);
        auto vals = parse_list(key, *v);
        if (vals.size() == 1) vals.assign(d, vals[0]);
        if (vals.size() != d)
            bad(key, *v, "expected 1 or " + std::to_string(d) + " values");
        return vals;
    };
    c.init_low = box("init_low", -2.0);
    c.init_high = box("init_high", 2.0);
    for (std::size_t l = 0; l < d; ++l)
        if (!std::isfinite(c.init_low[l]) || !std::isfinite(c.init_high[l]) ||
            !(c.init_low[l] < c.init_high[l]))
            throw ConfigError("init box is degenerate in dimension " + std::to_string(l + 1));

    // Rastrigin's shift and offset default to 0; other objectives take what is given.
    const auto infos = list_objectives();
    const auto info = std::find_if(infos.begin(), infos.end(),
                                   [&](const ObjectiveInfo& i) { return i.name == c.objective; });
    if (info == infos.end()) bad("objective", *obj, "unknown objective");
    for (const char* key : {"B", "C"}) {
        if (auto v = get(key)) {
            if (std::find(info->required_params.begin(), info->required_params.end(), key) ==
                info->required_params.end())
                bad(key, *v, "not a parameter of objective '" + c.objective + "'");
            c.objective_params[key] = parse_number<double>(key, *v);
        }
    }
    for (const auto& key : info->required_params)
        if (!c.objective_params.count(key)) c.objective_params[key] = 0.0;
    try {
        (void)registry_get(c.objective, d, c.objective_params);
    } catch (const ParamError& e) {
        bad("objective", *obj, e.what());
    }
    return c;
}

VerifyConfig build_verify_config(const KeyValues& kv) {
    VerifyConfig c;
    for (const auto& [key, v] : kv) {
        if (key == "lambda") c.lambda = parse_number<double>(key, v);
        else if (key == "sigma") c.sigma = parse_number<double>(key, v);
        else if (key == "h") c.h = parse_number<double>(key, v);
        else if (key == "beta") c.beta = parse_number<double>(key, v);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
        else if (key == "success_radius") c.success_radius = parse_number<double>(key, v);
    }
    return c;
}

}  // namespace cbo::cli
