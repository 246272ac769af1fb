#include "modshadow/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "modshadow/errors.hpp"

namespace modshadow {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

template <typename T>
T parse_num(const std::string& v) {
    std::istringstream is(v);
    T out;
    is >> out;
    if (is.fail() || !is.eof()) throw ConfigError("bad numeric value '" + v + "'");
    return out;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_num<std::uint64_t>(v); }},
        {"epsilon", [](RunConfig& c, const std::string& v) { c.epsilon = parse_num<double>(v); }},
        {"im_lo", [](RunConfig& c, const std::string& v) { c.im_lo = parse_num<double>(v); }},
        {"im_hi", [](RunConfig& c, const std::string& v) { c.im_hi = parse_num<double>(v); }},
        {"re_lo", [](RunConfig& c, const std::string& v) { c.re_lo = parse_num<double>(v); }},
        {"re_hi", [](RunConfig& c, const std::string& v) { c.re_hi = parse_num<double>(v); }},
        {"samples", [](RunConfig& c, const std::string& v) { c.samples = parse_num<int>(v); }},
        {"t_max", [](RunConfig& c, const std::string& v) { c.t_max = parse_num<double>(v); }},
        {"dt", [](RunConfig& c, const std::string& v) { c.dt = parse_num<double>(v); }},
        {"dip_cap", [](RunConfig& c, const std::string& v) { c.dip_cap = parse_num<double>(v); }},
        {"radius", [](RunConfig& c, const std::string& v) { c.radius = parse_num<double>(v); }},
        {"tau_max", [](RunConfig& c, const std::string& v) { c.tau_max = parse_num<double>(v); }},
        {"tol", [](RunConfig& c, const std::string& v) { c.tol = parse_num<double>(v); }},
        {"trace_max",
         [](RunConfig& c, const std::string& v) { c.trace_max = parse_num<long long>(v); }},
        {"threads", [](RunConfig& c, const std::string& v) { c.threads = parse_num<int>(v); }},
        {"trials", [](RunConfig& c, const std::string& v) { c.trials = parse_num<int>(v); }},
        {"t0", [](RunConfig& c, const std::string& v) { c.t0 = parse_num<double>(v); }},
        {"lambda_exp",
         [](RunConfig& c, const std::string& v) { c.lambda_exp = parse_num<double>(v); }},
        {"eta", [](RunConfig& c, const std::string& v) { c.eta = parse_num<double>(v); }},
        {"m_max", [](RunConfig& c, const std::string& v) { c.m_max = parse_num<int>(v); }},
        {"pairs", [](RunConfig& c, const std::string& v) { c.pairs = parse_num<int>(v); }},
        {"re", [](RunConfig& c, const std::string& v) { c.re = parse_num<double>(v); }},
        {"im", [](RunConfig& c, const std::string& v) { c.im = parse_num<double>(v); }},
        {"angle", [](RunConfig& c, const std::string& v) { c.angle = parse_num<double>(v); }},
        {"out_jsonl", [](RunConfig& c, const std::string& v) { c.out_jsonl = v; }},
        {"out_csv", [](RunConfig& c, const std::string& v) { c.out_csv = v; }},
    };
    return table;
}

}  // namespace

void RunConfig::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    if (!(radius > 0.0)) throw ConfigError("radius must be positive");
    if (samples < 1) throw ConfigError("samples must be positive");
    if (threads < 1) throw ConfigError("threads must be positive");
    if (trace_max < 3) throw ConfigError("trace_max must be at least 3");
    if (!(im_lo >= 1.0)) throw ConfigError("im_lo must be >= 1");
    if (!(im_hi > im_lo)) throw ConfigError("im_hi must exceed im_lo");
}

std::string RunConfig::digest() const {
    std::ostringstream os;
    os.precision(17);
    os << "seed=" << (seed ? std::to_string(*seed) : "none") << ";epsilon=" << epsilon
       << ";im_lo=" << im_lo << ";im_hi=" << im_hi << ";re_lo=" << re_lo << ";re_hi=" << re_hi
       << ";samples=" << samples << ";t_max=" << t_max << ";dt=" << dt
       << ";dip_cap=" << dip_cap << ";radius=" << radius << ";tau_max=" << tau_max
       << ";tol=" << tol << ";trace_max=" << trace_max << ";threads=" << threads
       << ";trials=" << trials << ";t0=" << t0 << ";lambda_exp=" << lambda_exp
       << ";eta=" << eta << ";m_max=" << m_max << ";pairs=" << pairs << ";re=" << re
       << ";im=" << im << ";angle=" << angle;
    std::string s = os.str();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    std::ostringstream hex;
    hex << std::hex << h;
    return hex.str();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = line;
        size_t hash = body.find('#');
        if (hash != std::string::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config parse error at line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("unknown config key '" + key + "' at line " +
                              std::to_string(lineno));
        try {
            it->second(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config parse error at line " + std::to_string(lineno) + ": " +
                              e.what());
        }
    }
    return cfg;
}

int effective_threads(const RunConfig& cfg) {
    int threads = cfg.threads;
    if (const char* env = std::getenv("MODSHADOW_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1)
            throw ConfigError("MODSHADOW_THREADS must be a positive integer");
        threads = std::min<long>(threads, cap);
    }
    return std::max(threads, 1);
}

}  // namespace modshadow
