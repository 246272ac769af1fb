#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace modshadow {

// Effective run configuration. Config files are UTF-8 `key = value` lines
// with `#` comments; unknown keys are rejected. Command-line flags override
// file values.
struct RunConfig {
    std::optional<std::uint64_t> seed;
    double epsilon = 0.2;
    double im_lo = 1.0;
    double im_hi = 4.0;
    double re_lo = -0.5;
    double re_hi = 0.5;
    int samples = 500;
    double t_max = 46.0;
    double dt = 0.02;
    double dip_cap = 0.9;
    double radius = 0.1;
    double tau_max = 30.0;
    double tol = 1e-8;
    long long trace_max = 60;
    int threads = 1;
    int trials = 1000;
    double t0 = 2.0;
    double lambda_exp = 1.0;  // lambda = exp(-lambda_exp)
    double eta = 0.01;
    int m_max = 200;
    int pairs = 10;
    double re = 0.0;
    double im = 1.0;
    double angle = 1.5707963267948966;
    std::string out_jsonl;
    std::string out_csv;

    void validate() const;
    std::string digest() const;  // stable hex digest of the effective values
};

RunConfig load_config(const std::string& path);

// Applies MODSHADOW_THREADS as a cap when set; throws ConfigError on a
// non-positive or malformed value.
int effective_threads(const RunConfig& cfg);

}  // namespace modshadow
