#include "modshadow/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "modshadow/config.hpp"
#include "modshadow/errors.hpp"
#include "modshadow/experiments.hpp"
#include "modshadow/oracle.hpp"
#include "modshadow/rng.hpp"

namespace modshadow {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

long long to_ll(int128 v) {
    if (v > kDeckEntryLimit || v < -kDeckEntryLimit) throw DeckOverflowError();
    return static_cast<long long>(v);
}

json frame_json(const FrameElement& g) {
    return json::array({g.m11, g.m12, g.m21, g.m22});
}

json gamma_json(const DeckElement& g) {
    return json::array({to_ll(g.a), to_ll(g.b), to_ll(g.c), to_ll(g.d)});
}

json record_header(const std::string& subcommand, const RunConfig& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["subcommand"] = subcommand;
    j["seed"] = cfg.seed.value_or(0);
    j["config_digest"] = cfg.digest();
    return j;
}

json orbit_record(const std::string& subcommand, const RunConfig& cfg, std::size_t index,
                  const FrameElement& x0, const PeriodicOrbitResult& r) {
    json j = record_header(subcommand, cfg);
    j["sample_index"] = index;
    j["x0"] = frame_json(x0);
    j["y"] = frame_json(r.y);
    j["T"] = r.T;
    j["gamma"] = gamma_json(r.gamma);
    j["closure_residual"] = r.closure_residual;
    j["oracle_length"] = r.oracle_period;
    j["start_distance"] = r.start_distance;
    return j;
}

class Outputs {
  public:
    Outputs(const std::string& subcommand, const RunConfig& cfg) {
        jsonl_path_ = cfg.out_jsonl.empty() ? "modshadow_" + subcommand + ".jsonl"
                                            : cfg.out_jsonl;
        csv_path_ = cfg.out_csv.empty() ? "modshadow_" + subcommand + ".csv" : cfg.out_csv;
    }

    void record(const json& j) {
        if (!jsonl_.is_open()) {
            jsonl_.open(jsonl_path_);
            if (!jsonl_) throw ConfigError("cannot open output file: " + jsonl_path_);
        }
        jsonl_ << j.dump() << '\n';
    }

    void csv(const std::string& header, const std::vector<std::string>& rows) {
        std::ofstream out(csv_path_);
        if (!out) throw ConfigError("cannot open output file: " + csv_path_);
        out << header << '\n';
        for (const auto& r : rows) out << r << '\n';
    }

    const std::string& jsonl_path() const { return jsonl_path_; }
    const std::string& csv_path() const { return csv_path_; }

  private:
    std::string jsonl_path_, csv_path_;
    std::ofstream jsonl_;
};

FrameElement start_frame(const RunConfig& cfg, bool random_start) {
    if (random_start) {
        if (!cfg.seed) throw ConfigError("--random-start requires --seed");
        Window w;
        w.im_lo = cfg.im_lo;
        w.im_hi = cfg.im_hi;
        w.re_lo = cfg.re_lo;
        w.re_hi = cfg.re_hi;
        Rng rng = Rng::for_sample(*cfg.seed, 0);
        return sample_window_frame(w, rng);
    }
    return tangent_to_frame(UnitTangent{HalfPlanePoint{cfg.re, cfg.im}, cfg.angle});
}

FinderBudget finder_budget(const RunConfig& cfg) {
    FinderBudget b;
    b.t_max = cfg.t_max;
    b.dt = cfg.dt;
    b.dip_cap = cfg.dip_cap;
    return b;
}

int run_spectrum(const RunConfig& cfg) {
    auto classes = enumerate_classes(cfg.trace_max);
    spectrum_csv(classes, std::cout);
    if (!cfg.out_csv.empty()) {
        std::ofstream out(cfg.out_csv);
        if (!out) throw ConfigError("cannot open output file: " + cfg.out_csv);
        spectrum_csv(classes, out);
    }
    return 0;
}

int run_verify_lemma(const RunConfig& cfg) {
    double lambda = std::exp(-cfg.lambda_exp);
    LemmaAudit audit = lemma_l1n_audit(cfg.t0, lambda, cfg.eta,
                                       static_cast<std::size_t>(cfg.trials),
                                       static_cast<std::size_t>(cfg.m_max),
                                       cfg.seed.value_or(0));
    // m = 0 closed form against the geometric-series tail oracle.
    std::vector<double> none;
    double closed = p_function(0.0, cfg.t0, lambda, none, 0);
    double oracle = 1.0 + std::pow(lambda, cfg.t0);
    double m0_gap = std::fabs(closed - oracle);
    std::cout << "verify-lemma: max P = " << fmt17(audit.max_p) << "  K = "
              << fmt17(audit.bound) << "  trials = " << audit.trials
              << "  m0_gap = " << fmt17(m0_gap) << '\n';
    Outputs out("verify-lemma", cfg);
    json j = record_header("verify-lemma", cfg);
    j["max_p"] = audit.max_p;
    j["bound_K"] = audit.bound;
    j["trials"] = audit.trials;
    j["pass"] = audit.pass;
    out.record(j);
    out.csv("subcommand,metric,value,bound,pass",
            {"verify-lemma,max_p," + fmt17(audit.max_p) + "," + fmt17(audit.bound) + "," +
             (audit.pass ? "1" : "0")});
    return audit.pass && m0_gap <= 1e-12 ? 0 : 2;
}

int run_verify_anosov(const RunConfig& cfg) {
    Window w;
    w.im_lo = cfg.im_lo;
    w.im_hi = cfg.im_hi;
    AnosovConstants constants;
    std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    AnosovReport rep = verify_anosov_bounds(w, constants, grid,
                                            static_cast<std::size_t>(cfg.samples),
                                            cfg.seed.value_or(0), 1e-3,
                                            effective_threads(cfg));
    bool pass = rep.max_normalized_ratio <= 1.0 && rep.max_parameter_deviation <= 1e-13;
    std::cout << "verify-anosov: max normalized ratio = " << fmt17(rep.max_normalized_ratio)
              << "  parameter identity residual = " << fmt17(rep.max_parameter_deviation)
              << "  unstable forward ratio = " << fmt17(rep.unstable_forward_max_ratio)
              << "  samples = " << rep.samples << '\n';
    Outputs out("verify-anosov", cfg);
    json j = record_header("verify-anosov", cfg);
    j["max_normalized_ratio"] = rep.max_normalized_ratio;
    j["max_parameter_deviation"] = rep.max_parameter_deviation;
    j["unstable_forward_max_ratio"] = rep.unstable_forward_max_ratio;
    j["samples"] = rep.samples;
    j["pass"] = pass;
    out.record(j);
    out.csv("subcommand,metric,value,bound,pass",
            {"verify-anosov,max_normalized_ratio," + fmt17(rep.max_normalized_ratio) + ",1," +
             (pass ? "1" : "0")});
    return pass ? 0 : 2;
}

int run_bracket(const RunConfig& cfg) {
    FrameElement x = start_frame(cfg, false);
    double inj = injectivity_radius(x);
    double eps = std::min(cfg.epsilon, inj);
    LocalProductConstants lpc = local_product_constants(x, eps);
    Rng rng(cfg.seed.value_or(0));
    std::size_t ok = 0, total = static_cast<std::size_t>(cfg.samples);
    double max_dist = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        auto ball_point = [&]() {
            double b = lpc.delta / 2.0;
            return stable_move(
                unstable_move(geodesic_flow(x, rng.uniform(-b, b)), rng.uniform(-b, b)),
                rng.uniform(-b, b));
        };
        FrameElement y = ball_point(), z = ball_point();
        try {
            BracketResult br = bowen_bracket(y, z, lpc.eta);
            double d = quotient_dist(br.w, x);
            max_dist = std::max(max_dist, d);
            if (br.residual <= 1e-10 && d <= eps) ok++;
        } catch (const Error&) {
        }
    }
    bool pass = ok == total;
    std::cout << "bracket: " << ok << "/" << total << " pairs bracketed inside B(x, eps)"
              << "  delta = " << fmt17(lpc.delta) << "  eta = " << fmt17(lpc.eta)
              << "  max |w - x| = " << fmt17(max_dist) << '\n';
    Outputs out("bracket", cfg);
    json j = record_header("bracket", cfg);
    j["pairs"] = total;
    j["ok"] = ok;
    j["delta"] = lpc.delta;
    j["eta"] = lpc.eta;
    j["pass"] = pass;
    out.record(j);
    out.csv("subcommand,metric,value,bound,pass",
            {"bracket,pairs_ok," + std::to_string(ok) + "," + std::to_string(total) + "," +
             (pass ? "1" : "0")});
    return pass ? 0 : 2;
}

int run_periodic(const RunConfig& cfg, bool random_start, bool have_start) {
    FrameElement x0;
    if (!random_start && !have_start) {
        // Demo default: a frame on the axis of [[2,1],[1,1]].
        DeckElement g;
        g.a = 2;
        g.b = 1;
        g.c = 1;
        g.d = 1;
        x0 = axis_frame(g).frame;
    } else {
        x0 = start_frame(cfg, random_start);
    }
    double eps = std::min(cfg.epsilon, injectivity_radius(x0));
    PeriodicOrbitResult r = find_periodic_orbit(x0, eps, finder_budget(cfg));
    std::cout << "periodic: T = " << fmt17(r.T) << "  |trace| = "
              << std::llabs(r.gamma.trace_ll()) << "  closure = " << fmt17(r.closure_residual)
              << "  start distance = " << fmt17(r.start_distance) << '\n';
    Outputs out("periodic", cfg);
    out.record(orbit_record("periodic", cfg, 0, x0, r));
    out.csv("subcommand,seed,epsilon,samples,successes,coverage,max_start_distance,min_period,"
            "wall_seconds",
            {"periodic," + std::to_string(cfg.seed.value_or(0)) + "," + fmt17(eps) +
             ",1,1,1," + fmt17(r.start_distance) + "," + fmt17(r.T) + ",0"});
    return 0;
}

int run_shadow(const RunConfig& cfg, bool random_start, double delta_override) {
    FrameElement x0 = start_frame(cfg, random_start);
    double eps = std::min(cfg.epsilon, injectivity_radius(x0));
    ShadowParameters params0 = select_parameters(eps, x0, cfg.t0);
    double delta = delta_override > 0.0 ? delta_override : params0.delta;
    RecurrenceHit hit = detect_recurrence(x0, delta, cfg.t_max, cfg.dt);
    ShadowParameters params;
    if (hit.dist <= params0.delta / 3.0 && hit.t0 >= 1.0) {
        params = select_parameters(eps, x0, hit.t0);
    } else {
        params = scaled_parameters(hit.t0, hit.dist, params0.eta);
    }
    ShadowRun run = shadow_iteration(x0, params, 400);
    int k_max = std::min(20, static_cast<int>(160.0 / std::max(params.t0, 1.0)));
    int rc = 0;
    Outputs out("shadow", cfg);
    json j = record_header("shadow", cfg);
    j["t0"] = params.t0;
    j["eta"] = params.eta;
    j["delta"] = params.delta;
    j["epsilon"] = params.epsilon;
    j["recurrence_dist"] = run.recurrence_dist;
    j["iterations"] = run.iterates.size();
    j["converged"] = run.converged;
    try {
        ShadowOrbit orbit = shadow_limit(run, params, k_max);
        json prof = json::array();
        for (auto& [k, res] : orbit.residual_profile) prof.push_back(json::array({k, res}));
        j["residual_profile"] = prof;
        j["s"] = orbit.s;
        j["pass"] = true;
        std::cout << "shadow: t0 = " << fmt17(params.t0) << "  s = " << fmt17(orbit.s)
                  << "  k_max = " << k_max << "  max residual = "
                  << fmt17(std::max_element(orbit.residual_profile.begin(),
                                            orbit.residual_profile.end(),
                                            [](auto& a, auto& b) {
                                                return a.second < b.second;
                                            })
                               ->second)
                  << "  (eps/3 = " << fmt17(params.epsilon / 3.0) << ")\n";
    } catch (const VerificationError& e) {
        j["pass"] = false;
        j["error"] = e.what();
        std::cout << "shadow: verification failed: " << e.what() << '\n';
        rc = 2;
    }
    out.record(j);
    out.csv("subcommand,metric,value,bound,pass",
            {"shadow,iterations," + std::to_string(run.iterates.size()) + ",," +
             (rc == 0 ? "1" : "0")});
    return rc;
}

int run_density(const RunConfig& cfg) {
    if (!cfg.seed) throw ConfigError("density requires --seed");
    Window w;
    w.im_lo = cfg.im_lo;
    w.im_hi = cfg.im_hi;
    w.re_lo = cfg.re_lo;
    w.re_hi = cfg.re_hi;
    w.sample_count = cfg.samples;
    ExperimentBudget budget;
    budget.seed = *cfg.seed;
    budget.threads = effective_threads(cfg);
    budget.finder = finder_budget(cfg);
    DensityReport rep = density_experiment(w, cfg.epsilon, budget);
    double min_period = 0.0;
    for (auto& [idx, orbit] : rep.orbits)
        min_period = min_period == 0.0 ? orbit.T : std::min(min_period, orbit.T);
    std::cout << "density: coverage = " << fmt17(rep.coverage) << " (" << rep.successes << "/"
              << rep.samples << ")  max start distance = " << fmt17(rep.max_start_distance)
              << "  min period = " << fmt17(min_period) << "  wall = "
              << fmt17(rep.wall_seconds) << " s\n";
    Outputs out("density", cfg);
    for (auto& [idx, orbit] : rep.orbits) {
        Rng rng = Rng::for_sample(*cfg.seed, idx);
        FrameElement x0 = sample_window_frame(w, rng);
        out.record(orbit_record("density", cfg, idx, x0, orbit));
    }
    out.csv("subcommand,seed,epsilon,samples,successes,coverage,max_start_distance,min_period,"
            "wall_seconds",
            {"density," + std::to_string(*cfg.seed) + "," + fmt17(cfg.epsilon) + "," +
             std::to_string(rep.samples) + "," + std::to_string(rep.successes) + "," +
             fmt17(rep.coverage) + "," + fmt17(rep.max_start_distance) + "," +
             fmt17(min_period) + "," + fmt17(rep.wall_seconds)});
    return 0;
}

int run_leaf_density(const RunConfig& cfg, bool random_start) {
    Window w;
    w.im_lo = cfg.im_lo;
    w.im_hi = cfg.im_hi;
    w.re_lo = cfg.re_lo;
    w.re_hi = cfg.re_hi;
    FrameElement x = start_frame(cfg, random_start);
    LeafRanges ranges;
    ranges.tau_max = cfg.tau_max;
    LeafDensityReport rep = leaf_density_experiment(x, w, cfg.epsilon, ranges);
    std::cout << "leaf-density: coverage = " << fmt17(rep.coverage) << " (" << rep.covered
              << "/" << rep.net_points << " net points, " << rep.leaf_samples
              << " leaf samples)  wall = " << fmt17(rep.wall_seconds) << " s\n";
    Outputs out("leaf-density", cfg);
    json j = record_header("leaf-density", cfg);
    j["net_points"] = rep.net_points;
    j["covered"] = rep.covered;
    j["coverage"] = rep.coverage;
    j["leaf_samples"] = rep.leaf_samples;
    out.record(j);
    out.csv("subcommand,seed,epsilon,net_points,covered,coverage,leaf_samples,wall_seconds",
            {"leaf-density," + std::to_string(cfg.seed.value_or(0)) + "," +
             fmt17(cfg.epsilon) + "," + std::to_string(rep.net_points) + "," +
             std::to_string(rep.covered) + "," + fmt17(rep.coverage) + "," +
             std::to_string(rep.leaf_samples) + "," + fmt17(rep.wall_seconds)});
    return 0;
}

int run_transitivity(const RunConfig& cfg) {
    if (!cfg.seed) throw ConfigError("transitivity requires --seed");
    Window w;
    w.im_lo = cfg.im_lo;
    w.im_hi = cfg.im_hi;
    w.re_lo = cfg.re_lo;
    w.re_hi = cfg.re_hi;
    TransitivityBudget budget;
    budget.t_max = cfg.t_max > 46.0 ? cfg.t_max : 200.0;
    Outputs out("transitivity", cfg);
    std::size_t ok = 0;
    double max_t = 0.0;
    for (int p = 0; p < cfg.pairs; ++p) {
        Rng rng = Rng::for_sample(*cfg.seed, static_cast<std::uint64_t>(p));
        FrameElement u = sample_window_frame(w, rng);
        FrameElement v = sample_window_frame(w, rng);
        json j = record_header("transitivity", cfg);
        j["pair_index"] = p;
        j["u_center"] = frame_json(u);
        j["v_center"] = frame_json(v);
        j["radius"] = cfg.radius;
        try {
            HittingRecord rec = transitivity_experiment(u, v, cfg.radius, budget);
            j["p"] = frame_json(rec.p);
            j["t"] = rec.t;
            j["dist_u"] = rec.dist_u;
            j["dist_v"] = rec.dist_v;
            j["pass"] = rec.replay_ok;
            if (rec.replay_ok) ok++;
            max_t = std::max(max_t, rec.t);
        } catch (const std::exception& e) {
            j["pass"] = false;
            j["error"] = e.what();
        }
        out.record(j);
    }
    bool pass = ok == static_cast<std::size_t>(cfg.pairs);
    std::cout << "transitivity: " << ok << "/" << cfg.pairs << " pairs hit  max t = "
              << fmt17(max_t) << '\n';
    out.csv("subcommand,seed,radius,pairs,successes,max_t",
            {"transitivity," + std::to_string(*cfg.seed) + "," + fmt17(cfg.radius) + "," +
             std::to_string(cfg.pairs) + "," + std::to_string(ok) + "," + fmt17(max_t)});
    return pass ? 0 : 2;
}

FrameElement frame_from_json(const json& arr) {
    return FrameElement(arr.at(0).get<double>(), arr.at(1).get<double>(),
                        arr.at(2).get<double>(), arr.at(3).get<double>());
}

int run_replay(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "replay: cannot open " << path << '\n';
        return 1;
    }
    std::string line;
    std::size_t checked = 0, lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            std::cerr << "replay: parse error at line " << lineno << '\n';
            return 2;
        }
        if (j.value("schema_version", 0) != kSchemaVersion) {
            std::cerr << "replay: unsupported schema_version at line " << lineno << '\n';
            return 2;
        }
        auto fail = [&](const std::string& why) {
            std::cerr << "replay: mismatch at line " << lineno << ": " << why << '\n';
            return 2;
        };
        if (j.contains("gamma") && j.contains("y")) {
            DeckElement gamma;
            gamma.a = j["gamma"].at(0).get<long long>();
            gamma.b = j["gamma"].at(1).get<long long>();
            gamma.c = j["gamma"].at(2).get<long long>();
            gamma.d = j["gamma"].at(3).get<long long>();
            if (gamma.a * gamma.d - gamma.b * gamma.c != 1)
                return fail("gamma determinant is not 1");
            if (classify(gamma) != ElementType::Hyperbolic)
                return fail("gamma is not hyperbolic");
            FrameElement y = frame_from_json(j["y"]);
            double T = j["T"].get<double>();
            double tl = translation_length(gamma);
            if (std::fabs(T - tl) > 1e-8) return fail("period disagrees with trace formula");
            if (std::fabs(j["oracle_length"].get<double>() - tl) > 1e-12)
                return fail("stored oracle_length disagrees with trace formula");
            double closure = quotient_dist(geodesic_flow(y, T), y);
            if (closure > 1e-9) return fail("closure residual " + fmt17(closure));
            if (j.contains("x0")) {
                FrameElement x0 = frame_from_json(j["x0"]);
                double sd = quotient_dist(y, x0);
                if (std::fabs(sd - j["start_distance"].get<double>()) > 1e-9)
                    return fail("start distance mismatch");
            }
            checked++;
        } else if (j.value("subcommand", "") == "transitivity" && j.contains("p")) {
            FrameElement p = frame_from_json(j["p"]);
            FrameElement v = frame_from_json(j["v_center"]);
            FrameElement u = frame_from_json(j["u_center"]);
            double t = j["t"].get<double>();
            double radius = j["radius"].get<double>();
            if (quotient_dist(p, u) > radius) return fail("p left the U ball");
            if (quotient_dist(geodesic_flow(p, t), v) > radius)
                return fail("flow(p, t) left the V ball");
            checked++;
        }
    }
    std::cout << "replay: " << checked << " records re-verified\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_main(args);
}

int cli_main(const std::vector<std::string>& args) {
    RunConfig cfg;
    // --config is applied before flag parsing so flags override file values.
    std::vector<std::string> rest;
    std::string replay_path;
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config") {
                if (i + 1 >= args.size()) throw ConfigError("--config requires a path");
                cfg = load_config(args[++i]);
            } else if (args[i] == "--replay") {
                if (i + 1 >= args.size()) throw ConfigError("--replay requires a path");
                replay_path = args[++i];
            } else {
                rest.push_back(args[i]);
            }
        }
        if (!replay_path.empty()) return run_replay(replay_path);

        CLI::App app{"modular-surface geodesic flow: shadowing, periodic orbits, experiments"};
        app.require_subcommand(1);

        bool random_start = false;
        bool have_start = false;
        std::uint64_t seed_val = 0;

        auto add_common = [&](CLI::App* sub) {
            sub->add_option_function<std::uint64_t>(
                   "--seed", [&](const std::uint64_t& v) { cfg.seed = v; },
                   "deterministic seed");
            sub->add_option("--epsilon", cfg.epsilon);
            sub->add_option("--threads", cfg.threads);
            sub->add_option("--out", cfg.out_jsonl, "JSONL output path");
            sub->add_option("--csv", cfg.out_csv, "CSV summary path");
        };
        auto add_window = [&](CLI::App* sub) {
            sub->add_option("--im-lo", cfg.im_lo);
            sub->add_option("--im-hi", cfg.im_hi);
            sub->add_option("--re-lo", cfg.re_lo);
            sub->add_option("--re-hi", cfg.re_hi);
            sub->add_option("--samples", cfg.samples);
        };
        auto add_start = [&](CLI::App* sub) {
            auto* re = sub->add_option("--re", cfg.re);
            auto* im = sub->add_option("--im", cfg.im);
            auto* an = sub->add_option("--angle", cfg.angle);
            sub->add_flag("--random-start", random_start);
            sub->parse_complete_callback([&, re, im, an] {
                have_start = re->count() || im->count() || an->count();
            });
        };
        auto add_budget = [&](CLI::App* sub) {
            sub->add_option("--t-max", cfg.t_max);
            sub->add_option("--dt", cfg.dt);
            sub->add_option("--dip-cap", cfg.dip_cap);
        };

        auto* spectrum = app.add_subcommand("spectrum", "closed-geodesic length spectrum");
        spectrum->add_option("--trace-max", cfg.trace_max);
        spectrum->add_option("--out", cfg.out_csv, "CSV output path");

        auto* lemma = app.add_subcommand("verify-lemma", "randomized P-function bound audit");
        lemma->add_option("--trials", cfg.trials);
        lemma->add_option("--t0", cfg.t0);
        lemma->add_option("--lambda-exp", cfg.lambda_exp, "lambda = exp(-lambda_exp)");
        lemma->add_option("--eta", cfg.eta);
        lemma->add_option("--m-max", cfg.m_max);
        lemma->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& v) { cfg.seed = v; }, "seed");
        lemma->add_option("--out", cfg.out_jsonl);
        lemma->add_option("--csv", cfg.out_csv);

        auto* anosov = app.add_subcommand("verify-anosov", "contraction bound audit");
        add_common(anosov);
        add_window(anosov);

        auto* bracket = app.add_subcommand("bracket", "local product structure audit");
        add_common(bracket);
        add_start(bracket);
        bracket->add_option("--samples", cfg.samples);

        auto* periodic = app.add_subcommand("periodic", "find one periodic orbit");
        add_common(periodic);
        add_window(periodic);
        add_start(periodic);
        add_budget(periodic);

        double shadow_delta = 0.0;
        auto* shadow = app.add_subcommand("shadow", "shadowing run with verification");
        add_common(shadow);
        add_start(shadow);
        add_budget(shadow);
        shadow->add_option("--t0", cfg.t0, "recurrence time hint");
        shadow->add_option("--delta", shadow_delta,
                           "recurrence threshold override (default: paper-chain delta)");

        auto* density = app.add_subcommand("density", "periodic-orbit density experiment");
        add_common(density);
        add_window(density);
        add_budget(density);

        auto* leaf = app.add_subcommand("leaf-density", "leaf density experiment");
        add_common(leaf);
        add_window(leaf);
        add_start(leaf);
        leaf->add_option("--tau-max", cfg.tau_max);

        auto* trans = app.add_subcommand("transitivity", "two-ball hitting experiment");
        add_common(trans);
        add_window(trans);
        trans->add_option("--radius", cfg.radius);
        trans->add_option("--pairs", cfg.pairs);
        trans->add_option("--t-max", cfg.t_max);

        (void)seed_val;
        try {
            std::vector<std::string> reversed(rest.rbegin(), rest.rend());
            app.parse(std::move(reversed));
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) {  // --help
                std::cout << app.help();
                return 0;
            }
            std::cerr << e.what() << '\n' << app.help();
            return 1;
        }
        cfg.validate();

        if (spectrum->parsed()) return run_spectrum(cfg);
        if (lemma->parsed()) return run_verify_lemma(cfg);
        if (anosov->parsed()) return run_verify_anosov(cfg);
        if (bracket->parsed()) return run_bracket(cfg);
        if (periodic->parsed()) return run_periodic(cfg, random_start, have_start);
        if (shadow->parsed()) return run_shadow(cfg, random_start, shadow_delta);
        if (density->parsed()) return run_density(cfg);
        if (leaf->parsed()) return run_leaf_density(cfg, random_start);
        if (trans->parsed()) return run_transitivity(cfg);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const VerificationError& e) {
        std::cerr << "verification failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace modshadow
