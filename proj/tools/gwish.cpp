// gwish: command-line driver for G-Wishart structure learning.
//
// Subcommands: gen-graph, gen-data, const, ratio, bdmcmc, evaluate,
// table1, bench.  Exit codes: 0 success, 2 usage error, 1 runtime failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwish.hpp"

namespace {

using gwish::io::json;

struct CommonState {
    std::vector<std::string> argv;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void emit(const json& payload, const std::string& out_path, const CommonState& state,
          const std::string& subcommand, std::uint64_t seed, const json& flags) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - state.start).count();
    if (out_path.empty()) {
        std::cout << payload.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
    out << payload.dump(2) << "\n";
    gwish::io::RunManifest m{subcommand, state.argv, flags, seed, secs};
    gwish::io::write_manifest(out_path, m);
}

void write_file_manifest(const std::string& out_path, const CommonState& state,
                         const std::string& subcommand, std::uint64_t seed, const json& flags) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - state.start).count();
    gwish::io::RunManifest m{subcommand, state.argv, flags, seed, secs};
    gwish::io::write_manifest(out_path, m);
}

gwish::Edge parse_edge(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--edge", "expected i,j");
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
}

// Path-count configuration string: the digit at (1-based) position j is the
// number of chordless paths with j interior vertices between the endpoints,
// so position 1 counts the length-2 paths (d) and positions >= 2 fill
// long_lengths.
gwish::PathProfile parse_profile_config(const std::string& config) {
    if (config.empty()) throw CLI::ValidationError("--config", "must be nonempty digits");
    gwish::PathProfile profile;
    for (std::size_t k = 0; k < config.size(); ++k) {
        char c = config[k];
        if (c < '0' || c > '9') throw CLI::ValidationError("--config", "must be digits only");
        int count = c - '0';
        if (k == 0) {
            profile.d = count;
        } else {
            for (int t = 0; t < count; ++t) profile.long_lengths.push_back(static_cast<int>(k) + 1);
        }
    }
    return profile;
}

gwish::RatioMode parse_provider(const std::string& name) {
    if (name == "approximation" || name == "approx") return gwish::RatioMode::approximation;
    if (name == "mc_ratio" || name == "mc") return gwish::RatioMode::mc;
    if (name == "exact_decomposable" || name == "exact") return gwish::RatioMode::exact_decomposable;
    throw CLI::ValidationError("--provider", "unknown provider '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"G-Wishart graphical model selection toolkit"};
    app.require_subcommand(1);

    CommonState state;
    for (int i = 0; i < argc; ++i) state.argv.push_back(argv[i]);

    // ---- gen-graph
    auto* gen_graph = app.add_subcommand("gen-graph", "generate a random graph");
    std::string gg_kind = "random_p", gg_out;
    int gg_p = 10;
    std::optional<std::uint64_t> gg_seed;
    gen_graph->add_option("--kind", gg_kind, "scale_free | random_p | random_2p | cluster");
    gen_graph->add_option("--p", gg_p, "vertex count")->required();
    gen_graph->add_option("--seed", gg_seed, "RNG seed");
    gen_graph->add_option("--out", gg_out, "output graph JSON")->required();

    // ---- gen-data
    auto* gen_data = app.add_subcommand("gen-data", "simulate Gaussian data from a graph");
    std::string gd_graph, gd_out;
    double gd_delta = 3.0;
    std::int64_t gd_n = 100;
    std::optional<std::uint64_t> gd_seed;
    gen_data->add_option("--graph", gd_graph, "graph JSON")->required();
    gen_data->add_option("--delta", gd_delta, "G-Wishart shape");
    gen_data->add_option("--n", gd_n, "number of observations")->required();
    gen_data->add_option("--seed", gd_seed, "RNG seed");
    gen_data->add_option("--out", gd_out, "output data CSV")->required();

    // ---- const
    auto* cst = app.add_subcommand("const", "normalizing constant (log scale)");
    std::string c_graph, c_out;
    double c_delta = 3.0;
    std::optional<std::int64_t> c_mc;
    bool c_exact = false;
    std::optional<std::uint64_t> c_seed;
    int c_threads = 1;
    cst->add_option("--graph", c_graph, "graph JSON")->required();
    cst->add_option("--delta", c_delta, "shape parameter");
    cst->add_option("--mc", c_mc, "Monte Carlo sample count");
    cst->add_flag("--exact", c_exact, "closed form (decomposable graphs)");
    cst->add_option("--seed", c_seed, "RNG seed");
    cst->add_option("--threads", c_threads, "worker threads");
    cst->add_option("--out", c_out, "output JSON (default: stdout)");

    // ---- ratio
    auto* ratio = app.add_subcommand("ratio", "ratio of constants after removing one edge");
    std::string r_graph, r_edge, r_out;
    double r_delta = 3.0;
    bool r_approx = false;
    std::optional<std::int64_t> r_mc;
    std::optional<std::uint64_t> r_seed;
    int r_threads = 1;
    ratio->add_option("--graph", r_graph, "graph JSON")->required();
    ratio->add_option("--edge", r_edge, "edge i,j (must be present)")->required();
    ratio->add_option("--delta", r_delta, "shape parameter");
    ratio->add_flag("--approx", r_approx, "closed-form approximation");
    ratio->add_option("--mc", r_mc, "Monte Carlo sample count");
    ratio->add_option("--seed", r_seed, "RNG seed");
    ratio->add_option("--threads", r_threads, "worker threads");
    ratio->add_option("--out", r_out, "output JSON (default: stdout)");

    // ---- bdmcmc
    auto* bd = app.add_subcommand("bdmcmc", "birth-death MCMC over graph structures");
    std::string b_data, b_provider = "approximation", b_trace, b_summary;
    double b_delta = 3.0;
    std::int64_t b_iters = 10000, b_burn = 5000, b_mc_samples = 2000;
    std::optional<std::uint64_t> b_seed;
    int b_threads = 1;
    bd->add_option("--data", b_data, "data CSV (n rows, p columns)")->required();
    bd->add_option("--delta", b_delta, "prior shape");
    bd->add_option("--iters", b_iters, "total iterations")->required();
    bd->add_option("--burn-in", b_burn, "discarded iterations")->required();
    bd->add_option("--provider", b_provider, "approximation | mc_ratio | exact_decomposable");
    bd->add_option("--mc-samples", b_mc_samples, "samples per constant (mc_ratio provider)");
    bd->add_option("--seed", b_seed, "RNG seed");
    bd->add_option("--threads", b_threads, "worker threads (mc_ratio provider)");
    bd->add_option("--trace", b_trace, "output trace JSONL")->required();
    bd->add_option("--summary", b_summary, "output edge-probability JSON")->required();

    // ---- evaluate
    auto* ev = app.add_subcommand("evaluate", "score a summary against a true graph");
    std::string e_summary, e_truth, e_out;
    double e_threshold = 0.5;
    ev->add_option("--summary", e_summary, "edge-probability JSON")->required();
    ev->add_option("--truth", e_truth, "true graph JSON")->required();
    ev->add_option("--threshold", e_threshold, "selection threshold");
    ev->add_option("--out", e_out, "output metrics CSV")->required();

    // ---- table1
    auto* t1 = app.add_subcommand("table1", "error bound and exact gap for a path profile");
    std::string t_config, t_out;
    double t_delta = 3.0;
    std::int64_t t_samples = 1000000;
    std::optional<std::uint64_t> t_seed;
    int t_threads = 1;
    t1->add_option("--delta", t_delta, "shape parameter");
    t1->add_option("--config", t_config, "digit string: position j = #paths with j interior vertices")->required();
    t1->add_option("--samples", t_samples, "Monte Carlo samples for the gap");
    t1->add_option("--seed", t_seed, "RNG seed");
    t1->add_option("--threads", t_threads, "worker threads");
    t1->add_option("--out", t_out, "output JSON (default: stdout)");

    // ---- bench
    auto* bench = app.add_subcommand("bench", "timing/recovery grid over providers");
    std::vector<int> bench_p{30};
    std::vector<std::string> bench_providers{"approximation", "mc_ratio"};
    std::string bench_out, bench_kind = "random_p";
    std::int64_t bench_iters = 200, bench_burn = 100, bench_n = 100, bench_mc_samples = 2000;
    double bench_delta = 3.0;
    std::optional<std::uint64_t> bench_seed;
    bench->add_option("--p", bench_p, "vertex counts")->delimiter(',');
    bench->add_option("--providers", bench_providers, "provider list")->delimiter(',');
    bench->add_option("--kind", bench_kind, "graph family");
    bench->add_option("--iters", bench_iters, "iterations per run");
    bench->add_option("--burn-in", bench_burn, "burn-in per run");
    bench->add_option("--n", bench_n, "observations");
    bench->add_option("--mc-samples", bench_mc_samples, "samples per constant (mc_ratio)");
    bench->add_option("--delta", bench_delta, "prior shape");
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--out", bench_out, "output report CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen_graph) {
            std::uint64_t seed = resolve_seed(gg_seed);
            gwish::Graph g = gwish::generate(gg_kind, gg_p, seed);
            gwish::io::write_graph(gg_out, g);
            write_file_manifest(gg_out, state, "gen-graph", seed,
                                json{{"kind", gg_kind}, {"p", gg_p}, {"out", gg_out}});
        } else if (*gen_data) {
            std::uint64_t seed = resolve_seed(gd_seed);
            gwish::Graph g = gwish::io::read_graph(gd_graph);
            gwish::Dataset ds = gwish::simulate_dataset(g, gd_delta, gd_n, seed);
            gwish::io::write_data_csv(gd_out, ds.X);
            write_file_manifest(gd_out, state, "gen-data", seed,
                                json{{"graph", gd_graph}, {"delta", gd_delta}, {"n", gd_n}, {"out", gd_out}});
        } else if (*cst) {
            if (c_exact == bool(c_mc)) {
                std::cerr << "const: exactly one of --mc or --exact is required\n";
                return 2;
            }
            std::uint64_t seed = resolve_seed(c_seed);
            gwish::Graph g = gwish::io::read_graph(c_graph);
            gwish::NormEstimate est;
            if (c_exact) {
                est = gwish::NormEstimate{gwish::exact_log_norm_decomposable(g, c_delta), 0.0, 1};
            } else {
                est = gwish::mc_log_norm(g, c_delta, *c_mc, seed, c_threads);
            }
            json out = gwish::io::norm_estimate_to_json(est);
            out["method"] = c_exact ? "exact" : "mc";
            out["delta"] = c_delta;
            out["seed"] = seed;
            emit(out, c_out, state, "const", seed,
                 json{{"graph", c_graph}, {"delta", c_delta}, {"exact", c_exact},
                      {"mc", c_mc ? json(*c_mc) : json()}, {"threads", c_threads}});
        } else if (*ratio) {
            if (r_approx == bool(r_mc)) {
                std::cerr << "ratio: exactly one of --approx or --mc is required\n";
                return 2;
            }
            std::uint64_t seed = resolve_seed(r_seed);
            gwish::Graph g = gwish::io::read_graph(r_graph);
            gwish::Edge e = parse_edge(r_edge);
            if (!g.has_edge(e.first, e.second)) throw std::invalid_argument("ratio: edge is absent");
            gwish::Graph g_minus = g.without_edge(e.first, e.second);
            gwish::PathProfile profile = gwish::path_profile(g_minus, e.first, e.second);
            gwish::ErrorBound bound = gwish::error_bound(r_delta, profile);
            json out{{"schema_version", gwish::kSchemaVersion},
                     {"delta", r_delta},
                     {"edge", {e.first, e.second}},
                     {"d", profile.d},
                     {"long_lengths", profile.long_lengths},
                     {"bound", bound.value},
                     {"bound_truncated", bound.truncated}};
            if (r_approx) {
                double val = gwish::ratio_approx(r_delta, profile.d);
                out["method"] = "approximation";
                out["ratio"] = val;
                out["log_ratio"] = std::log(val);
            } else {
                gwish::NormEstimate est = gwish::mc_ratio(g, e, r_delta, *r_mc, seed, r_threads);
                out["method"] = "mc";
                out["log_ratio"] = est.log_value;
                out["ratio"] = std::exp(est.log_value);
                out["std_error"] = est.std_error;
                out["n_samples"] = est.n_samples;
                out["seed"] = seed;
            }
            emit(out, r_out, state, "ratio", seed,
                 json{{"graph", r_graph}, {"edge", r_edge}, {"delta", r_delta},
                      {"approx", r_approx}, {"mc", r_mc ? json(*r_mc) : json()}});
        } else if (*bd) {
            std::uint64_t seed = resolve_seed(b_seed);
            Eigen::MatrixXd X = gwish::io::read_data_csv(b_data);
            gwish::BdmcmcConfig cfg;
            cfg.delta = b_delta;
            cfg.iterations = b_iters;
            cfg.burn_in = b_burn;
            cfg.seed = seed;
            cfg.provider.mode = parse_provider(b_provider);
            cfg.provider.mc_samples = b_mc_samples;
            cfg.provider.n_threads = b_threads;
            gwish::Trace trace = gwish::run_bdmcmc(X, cfg);
            Eigen::MatrixXd prob = gwish::edge_posteriors(trace);
            gwish::io::write_trace_jsonl(b_trace, trace);
            gwish::io::write_summary(b_summary, prob);
            json flags{{"data", b_data},      {"delta", b_delta},
                       {"iters", b_iters},    {"burn_in", b_burn},
                       {"provider", b_provider}, {"mc_samples", b_mc_samples},
                       {"threads", b_threads}};
            write_file_manifest(b_trace, state, "bdmcmc", seed, flags);
            write_file_manifest(b_summary, state, "bdmcmc", seed, flags);
        } else if (*ev) {
            Eigen::MatrixXd prob = gwish::io::read_summary(e_summary);
            gwish::Graph truth = gwish::io::read_graph(e_truth);
            gwish::Graph selected = gwish::select_graph(prob, e_threshold);
            gwish::ConfusionMetrics m = gwish::metrics(truth, selected);
            double auc = gwish::roc(prob, truth).auc;
            std::ofstream out(e_out);
            if (!out) throw std::runtime_error("cannot open for writing: " + e_out);
            out << "sensitivity,specificity,mcc,auc\n";
            out.precision(10);
            out << m.sensitivity << "," << m.specificity << "," << m.mcc << "," << auc << "\n";
            write_file_manifest(e_out, state, "evaluate", 0,
                                json{{"summary", e_summary}, {"truth", e_truth}, {"threshold", e_threshold}});
        } else if (*t1) {
            std::uint64_t seed = resolve_seed(t_seed);
            gwish::PathProfile profile = parse_profile_config(t_config);
            gwish::ErrorBound bound = gwish::error_bound(t_delta, profile);
            gwish::GapEstimate gap = gwish::theorem_gap_mc(t_delta, profile.d, profile.long_lengths,
                                                           t_samples, seed, t_threads);
            double sum_pow = 0.0;
            for (int ell : profile.long_lengths) sum_pow += std::pow(gwish::special::big_r(t_delta), ell);
            json out{{"schema_version", gwish::kSchemaVersion},
                     {"config", t_config},
                     {"delta", t_delta},
                     {"d", profile.d},
                     {"long_lengths", profile.long_lengths},
                     {"big_r_delta_d_minus_1", gwish::special::big_r(t_delta + profile.d - 1.0)},
                     {"sum_r_pow", sum_pow},
                     {"bound", bound.value},
                     {"gap", gap.gap},
                     {"gap_std_error", gap.std_error},
                     {"n_samples", gap.n_samples},
                     {"seed", seed}};
            emit(out, t_out, state, "table1", seed,
                 json{{"config", t_config}, {"delta", t_delta}, {"samples", t_samples}, {"threads", t_threads}});
        } else if (*bench) {
            std::uint64_t seed = resolve_seed(bench_seed);
            std::ofstream out(bench_out);
            if (!out) throw std::runtime_error("cannot open for writing: " + bench_out);
            out << "kind,p,n,provider,sensitivity,specificity,mcc,auc,seconds_per_1k_iters\n";
            out.precision(10);
            for (int p : bench_p) {
                for (const auto& prov : bench_providers) {
                    gwish::ExperimentConfig cfg;
                    cfg.kind = bench_kind;
                    cfg.p = p;
                    cfg.n = bench_n;
                    cfg.delta = bench_delta;
                    cfg.iterations = bench_iters;
                    cfg.burn_in = bench_burn;
                    cfg.provider.mode = parse_provider(prov);
                    cfg.provider.mc_samples = bench_mc_samples;
                    cfg.replications = 1;
                    cfg.seed = seed;
                    for (const auto& rep : gwish::run_experiment(cfg)) {
                        out << rep.kind << "," << rep.p << "," << rep.n << "," << rep.provider << ","
                            << rep.recovery.sensitivity << "," << rep.recovery.specificity << ","
                            << rep.recovery.mcc << "," << rep.auc << "," << rep.seconds_per_1k_iters
                            << "\n";
                    }
                }
            }
            out.close();
            write_file_manifest(bench_out, state, "bench", seed,
                                json{{"p", bench_p}, {"providers", bench_providers},
                                     {"iters", bench_iters}, {"n", bench_n}, {"kind", bench_kind}});
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
