#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwish/bdmcmc.hpp"
#include "gwish/graph.hpp"
#include "gwish/rng.hpp"
#include "gwish/sampler.hpp"

namespace gwish {

// Synthetic dataset: a precision matrix drawn from W_G(delta, I) and n
// rows of N(0, K^-1) data.
struct Dataset {
    Graph truth;
    Eigen::MatrixXd K;
    Eigen::MatrixXd X;  // n x p
};

inline Dataset simulate_dataset(const Graph& g, double delta, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate_dataset: n must be >= 1");
    int p = g.vertex_count();
    RngStream rng(derive_seed(seed, 0x51D0));
    Eigen::MatrixXd K = sample_gwishart(g, delta, Eigen::MatrixXd::Identity(p, p), rng);
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw std::runtime_error("simulate_dataset: draw not positive definite");
    Eigen::MatrixXd L = llt.matrixL();
    // x = L^-T z has covariance K^-1
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd z(p);
    for (std::int64_t r = 0; r < n; ++r) {
        for (int c = 0; c < p; ++c) z(c) = rng.normal();
        X.row(r) = L.triangularView<Eigen::Lower>().transpose().solve(z).transpose();
    }
    return Dataset{g, std::move(K), std::move(X)};
}

// ----------------------------------------------------------------- metrics

struct ConfusionMetrics {
    std::int64_t tp = 0, tn = 0, fp = 0, fn = 0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double mcc = 0.0;
};

// Edge-recovery metrics of an estimated graph against the truth.  An edge
// is the positive class.  MCC is 0 whenever any factor of its denominator
// vanishes; empty positive/negative classes make the corresponding rate
// vacuously 1.
inline ConfusionMetrics metrics(const Graph& truth, const Graph& estimate) {
    if (truth.vertex_count() != estimate.vertex_count())
        throw std::invalid_argument("metrics: vertex count mismatch");
    ConfusionMetrics m;
    int p = truth.vertex_count();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            bool t = truth.has_edge(i, j), e = estimate.has_edge(i, j);
            if (t && e) ++m.tp;
            else if (t && !e) ++m.fn;
            else if (!t && e) ++m.fp;
            else ++m.tn;
        }
    m.sensitivity = (m.tp + m.fn > 0) ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 1.0;
    m.specificity = (m.tn + m.fp > 0) ? static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp) : 1.0;
    double d1 = static_cast<double>(m.tp + m.fp), d2 = static_cast<double>(m.tp + m.fn);
    double d3 = static_cast<double>(m.tn + m.fp), d4 = static_cast<double>(m.tn + m.fn);
    if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0 || d4 == 0.0) {
        m.mcc = 0.0;
    } else {
        m.mcc = (static_cast<double>(m.tp) * static_cast<double>(m.tn)
                 - static_cast<double>(m.fp) * static_cast<double>(m.fn))
                / std::sqrt(d1 * d2 * d3 * d4);
    }
    return m;
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // starts at (0,0), ends at (1,1)
    double auc = 0.0;
};

// ROC of the edge-probability matrix against the true graph: the threshold
// sweeps the distinct probabilities from high to low (prob >= t declares an
// edge), and the AUC is the trapezoidal area.
inline RocCurve roc(const Eigen::MatrixXd& edge_prob, const Graph& truth) {
    int p = truth.vertex_count();
    if (edge_prob.rows() != p || edge_prob.cols() != p)
        throw std::invalid_argument("roc: dimension mismatch");
    std::vector<std::pair<double, bool>> scored;  // (probability, is true edge)
    std::int64_t n_pos = 0, n_neg = 0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            bool t = truth.has_edge(i, j);
            scored.push_back({edge_prob(i, j), t});
            (t ? n_pos : n_neg) += 1;
        }
    if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("roc: need both edge classes in the truth");

    std::vector<double> thresholds;
    for (auto& [s, t] : scored) thresholds.push_back(s);
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    for (double t : thresholds) {
        std::int64_t tp = 0, fp = 0;
        for (auto& [s, is_true] : scored)
            if (s >= t) (is_true ? tp : fp) += 1;
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    if (curve.points.back().fpr != 1.0 || curve.points.back().tpr != 1.0)
        curve.points.push_back({1.0, 1.0});
    double auc = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k)
        auc += 0.5 * (curve.points[k].fpr - curve.points[k - 1].fpr)
               * (curve.points[k].tpr + curve.points[k - 1].tpr);
    curve.auc = auc;
    return curve;
}

// -------------------------------------------------------------- experiments

struct ExperimentConfig {
    std::string kind = "random_p";  // graph family, see generate()
    int p = 10;
    std::int64_t n = 100;
    double delta = 3.0;
    std::int64_t iterations = 10000;
    std::int64_t burn_in = 5000;
    RatioProviderConfig provider{};
    int replications = 1;
    std::uint64_t seed = 0;
    double threshold = 0.5;
};

struct ExperimentReport {
    std::string kind;
    int p = 0;
    std::int64_t n = 0;
    std::string provider;
    int replication = 0;
    ConfusionMetrics recovery{};
    double auc = 0.0;
    double seconds_per_1k_iters = 0.0;
};

inline std::string provider_name(RatioMode mode) {
    switch (mode) {
        case RatioMode::approximation: return "approximation";
        case RatioMode::mc: return "mc_ratio";
        case RatioMode::exact_decomposable: return "exact_decomposable";
    }
    return "unknown";
}

// One synthetic-recovery experiment per replication: generate a graph,
// simulate data, run the chain, score the selected graph and the
// edge-probability ranking.  Each replication owns seeds derived from its
// index, so reports do not depend on scheduling.
inline std::vector<ExperimentReport> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.replications < 1) throw std::invalid_argument("run_experiment: replications must be >= 1");
    std::vector<ExperimentReport> reports;
    reports.reserve(static_cast<std::size_t>(cfg.replications));
    for (int rep = 0; rep < cfg.replications; ++rep) {
        Graph truth = generate(cfg.kind, cfg.p, derive_seed(cfg.seed, 3 * static_cast<std::uint64_t>(rep)));
        Dataset ds = simulate_dataset(truth, cfg.delta, cfg.n,
                                      derive_seed(cfg.seed, 3 * static_cast<std::uint64_t>(rep) + 1));
        BdmcmcConfig bcfg;
        bcfg.delta = cfg.delta;
        bcfg.iterations = cfg.iterations;
        bcfg.burn_in = cfg.burn_in;
        bcfg.provider = cfg.provider;
        bcfg.seed = derive_seed(cfg.seed, 3 * static_cast<std::uint64_t>(rep) + 2);

        auto t0 = std::chrono::steady_clock::now();
        Trace trace = run_bdmcmc(ds.X, bcfg);
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();

        Eigen::MatrixXd prob = edge_posteriors(trace);
        Graph selected = select_graph(prob, cfg.threshold);

        ExperimentReport rep_out;
        rep_out.kind = cfg.kind;
        rep_out.p = cfg.p;
        rep_out.n = cfg.n;
        rep_out.provider = provider_name(cfg.provider.mode);
        rep_out.replication = rep;
        rep_out.recovery = metrics(truth, selected);
        rep_out.auc = roc(prob, truth).auc;
        rep_out.seconds_per_1k_iters = secs * 1000.0 / static_cast<double>(cfg.iterations);
        reports.push_back(std::move(rep_out));
    }
    return reports;
}

}  // namespace gwish
