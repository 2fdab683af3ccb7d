#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gwish/graph.hpp"
#include "gwish/gwishart.hpp"
#include "gwish/rng.hpp"
#include "gwish/sampler.hpp"

namespace gwish {

namespace detail {

// log of the per-edge factor H(K, D*, e), e = (i,j):
//   H = sqrt(D*_jj / (2 pi a11)) *
//       exp(-( <D*_ee, K0 - K1> - (D*_ii - D*_ij^2 / D*_jj) a11 ) / 2)
// where K1 is the 2x2 completion of the e-block from K over V\e,
// K0 = diag(k_ii, completion of k_jj from row j over V\j), and
// a11 = k_ii - K1_11 > 0 (a Schur complement of a positive-definite K).
//
// With zero_kij set, row j's (i,j) entry is treated as 0 in K0.  The value
// is then the conditional Bayes factor for the edge given the entries K
// shares with its post-death completion (k_ij and the freed k_jj direction
// integrated out), which is the form the jump rates need.
inline double log_h_factor(const Eigen::MatrixXd& K, const Eigen::MatrixXd& d_star, int i, int j,
                           bool zero_kij) {
    int p = static_cast<int>(K.rows());
    if (d_star.rows() != p || d_star.cols() != p)
        throw std::invalid_argument("h_factor: dimension mismatch");
    if (i < 0 || j < 0 || i >= p || j >= p || i == j)
        throw std::invalid_argument("h_factor: bad edge");

    double dii = d_star(i, i), djj = d_star(j, j), dij = d_star(i, j);

    // K1 = K_{e, V\e} (K_{V\e,V\e})^-1 K_{V\e, e}
    Eigen::Matrix2d K1 = Eigen::Matrix2d::Zero();
    if (p > 2) {
        Eigen::MatrixXd rest(p - 2, p - 2);
        Eigen::MatrixXd cross(p - 2, 2);
        std::vector<int> rest_idx;
        rest_idx.reserve(static_cast<std::size_t>(p - 2));
        for (int v = 0; v < p; ++v)
            if (v != i && v != j) rest_idx.push_back(v);
        for (int r = 0; r < p - 2; ++r) {
            cross(r, 0) = K(rest_idx[static_cast<std::size_t>(r)], i);
            cross(r, 1) = K(rest_idx[static_cast<std::size_t>(r)], j);
            for (int c = 0; c < p - 2; ++c)
                rest(r, c) = K(rest_idx[static_cast<std::size_t>(r)], rest_idx[static_cast<std::size_t>(c)]);
        }
        Eigen::LLT<Eigen::MatrixXd> llt(rest);
        if (llt.info() != Eigen::Success)
            throw std::domain_error("h_factor: singular submatrix over V minus e");
        K1 = cross.transpose() * llt.solve(cross);
    }

    double a11 = K(i, i) - K1(0, 0);
    if (!(a11 > 0.0)) throw std::domain_error("h_factor: nonpositive partial variance a11");

    // K0_22: completion of k_jj from row j over V\j (optionally with the
    // (i,j) entry zeroed)
    double k022 = 0.0;
    {
        Eigen::MatrixXd sub(p - 1, p - 1);
        Eigen::VectorXd r(p - 1);
        std::vector<int> idx;
        idx.reserve(static_cast<std::size_t>(p - 1));
        for (int v = 0; v < p; ++v)
            if (v != j) idx.push_back(v);
        for (int a2 = 0; a2 < p - 1; ++a2) {
            int va = idx[static_cast<std::size_t>(a2)];
            r(a2) = (va == i && zero_kij) ? 0.0 : K(va, j);
            for (int b2 = 0; b2 < p - 1; ++b2) sub(a2, b2) = K(va, idx[static_cast<std::size_t>(b2)]);
        }
        Eigen::LLT<Eigen::MatrixXd> llt(sub);
        if (llt.info() != Eigen::Success)
            throw std::domain_error("h_factor: singular submatrix over V minus j");
        k022 = r.dot(llt.solve(r));
    }

    double inner = dii * (K(i, i) - K1(0, 0)) + djj * (k022 - K1(1, 1)) + 2.0 * dij * (0.0 - K1(0, 1));
    double corr = (dii - dij * dij / djj) * a11;
    return 0.5 * (std::log(djj) - kLog2Pi - std::log(a11)) - 0.5 * (inner - corr);
}

}  // namespace detail

// H(K, D*, e) exactly as displayed, evaluated at the K given (the (i,j)
// entry participates).  e is canonicalized to i < j.
inline double h_factor(const Eigen::MatrixXd& K, const Eigen::MatrixXd& d_star, Edge e) {
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw std::domain_error("h_factor: K is not positive definite");
    int i = std::min(e.first, e.second), j = std::max(e.first, e.second);
    return std::exp(detail::log_h_factor(K, d_star, i, j, /*zero_kij=*/false));
}

// ------------------------------------------------------------- providers

// Where the prior normalizing-constant ratio in the jump rates comes from.
enum class RatioMode { approximation, mc, exact_decomposable };

struct RatioProviderConfig {
    RatioMode mode = RatioMode::approximation;
    std::int64_t mc_samples = 2000;  // per-graph sample count in mc mode
    std::uint64_t seed = 0;          // master seed for mc estimates
    int n_threads = 1;

    void validate() const {
        if (mode == RatioMode::mc && mc_samples < 100)
            throw std::invalid_argument("RatioProviderConfig: mc_samples must be >= 100");
    }
};

// Supplies log(I_G / I_{G minus e}) at the prior shape for any graph/edge
// pair the chain asks about.
//   approximation      : -log ratio_approx(delta, d), d = common neighbors
//   mc                 : difference of Monte Carlo log-norm estimates,
//                        cached per graph fingerprint (seed derived from
//                        the fingerprint, so values are reproducible and
//                        independent of visit order)
//   exact_decomposable : clique/separator closed form; falls back to the
//                        approximation when either graph is not
//                        decomposable, where no closed form exists
class RatioProvider {
  public:
    RatioProvider(double delta, RatioProviderConfig cfg) : delta_(delta), cfg_(cfg) {
        if (!(delta > 2.0)) throw std::domain_error("RatioProvider: delta must exceed 2");
        cfg_.validate();
    }

    const RatioProviderConfig& config() const { return cfg_; }

    // e must be an edge of g_with_e.
    double log_ratio(const Graph& g_with_e, Edge e) {
        if (!g_with_e.has_edge(e.first, e.second))
            throw std::invalid_argument("RatioProvider: edge is absent from the graph");
        switch (cfg_.mode) {
            case RatioMode::approximation:
                return log_ratio_approximation(g_with_e, e);
            case RatioMode::exact_decomposable: {
                Graph minus = g_with_e.without_edge(e.first, e.second);
                auto full = try_exact(g_with_e);
                auto part = try_exact(minus);
                if (full && part) return *full - *part;
                return log_ratio_approximation(g_with_e, e);
            }
            case RatioMode::mc: {
                Graph minus = g_with_e.without_edge(e.first, e.second);
                return cached_mc_log_norm(g_with_e) - cached_mc_log_norm(minus);
            }
        }
        throw std::logic_error("RatioProvider: unknown mode");
    }

  private:
    double log_ratio_approximation(const Graph& g_with_e, Edge e) const {
        int d = g_with_e.common_neighbor_count(e.first, e.second);
        return -std::log(ratio_approx(delta_, d));
    }
    std::optional<double> try_exact(const Graph& g) const {
        if (!perfect_sequence_by_component(g)) return std::nullopt;
        return exact_log_norm_decomposable(g, delta_);
    }
    double cached_mc_log_norm(const Graph& g) {
        std::uint64_t key = g.fingerprint();
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        NormEstimate est = mc_log_norm(g, delta_, cfg_.mc_samples, derive_seed(cfg_.seed, key),
                                       cfg_.n_threads);
        cache_.emplace(key, est.log_value);
        return est.log_value;
    }

    double delta_;
    RatioProviderConfig cfg_;
    std::unordered_map<std::uint64_t, double> cache_;
};

// ------------------------------------------------------------- jump rates

// Death rate of a present edge: min{ (I_G / I_{G-e}) * H, 1 } with H the
// conditional-Bayes-factor form (edge entry zeroed; see log_h_factor).
inline double death_rate(const Graph& g, const Eigen::MatrixXd& K, const Eigen::MatrixXd& d_star,
                         RatioProvider& provider, Edge e) {
    if (!g.has_edge(e.first, e.second)) throw std::invalid_argument("death_rate: edge is absent");
    int i = std::min(e.first, e.second), j = std::max(e.first, e.second);
    double log_rate = provider.log_ratio(g, e) + detail::log_h_factor(K, d_star, i, j, true);
    return std::exp(std::min(0.0, log_rate));
}

// Birth rate of an absent edge: the mirrored form
// min{ (I_{G+e} / I_G)^-1 * H^-1, 1 }, evaluated at the current K (whose
// (i,j) entry is zero by the pattern constraint).
inline double birth_rate(const Graph& g, const Eigen::MatrixXd& K, const Eigen::MatrixXd& d_star,
                         RatioProvider& provider, Edge e) {
    if (g.has_edge(e.first, e.second)) throw std::invalid_argument("birth_rate: edge is present");
    int i = std::min(e.first, e.second), j = std::max(e.first, e.second);
    Graph plus = g.with_edge(e.first, e.second);
    double log_rate = -provider.log_ratio(plus, {i, j}) - detail::log_h_factor(K, d_star, i, j, true);
    return std::exp(std::min(0.0, log_rate));
}

// --------------------------------------------------------------- the chain

struct ChainState {
    Graph g;
    Eigen::MatrixXd K;
};

struct BdmcmcConfig {
    double delta = 3.0;
    std::int64_t iterations = 10000;
    std::int64_t burn_in = 5000;
    RatioProviderConfig provider{};
    std::uint64_t seed = 0;
    bool snapshot_k = false;  // keep a copy of K per recorded state
    SamplerConfig sampler{};

    void validate() const {
        if (!(delta > 2.0)) throw std::domain_error("BdmcmcConfig: delta must exceed 2");
        if (iterations < 1) throw std::invalid_argument("BdmcmcConfig: iterations must be >= 1");
        if (burn_in < 0 || burn_in >= iterations)
            throw std::invalid_argument("BdmcmcConfig: burn_in must be in [0, iterations)");
        provider.validate();
    }
};

struct TraceRecord {
    std::vector<Edge> edges;
    double weight = 0.0;
    std::optional<Eigen::MatrixXd> K;
};

struct Trace {
    int p = 0;
    BdmcmcConfig config{};
    std::vector<TraceRecord> records;
};

// One birth-death transition.  Computes every edge's rate at the current
// state, picks the jump in proportion, flips that edge, resamples K from
// W_{G'}(delta_post, d_star), and returns the waiting weight
// W = 1 / (total rate) of the *pre-jump* state.
inline double step(ChainState& state, const Eigen::MatrixXd& d_star, double delta_post,
                   RatioProvider& provider, RngStream& rng, const SamplerConfig& scfg = {}) {
    int p = state.g.vertex_count();
    std::vector<Edge> pairs;
    pairs.reserve(static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) pairs.push_back({i, j});

    std::vector<double> rates(pairs.size());
    double total = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        rates[k] = state.g.has_edge(pairs[k].first, pairs[k].second)
                       ? death_rate(state.g, state.K, d_star, provider, pairs[k])
                       : birth_rate(state.g, state.K, d_star, provider, pairs[k]);
        total += rates[k];
    }
    if (!(total > 0.0)) throw std::runtime_error("step: total jump rate is not positive");

    double u = rng.uniform() * total;
    std::size_t chosen = pairs.size() - 1;
    double cum = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        cum += rates[k];
        if (u <= cum) {
            chosen = k;
            break;
        }
    }
    Edge e = pairs[chosen];
    state.g = state.g.has_edge(e.first, e.second) ? state.g.without_edge(e.first, e.second)
                                                  : state.g.with_edge(e.first, e.second);
    state.K = sample_gwishart(state.g, delta_post, d_star, rng, scfg);
    return 1.0 / total;
}

// Full run on data X (n rows, p columns): D* = I + X'X, posterior shape
// delta + n, graph started empty with K drawn from the prior.  Records the
// visited graph and waiting weight for every post-burn-in iteration.
inline Trace run_bdmcmc(const Eigen::MatrixXd& X, const BdmcmcConfig& cfg) {
    cfg.validate();
    int p = static_cast<int>(X.cols());
    std::int64_t n = X.rows();
    if (p < 2) throw std::invalid_argument("run_bdmcmc: need at least 2 variables");
    if (n < 1) throw std::invalid_argument("run_bdmcmc: need at least 1 observation");

    Eigen::MatrixXd d_star = Eigen::MatrixXd::Identity(p, p) + X.transpose() * X;
    double delta_post = cfg.delta + static_cast<double>(n);

    RatioProviderConfig pcfg = cfg.provider;
    pcfg.seed = derive_seed(cfg.seed, 0xBD01);
    RatioProvider provider(cfg.delta, pcfg);

    RngStream rng(derive_seed(cfg.seed, 0xBD02));
    ChainState state{Graph(p), Eigen::MatrixXd()};
    state.K = sample_gwishart(state.g, cfg.delta, Eigen::MatrixXd::Identity(p, p), rng, cfg.sampler);

    Trace trace;
    trace.p = p;
    trace.config = cfg;
    trace.records.reserve(static_cast<std::size_t>(cfg.iterations - cfg.burn_in));

    for (std::int64_t t = 1; t <= cfg.iterations; ++t) {
        Graph pre = state.g;
        std::optional<Eigen::MatrixXd> preK;
        if (cfg.snapshot_k) preK = state.K;
        double w = step(state, d_star, delta_post, provider, rng, cfg.sampler);
        if (t > cfg.burn_in)
            trace.records.push_back(TraceRecord{pre.edges(), w, std::move(preK)});
    }
    return trace;
}

// --------------------------------------------------------------- summaries

// Rao-Blackwellized edge posterior probabilities: time-weighted occupancy
// of each edge across the recorded states.
inline Eigen::MatrixXd edge_posteriors(const Trace& trace) {
    if (trace.records.empty()) throw std::invalid_argument("edge_posteriors: empty trace");
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(trace.p, trace.p);
    double wsum = 0.0;
    for (const auto& rec : trace.records) {
        wsum += rec.weight;
        for (auto [i, j] : rec.edges) {
            acc(i, j) += rec.weight;
            acc(j, i) += rec.weight;
        }
    }
    if (!(wsum > 0.0)) throw std::invalid_argument("edge_posteriors: weights sum to zero");
    return acc / wsum;
}

// Median-probability model: edges with posterior probability strictly
// above the threshold.
inline Graph select_graph(const Eigen::MatrixXd& edge_prob, double threshold = 0.5) {
    if (edge_prob.rows() != edge_prob.cols()) throw std::invalid_argument("select_graph: matrix not square");
    int p = static_cast<int>(edge_prob.rows());
    std::vector<Edge> edges;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (edge_prob(i, j) > threshold) edges.push_back({i, j});
    return Graph(p, std::move(edges));
}

}  // namespace gwish
