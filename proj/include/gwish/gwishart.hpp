#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gwish/common.hpp"
#include "gwish/graph.hpp"
#include "gwish/rng.hpp"
#include "gwish/special.hpp"

namespace gwish {

inline constexpr double kLog2 = 0.69314718055994530942;
inline constexpr double kLog2Pi = 1.8378770664093454836;
inline constexpr double kLogSqrtPi = 0.57236494292470008707;

// Parameters of the G-Wishart law W_G(delta, D): shape delta > 2 and a
// symmetric positive-definite scale matrix D.
struct GWishartParams {
    double delta;
    Eigen::MatrixXd scale;

    GWishartParams(double delta_, Eigen::MatrixXd scale_) : delta(delta_), scale(std::move(scale_)) {
        if (!(delta > 2.0)) throw std::domain_error("GWishartParams: delta must exceed 2");
        if (scale.rows() != scale.cols()) throw std::invalid_argument("GWishartParams: scale must be square");
        if (!scale.isApprox(scale.transpose(), 1e-12))
            throw std::invalid_argument("GWishartParams: scale must be symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(scale);
        if (llt.info() != Eigen::Success)
            throw std::domain_error("GWishartParams: scale must be positive definite");
    }
    static GWishartParams identity(double delta_, int p) {
        return GWishartParams(delta_, Eigen::MatrixXd::Identity(p, p));
    }
};

// Monte Carlo (or exact) estimate of a log normalizing constant, or of a
// log ratio of two of them.  std_error lives on the log scale.
struct NormEstimate {
    double log_value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

// log of |K|^((delta-2)/2) * exp(-<K, D>/2); the pattern indicator is the
// caller's concern.
inline double log_unnormalized_density(const Eigen::MatrixXd& K, const GWishartParams& params) {
    if (K.rows() != K.cols()) throw std::invalid_argument("log_unnormalized_density: K must be square");
    if (K.rows() != params.scale.rows())
        throw std::invalid_argument("log_unnormalized_density: dimension mismatch with scale");
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("log_unnormalized_density: K must be positive definite");
    double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double trace_kd = K.cwiseProduct(params.scale).sum();
    return 0.5 * (params.delta - 2.0) * log_det - 0.5 * trace_kd;
}

namespace detail {

inline std::vector<int> identity_order(int p) {
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    return order;
}

inline void check_order(const std::vector<int>& order, int p) {
    if (static_cast<int>(order.size()) != p) throw std::invalid_argument("order: wrong length");
    std::vector<char> seen(static_cast<std::size_t>(p), 0);
    for (int v : order) {
        if (v < 0 || v >= p || seen[static_cast<std::size_t>(v)])
            throw std::invalid_argument("order: not a permutation");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

// Vertex-order-indexed view of a graph: free (edge) and missing upper
// positions plus the higher-neighbor counts nu.
struct OrderedPattern {
    int p = 0;
    std::vector<Edge> free_positions;     // position-space, i < j
    std::vector<Edge> missing_positions;  // position-space, i < j, lexicographic
    std::vector<int> nu;                  // nu[i] = #{j > i : (i,j) free}
};

inline OrderedPattern ordered_pattern(const Graph& g, const std::vector<int>& order) {
    OrderedPattern pat;
    pat.p = g.vertex_count();
    std::vector<int> pos(static_cast<std::size_t>(pat.p));
    for (int k = 0; k < pat.p; ++k) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
    std::vector<char> adj(static_cast<std::size_t>(pat.p) * static_cast<std::size_t>(pat.p), 0);
    for (auto [a, b] : g.edges()) {
        int i = pos[static_cast<std::size_t>(a)], j = pos[static_cast<std::size_t>(b)];
        if (i > j) std::swap(i, j);
        adj[static_cast<std::size_t>(i) * static_cast<std::size_t>(pat.p) + static_cast<std::size_t>(j)] = 1;
    }
    pat.nu.assign(static_cast<std::size_t>(pat.p), 0);
    for (int i = 0; i < pat.p; ++i)
        for (int j = i + 1; j < pat.p; ++j) {
            if (adj[static_cast<std::size_t>(i) * static_cast<std::size_t>(pat.p) + static_cast<std::size_t>(j)]) {
                pat.free_positions.push_back({i, j});
                pat.nu[static_cast<std::size_t>(i)] += 1;
            } else {
                pat.missing_positions.push_back({i, j});
            }
        }
    return pat;
}

// Completion of the non-free upper entries of psi, in increasing row then
// column order: psi_ij = -(sum_{r<i} psi_ri psi_rj) / psi_ii.  Row-0 missing
// entries are zero (empty sum).
inline void complete_psi(Eigen::MatrixXd& psi, const std::vector<Edge>& missing_positions) {
    for (auto [i, j] : missing_positions) {
        double s = (i == 0) ? 0.0 : psi.col(i).head(i).dot(psi.col(j).head(i));
        psi(i, j) = -s / psi(i, i);
    }
}

}  // namespace detail

// nu[i] = number of neighbors of order[i] appearing later in the order.
inline std::vector<int> nu_counts(const Graph& g, const std::vector<int>& order) {
    detail::check_order(order, g.vertex_count());
    return detail::ordered_pattern(g, order).nu;
}

// Closed-form factor of the normalizing constant:
// sum_i [ ((delta+nu_i)/2) log 2 + (nu_i/2) log 2pi + log Gamma((delta+nu_i)/2) ].
inline double log_norm_constant_term(const Graph& g, double delta, const std::vector<int>& order) {
    if (!(delta > 2.0)) throw std::domain_error("log_norm_constant_term: delta must exceed 2");
    auto nu = nu_counts(g, order);
    double s = 0.0;
    for (int v : nu)
        s += 0.5 * (delta + v) * kLog2 + 0.5 * v * kLog2Pi + special::log_gamma(0.5 * (delta + v));
    return s;
}

// Upper Cholesky frame of a G-Wishart draw: free entries as supplied, the
// rest filled by the completion recurrence.
struct CholeskyFrame {
    std::vector<int> order;
    std::vector<int> nu;
    Eigen::MatrixXd psi;
};

// free_entries maps original-vertex positions to values: one key (v,v) > 0
// per vertex and one key per edge of g (either endpoint order).  Exactly
// those keys must be present.
inline CholeskyFrame cholesky_completion(const std::map<Edge, double>& free_entries, const Graph& g,
                                         std::vector<int> order = {}) {
    int p = g.vertex_count();
    if (order.empty()) order = detail::identity_order(p);
    detail::check_order(order, p);
    auto pat = detail::ordered_pattern(g, order);

    std::vector<int> pos(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;

    std::size_t expected = static_cast<std::size_t>(p) + g.edges().size();
    if (free_entries.size() != expected)
        throw std::invalid_argument("cholesky_completion: free entries must cover exactly the diagonal and edges");

    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(p, p);
    std::vector<char> got_diag(static_cast<std::size_t>(p), 0);
    std::vector<std::vector<char>> got_edge(static_cast<std::size_t>(p), std::vector<char>(static_cast<std::size_t>(p), 0));
    for (auto& [key, val] : free_entries) {
        auto [a, b] = key;
        if (a < 0 || b < 0 || a >= p || b >= p)
            throw std::out_of_range("cholesky_completion: free entry out of range");
        if (a == b) {
            if (!(val > 0.0)) throw std::domain_error("cholesky_completion: diagonal entries must be positive");
            psi(pos[static_cast<std::size_t>(a)], pos[static_cast<std::size_t>(a)]) = val;
            got_diag[static_cast<std::size_t>(a)] = 1;
        } else {
            if (!g.has_edge(a, b))
                throw std::invalid_argument("cholesky_completion: free entry given for a missing edge");
            int i = pos[static_cast<std::size_t>(a)], j = pos[static_cast<std::size_t>(b)];
            if (i > j) std::swap(i, j);
            psi(i, j) = val;
            got_edge[static_cast<std::size_t>(std::min(a, b))][static_cast<std::size_t>(std::max(a, b))] = 1;
        }
    }
    for (int v = 0; v < p; ++v)
        if (!got_diag[static_cast<std::size_t>(v)])
            throw std::invalid_argument("cholesky_completion: missing diagonal free entry");
    for (auto [a, b] : g.edges())
        if (!got_edge[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])
            throw std::invalid_argument("cholesky_completion: missing free entry for an edge");

    detail::complete_psi(psi, pat.missing_positions);
    return CholeskyFrame{std::move(order), std::move(pat.nu), std::move(psi)};
}

// Monte Carlo estimate of log I_G(delta, I_p).  Free psi entries are drawn
// (diagonal: sqrt of chi-square with delta+nu_i dof; edges: standard
// normal), missing entries completed, and the average of
// exp(-sum of squared completed entries / 2) corrects the closed-form
// factor.  Sampling is split into 64 fixed blocks with seeds derived per
// block, so the estimate is bit-identical for any thread count.
inline NormEstimate mc_log_norm(const Graph& g, double delta, std::int64_t n_samples,
                                std::uint64_t seed, int n_threads = 1,
                                std::vector<int> order = {}) {
    if (!(delta > 2.0)) throw std::domain_error("mc_log_norm: delta must exceed 2");
    if (n_samples < 1) throw std::invalid_argument("mc_log_norm: n_samples must be >= 1");
    int p = g.vertex_count();
    if (order.empty()) order = detail::identity_order(p);
    detail::check_order(order, p);
    auto pat = detail::ordered_pattern(g, order);

    double log_const = 0.0;
    std::vector<double> dof(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        int v = pat.nu[static_cast<std::size_t>(i)];
        dof[static_cast<std::size_t>(i)] = delta + v;
        log_const += 0.5 * (delta + v) * kLog2 + 0.5 * v * kLog2Pi + special::log_gamma(0.5 * (delta + v));
    }

    constexpr int kBlocks = 64;
    std::vector<double> block_sum(kBlocks, 0.0), block_sumsq(kBlocks, 0.0);

    run_blocks(n_samples, kBlocks, n_threads, [&](int b, std::int64_t count) {
        if (count == 0) return;
        RngStream rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(p, p);
        KahanSum fs, fs2;
        for (std::int64_t t = 0; t < count; ++t) {
            for (int i = 0; i < p; ++i) psi(i, i) = std::sqrt(rng.chi_square(dof[static_cast<std::size_t>(i)]));
            for (auto [i, j] : pat.free_positions) psi(i, j) = rng.normal();
            detail::complete_psi(psi, pat.missing_positions);
            double ss = 0.0;
            for (auto [i, j] : pat.missing_positions) ss += psi(i, j) * psi(i, j);
            double f = std::exp(-0.5 * ss);
            fs.add(f);
            fs2.add(f * f);
        }
        block_sum[static_cast<std::size_t>(b)] = fs.value();
        block_sumsq[static_cast<std::size_t>(b)] = fs2.value();
    });

    KahanSum total, total_sq;
    for (int b = 0; b < kBlocks; ++b) {
        total.add(block_sum[static_cast<std::size_t>(b)]);
        total_sq.add(block_sumsq[static_cast<std::size_t>(b)]);
    }
    double nd = static_cast<double>(n_samples);
    double mean = total.value() / nd;
    double var = 0.0;
    if (n_samples > 1) var = std::max(0.0, (total_sq.value() - nd * mean * mean) / (nd - 1.0));
    double se_log = std::sqrt(var / nd) / mean;  // delta method on log(mean)
    return NormEstimate{log_const + std::log(mean), se_log, n_samples};
}

// Exact log I_G(delta, I_p) for a decomposable graph: clique factors over
// separator factors from a perfect clique sequence, per connected component.
inline double exact_log_norm_decomposable(const Graph& g, double delta) {
    if (!(delta > 2.0)) throw std::domain_error("exact_log_norm_decomposable: delta must exceed 2");
    auto seq = perfect_sequence_by_component(g);
    if (!seq) throw std::domain_error("exact_log_norm_decomposable: graph is not decomposable");
    auto log_clique = [delta](int m) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
            s += 0.5 * (delta + k) * kLog2 + 0.5 * k * kLog2Pi + special::log_gamma(0.5 * (delta + k));
        return s;
    };
    double total = 0.0;
    for (const auto& c : seq->components) total += log_clique(static_cast<int>(c.size()));
    for (const auto& s : seq->separators) total -= log_clique(static_cast<int>(s.size()));
    return total;
}

// Closed-form approximation to the ratio I_{G minus e} / I_G when the
// endpoints of e have d common neighbors:
// (1 / (2 sqrt(pi))) * Gamma((delta+d)/2) / Gamma((delta+d+1)/2).
inline double ratio_approx(double delta, int d) {
    if (!(delta > 2.0)) throw std::domain_error("ratio_approx: delta must exceed 2");
    if (d < 0) throw std::invalid_argument("ratio_approx: d must be >= 0");
    return std::exp(-kLog2 - kLogSqrtPi + special::log_gamma(0.5 * (delta + d))
                    - special::log_gamma(0.5 * (delta + d + 1.0)));
}

// Upper bound on the relative error of ratio_approx, computed from the
// path profile of the missing edge.  truncated mirrors the profile flag:
// a truncated profile can only under-count paths, so the bound is then a
// lower estimate of the true bound.
struct ErrorBound {
    double value = 0.0;
    bool truncated = false;
};

inline ErrorBound error_bound(double delta, const PathProfile& profile) {
    if (!(delta > 2.0)) throw std::domain_error("error_bound: delta must exceed 2");
    if (profile.long_lengths.empty()) return ErrorBound{0.0, profile.truncated};
    double r_delta = special::big_r(delta);
    double sum_pow = 0.0;
    for (int ell : profile.long_lengths) {
        if (ell < 2) throw std::invalid_argument("error_bound: long path lengths must be >= 2");
        sum_pow += std::pow(r_delta, ell);
    }
    double prefactor = 2.0 / (3.14159265358979323846 * special::little_r(delta)) * delta / (delta + 2.0);
    double value = prefactor * sum_pow * special::big_r(delta + profile.d - 1.0);
    return ErrorBound{value, profile.truncated};
}

// Monte Carlo estimate of the exact relative gap
//   1 - E exp(-(D + psi_e^2)/2) / E exp(-(D + A^2)/2)
// for a missing edge whose profile has d short paths and the given long
// path lengths.  Common random numbers drive numerator and denominator;
// the standard error comes from 20 equal batches (batch = seed block, so
// the estimate is thread-count invariant).
struct GapEstimate {
    double gap = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
};

inline GapEstimate theorem_gap_mc(double delta, int d, const std::vector<int>& long_lengths,
                                  std::int64_t n_samples, std::uint64_t seed, int n_threads = 1) {
    if (!(delta > 2.0)) throw std::domain_error("theorem_gap_mc: delta must exceed 2");
    if (d < 0) throw std::invalid_argument("theorem_gap_mc: d must be >= 0");
    for (int ell : long_lengths)
        if (ell < 2) throw std::invalid_argument("theorem_gap_mc: long path lengths must be >= 2");
    if (long_lengths.empty()) return GapEstimate{0.0, 0.0, n_samples};
    if (n_samples < 20) throw std::invalid_argument("theorem_gap_mc: need at least 20 samples");

    constexpr int kBatches = 20;
    std::vector<double> num(kBatches, 0.0), den(kBatches, 0.0);

    run_blocks(n_samples, kBatches, n_threads, [&](int b, std::int64_t count) {
        RngStream rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        KahanSum ns, ds;
        for (std::int64_t t = 0; t < count; ++t) {
            double q = rng.chi_square(delta);
            double a1 = 0.0;
            for (int i = 0; i < d; ++i) a1 += rng.normal() * rng.normal();
            double d_sum = 0.0, b1 = 0.0;
            for (int ell : long_lengths) {
                double nq = rng.normal();
                double np = rng.normal();
                double prod = 1.0, s = 0.0;
                for (int j = 1; j < ell; ++j) {
                    double x = rng.normal() / std::sqrt(rng.chi_square(delta + 1.0));
                    prod *= x;
                    s += prod * prod;
                }
                d_sum += nq * nq * s;
                double sign = (ell % 2 == 0) ? 1.0 : -1.0;  // (-1)^ell
                b1 += sign * nq * np * prod;
            }
            double sq = std::sqrt(q);
            double a = a1 / sq;
            double psi_e = -a + b1 / sq;
            ns.add(std::exp(-0.5 * (d_sum + psi_e * psi_e)));
            ds.add(std::exp(-0.5 * (d_sum + a * a)));
        }
        num[static_cast<std::size_t>(b)] = ns.value();
        den[static_cast<std::size_t>(b)] = ds.value();
    });

    KahanSum tn, td;
    for (int b = 0; b < kBatches; ++b) {
        tn.add(num[static_cast<std::size_t>(b)]);
        td.add(den[static_cast<std::size_t>(b)]);
    }
    double gap = 1.0 - tn.value() / td.value();
    double mean_b = 0.0;
    std::vector<double> batch_gap(kBatches);
    for (int b = 0; b < kBatches; ++b) {
        batch_gap[static_cast<std::size_t>(b)] = 1.0 - num[static_cast<std::size_t>(b)] / den[static_cast<std::size_t>(b)];
        mean_b += batch_gap[static_cast<std::size_t>(b)];
    }
    mean_b /= kBatches;
    double v = 0.0;
    for (double gb : batch_gap) v += (gb - mean_b) * (gb - mean_b);
    v /= (kBatches - 1);
    return GapEstimate{gap, std::sqrt(v / kBatches), n_samples};
}

// Monte Carlo estimate of log(I_{G minus e} / I_G) from two independent
// estimates that share nothing but the master seed.
inline NormEstimate mc_ratio(const Graph& g, Edge e, double delta, std::int64_t n_samples,
                             std::uint64_t seed, int n_threads = 1) {
    if (!g.has_edge(e.first, e.second)) throw std::invalid_argument("mc_ratio: edge is absent");
    Graph g_minus = g.without_edge(e.first, e.second);
    NormEstimate top = mc_log_norm(g_minus, delta, n_samples, derive_seed(seed, 1), n_threads);
    NormEstimate bottom = mc_log_norm(g, delta, n_samples, derive_seed(seed, 2), n_threads);
    return NormEstimate{top.log_value - bottom.log_value,
                        std::hypot(top.std_error, bottom.std_error), n_samples};
}

}  // namespace gwish
