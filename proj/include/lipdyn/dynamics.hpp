#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lipdyn/errors.hpp"
#include "lipdyn/operators.hpp"
#include "lipdyn/scalar.hpp"
#include "lipdyn/spaces.hpp"
#include "lipdyn/tree.hpp"

// Dynamics of the conjugated composition operator on the path over N0:
// iterated-gap classification, the right inverse with its block series,
// eigenvectors of the doubling symbol, spectral radius data, and orbits.

namespace lipdyn {

namespace detail {

inline void require_path_increasing(const SymbolPhi& phi, const char* what) {
    if (phi.tree()->kind() != TreeKind::PathN0 || !phi.increasing())
        throw ContractError(std::string(what) +
                            " needs a strictly increasing symbol on the path over N0");
}

}  // namespace detail

// Iterated gap: phi^n(j) - phi^n(j-1), the width of the window that feeds
// coordinate j after n steps.
inline BigInt gap(const SymbolPhi& phi, VertexId j, long long n) {
    detail::require_path_increasing(phi, "the gap profile");
    if (j < 1) throw ValidationError("gaps are indexed by j >= 1");
    return phi.iterate(j, n) - phi.iterate(j - 1, n);
}

enum class HcVerdict { FrequentlyHypercyclic, NotHypercyclic, Unknown };

inline const char* hc_verdict_name(HcVerdict v) {
    switch (v) {
        case HcVerdict::FrequentlyHypercyclic: return "frequently-hypercyclic";
        case HcVerdict::NotHypercyclic: return "not-hypercyclic";
        case HcVerdict::Unknown: return "unknown";
    }
    return "unknown";
}

struct HcWitness {
    VertexId j;
    long long n;  // least n with gap(j, n) >= 2
    BigInt gap_value;
};

struct HcClassification {
    HcVerdict verdict = HcVerdict::Unknown;
    std::string reason;
    std::vector<HcWitness> least_entry;     // per-j witnesses found by search
    std::optional<VertexId> pinned_at;      // j whose gap is provably 1 forever
    std::optional<long long> tail_slope;
};

// Decides hypercyclicity of the conjugated composition operator. For
// increasing symbols the notions collapse: the operator is frequently
// hypercyclic iff every coordinate's iterated gap eventually reaches 2.
// An affine tail makes this decidable: slope >= 2 multiplies deep gaps,
// slope 1 translates them, so a gap of 1 past the table is pinned forever.
// Without a tail the finite table cannot settle the question.
inline HcClassification classify_hypercyclic(const SymbolPhi& phi, VertexId j_max = 32,
                                             long long n_budget = 64) {
    detail::require_path_increasing(phi, "classification");
    if (j_max < 1 || n_budget < 1) throw ValidationError("search bounds must be positive");
    HcClassification out;

    auto search_least_entry = [&](VertexId j) -> std::optional<HcWitness> {
        for (long long n = 0; n <= n_budget; ++n) {
            BigInt g;
            try {
                g = gap(phi, j, n);
            } catch (const TruncationError&) {
                return std::nullopt;  // iterate left the table
            }
            if (g >= 2) return HcWitness{j, n, g};
        }
        return std::nullopt;
    };

    if (!phi.pos_tail()) {
        for (VertexId j = 1; j <= j_max; ++j)
            if (auto w = search_least_entry(j)) out.least_entry.push_back(*w);
        out.verdict = HcVerdict::Unknown;
        out.reason =
            "the table has no affine tail, so gaps past the table are unconstrained and "
            "the entry criterion cannot be decided";
        return out;
    }

    long long a = phi.pos_tail()->a;
    out.tail_slope = a;
    if (a >= 2) {
        // Both iterates reach the tail in finitely many steps; from there the
        // gap multiplies by the slope, so every search below must succeed.
        for (VertexId j = 1; j <= j_max; ++j) {
            auto w = search_least_entry(j);
            if (!w)
                throw ContractError(
                    "slope >= 2 guarantees entry but the search failed; raise the budget");
            out.least_entry.push_back(*w);
        }
        out.verdict = HcVerdict::FrequentlyHypercyclic;
        out.reason = "tail slope " + std::to_string(a) +
                     " doubles deep gaps, so every coordinate's gap eventually reaches 2 "
                     "(witnesses recorded per coordinate)";
        return out;
    }

    // Slope 1: past the table both iterates advance by the same offset.
    VertexId pinned = phi.pos_tail()->from + 1;
    for (long long n = 0; n <= n_budget; ++n)
        if (gap(phi, pinned, n) != 1)
            throw ContractError("slope 1 pins deep gaps at 1 but the check failed");
    for (VertexId j = 1; j <= j_max; ++j)
        if (auto w = search_least_entry(j)) out.least_entry.push_back(*w);
    out.verdict = HcVerdict::NotHypercyclic;
    out.pinned_at = pinned;
    out.reason = "tail slope 1 translates both iterates at j = " + std::to_string(pinned) +
                 ", so its gap stays 1 for every n and the entry criterion fails there";
    return out;
}

// --- right inverse and its block series ---------------------------------

// The right inverse spreads coordinate j uniformly over the window
// (phi(j-1), phi(j)]; applying the operator afterwards sums each window
// back to the original coordinate.
template <class K>
SeqVec<K> fhc_right_inverse(const SymbolPhi& phi, const SeqVec<K>& x) {
    using T = scalar_traits<K>;
    detail::require_path_increasing(phi, "the right inverse");
    if (!same_tree(x.tree(), phi.tree())) throw ContractError("vector and symbol live on different trees");
    SeqVec<K> out(x.tree());
    long long budget = 1000000;
    for (const auto& [j, val] : x.entries()) {
        VertexId lo = j == 0 ? 1 : phi.apply(j - 1) + 1;
        VertexId hi = phi.apply(j);
        K spread = val / T::from_int(hi - lo + 1);
        for (VertexId k = lo; k <= hi; ++k) {
            if (--budget < 0) throw TruncationError("right-inverse image is too wide", hi);
            out.add(k, spread);
        }
    }
    return out;
}

// Constant value on the index interval [lo, hi].
struct Run {
    VertexId lo = 0;
    VertexId hi = 0;
    Rational value;
};
using RunVec = std::vector<Run>;

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// Sort, reject overlap, merge touching runs of equal value, drop zeros.
inline void normalize_runs(RunVec& runs) {
    for (const Run& r : runs)
        if (r.lo > r.hi) throw ContractError("empty run interval");
    std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) { return a.lo < b.lo; });
    RunVec out;
    for (const Run& r : runs) {
        if (r.value == 0) continue;
        if (!out.empty() && r.lo <= out.back().hi)
            throw ContractError("run intervals overlap");
        if (!out.empty() && out.back().hi + 1 == r.lo && out.back().value == r.value)
            out.back().hi = r.hi;
        else
            out.push_back(r);
    }
    runs.swap(out);
}

inline Rational run_sup_norm(const RunVec& runs) {
    Rational best(0);
    for (const Run& r : runs) best = std::max(best, rational_abs(r.value));
    return best;
}

inline long long run_support_size(const RunVec& runs) {
    long long n = 0;
    for (const Run& r : runs) n += r.hi - r.lo + 1;
    return n;
}

// One application of the right inverse to a run vector. Deep in an affine
// tail all windows have width equal to the slope, so a whole run maps to a
// single run and the representation stays small while supports double.
inline RunVec apply_B_runs(const SymbolPhi& phi, const RunVec& x) {
    detail::require_path_increasing(phi, "the right inverse");
    RunVec out;
    for (const Run& r : x) {
        VertexId j = r.lo;
        while (j <= r.hi) {
            if (j == 0) {
                VertexId w = phi.apply(0);
                out.push_back({1, w, r.value / w});
                j = 1;
                continue;
            }
            if (phi.pos_tail() && j > phi.pos_tail()->from) {
                // both window endpoints are affine from here to the run's end
                out.push_back(
                    {phi.apply(j - 1) + 1, phi.apply(r.hi), r.value / phi.pos_tail()->a});
                break;
            }
            VertexId lo = phi.apply(j - 1) + 1, hi = phi.apply(j);
            out.push_back({lo, hi, r.value / (hi - lo + 1)});
            ++j;
        }
    }
    normalize_runs(out);
    return out;
}

template <class K>
SeqVec<K> runs_to_seqvec(const TreePtr& tree, const RunVec& runs, long long max_entries = 200000) {
    using T = scalar_traits<K>;
    if (run_support_size(runs) > max_entries)
        throw TruncationError("run vector is too wide to densify",
                              runs.empty() ? 0 : runs.back().hi);
    SeqVec<K> out(tree);
    for (const Run& r : runs)
        for (VertexId k = r.lo; k <= r.hi; ++k) out.set(k, T::from_rational(r.value));
    return out;
}

// --- the orbit-block series behind frequent hypercyclicity ---------------

struct FhcTerm {
    long long block_steps = 0;   // inverse applications in this block
    long long total_steps = 0;   // cumulative applications so far
    VertexId supp_lo = 0;
    VertexId supp_hi = 0;
    Rational norm;               // exact sup of the block image
    Rational bound;              // 2^{-j} target for term j
    bool within_bound = false;
    bool window_matches = false;       // support equals the closed-form window
    bool disjoint_from_previous = false;
};

struct FhcSeries {
    VertexId start = 1;
    std::vector<FhcTerm> terms;
    RunVec partial_sum;  // disjoint union of all block images
    bool all_verified = false;
};

// Builds the geometric block series for a coordinate vector: repeatedly
// apply the right inverse, closing a block as soon as the exact sup norm has
// halved. Successive block images live on provably disjoint windows
// [phi^N(l-1)+1, phi^N(l)] and carry norms below 2^{-j}, which is the
// summability pattern frequent hypercyclicity rests on.
inline FhcSeries fhc_series_B(const SymbolPhi& phi, VertexId l = 1, int num_terms = 12) {
    detail::require_path_increasing(phi, "the block series");
    if (l < 1) throw ValidationError("the start coordinate must be >= 1");
    if (num_terms < 1) throw ValidationError("at least one term is required");
    FhcSeries series;
    series.start = l;
    series.all_verified = true;
    RunVec cur{{l, l, Rational(1)}};
    Rational norm(1), bound(1);
    long long total = 0;
    std::optional<VertexId> prev_hi;
    for (int j = 1; j <= num_terms; ++j) {
        FhcTerm term;
        Rational target = norm / 2;
        long long steps = 0;
        while (run_sup_norm(cur) > target) {
            cur = apply_B_runs(phi, cur);
            if (++steps > 1000)
                throw ContractError("the block series stalls: window widths never reach 2");
        }
        norm = run_sup_norm(cur);
        total += steps;
        bound /= 2;
        term.block_steps = steps;
        term.total_steps = total;
        term.supp_lo = cur.front().lo;
        term.supp_hi = cur.back().hi;
        term.norm = norm;
        term.bound = bound;
        term.within_bound = norm <= bound;
        term.window_matches = BigInt(term.supp_lo) == phi.iterate(l - 1, total) + 1 &&
                              BigInt(term.supp_hi) == phi.iterate(l, total);
        term.disjoint_from_previous = !prev_hi || term.supp_lo > *prev_hi;
        prev_hi = term.supp_hi;
        series.all_verified = series.all_verified && term.within_bound &&
                              term.window_matches && term.disjoint_from_previous;
        for (const Run& r : cur) series.partial_sum.push_back(r);
        series.terms.push_back(term);
    }
    normalize_runs(series.partial_sum);
    return series;
}

// --- annihilation on the finitely supported annihilator ------------------

struct AnnihilationReport {
    long long n0 = 0;          // first power that must vanish
    long long checked_up_to = 0;
    bool annihilates = false;
};

// Once phi^n(0) clears the support, every coordinate of the n-th power is a
// difference of full path sums, and those vanish on the annihilator.
template <class K>
AnnihilationReport fhc_check_annihilation(const SymbolPhi& phi, const SeqVec<K>& x,
                                          long long extra = 5) {
    detail::require_path_increasing(phi, "the annihilation index");
    if (!in_sigma00(x))
        throw ContractError("the annihilation index is defined on the annihilator subspace");
    AnnihilationReport rep;
    if (x.empty()) {
        rep.annihilates = true;
        return rep;
    }
    long long s = x.support_depth();
    long long n0 = 0;
    while (phi.iterate(0, n0) < s) ++n0;
    rep.n0 = n0;
    rep.checked_up_to = n0 + extra;
    rep.annihilates = true;
    for (long long n = n0; n <= n0 + extra; ++n)
        rep.annihilates = rep.annihilates && comp_power_apply(phi, n, x).empty();
    return rep;
}

// --- eigenvectors of the doubling symbol ---------------------------------

// For phi(j) = 2j+1 the operator sums adjacent pairs; the geometric block
// vector below satisfies (C x)_j = lambda x_j on every complete block, and
// lies in the little space exactly when |lambda| < 2.
template <class K>
SeqVec<K> doubling_eigenvector(const K& lambda, long long depth) {
    using T = scalar_traits<K>;
    if (T::is_zero(lambda)) throw ValidationError("lambda = 0 is not an eigenvalue here");
    if (!(T::abs_sq(lambda) < T::real_from_int(4)))
        throw ValidationError("|lambda| must be < 2 for a little-space eigenvector");
    if (depth < 1 || depth > 18) throw ValidationError("block depth must be in [1, 18]");
    SeqVec<K> x(RootedTree::path_n0());
    x.set(0, T::one());
    K half_lambda = lambda / T::from_int(2);
    K block = lambda - T::one();
    for (long long b = 0; b < depth; ++b) {
        for (VertexId k = (1LL << b); k < (1LL << (b + 1)); ++k) x.set(k, block);
        block = block * half_lambda;
    }
    return x;
}

struct EigenResidual {
    double residual = 0.0;
    long long rows_checked = 0;
};

// Sup of |(C x)_j - lambda x_j| over the rows whose window lies inside the
// built support (incomplete rows would only report truncation noise).
template <class K>
EigenResidual eigen_residual(const SymbolPhi& phi, const K& lambda, const SeqVec<K>& x) {
    using T = scalar_traits<K>;
    detail::require_path_increasing(phi, "the eigen residual");
    SeqVec<K> y = comp_apply_seq(phi, x);
    EigenResidual out;
    if (x.empty()) return out;
    long long maxsupp = x.support_depth();
    auto best = T::real_zero();
    for (VertexId j = 0; phi.apply(j) <= maxsupp; ++j) {
        K diff = y.at(j) - lambda * x.at(j);
        auto a = T::abs_sq(diff);
        if (best < a) best = a;
        ++out.rows_checked;
    }
    out.residual = std::sqrt(T::to_double(best));
    return out;
}

// --- spectral radius from power norms -------------------------------------

struct SpectralStep {
    long long n = 0;
    long long power_norm = 0;                // exact norm of the n-th power
    double root = 0.0;                       // power_norm^(1/n)
    std::optional<long long> exact_root;     // integer r with r^n == power_norm
};

// Norms of operator powers via the iterated symbol, with n-th roots; the
// roots converge to the spectral radius from above.
inline std::vector<SpectralStep> spectral_radius_estimate(const SymbolPhi& phi,
                                                          long long n_max) {
    detail::require_path_increasing(phi, "the spectral estimate");
    if (!phi.pos_tail()) throw ContractError("power norms need an affine tail");
    if (n_max < 1 || n_max > 64) throw ValidationError("power range must be in [1, 64]");
    std::vector<SpectralStep> out;
    for (long long n = 1; n <= n_max; ++n) {
        SpectralStep step;
        step.n = n;
        step.power_norm = comp_norm(phi.power(n));
        step.root = std::pow(static_cast<double>(step.power_norm), 1.0 / n);
        long long guess = std::llround(step.root);
        for (long long r = std::max(1LL, guess - 1); r <= guess + 1; ++r) {
            BigInt p(1);
            for (long long i = 0; i < n; ++i) p *= r;
            if (p == step.power_norm) step.exact_root = r;
        }
        out.push_back(step);
    }
    return out;
}

// --- orbits ---------------------------------------------------------------

template <class K>
struct OrbitRecord {
    std::vector<typename scalar_traits<K>::real_type> sup_norms;  // step 0 first
    std::vector<SeqVec<K>> snapshots;
};

// Iterates y -> scale * C(y), recording sup norms and every snapshot. With
// scale = 1/lambda on an eigenvector the norms stay constant.
template <class K>
OrbitRecord<K> orbit_simulate(const SymbolPhi& phi, const SeqVec<K>& x0, long long steps,
                              const K& scale) {
    using T = scalar_traits<K>;
    if (steps < 0 || steps > 4096) throw ValidationError("step count must be in [0, 4096]");
    OrbitRecord<K> rec;
    SeqVec<K> y = x0;
    rec.sup_norms.push_back(sup_norm(y));
    rec.snapshots.push_back(y);
    for (long long i = 0; i < steps; ++i) {
        y = comp_apply_seq(phi, y);
        if (!T::is_zero(scale - T::one())) y = scale * y;
        rec.sup_norms.push_back(sup_norm(y));
        rec.snapshots.push_back(y);
    }
    return rec;
}

}  // namespace lipdyn
