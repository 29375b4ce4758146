// multitime.hpp — Multi-time correlation engine. Dyadic slot tensors evolve
// under one copy of the Liouvillian per slot plus pairwise bath-noise
// couplings; bracket-boundary events are absorbed onto a density-like core,
// and dyadic slots are spawned only when an interior event fires before the
// operators flanking it. This evaluates correlations of arbitrary time
// ordering, including out-of-time-ordered ones.

#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "otoc/liouvillian.hpp"
#include "otoc/operators.hpp"
#include "otoc/propagator.hpp"

namespace otoc {

// Event times closer than this count as simultaneous.
inline constexpr double kTimeTol = 1e-12;

struct Event {
    Matrix op;
    double time = 0.0;
};

using EventSchedule = std::vector<Event>;

// Bath-noise structure of the dyadic Heisenberg equations: per bath operator
// a coefficient table (i,j) -> system operator appearing with it, plus the
// delta-correlation coefficients <R_left R_right> in bracket order.
struct NoiseModel {
    struct Term {
        std::string bath;
        std::vector<Matrix> table;  // indexed by pair_index(i, j, dim)
    };

    Index dim = 0;
    std::vector<Term> terms;
    std::map<std::pair<std::string, std::string>, double> bath_corr;
};

// Dyadic re-expansion of a noise coefficient table on the frontier basis:
// T[(ij),(i'j')] = (Q^{(ij)})_{j'i'}.
inline Matrix insertion_matrix(const NoiseModel::Term& term, Index n) {
    Matrix t = Matrix::Zero(n * n, n * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const Matrix& q = term.table.at(static_cast<std::size_t>(pair_index(i, j, n)));
            for (Index i2 = 0; i2 < n; ++i2)
                for (Index j2 = 0; j2 < n; ++j2)
                    t(pair_index(i, j, n), pair_index(i2, j2, n)) = q(j2, i2);
        }
    return t;
}

// Per-unit-time coupling between two slots: sum_{k,l} <R_k R_l> T_k (x) T_l,
// the left tensor factor acting on the slot earlier in bracket order.
inline Matrix pair_noise_coupling(const NoiseModel& model, int left_slot, int right_slot) {
    if (left_slot >= right_slot)
        throw std::invalid_argument("pair_noise_coupling: slots out of order");
    const Index n = model.dim;
    for (const auto& [labels, rate] : model.bath_corr) {
        auto known = [&](const std::string& lbl) {
            for (const auto& term : model.terms)
                if (term.bath == lbl) return true;
            return false;
        };
        if (!known(labels.first) || !known(labels.second))
            throw std::invalid_argument("pair_noise_coupling: unknown bath label in correlation table");
        (void)rate;
    }
    const Index d2 = n * n;
    Matrix coupling = Matrix::Zero(d2 * d2, d2 * d2);
    for (const auto& tk : model.terms)
        for (const auto& tl : model.terms) {
            auto it = model.bath_corr.find({tk.bath, tl.bath});
            if (it == model.bath_corr.end() || it->second == 0.0) continue;
            coupling += it->second * Eigen::kroneckerProduct(insertion_matrix(tk, n),
                                                             insertion_matrix(tl, n)).eval();
        }
    return coupling;
}

// Complex tensor over k pending dyadic slots; axis r is the flattened pair
// (i_r, j_r) of the dyadic |j_r><i_r| at the frontier time. Row-major, axis 0
// slowest. `slots` records the bracket labels of the live axes.
struct SlotTensor {
    Index dim = 0;
    std::vector<int> slots;
    Vector data;
    double frontier = 0.0;

    Index axis_size() const { return dim * dim; }
};

// Equal-time expectation of a chain of K dyadics in bracket order:
// X_{(i1 j1)...(iK jK)} = delta_{i1 j2} ... delta_{i(K-1) jK} rho_{iK j1}.
inline SlotTensor initial_object(const DensityMatrix& rho, int slot_count) {
    if (slot_count < 0) throw std::invalid_argument("initial_object: slot count must be >= 0");
    const Index n = rho.dim();
    const Index d2 = n * n;
    SlotTensor x;
    x.dim = n;
    x.slots.resize(static_cast<std::size_t>(slot_count));
    for (int r = 0; r < slot_count; ++r) x.slots[static_cast<std::size_t>(r)] = r;
    Index total = 1;
    for (int r = 0; r < slot_count; ++r) total *= d2;
    x.data = Vector::Zero(total);
    if (slot_count == 0) {
        x.data(0) = 1.0;
        return x;
    }
    std::vector<Index> ii(static_cast<std::size_t>(slot_count)),
        jj(static_cast<std::size_t>(slot_count));
    for (Index c = 0; c < total; ++c) {
        Index rem = c;
        for (int r = slot_count - 1; r >= 0; --r) {
            const Index p = rem % d2;
            rem /= d2;
            ii[static_cast<std::size_t>(r)] = p / n;
            jj[static_cast<std::size_t>(r)] = p % n;
        }
        bool chain = true;
        for (int r = 0; r + 1 < slot_count; ++r)
            if (ii[static_cast<std::size_t>(r)] != jj[static_cast<std::size_t>(r) + 1]) {
                chain = false;
                break;
            }
        if (chain)
            x.data(c) = rho.mat(ii[static_cast<std::size_t>(slot_count) - 1], jj[0]);
    }
    return x;
}

// Operator insertion at slot r: X' = sum_{ir jr} O_{jr ir} X, axis removed.
inline SlotTensor contract(const SlotTensor& x, int r, const Matrix& op) {
    const int k = static_cast<int>(x.slots.size());
    if (r < 0 || r >= k) throw std::invalid_argument("contract: invalid slot index");
    if (op.rows() != x.dim || op.cols() != x.dim)
        throw std::invalid_argument("contract: operator dimension mismatch");
    const Index d2 = x.axis_size();
    Vector w(d2);
    for (Index i = 0; i < x.dim; ++i)
        for (Index j = 0; j < x.dim; ++j) w(pair_index(i, j, x.dim)) = op(j, i);

    Index inner = 1;
    for (int a = r + 1; a < k; ++a) inner *= d2;
    Index outer = 1;
    for (int a = 0; a < r; ++a) outer *= d2;

    SlotTensor out;
    out.dim = x.dim;
    out.frontier = x.frontier;
    out.slots = x.slots;
    out.slots.erase(out.slots.begin() + r);
    out.data = Vector::Zero(outer * inner);
    for (Index a = 0; a < outer; ++a)
        for (Index s = 0; s < d2; ++s) {
            if (w(s) == Complex(0.0, 0.0)) continue;
            const Index src = (a * d2 + s) * inner;
            const Index dst = a * inner;
            for (Index b = 0; b < inner; ++b) out.data(dst + b) += w(s) * x.data(src + b);
        }
    return out;
}

namespace detail {

inline Matrix embed_axis(const Matrix& op, int k, int axis, Index d) {
    Matrix g = Matrix::Identity(1, 1);
    for (int r = 0; r < k; ++r) {
        if (r == axis)
            g = Eigen::kroneckerProduct(g, op).eval();
        else
            g = Eigen::kroneckerProduct(g, Matrix::Identity(d, d)).eval();
    }
    return g;
}

// coupling acts on the ordered joint space of axes (a, b), identity elsewhere
inline void add_axis_pair(Matrix& g, const Matrix& coupling, int k, int a, int b, Index d) {
    std::vector<Index> stride(static_cast<std::size_t>(k), 1);
    for (int r = k - 2; r >= 0; --r)
        stride[static_cast<std::size_t>(r)] = stride[static_cast<std::size_t>(r) + 1] * d;
    std::vector<int> others;
    for (int r = 0; r < k; ++r)
        if (r != a && r != b) others.push_back(r);
    Index nother = 1;
    for (std::size_t r = 0; r < others.size(); ++r) nother *= d;
    for (Index oc = 0; oc < nother; ++oc) {
        Index base = 0, rem = oc;
        for (auto it = others.rbegin(); it != others.rend(); ++it) {
            base += (rem % d) * stride[static_cast<std::size_t>(*it)];
            rem /= d;
        }
        for (Index xa = 0; xa < d; ++xa)
            for (Index xb = 0; xb < d; ++xb)
                for (Index ya = 0; ya < d; ++ya)
                    for (Index yb = 0; yb < d; ++yb) {
                        const Complex v = coupling(xa * d + xb, ya * d + yb);
                        if (v == Complex(0.0, 0.0)) continue;
                        g(base + xa * stride[static_cast<std::size_t>(a)] +
                              xb * stride[static_cast<std::size_t>(b)],
                          base + ya * stride[static_cast<std::size_t>(a)] +
                              yb * stride[static_cast<std::size_t>(b)]) += v;
                    }
    }
}

}  // namespace detail

// Generator on the joint space of k slots: one copy of M per slot, plus the
// pairwise noise couplings between every pair of live slots when enabled.
// Noise terms linear in a single slot average to zero and never appear.
inline Matrix segment_generator(const Liouvillian& liou, const NoiseModel& model, int k,
                                bool include_noise) {
    if (k < 0) throw std::invalid_argument("segment_generator: k must be >= 0");
    if (k == 0) return Matrix::Zero(1, 1);
    const Index d2 = liou.dim * liou.dim;
    const double total_log = static_cast<double>(k) * std::log2(static_cast<double>(d2));
    if (total_log > 10.0)
        throw std::invalid_argument("segment_generator: slot space too large for dense assembly");
    Index total = 1;
    for (int r = 0; r < k; ++r) total *= d2;
    Matrix g = Matrix::Zero(total, total);
    for (int r = 0; r < k; ++r) g += detail::embed_axis(liou.mat, k, r, d2);
    if (include_noise && k >= 2) {
        const Matrix coupling = pair_noise_coupling(model, 0, 1);
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) detail::add_axis_pair(g, coupling, k, a, b, d2);
    }
    return g;
}

// Factorized segment propagators keyed by (slot count, noise flag). Entries
// are built on demand; prepare() allows prefilling before parallel use.
class PropagatorCache {
public:
    PropagatorCache(const Liouvillian& liou, const NoiseModel& model)
        : liou_(&liou), model_(&model) {}

    const Propagator& get(int k, bool include_noise) {
        const std::pair<int, bool> key{k, k >= 2 && include_noise};
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(key, Propagator(segment_generator(*liou_, *model_, k, key.second)))
                     .first;
        return it->second;
    }

    void prepare(int k, bool include_noise) { get(k, include_noise); }

private:
    const Liouvillian* liou_;
    const NoiseModel* model_;
    std::map<std::pair<int, bool>, Propagator> cache_;
    std::mutex mutex_;
};

// <O_1(t_1) ... O_K(t_K)> for an arbitrary bracket-ordered schedule.
//
// Distinct event times are processed in ascending order. While every fired
// event sits at the bracket boundary the state is a density-like core matrix
// C_ij = <(|j><i|)(s) . fired ops>, propagated by M; boundary events multiply
// the core (left end: right-multiplication, right end: left-multiplication).
// The first event firing at an interior position spawns dyadic slots for all
// still-pending events via the equal-time chain rule, with the firing
// operators inserted in place; from then on events contract their slots and
// segments evolve under segment_generator. For a stationary initial state the
// result depends only on time differences.
inline Complex correlation(const EventSchedule& schedule, const Liouvillian& liou,
                           const NoiseModel& model, const std::optional<DensityMatrix>& rho0,
                           bool include_noise, PropagatorCache* cache = nullptr) {
    if (schedule.empty()) throw std::invalid_argument("correlation: empty schedule");
    const Index n = liou.dim;
    for (const auto& ev : schedule) {
        if (ev.op.rows() != n || ev.op.cols() != n)
            throw std::invalid_argument("correlation: event operator dimension mismatch");
        if (!all_finite(ev.op) || !std::isfinite(ev.time))
            throw std::invalid_argument("correlation: non-finite event");
    }
    const int count = static_cast<int>(schedule.size());

    PropagatorCache local(liou, model);
    PropagatorCache& props = cache ? *cache : local;

    // cluster event times
    std::vector<double> sorted_times;
    sorted_times.reserve(schedule.size());
    for (const auto& ev : schedule) sorted_times.push_back(ev.time);
    std::sort(sorted_times.begin(), sorted_times.end());
    std::vector<double> reps;
    for (double t : sorted_times)
        if (reps.empty() || t > reps.back() + kTimeTol) reps.push_back(t);
    auto cluster_of = [&](double t) {
        for (std::size_t c = 0; c < reps.size(); ++c)
            if (std::abs(t - reps[c]) <= kTimeTol) return c;
        return reps.size();  // unreachable
    };

    DensityMatrix rho = rho0 ? *rho0 : steady_state(liou);
    Matrix core = rho.mat;
    bool core_phase = true;
    std::vector<bool> fired(schedule.size(), false);
    std::vector<int> slots;  // bracket labels of live tensor axes
    Vector data;
    const Index d2 = n * n;

    double frontier = reps.front();
    for (std::size_t c = 0; c < reps.size(); ++c) {
        const double s = reps[c];
        const double dt = s - frontier;
        if (dt > 0.0) {
            if (core_phase) {
                core = unvec_pairs(props.get(1, false).apply(vec_pairs(core), dt), n);
            } else if (!slots.empty()) {
                data = props.get(static_cast<int>(slots.size()), include_noise).apply(data, dt);
            }
        }
        frontier = s;

        std::vector<int> here;
        for (int e = 0; e < count; ++e)
            if (!fired[static_cast<std::size_t>(e)] && cluster_of(schedule[static_cast<std::size_t>(e)].time) == c)
                here.push_back(e);

        if (core_phase) {
            bool progress = true;
            while (progress) {
                progress = false;
                for (auto it = here.begin(); it != here.end();) {
                    int a = 0;
                    while (a < count && fired[static_cast<std::size_t>(a)]) ++a;
                    int b = count - 1;
                    while (b >= 0 && fired[static_cast<std::size_t>(b)]) --b;
                    if (*it == a) {
                        core = core * schedule[static_cast<std::size_t>(*it)].op;
                    } else if (*it == b) {
                        core = schedule[static_cast<std::size_t>(*it)].op * core;
                    } else {
                        ++it;
                        continue;
                    }
                    fired[static_cast<std::size_t>(*it)] = true;
                    it = here.erase(it);
                    progress = true;
                }
            }
            if (!here.empty()) {
                // spawn: dyadic slots for every pending non-firing event, the
                // firing interior operators inserted into the equal-time chain
                std::vector<int> unfired;
                for (int e = 0; e < count; ++e)
                    if (!fired[static_cast<std::size_t>(e)]) unfired.push_back(e);
                slots.clear();
                for (int e : unfired)
                    if (std::find(here.begin(), here.end(), e) == here.end()) slots.push_back(e);
                const int k = static_cast<int>(slots.size());
                Index total = 1;
                for (int r = 0; r < k; ++r) total *= d2;
                data = Vector::Zero(total);
                std::vector<Index> pairs_(slots.size());
                for (Index cidx = 0; cidx < total; ++cidx) {
                    Index rem = cidx;
                    for (int r = k - 1; r >= 0; --r) {
                        pairs_[static_cast<std::size_t>(r)] = rem % d2;
                        rem /= d2;
                    }
                    Matrix chain = Matrix::Identity(n, n);
                    std::size_t si = 0;
                    for (int u : unfired) {
                        if (std::find(here.begin(), here.end(), u) != here.end()) {
                            chain = chain * schedule[static_cast<std::size_t>(u)].op;
                        } else {
                            const Index p = pairs_[si++];
                            chain = chain * dyad(p % n, p / n, n);  // |j><i|
                        }
                    }
                    data(cidx) = (chain * core).trace();
                }
                for (int e : here) fired[static_cast<std::size_t>(e)] = true;
                core_phase = false;
            }
        } else {
            for (int e : here) {
                const auto pos = std::find(slots.begin(), slots.end(), e);
                const int r = static_cast<int>(pos - slots.begin());
                SlotTensor tmp;
                tmp.dim = n;
                tmp.slots = slots;
                tmp.data = std::move(data);
                SlotTensor reduced = contract(tmp, r, schedule[static_cast<std::size_t>(e)].op);
                data = std::move(reduced.data);
                slots.erase(slots.begin() + r);
                fired[static_cast<std::size_t>(e)] = true;
            }
        }
    }

    Complex value;
    if (core_phase)
        value = core.trace();
    else
        value = data(0);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw std::runtime_error("correlation: non-finite result");
    return value;
}

// Classic one-slot regression path: <A(t) B(t+tau)> for each tau >= 0,
// propagating rho_A(t) = rho A under M and tracing against B.
inline std::vector<Complex> two_time(const Liouvillian& liou, const Matrix& op_a,
                                     const Matrix& op_b,
                                     const std::optional<DensityMatrix>& rho0,
                                     const std::vector<double>& tau_grid) {
    const Index n = liou.dim;
    if (op_a.rows() != n || op_a.cols() != n || op_b.rows() != n || op_b.cols() != n)
        throw std::invalid_argument("two_time: operator dimension mismatch");
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        if (!(tau_grid[k] >= 0.0)) throw std::invalid_argument("two_time: tau must be >= 0");
        if (k > 0 && tau_grid[k] < tau_grid[k - 1])
            throw std::invalid_argument("two_time: tau grid must be ascending");
    }
    DensityMatrix rho = rho0 ? *rho0 : steady_state(liou);
    const Vector x0 = vec_pairs(Matrix(rho.mat * op_a));
    Propagator prop(liou.mat);
    std::vector<Complex> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid)
        out.push_back((unvec_pairs(prop.apply(x0, tau), n) * op_b).trace());
    return out;
}

}  // namespace otoc
