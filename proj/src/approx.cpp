#include "sqma/approx.hpp"

#include "sqma/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>

namespace sqma::approx {

std::size_t band_count(std::size_t d) {
    if (d == 0) throw std::invalid_argument("dimension must be positive");
    // least g with 2^(2g) >= 2d
    std::size_t g = 0;
    while (g < 32 && (std::uint64_t{1} << (2 * g)) < 2 * static_cast<std::uint64_t>(d)) ++g;
    return g;
}

double guarantee_for(double norm, std::size_t d) {
    return norm / (8.0 * std::sqrt(std::log2(static_cast<double>(d)) + 3.0));
}

BandPartition partition_bands(std::span<const double> x) {
    BandPartition p;
    p.gamma = band_count(x.size());
    double sq = 0.0;
    for (double xj : x) {
        if (xj < 0.0) throw std::invalid_argument("band partition needs a nonnegative vector");
        sq += xj * xj;
    }
    p.norm = std::sqrt(sq);
    p.bands.assign(p.gamma + 1, {});
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] <= 0.0) continue;
        std::size_t k = 1;
        while (k <= p.gamma && x[j] <= std::ldexp(p.norm, -static_cast<int>(k))) ++k;
        p.bands[k - 1].push_back(j);  // k == gamma + 1 is the tail
    }
    return p;
}

double subset_score(std::span<const Complex> v, const SubsetState& s) {
    if (s.dimension() != v.size()) throw DimensionMismatch("subset and vector dimensions differ");
    Complex sum = 0.0;
    for (auto j : s.indices()) sum += v[j];
    return std::abs(sum) / std::sqrt(static_cast<double>(s.size()));
}

ApproximationResult geometric_subset(std::span<const Complex> v) {
    const std::size_t d = v.size();
    if (d == 0) throw std::invalid_argument("geometric_subset needs a nonempty vector");
    const double vnorm = states::norm2(v);
    if (vnorm == 0.0) throw std::invalid_argument("geometric_subset needs a nonzero vector");

    BranchTrace trace;
    std::vector<double> re(d), im(d);
    for (std::size_t j = 0; j < d; ++j) {
        re[j] = v[j].real();
        im[j] = v[j].imag();
    }
    auto l2 = [](const std::vector<double>& a) {
        return std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    };
    std::vector<double> kept;
    if (l2(re) >= l2(im)) {
        kept = std::move(re);
    } else {
        kept = std::move(im);
        trace.part = BranchTrace::Part::Imaginary;
    }

    std::vector<double> pos(d), neg(d);
    for (std::size_t j = 0; j < d; ++j) {
        pos[j] = std::max(kept[j], 0.0);
        neg[j] = std::max(-kept[j], 0.0);
    }
    std::vector<double> x;
    if (l2(pos) >= l2(neg)) {
        x = std::move(pos);
    } else {
        x = std::move(neg);
        trace.negated = true;
    }

    const BandPartition bands = partition_bands(x);
    trace.gamma = bands.gamma;
    double best = -1.0;
    for (std::size_t k = 1; k <= bands.gamma; ++k) {
        const auto& band = bands.bands[k - 1];
        if (band.empty()) continue;
        double sum = 0.0;
        for (auto j : band) sum += x[j];
        const double s = sum / std::sqrt(static_cast<double>(band.size()));
        if (s > best) {
            best = s;
            trace.band = k;
        }
    }
    // The tail cannot hold all of the mass, so some band is nonempty.
    if (best < 0.0) throw std::logic_error("band partition left every non-tail band empty");

    SubsetState subset(d, bands.bands[trace.band - 1]);
    const double score = subset_score(v, subset);
    const double guarantee = guarantee_for(vnorm, d);
    if (score < guarantee) {
        std::ostringstream msg;
        msg << "subset score " << score << " below guarantee " << guarantee;
        throw std::logic_error(msg.str());
    }
    return ApproximationResult{std::move(subset), score, guarantee, trace};
}

ApproximationResult round_to_pow2(const ApproximationResult& result, std::span<const Complex> v) {
    const auto& members = result.subset.indices();
    const std::size_t target = std::bit_floor(members.size());
    if (target == members.size()) {
        ApproximationResult same = result;
        same.guarantee /= 2.0;
        return same;
    }

    Complex total = 0.0;
    for (auto j : members) total += v[j];
    const Complex phase = std::polar(1.0, -std::arg(total));

    std::vector<std::size_t> order = members;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return (v[a] * phase).real() > (v[b] * phase).real();
    });
    order.resize(target);

    ApproximationResult rounded{SubsetState(result.subset.dimension(), std::move(order)), 0.0,
                                result.guarantee / 2.0, result.trace};
    rounded.score = subset_score(v, rounded.subset);
    return rounded;
}

namespace {

struct Candidate {
    std::uint64_t mask = 0;
    double score = -1.0;
};

// True when a ranks strictly before b: higher score, then fewer members, then
// lexicographically smaller sorted index list.
bool ranks_before(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    const int pa = std::popcount(a.mask), pb = std::popcount(b.mask);
    if (pa != pb) return pa < pb;
    const std::uint64_t diff = a.mask ^ b.mask;
    if (diff == 0) return false;
    return (a.mask & (diff & (~diff + 1))) != 0;
}

Candidate best_in_range(std::span<const Complex> v, std::uint64_t lo, std::uint64_t hi) {
    Candidate best;
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
        Complex sum = 0.0;
        for (std::uint64_t rest = mask; rest != 0; rest &= rest - 1) sum += v[std::countr_zero(rest)];
        const Candidate c{mask, std::abs(sum) / std::sqrt(static_cast<double>(std::popcount(mask)))};
        if (best.mask == 0 || ranks_before(c, best)) best = c;
    }
    return best;
}

}  // namespace

BruteForceResult brute_force_best_subset(std::span<const Complex> v, std::size_t max_dimension,
                                         std::size_t chunks) {
    const std::size_t d = v.size();
    if (d == 0) throw std::invalid_argument("brute force needs a nonempty vector");
    if (d > max_dimension || d > 62) {
        throw CapExceeded("brute force over dimension " + std::to_string(d) + " exceeds cap " +
                          std::to_string(max_dimension));
    }
    const std::uint64_t end = std::uint64_t{1} << d;
    if (chunks == 0) chunks = std::max(1u, std::thread::hardware_concurrency());
    chunks = std::max<std::uint64_t>(1, std::min<std::uint64_t>(chunks, end - 1));

    const std::uint64_t span = (end - 1 + chunks - 1) / chunks;
    std::vector<Candidate> partial;
    if (chunks == 1) {
        partial.push_back(best_in_range(v, 1, end));
    } else {
        std::vector<std::future<Candidate>> jobs;
        for (std::uint64_t lo = 1; lo < end; lo += span) {
            const std::uint64_t hi = std::min(end, lo + span);
            jobs.push_back(std::async(std::launch::async, best_in_range, v, lo, hi));
        }
        for (auto& j : jobs) partial.push_back(j.get());
    }

    Candidate best = partial.front();
    for (const auto& c : partial)
        if (ranks_before(c, best)) best = c;

    std::vector<std::size_t> idx;
    for (std::uint64_t rest = best.mask; rest != 0; rest &= rest - 1) idx.push_back(std::countr_zero(rest));
    return BruteForceResult{SubsetState(d, std::move(idx)), best.score};
}

PrefixResult psi_n_best_prefix(std::size_t n) {
    if (n == 0) throw std::invalid_argument("psi_n needs n >= 1");
    if (n > kMaxPrefixScanQubits) throw CapExceeded("prefix scan limited to n <= 24");
    const std::size_t d = std::size_t{1} << n;
    PrefixResult best{0, -1.0, (2.0 + std::sqrt(2.0)) / std::sqrt(static_cast<double>(n))};
    double sum = 0.0;
    for (std::size_t m = 1; m < d; ++m) {
        const auto level = static_cast<int>(std::bit_width(m)) - 1;
        sum += 1.0 / std::sqrt(static_cast<double>(n) * std::ldexp(1.0, level));
        const double s = sum / std::sqrt(static_cast<double>(m));
        if (s > best.score) {
            best.score = s;
            best.m = m;
        }
    }
    if (best.score > best.bound) {
        std::ostringstream msg;
        msg << "psi_" << n << " prefix score " << best.score << " exceeds (2+sqrt2)/sqrt(n) = " << best.bound;
        throw std::logic_error(msg.str());
    }
    return best;
}

}  // namespace sqma::approx
