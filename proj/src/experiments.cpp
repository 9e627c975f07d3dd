#include "nilflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nilflow/errors.hpp"
#include "nilflow/numeric.hpp"

namespace nilflow {

namespace {

// Fractional part of q * p for integer p up to ~9e18, splitting p so both
// halves multiply exactly.
double frac_prod_ll(double q, long long p) {
    bool neg = p < 0;
    unsigned long long up = neg ? static_cast<unsigned long long>(-p) : static_cast<unsigned long long>(p);
    double hi = static_cast<double>(up >> 27) * 134217728.0;  // 2^27
    double lo = static_cast<double>(up & ((1ull << 27) - 1));
    double f = mod_unit(frac_prod(q, hi) + frac_prod(q, lo));
    return neg ? mod_unit(-f) : f;
}

}  // namespace

ThetaParams::ThetaParams(Eigen::MatrixXd q_, Eigen::VectorXd l_, long long n_)
    : q(std::move(q_)), l(std::move(l_)), n(n_) {
    const auto g = l.size();
    if (g < 1 || q.rows() != g || q.cols() != g)
        throw std::invalid_argument("ThetaParams: Q must be g x g and l length g");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("ThetaParams: Q must be symmetric");
    if (n < 1) throw std::invalid_argument("ThetaParams: N must be >= 1");
}

std::complex<double> theta_sum(const ThetaParams& p) {
    const int g = p.genus();
    double count = std::pow(static_cast<double>(p.n) + 1.0, g);
    if (count > static_cast<double>(kThetaTermBudget))
        throw BudgetExceededError(
            "theta_sum: (N+1)^g = " + std::to_string(count) + " terms exceed the direct-sum budget " +
            std::to_string(kThetaTermBudget) +
            "; reduce N, or evaluate g = 1 sums through the renormalization recursion in blocks");

    KahanComplexSum acc;
    std::vector<long long> idx(static_cast<size_t>(g), 0);
    while (true) {
        // phase = Q[n] + l(n), accumulated mod 1 with exact products
        double turns = 0.0;
        for (int j = 0; j < g; ++j) {
            long long nj = idx[static_cast<size_t>(j)];
            turns += frac_prod_ll(p.q(j, j), nj * nj);
            for (int k = j + 1; k < g; ++k)
                turns += frac_prod_ll(2.0 * p.q(j, k), nj * idx[static_cast<size_t>(k)]);
            turns += frac_prod_ll(p.l[j], nj);
        }
        acc.add(unit_phase(turns));
        int j = 0;
        while (j < g && ++idx[static_cast<size_t>(j)] > p.n) idx[static_cast<size_t>(j++)] = 0;
        if (j == g) break;
    }
    return acc.value() * std::pow(static_cast<double>(p.n), -0.5 * g);
}

DistributionSummary DistributionSummary::from_samples(const std::vector<double>& samples,
                                                      std::uint64_t seed, int bins) {
    if (samples.empty()) throw std::invalid_argument("DistributionSummary: no samples");
    DistributionSummary s;
    s.count = static_cast<long long>(samples.size());
    s.seed = seed;
    KahanSum mean_acc;
    for (double x : samples) mean_acc.add(x);
    s.mean = mean_acc.value() / static_cast<double>(s.count);
    KahanSum var_acc;
    for (double x : samples) var_acc.add((x - s.mean) * (x - s.mean));
    s.variance = s.count > 1 ? var_acc.value() / static_cast<double>(s.count - 1) : 0.0;

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
        double pos = p * static_cast<double>(s.count - 1);
        size_t lo = static_cast<size_t>(pos);
        size_t hi = std::min(lo + 1, sorted.size() - 1);
        double frac = pos - static_cast<double>(lo);
        s.quantiles.emplace_back(p, (1.0 - frac) * sorted[lo] + frac * sorted[hi]);
    }
    for (double x : sorted) s.support_radius = std::max(s.support_radius, std::abs(x));

    double lo = sorted.front(), hi = sorted.back();
    if (hi <= lo) hi = lo + 1.0;
    double width = (hi - lo) / bins;
    std::vector<long long> counts(static_cast<size_t>(bins), 0);
    for (double x : sorted) {
        int b = std::min(bins - 1, static_cast<int>((x - lo) / width));
        counts[static_cast<size_t>(std::max(0, b))]++;
    }
    for (int b = 0; b < bins; ++b)
        s.histogram.emplace_back(lo + (b + 0.5) * width, counts[static_cast<size_t>(b)]);
    return s;
}

TSequence::TSequence(std::vector<Eigen::VectorXd> e) : entries(std::move(e)) {
    for (size_t i = 0; i < entries.size(); ++i) {
        for (int k = 0; k < entries[i].size(); ++k)
            if (!(entries[i][k] > 0.0)) throw std::invalid_argument("TSequence: sides must be positive");
        if (i > 0) {
            if (entries[i].size() != entries[i - 1].size())
                throw std::invalid_argument("TSequence: rank must not change");
            for (int k = 0; k < entries[i].size(); ++k)
                if (!(entries[i][k] >= entries[i - 1][k]))
                    throw std::invalid_argument("TSequence: entries must grow component-wise");
        }
    }
}

TSequence TSequence::geometric(const Eigen::VectorXd& t0, double ratio, int count) {
    if (!(ratio > 1.0)) throw std::invalid_argument("TSequence: ratio must be > 1");
    if (count < 1) throw std::invalid_argument("TSequence: count must be >= 1");
    std::vector<Eigen::VectorXd> e;
    Eigen::VectorXd t = t0;
    for (int i = 0; i < count; ++i) {
        e.push_back(t);
        t *= ratio;
    }
    return TSequence(std::move(e));
}

DistributionSummary theta_distribution(const Eigen::MatrixXd& q, long long n, int samples,
                                       std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("theta_distribution: samples must be >= 1");
    const int g = static_cast<int>(q.rows());
    std::vector<double> values(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        Rng rng = rng_for_sample(seed, static_cast<std::uint64_t>(i));
        Eigen::VectorXd l(g);
        for (int k = 0; k < g; ++k) l[k] = rng.uniform();
        values[static_cast<size_t>(i)] = std::abs(theta_sum(ThetaParams(q, l, n)));
    }
    return DistributionSummary::from_samples(values, seed);
}

std::complex<double> bufetov_estimate(const SymplecticMatrix& alpha, const GroupElement& m,
                                      const Eigen::VectorXd& sides, const Observable& f,
                                      const QuadratureSpec& spec) {
    if (!f.has_zero_mean())
        throw std::invalid_argument("bufetov_estimate: observable must have zero mean "
                                    "(no (0,0) character term)");
    return birkhoff_integral(alpha, m, sides, f, spec);
}

GroupElement random_basepoint(int g, Rng& rng) {
    Eigen::VectorXd x(g), y(g);
    for (int k = 0; k < g; ++k) x[k] = rng.uniform();
    for (int k = 0; k < g; ++k) y[k] = rng.uniform();
    return GroupElement(x, y, 0.5 * rng.uniform());
}

std::vector<DistributionSummary> limit_distribution_experiment(const SymplecticMatrix& alpha,
                                                               const Observable& f,
                                                               const TSequence& t_seq, int samples,
                                                               std::uint64_t seed,
                                                               const QuadratureSpec& spec,
                                                               int threads) {
    if (samples < 10) throw std::invalid_argument("limit_distribution_experiment: samples must be >= 10");
    if (!f.has_zero_mean())
        throw std::invalid_argument("limit_distribution_experiment: observable must have zero mean");
    if (threads < 1) threads = 1;

    std::vector<DistributionSummary> out;
    for (const auto& sides : t_seq.entries) {
        double vol = 1.0;
        for (int k = 0; k < sides.size(); ++k) vol *= sides[k];
        const double norm = 1.0 / std::sqrt(vol);
        std::vector<double> values(static_cast<size_t>(samples));
        auto worker = [&](int lo, int hi) {
            for (int i = lo; i < hi; ++i) {
                Rng rng = rng_for_sample(seed, static_cast<std::uint64_t>(i));
                GroupElement m = random_basepoint(alpha.g, rng);
                values[static_cast<size_t>(i)] =
                    norm * birkhoff_integral(alpha, m, sides, f, spec).real();
            }
        };
        if (threads == 1) {
            worker(0, samples);
        } else {
            std::vector<std::thread> pool;
            int chunk = (samples + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                int lo = t * chunk, hi = std::min(samples, lo + chunk);
                if (lo < hi) pool.emplace_back(worker, lo, hi);
            }
            for (auto& th : pool) th.join();
        }
        out.push_back(DistributionSummary::from_samples(values, seed));
    }
    return out;
}

double transverse_l2_profile(const SymplecticMatrix& alpha, const CharacterLabel& label,
                             const Eigen::VectorXd& sides) {
    const int d = static_cast<int>(sides.size());
    SkewShift shift = return_map(alpha, d, label.K);
    Eigen::VectorXi counts(d);
    double total = 1.0;
    for (int i = 0; i < d; ++i) {
        double ratio = sides[i] / shift.t_ret[i];
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || ratio < 0.5)
            throw std::invalid_argument(
                "transverse_l2_profile: T^(i) must be a positive integer multiple of t_ret,i");
        counts[i] = static_cast<int>(std::llround(ratio));
        total *= static_cast<double>(counts[i]);
    }
    if (total > 1e7) throw BudgetExceededError("transverse_l2_profile: return grid too large");

    std::map<std::vector<int>, std::complex<double>> by_label;
    Eigen::VectorXi j = Eigen::VectorXi::Zero(d);
    while (true) {
        ComposedCharacter cc = compose_with_iterate(shift, label, j);
        std::vector<int> key(cc.label_m.data(), cc.label_m.data() + cc.label_m.size());
        by_label[key] += cc.phase;
        int i = 0;
        while (i < d && ++j[i] >= counts[i]) j[i++] = 0;
        if (i == d) break;
    }
    double norm_sq = 0.0;
    for (const auto& kv : by_label) norm_sq += std::norm(kv.second);
    return std::sqrt(norm_sq);
}

}  // namespace nilflow
