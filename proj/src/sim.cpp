#include "sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "buckets.hpp"
#include "errors.hpp"
#include "inference.hpp"
#include "reliability.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace fv::sim {

namespace {

constexpr std::uint64_t kTagProbs = 1;
constexpr std::uint64_t kTagOutcomes = 2;

struct Layout {
    std::vector<int> sizes;
    std::vector<double> fixed_p; // per bucket; empty when probabilities are drawn
    bool alt_forecast = false;
    bool uniform_bucket_p = false; // bucket probability ~ Uniform(0, 1) per period
    bool per_record_p = false;     // record probability ~ Uniform on the bucket's bin
    int total = 0;
};

Layout layout_for(int id) {
    Layout lay;
    switch (id) {
    case 1:
        lay.sizes.assign(10, 15);
        lay.fixed_p = {0.1, 0.25, 0.3, 0.35, 0.4, 0.5, 0.65, 0.7, 0.75, 0.8};
        break;
    case 2:
        lay.sizes = {2, 2, 2, 5, 5, 24, 30, 35, 45};
        lay.alt_forecast = true;
        lay.uniform_bucket_p = true;
        break;
    case 3:
        lay.sizes.assign(5, 30);
        lay.fixed_p = {0.1, 0.3, 0.5, 0.7, 0.9};
        lay.alt_forecast = true;
        break;
    case 4:
        lay.sizes.assign(5, 30);
        lay.alt_forecast = true;
        lay.per_record_p = true;
        break;
    default:
        throw ValidationError("scenario id must be 1, 2, 3 or 4");
    }
    for (int s : lay.sizes)
        lay.total += s;
    return lay;
}

std::string bucket_label(int j) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "b%02d", j + 1);
    return buf;
}

struct PeriodDraw {
    std::vector<double> p; // per record
    std::vector<double> y; // per record
    std::vector<double> bucket_mean;
    double global_mean = 0.0;
};

PeriodDraw draw_period(const Layout& lay, const ScenarioSpec& spec,
                       std::uint64_t run, std::uint64_t t) {
    PeriodDraw d;
    d.p.reserve(lay.total);

    CounterRng rng_p(spec.seed, run, CounterRng::stream_id(kTagProbs, t));
    for (std::size_t j = 0; j < lay.sizes.size(); ++j) {
        double bucket_p = 0.0;
        if (lay.uniform_bucket_p)
            bucket_p = rng_p.uniform();
        else if (!lay.fixed_p.empty())
            bucket_p = lay.fixed_p[j];
        for (int k = 0; k < lay.sizes[j]; ++k) {
            if (lay.per_record_p)
                d.p.push_back(rng_p.uniform(0.2 * static_cast<double>(j),
                                            0.2 * static_cast<double>(j + 1)));
            else
                d.p.push_back(bucket_p);
        }
    }

    CounterRng rng_y(spec.seed, run, CounterRng::stream_id(kTagOutcomes, t));
    d.y.reserve(lay.total);
    for (double p : d.p)
        d.y.push_back(rng_y.bernoulli(p));

    d.bucket_mean.assign(lay.sizes.size(), 0.0);
    double total_sum = 0.0;
    std::size_t offset = 0;
    for (std::size_t j = 0; j < lay.sizes.size(); ++j) {
        double sum = 0.0;
        for (int k = 0; k < lay.sizes[j]; ++k)
            sum += d.y[offset + k];
        d.bucket_mean[j] = sum / lay.sizes[j];
        total_sum += sum;
        offset += lay.sizes[j];
    }
    d.global_mean = total_sum / lay.total;
    return d;
}

} // namespace

Panel gen_scenario(const ScenarioSpec& spec, int run_index) {
    if (run_index < 0)
        throw ValidationError("run index must be non-negative");
    Layout lay = layout_for(spec.id);
    std::uint64_t run = static_cast<std::uint64_t>(run_index);

    PeriodDraw prev = draw_period(lay, spec, run, 0);
    std::vector<ForecastRecord> records;
    records.reserve(2 * static_cast<std::size_t>(lay.total));
    for (int t = 1; t <= 2; ++t) {
        PeriodDraw cur = draw_period(lay, spec, run, static_cast<std::uint64_t>(t));
        int k = 0;
        for (std::size_t j = 0; j < lay.sizes.size(); ++j) {
            for (int r = 0; r < lay.sizes[j]; ++r, ++k) {
                ForecastRecord rec;
                rec.t = t;
                rec.k = k;
                rec.y = cur.y[k];
                rec.p_hat = prev.bucket_mean[j];
                if (lay.alt_forecast)
                    rec.p_hat_alt = prev.global_mean;
                rec.p_true = cur.p[k];
                rec.bucket = bucket_label(static_cast<int>(j));
                records.push_back(std::move(rec));
            }
        }
        prev = std::move(cur);
    }
    return Panel(std::move(records), PanelMode::binary);
}

const std::vector<double>& scenario4_bin_edges() {
    static const std::vector<double> edges = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    return edges;
}

namespace {

struct RunOutcome {
    double ratio = 0.0;
    double studentized = 0.0;
    bool failed = false;
    bool clamped = false;
    struct Bin {
        bool nonempty = false;
        bool evaluable = false;
        bool covered = false;
        double p_bar = 0.0, y_bar = 0.0, v_true = 0.0, v_hat = 0.0;
    };
    std::vector<Bin> bins;
};

RunOutcome run_one(const ScenarioSpec& spec, int run_index) {
    RunOutcome out;
    Panel panel = gen_scenario(spec, run_index);
    BucketPartition part = BucketPartition::by_label(panel);
    const double n = static_cast<double>(panel.size());
    const LossSpec brier = LossSpec::squared_error();

    if (spec.id == 1) {
        double adjusted = adjusted_brier(panel, part);
        stats::KahanSum target;
        for (const auto& r : panel.records()) {
            double d = *r.p_true - r.p_hat;
            target.add(d * d);
        }
        double l_n = target.value() / n;
        BetaHatSq bh = beta_hat_sq(panel, part);
        double beta_true = beta_sq_true(panel, part);
        out.clamped = bh.clamped;
        if (bh.value <= 0.0 || beta_true <= 0.0) {
            out.failed = true;
            return out;
        }
        out.ratio = std::sqrt(bh.value / beta_true);
        out.studentized = std::sqrt(n) * (adjusted - l_n) / std::sqrt(bh.value);
        return out;
    }

    EvalReport est = compare_forecasts(panel, brier, 0.05,
                                       VarianceSource::bucket(part));
    EvalReport ref = compare_forecasts(panel, brier, 0.05,
                                       VarianceSource::true_p());
    stats::KahanSum target;
    for (const auto& r : panel.records()) {
        double p = *r.p_true;
        double d1 = p - r.p_hat;
        double d2 = p - *r.p_hat_alt;
        target.add(d1 * d1 - d2 * d2);
    }
    double delta_n = target.value() / n;
    if (est.std_error <= 0.0 || ref.std_error <= 0.0) {
        out.failed = true;
        return out;
    }
    out.ratio = est.std_error / ref.std_error;
    out.studentized = (est.estimate - delta_n) / est.std_error;

    if (spec.id == 4) {
        const auto& edges = scenario4_bin_edges();
        BucketPartition bins = BucketPartition::by_bins(panel, edges);
        std::vector<ReliabilityBin> diagram = reliability_diagram(panel, bins, 0.05);

        const int nbins = bins.bin_count();
        std::vector<double> p_sum(nbins, 0.0), pq_sum(nbins, 0.0);
        std::vector<std::size_t> count(nbins, 0);
        for (const auto& cell : bins.cells()) {
            for (std::uint32_t i : cell.indices) {
                double p = *panel[i].p_true;
                p_sum[cell.bin_index] += p;
                pq_sum[cell.bin_index] += p * (1.0 - p);
                ++count[cell.bin_index];
            }
        }

        out.bins.resize(nbins);
        for (int j = 0; j < nbins; ++j) {
            auto& b = out.bins[j];
            const ReliabilityBin& rb = diagram[j];
            if (rb.n_j == 0)
                continue;
            b.nonempty = true;
            b.y_bar = *rb.y_bar;
            b.p_bar = p_sum[j] / static_cast<double>(count[j]);
            b.v_true = pq_sum[j] / static_cast<double>(count[j]);
            if (rb.v_hat) {
                b.v_hat = *rb.v_hat;
                b.evaluable = true;
                b.covered = *rb.ci_lo <= b.p_bar && b.p_bar <= *rb.ci_hi;
            }
        }
    }
    return out;
}

} // namespace

int thread_budget() {
    int budget = 0;
    if (const char* env = std::getenv("FORECASTVAL_THREADS")) {
        std::string s(env);
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
            throw ValidationError("FORECASTVAL_THREADS must be a non-negative integer");
        budget = v;
    }
    if (budget == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        budget = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return budget;
}

MonteCarloSummary run_monte_carlo(const ScenarioSpec& spec) {
    if (spec.runs < 1)
        throw ValidationError("runs must be >= 1");
    layout_for(spec.id); // validate id before spawning workers

    std::vector<RunOutcome> results(static_cast<std::size_t>(spec.runs));
    int workers = std::min(thread_budget(), spec.runs);
    if (workers <= 1) {
        for (int r = 0; r < spec.runs; ++r)
            results[r] = run_one(spec, r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (int r = w; r < spec.runs; r += workers)
                    results[r] = run_one(spec, r);
            });
        }
        for (auto& th : pool)
            th.join();
    }

    MonteCarloSummary summary;
    summary.scenario = spec.id;
    summary.runs = spec.runs;
    summary.seed = spec.seed;
    if (spec.id == 4)
        summary.bins.resize(scenario4_bin_edges().size() - 1);
    for (int r = 0; r < spec.runs; ++r) {
        const RunOutcome& ro = results[r];
        if (ro.failed) {
            summary.failed_runs.push_back(r);
            continue;
        }
        if (ro.clamped)
            ++summary.clamp_events;
        summary.ratios.push_back(ro.ratio);
        summary.studentized.push_back(ro.studentized);
        for (std::size_t j = 0; j < ro.bins.size(); ++j) {
            const auto& rb = ro.bins[j];
            auto& agg = summary.bins[j];
            if (!rb.nonempty)
                continue;
            ++agg.nonempty;
            agg.p_bar.push_back(rb.p_bar);
            agg.y_bar.push_back(rb.y_bar);
            agg.v_true.push_back(rb.v_true);
            if (rb.evaluable) {
                agg.v_hat.push_back(rb.v_hat);
                ++agg.evaluable;
                if (rb.covered)
                    ++agg.covered;
            }
        }
    }
    return summary;
}

std::vector<std::pair<double, double>> qq_data(std::vector<double> statistics) {
    if (statistics.size() < 2)
        throw ValidationError("Q-Q data needs at least 2 statistics");
    std::sort(statistics.begin(), statistics.end());
    const double m = static_cast<double>(statistics.size());
    std::vector<std::pair<double, double>> out;
    out.reserve(statistics.size());
    for (std::size_t i = 0; i < statistics.size(); ++i) {
        double q = (static_cast<double>(i) + 0.5) / m;
        out.emplace_back(stats::normal_quantile(q), statistics[i]);
    }
    return out;
}

} // namespace fv::sim
