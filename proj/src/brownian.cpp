#include "reebfol/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "reebfol/parallel.hpp"

namespace reebfol {

LeafDiffusion::LeafDiffusion(const FoliatedChart& chart, double dt)
    : chart_(chart), dt_(dt), sqrt_dt_(std::sqrt(dt)), max_piece_(chart.min_spacing()) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
}

std::int64_t LeafDiffusion::steps(double T) const {
    if (T < 0.0) throw std::invalid_argument("T must be non-negative");
    return static_cast<std::int64_t>(std::llround(T / dt_));
}

WalkerState LeafDiffusion::initial(const StartSpec& start, std::uint64_t seed, std::uint64_t path) const {
    WalkerState w;
    w.z = start.z;
    w.sheet = start.sheet;
    if (start.kind == StartSpec::Kind::Point) {
        if (!chart_.contains(start.p)) throw GeometryError("start point outside the chart");
        w.p = start.p;
        return w;
    }
    const PathNoise u(seed, streams::kStarts, path);
    w.p = {chart_.x_min() + u.uniform(0) * (chart_.x_max() - chart_.x_min()),
           chart_.y_min() + u.uniform(1) * (chart_.y_max() - chart_.y_min())};
    if (chart_.sheets() == 2) w.sheet = u.uniform(2) < 0.5 ? 0 : 1;
    if (chart_.z_period() > 0.0) w.z = chart_.grid().z0 + (1.0 - u.uniform(3)) * chart_.z_period();
    return w;
}

Vec2 LeafDiffusion::drift(Vec2 p, int slice) const {
    const double d = 0.5 * chart_.min_spacing();
    auto flux = [&](Vec2 q) {
        const Metric2 g = chart_.metric_at(q.x, q.y, slice);
        const double s = std::sqrt(g.det());
        return g.inverse() * s;
    };
    const Metric2 xp = flux({p.x + d, p.y}), xm = flux({p.x - d, p.y});
    const Metric2 yp = flux({p.x, p.y + d}), ym = flux({p.x, p.y - d});
    const Metric2 g = chart_.metric_at(p.x, p.y, slice);
    const double s = std::sqrt(g.det());
    const double bx = ((xp.g11 - xm.g11) + (yp.g12 - ym.g12)) / (2.0 * d);
    const double by = ((xp.g12 - xm.g12) + (yp.g22 - ym.g22)) / (2.0 * d);
    return {bx / (2.0 * s), by / (2.0 * s)};
}

void LeafDiffusion::step(WalkerState& w, const PathNoise& noise, std::uint64_t k) const {
    const auto xi = noise.normal_pair(k);
    Vec2 s{xi.a * sqrt_dt_, xi.b * sqrt_dt_};
    if (!chart_.flat()) {
        const int slice = chart_.slice_of(w.z);
        const Mat2 L = chart_.metric_at(w.p.x, w.p.y, slice).inverse_sqrt_factor();
        const Vec2 dc = L * (w.frame * s) + drift(w.p, slice) * dt_;
        s = w.frame.transpose() * dc;
    }
    const double len = s.norm();
    if (len <= max_piece_) {
        advance(chart_, w, s);
        return;
    }
    const int pieces = static_cast<int>(std::ceil(len / max_piece_));
    const Vec2 piece = s * (1.0 / pieces);
    for (int i = 0; i < pieces && !w.truncated; ++i) advance(chart_, w, piece);
}

double EstimatorReport::extra(const std::string& key) const {
    for (const auto& [k, v] : extras)
        if (k == key) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

BrownianPath sample_path(const FoliatedChart& chart, const StartSpec& start, double T, double dt, std::uint64_t seed,
                         std::uint64_t path_index) {
    const LeafDiffusion sampler(chart, dt);
    WalkerState w = sampler.initial(start, seed, path_index);
    const PathNoise noise(seed, streams::kPaths, path_index);
    BrownianPath path;
    path.seed = seed;
    sampler.run(w, sampler.steps(T), noise, [&](std::int64_t k, const WalkerState& s) { path.push(k * dt, s); });
    return path;
}

std::vector<WalkerState> simulate_endpoints(const FoliatedChart& chart, const PathParams& p) {
    const LeafDiffusion sampler(chart, p.dt);
    const std::int64_t n_steps = sampler.steps(p.T);
    std::vector<WalkerState> out(p.n_paths);
    parallel_for(p.n_paths, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            WalkerState w = sampler.initial(p.start, p.seed, i);
            const PathNoise noise(p.seed, streams::kPaths, i);
            sampler.run(w, n_steps, noise, [](std::int64_t, const WalkerState&) {});
            out[i] = w;
        }
    });
    return out;
}

namespace {

void finish_truncation(EstimatorReport& r, std::size_t n_total) {
    r.n_paths = n_total;
    r.truncation_warning = n_total > 0 && r.n_truncated * 100 > n_total;
}

std::vector<double> compact(const std::vector<double>& v, const std::vector<char>& keep) {
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        if (keep[i]) out.push_back(v[i]);
    return out;
}

}  // namespace

EstimatorReport diffuse(const FoliatedChart& chart, const std::function<double(const WalkerState&)>& g,
                        const PathParams& p) {
    const auto ends = simulate_endpoints(chart, p);
    std::vector<double> vals(ends.size());
    std::vector<char> keep(ends.size());
    for (std::size_t i = 0; i < ends.size(); ++i) {
        keep[i] = !ends[i].truncated;
        vals[i] = keep[i] ? g(ends[i]) : 0.0;
    }
    EstimatorReport r;
    r.quantity = "diffusion";
    r.seed = p.seed;
    r.n_truncated = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 0));
    const auto kept = compact(vals, keep);
    const MeanSE m = mean_se(kept);
    r.estimate = m.mean;
    r.se = m.se;
    r.buckets.push_back({p.T, m.mean, m.se});
    r.extras.push_back({"sd", m.sd});
    finish_truncation(r, ends.size());
    return r;
}

std::pair<EstimatorReport, EstimatorReport> estimate_contraction_and_drift(const FoliatedChart& chart,
                                                                           const TransverseMeasureField& tau,
                                                                           const HolonomyParams& hp) {
    const PathParams& p = hp.paths;
    if (hp.n_buckets < 2) throw std::invalid_argument("need at least 2 time buckets");
    if (!(hp.fit_start >= 0.0 && hp.fit_start < 1.0)) throw std::invalid_argument("fit_start must lie in [0, 1)");
    const LeafDiffusion sampler(chart, p.dt);
    const std::int64_t n_steps = sampler.steps(p.T);
    if (n_steps < hp.n_buckets) throw std::invalid_argument("fewer steps than time buckets");
    const int B = hp.n_buckets;
    std::vector<std::int64_t> bucket_step(B);
    for (int b = 0; b < B; ++b) bucket_step[b] = std::llround(static_cast<double>(b + 1) * n_steps / B);
    const std::int64_t fit_from = static_cast<std::int64_t>(std::ceil(hp.fit_start * n_steps));

    const std::vector<double> lap = tau.channels() && !tau.channels()->laplacian.empty() ? tau.channels()->laplacian
                                                                                       : tau.laplacian_log(chart);

    const std::size_t n = p.n_paths;
    std::vector<double> slope(n), drift_avg(n), holo(n * B);
    std::vector<char> keep(n);
    std::vector<std::size_t> nan_samples(n);
    parallel_for(n, [&](std::size_t b0, std::size_t e0) {
        std::vector<double> tb, hb;
        for (std::size_t i = b0; i < e0; ++i) {
            WalkerState w = sampler.initial(p.start, p.seed, i);
            const PathNoise noise(p.seed, streams::kPaths, i);
            const double lf0 = tau.log_f_at(chart, w.p, chart.slice_of(w.z));
            int next = 0;
            double lap_sum = 0.0;
            std::int64_t lap_count = 0;
            tb.clear();
            hb.clear();
            sampler.run(w, n_steps, noise, [&](std::int64_t k, const WalkerState& s) {
                const int slice = chart.slice_of(s.z);
                if (k >= fit_from && k > 0) {
                    const double v = TransverseMeasureField::interpolate(chart, lap, s.p, slice);
                    if (std::isnan(v)) {
                        ++nan_samples[i];
                    } else {
                        lap_sum += v;
                        ++lap_count;
                    }
                }
                if (next < B && k == bucket_step[next]) {
                    const double h = tau.log_f_at(chart, s.p, slice) - lf0 + s.log_scale;
                    holo[i * B + next] = h;
                    if (k >= fit_from) {
                        tb.push_back(k * p.dt);
                        hb.push_back(h);
                    }
                    ++next;
                }
            });
            keep[i] = !w.truncated;
            if (!keep[i]) continue;
            double slope_i = 0.0;
            if (tb.size() >= 2) {
                double mt = 0, mh = 0;
                for (std::size_t q = 0; q < tb.size(); ++q) {
                    mt += tb[q];
                    mh += hb[q];
                }
                mt /= tb.size();
                mh /= tb.size();
                double sxy = 0, sxx = 0;
                for (std::size_t q = 0; q < tb.size(); ++q) {
                    sxy += (tb[q] - mt) * (hb[q] - mh);
                    sxx += (tb[q] - mt) * (tb[q] - mt);
                }
                slope_i = sxy / sxx;
            }
            slope[i] = slope_i;
            drift_avg[i] = lap_count > 0 ? lap_sum / lap_count : 0.0;
        }
    });

    EstimatorReport kappa, drift;
    kappa.quantity = "contraction_rate";
    drift.quantity = "drift_integral";
    kappa.seed = drift.seed = p.seed;
    const std::size_t truncated = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 0));
    kappa.n_truncated = drift.n_truncated = truncated;
    const MeanSE ks = mean_se(compact(slope, keep));
    kappa.estimate = ks.mean;
    kappa.se = ks.se;
    for (int b = 0; b < B; ++b) {
        std::vector<double> col;
        col.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i]) col.push_back(holo[i * B + b]);
        const MeanSE m = mean_se(col);
        kappa.buckets.push_back({bucket_step[b] * p.dt, m.mean, m.se});
    }
    kappa.extras.push_back({"fit_start", hp.fit_start});
    const MeanSE ds = mean_se(compact(drift_avg, keep));
    drift.estimate = ds.mean;
    drift.se = ds.se;
    std::size_t nan_total = 0;
    for (auto c : nan_samples) nan_total += c;
    drift.extras.push_back({"drift_rate", 0.5 * ds.mean});
    drift.extras.push_back({"drift_rate_se", 0.5 * ds.se});
    drift.extras.push_back({"undefined_laplacian_samples", static_cast<double>(nan_total)});
    finish_truncation(kappa, n);
    finish_truncation(drift, n);
    return {kappa, drift};
}

EstimatorReport estimate_contraction_rate(const FoliatedChart& chart, const TransverseMeasureField& tau,
                                          const HolonomyParams& p) {
    return estimate_contraction_and_drift(chart, tau, p).first;
}

EstimatorReport estimate_drift_integral(const FoliatedChart& chart, const TransverseMeasureField& tau,
                                        const HolonomyParams& p) {
    return estimate_contraction_and_drift(chart, tau, p).second;
}

StationaryReport estimate_stationary(const FoliatedChart& chart, const StationaryParams& sp) {
    const PathParams& p = sp.paths;
    if (sp.bins_x < 1 || sp.bins_y < 1 || sp.bins_z < 1) throw std::invalid_argument("histogram needs bins");
    const LeafDiffusion sampler(chart, p.dt);
    const std::int64_t n_steps = sampler.steps(p.T);
    const std::int64_t fit_from = static_cast<std::int64_t>(std::ceil(sp.fit_start * n_steps));
    const int nl = sp.bins_x * sp.bins_y, nzb = sp.bins_z;
    const std::size_t n = p.n_paths;
    std::vector<double> frac(n * (nl + nzb), 0.0);
    std::vector<char> keep(n);
    const double wx = chart.x_max() - chart.x_min(), wy = chart.y_max() - chart.y_min();
    parallel_for(n, [&](std::size_t b0, std::size_t e0) {
        for (std::size_t i = b0; i < e0; ++i) {
            WalkerState w = sampler.initial(p.start, p.seed, i);
            const PathNoise noise(p.seed, streams::kPaths, i);
            double* row = &frac[i * (nl + nzb)];
            std::int64_t count = 0;
            sampler.run(w, n_steps, noise, [&](std::int64_t k, const WalkerState& s) {
                if (k < fit_from || k == 0) return;
                const int bx = std::clamp(static_cast<int>((s.p.x - chart.x_min()) / wx * sp.bins_x), 0, sp.bins_x - 1);
                const int by = std::clamp(static_cast<int>((s.p.y - chart.y_min()) / wy * sp.bins_y), 0, sp.bins_y - 1);
                const int bz = std::clamp(static_cast<int>((s.z - sp.z_lo) / (sp.z_hi - sp.z_lo) * nzb), 0, nzb - 1);
                row[by * sp.bins_x + bx] += 1.0;
                row[nl + bz] += 1.0;
                ++count;
            });
            keep[i] = !w.truncated && count > 0;
            if (count > 0)
                for (int b = 0; b < nl + nzb; ++b) row[b] /= static_cast<double>(count);
        }
    });
    StationaryReport r;
    r.bins_x = sp.bins_x;
    r.bins_y = sp.bins_y;
    r.bins_z = nzb;
    r.seed = p.seed;
    r.n_paths = n;
    r.n_truncated = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 0));
    r.truncation_warning = r.n_truncated * 100 > n;
    for (int b = 0; b < nl + nzb; ++b) {
        std::vector<double> col;
        col.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            if (keep[i]) col.push_back(frac[i * (nl + nzb) + b]);
        const MeanSE m = mean_se(col);
        if (b < nl) {
            r.leaf_mass.push_back(m.mean);
            r.leaf_se.push_back(m.se);
        } else {
            r.z_mass.push_back(m.mean);
            r.z_se.push_back(m.se);
        }
    }
    r.total_mass = pairwise_sum(r.leaf_mass);
    return r;
}

double chi_square(const std::vector<double>& mass, const std::vector<double>& se, const std::vector<double>& ref) {
    if (mass.size() != se.size() || mass.size() != ref.size()) throw std::invalid_argument("histogram sizes differ");
    double chi2 = 0.0;
    for (std::size_t b = 0; b < mass.size(); ++b)
        if (se[b] > 0.0) chi2 += (mass[b] - ref[b]) * (mass[b] - ref[b]) / (se[b] * se[b]);
    return chi2;
}

std::vector<double> area_reference(const FoliatedChart& chart, int bins_x, int bins_y) {
    const int sub = 8;
    std::vector<double> ref(static_cast<std::size_t>(bins_x) * bins_y, 0.0);
    const double wx = (chart.x_max() - chart.x_min()) / bins_x, wy = (chart.y_max() - chart.y_min()) / bins_y;
    for (int by = 0; by < bins_y; ++by)
        for (int bx = 0; bx < bins_x; ++bx) {
            double a = 0.0;
            for (int v = 0; v < sub; ++v)
                for (int u = 0; u < sub; ++u) {
                    const double x = chart.x_min() + (bx + (u + 0.5) / sub) * wx;
                    const double y = chart.y_min() + (by + (v + 0.5) / sub) * wy;
                    a += std::sqrt(chart.metric_at(x, y, 0).det());
                }
            ref[by * bins_x + bx] = a;
        }
    const double total = pairwise_sum(ref);
    for (double& v : ref) v /= total;
    return ref;
}

}  // namespace reebfol
