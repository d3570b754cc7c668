#include "reebfol/logdiffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "reebfol/forms.hpp"
#include "reebfol/parallel.hpp"

namespace reebfol {

namespace {

double smoothstep5(double t) { return t * t * t * (t * (6 * t - 15) + 10); }

// What one path contributes: log-holonomy, farthest distance and end state.
struct PathSummary {
    double holonomy = 0.0;
    double d_max = 0.0;
    WalkerState end;
};

PathSummary trace(const FoliatedChart& chart, const LeafDiffusion& sampler, const TransverseMeasureField& tau,
                  const WalkerState& start, std::int64_t n_steps, const PathNoise& noise) {
    PathSummary s;
    s.end = start;
    const double lf0 = tau.log_f_at(chart, start.p, chart.slice_of(start.z));
    double d2 = 0.0;
    sampler.run(s.end, n_steps, noise, [&](std::int64_t, const WalkerState& w) { d2 = std::max(d2, w.cover.dot(w.cover)); });
    s.d_max = std::sqrt(d2);
    if (!s.end.truncated) s.holonomy = tau.log_f_at(chart, s.end.p, chart.slice_of(s.end.z)) - lf0 + s.end.log_scale;
    return s;
}

std::vector<double> kept(const std::vector<double>& v, const std::vector<char>& keep) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (keep[i]) out.push_back(v[i]);
    return out;
}

void check_params(const DiffusionParams& p) {
    if (!(p.T >= 0.0)) throw std::invalid_argument("T must be non-negative");
    if (!(p.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (p.n_paths < 2) throw std::invalid_argument("need at least 2 paths");
}

// Weighted least-squares field u with u ~ v (standard errors sv) and
// Lap u ~ l (standard errors sl), fitted slice by slice. Pathwise gradients
// are unreliable where the leaf has cone points, so the gradient channel
// is taken from u instead.
std::vector<double> fuse(const FoliatedChart& c, const std::vector<double>& v, const std::vector<double>& sv,
                         const std::vector<double>& l, const std::vector<double>& sl) {
    const std::size_t L = c.leaf_nodes();
    std::vector<double> u(v);
    if (*std::max_element(sv.begin(), sv.end()) == 0.0) return u;
    const double floor_v = 1e-6 * *std::max_element(sv.begin(), sv.end());
    for (int k = 0; k < c.nz(); ++k) {
        const std::size_t off = static_cast<std::size_t>(k) * L;
        auto lap = [&](std::vector<double> field) {
            return laplace_beltrami(DiscreteForm::zero_form(c, std::move(field), k, true), c, true).values;
        };
        // Lap u = A u + b, probed column by column
        const std::vector<double> b = lap(std::vector<double>(L, 0.0));
        std::vector<Eigen::Triplet<double>> at;
        std::vector<double> e(L, 0.0);
        for (std::size_t q = 0; q < L; ++q) {
            e[q] = 1.0;
            const std::vector<double> col = lap(e);
            e[q] = 0.0;
            for (std::size_t r = 0; r < L; ++r)
                if (std::isfinite(col[r]) && col[r] - b[r] != 0.0) at.emplace_back(r, q, col[r] - b[r]);
        }
        Eigen::SparseMatrix<double> A(L, L);
        A.setFromTriplets(at.begin(), at.end());
        Eigen::VectorXd wl(L), rl(L), wv(L), rv(L);
        for (std::size_t r = 0; r < L; ++r) {
            const bool ok = std::isfinite(l[off + r]) && std::isfinite(b[r]) && sl[off + r] > 0.0;
            wl[r] = ok ? 1.0 / (sl[off + r] * sl[off + r]) : 0.0;
            rl[r] = ok ? l[off + r] - b[r] : 0.0;
            const double s = std::max(sv[off + r], floor_v);
            wv[r] = 1.0 / (s * s);
            rv[r] = v[off + r];
        }
        Eigen::SparseMatrix<double> N = A.transpose() * wl.asDiagonal() * A;
        for (std::size_t r = 0; r < L; ++r) N.coeffRef(r, r) += wv[r];
        const Eigen::VectorXd rhs = A.transpose() * (wl.asDiagonal() * rl) + wv.cwiseProduct(rv);
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(N);
        if (solver.info() != Eigen::Success) throw std::runtime_error("channel fusion: factorization failed");
        const Eigen::VectorXd x = solver.solve(rhs);
        for (std::size_t r = 0; r < L; ++r) u[off + r] = x[r];
    }
    return u;
}

}  // namespace

CutoffSpec::CutoffSpec(double R, double S) : R_(R), S_(S) {
    if (!(S >= 2.0)) throw std::invalid_argument("cutoff S must be >= 2");
    if (!(R > 0.0)) throw std::invalid_argument("cutoff R must be positive");
    if (max_slope() > 10.0 / S * (1 + 1e-12))
        throw std::invalid_argument("cutoff R too small: profile slope exceeds 10 / S");
}

double CutoffSpec::max_slope() const { return disabled() ? 0.0 : 15.0 / (8.0 * (S_ - 1.0) * R_); }

double CutoffSpec::operator()(double dist) const {
    if (disabled() || dist <= R_) return 1.0;
    const double w = (S_ - 1.0) * R_;
    const double t = (dist - R_) / w;
    return t >= 1.0 ? 0.0 : 1.0 - smoothstep5(t);
}

double CutoffSpec::derivative(double dist) const {
    if (disabled() || dist <= R_) return 0.0;
    const double w = (S_ - 1.0) * R_;
    const double t = (dist - R_) / w;
    return t >= 1.0 ? 0.0 : -30.0 * t * t * (1 - t) * (1 - t) / w;
}

LogDiffusionResult log_diffuse(const FoliatedChart& chart, const TransverseMeasureField& tau, const DiffusionParams& p) {
    check_params(p);
    const LeafDiffusion sampler(chart, p.dt);
    const std::int64_t n_steps = sampler.steps(p.T);
    const std::size_t N = chart.node_count(), L = chart.leaf_nodes(), n = p.n_paths;

    const std::vector<double> lap = tau.laplacian_log(chart);
    std::vector<double> logf(N), ex_se(N), cx(N), cy(N), cl(N), cl_se(N);
    std::vector<std::size_t> truncated(N), undefined(N);
    const bool average_z = chart.nz() == 1 && chart.z_period() > 0.0;
    parallel_for(N, [&](std::size_t b0, std::size_t e0) {
        std::vector<double> ex(n), lp(n);
        std::vector<char> keep(n), keep_lap(n);
        for (std::size_t node = b0; node < e0; ++node) {
            const int k = static_cast<int>(node / L);
            const int j = static_cast<int>((node % L) / chart.nx()), i = static_cast<int>(node % chart.nx());
            const WalkerState start = sampler.initial(StartSpec::point({chart.x_at(i), chart.y_at(j)}, chart.z_at(k)), p.seed, 0);
            const double lap0 = lap[node];
            for (std::size_t q = 0; q < n; ++q) {
                // a single slice stands for the whole periodic band: average over the start height
                WalkerState w0 = start;
                if (average_z) w0.z = chart.grid().z0 + (1.0 - PathNoise(p.seed, streams::kStarts, q).uniform(3)) * chart.z_period();
                // common noise across nodes keeps the estimated field smooth
                const PathSummary s = trace(chart, sampler, tau, w0, n_steps, PathNoise(p.seed, streams::kDiffusion, q));
                keep[q] = !s.end.truncated;
                if (!keep[q]) {
                    keep_lap[q] = 0;
                    continue;
                }
                const double phi = p.cutoff(s.d_max);
                const int slice = chart.slice_of(s.end.z);
                ex[q] = phi * s.holonomy;
                const double l_end = TransverseMeasureField::interpolate(chart, lap, s.end.p, slice);
                keep_lap[q] = std::isfinite(l_end);
                if (keep_lap[q]) lp[q] = (1.0 - phi) * lap0 + phi * l_end;
            }
            const auto e = mean_se(kept(ex, keep));
            logf[node] = tau.log_f(node) + e.mean;
            ex_se[node] = e.se;
            const auto l = mean_se(kept(lp, keep_lap));
            cl[node] = std::isfinite(lap0) && l.n > 0 ? l.mean : std::numeric_limits<double>::quiet_NaN();
            cl_se[node] = l.se;
            truncated[node] = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), 0));
            undefined[node] = static_cast<std::size_t>(std::count(keep_lap.begin(), keep_lap.end(), 0)) - truncated[node];
        }
    });

    const std::vector<double> grad_fit =
        TransverseMeasureField(chart, fuse(chart, logf, ex_se, cl, cl_se)).gradient_log(chart);
    for (std::size_t q = 0; q < N; ++q) {
        cx[q] = grad_fit[2 * q];
        cy[q] = grad_fit[2 * q + 1];
    }
    LogDiffusionResult r;
    r.field = TransverseMeasureField(chart, std::move(logf), tau.anchor(), tau.regularity());
    r.field.set_channels({ex_se, cx, cy, cl, cl_se});
    r.max_exponent_se = *std::max_element(ex_se.begin(), ex_se.end());
    r.certified = r.max_exponent_se <= p.se_tolerance;
    for (std::size_t q = 0; q < N; ++q) {
        r.n_truncated += truncated[q];
        r.undefined_laplacian_samples += undefined[q];
    }
    return r;
}

SuperharmonicReport check_superharmonic(const FoliatedChart& chart, const TransverseMeasureField& tau, double margin) {
    const auto& ch = tau.channels();
    const bool have = ch && !ch->laplacian.empty();
    const std::vector<double> lap = have ? ch->laplacian : tau.laplacian_log(chart);
    const std::vector<double> se = have ? ch->laplacian_se : std::vector<double>(lap.size(), 0.0);
    SuperharmonicReport r;
    r.margin = margin;
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < chart.nz(); ++k)
        for (int j = 0; j < chart.ny(); ++j)
            for (int i = 0; i < chart.nx(); ++i) {
                if (!chart.is_leaf_interior(i, j)) continue;
                const std::size_t node = chart.node_index(i, j, k);
                const double v = lap[node], s = se[node];
                ++r.checked;
                if (!std::isfinite(v)) {
                    ++r.inconclusive;
                    continue;
                }
                if (v + 3 * s < -margin)
                    ++r.passed;
                else if (v - 3 * s >= -margin)
                    ++r.failed;
                else
                    ++r.inconclusive;
                if (v + 3 * s > worst) {
                    worst = v + 3 * s;
                    r.worst_node = node;
                    r.worst_laplacian = v;
                    r.worst_se = s;
                }
            }
    if (r.checked == 0)
        r.verdict = Verdict::Inconclusive;
    else if (r.failed > 0)
        r.verdict = Verdict::Fail;
    else if (r.inconclusive > 0)
        r.verdict = Verdict::Inconclusive;
    else
        r.verdict = Verdict::Pass;
    return r;
}

TailDecayReport tail_decay_check(const FoliatedChart& chart, const TransverseMeasureField& tau, const DiffusionParams& p,
                                 const std::vector<double>& radii, const std::vector<Vec2>& probes, int slice) {
    check_params(p);
    if (radii.empty() || probes.empty()) throw std::invalid_argument("need radii and probe points");
    for (std::size_t r = 1; r < radii.size(); ++r)
        if (!(radii[r] > radii[r - 1])) throw std::invalid_argument("radii must increase");
    std::vector<CutoffSpec> cut;
    for (double R : radii) cut.emplace_back(R, p.cutoff.S());

    const LeafDiffusion sampler(chart, p.dt);
    const std::int64_t n_steps = sampler.steps(p.T);
    const std::size_t n = p.n_paths, P = probes.size(), M = radii.size();
    std::vector<double> hol(P * n), dmax(P * n);
    std::vector<char> keep(P * n);
    parallel_for(P * n, [&](std::size_t b0, std::size_t e0) {
        for (std::size_t t = b0; t < e0; ++t) {
            const std::size_t a = t / n, q = t % n;
            const WalkerState start = sampler.initial(StartSpec::point(probes[a], chart.z_at(slice)), p.seed, 0);
            const PathSummary s = trace(chart, sampler, tau, start, n_steps, PathNoise(p.seed, streams::kDiffusion, q));
            hol[t] = s.holonomy;
            dmax[t] = s.d_max;
            keep[t] = !s.end.truncated;
        }
    });

    TailDecayReport r;
    r.radii = radii;
    r.exponent.assign(M, 0.0);
    r.discrepancy.assign(M, 0.0);
    r.discrepancy_se.assign(M, 0.0);
    std::vector<double> ref(P);
    for (std::size_t a = 0; a < P; ++a) {
        std::vector<double> v;
        for (std::size_t q = 0; q < n; ++q)
            if (keep[a * n + q]) v.push_back(cut.back()(dmax[a * n + q]) * hol[a * n + q]);
        ref[a] = mean_se(v).mean;
        r.scale = std::max(r.scale, std::fabs(ref[a]));
    }
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t a = 0; a < P; ++a) {
            std::vector<double> v, d;
            for (std::size_t q = 0; q < n; ++q) {
                const std::size_t t = a * n + q;
                if (!keep[t]) continue;
                v.push_back(cut[m](dmax[t]) * hol[t]);
                d.push_back((cut[m](dmax[t]) - cut.back()(dmax[t])) * hol[t]);
            }
            const auto ev = mean_se(v);
            const auto dv = mean_se(d);
            r.exponent[m] += ev.mean / static_cast<double>(P);
            if (std::fabs(dv.mean) >= r.discrepancy[m]) {
                r.discrepancy[m] = std::fabs(dv.mean);
                r.discrepancy_se[m] = dv.se;
            }
        }
        if (m > 0 && r.discrepancy[m] > r.discrepancy[m - 1] + 2 * std::hypot(r.discrepancy_se[m], r.discrepancy_se[m - 1]))
            r.monotone = false;
    }
    return r;
}

}  // namespace reebfol
