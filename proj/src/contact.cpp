#include "reebfol/contact.hpp"

#include <cmath>
#include <limits>

#include "reebfol/forms.hpp"

namespace reebfol {

namespace {

// d/dz of a node field across slices; zero on single-slice charts.
double z_derivative(const FoliatedChart& c, const std::vector<double>& v, std::size_t node) {
    const int nz = c.nz();
    if (nz == 1) return 0.0;
    const std::size_t L = c.leaf_nodes();
    const int k = static_cast<int>(node / L);
    const std::size_t leaf = node % L;
    const double h = c.grid().hz;
    const bool periodic = c.z_period() > 0.0 && std::fabs(nz * h - c.z_period()) < 1e-9 * c.z_period();
    auto at = [&](int q) { return v[static_cast<std::size_t>((q + nz) % nz) * L + leaf]; };
    if (periodic || (k > 0 && k < nz - 1)) return (at(k + 1) - at(k - 1)) / (2 * h);
    if (nz == 2) return (at(1) - at(0)) / h;
    if (k == 0) return (4 * (at(1) - at(0)) - (at(2) - at(0))) / (2 * h);
    return (4 * (at(nz - 1) - at(nz - 2)) - (at(nz - 1) - at(nz - 3))) / (2 * h);
}

// (d/dx, d/dy) of log f at every node, interleaved.
std::vector<double> log_gradient(const FoliatedChart& c, const TransverseMeasureField& tau, bool use_channels) {
    const auto& ch = tau.channels();
    if (use_channels && ch && !ch->grad_x.empty()) {
        std::vector<double> g(2 * c.node_count());
        for (std::size_t q = 0; q < c.node_count(); ++q) {
            g[2 * q] = ch->grad_x[q];
            g[2 * q + 1] = ch->grad_y[q];
        }
        return g;
    }
    return tau.gradient_log(c);
}

std::vector<double> log_laplacian(const FoliatedChart& c, const TransverseMeasureField& tau, bool use_channels) {
    const auto& ch = tau.channels();
    if (use_channels && ch && !ch->laplacian.empty()) return ch->laplacian;
    return tau.laplacian_log(c);
}

// Leafwise gradient of a plain node field, interleaved, slice by slice.
std::vector<double> plain_gradient(const FoliatedChart& c, const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(2 * v.size());
    const std::size_t L = c.leaf_nodes();
    for (int k = 0; k < c.nz(); ++k) {
        std::vector<double> slice(v.begin() + static_cast<std::ptrdiff_t>(k * L),
                                  v.begin() + static_cast<std::ptrdiff_t>((k + 1) * L));
        const auto g = gradient(DiscreteForm::zero_form(c, std::move(slice), k), c);
        out.insert(out.end(), g.values.begin(), g.values.end());
    }
    return out;
}

}  // namespace

OneForm3 build_beta(const FoliatedChart& c, const TransverseMeasureField& tau, bool use_channels) {
    const std::vector<double> grad = log_gradient(c, tau, use_channels);
    const std::size_t N = c.node_count(), L = c.leaf_nodes();
    OneForm3 beta{std::vector<double>(N), std::vector<double>(N), std::vector<double>(N, 0.0)};
    for (int k = 0; k < c.nz(); ++k) {
        std::vector<double> ab(grad.begin() + static_cast<std::ptrdiff_t>(2 * k * L),
                               grad.begin() + static_cast<std::ptrdiff_t>(2 * (k + 1) * L));
        const auto star = hodge_star2(DiscreteForm::nodal_one_form(c, std::move(ab), k), c);
        for (std::size_t q = 0; q < L; ++q) {
            beta.x[k * L + q] = -star.values[2 * q];
            beta.y[k * L + q] = -star.values[2 * q + 1];
        }
    }
    return beta;
}

OneForm3 build_alpha(const FoliatedChart& c, const TransverseMeasureField& tau, const OneForm3& beta, double eps) {
    const std::size_t N = c.node_count();
    OneForm3 a{std::vector<double>(N), std::vector<double>(N), std::vector<double>(N)};
    for (std::size_t q = 0; q < N; ++q) {
        a.x[q] = eps * beta.x[q];
        a.y[q] = eps * beta.y[q];
        a.z[q] = tau.f(q) + eps * beta.z[q];
    }
    return a;
}

ContactVolume contact_volume(const FoliatedChart& c, const TransverseMeasureField& tau, const OneForm3& beta, double eps,
                             bool use_channels) {
    const std::size_t N = c.node_count();
    const std::vector<double> gL = log_gradient(c, tau, use_channels);
    const std::vector<double> lap = log_laplacian(c, tau, use_channels);
    const std::vector<double> gbx = plain_gradient(c, beta.x), gby = plain_gradient(c, beta.y);
    ContactVolume v;
    v.direct.resize(N);
    v.expansion.resize(N);
    v.curl.resize(N);
    v.min_direct = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < N; ++q) {
        const double f = tau.f(q);
        const double A1 = eps * beta.x[q], A2 = eps * beta.y[q], A3 = f;
        const double dxA3 = f * gL[2 * q], dyA3 = f * gL[2 * q + 1];
        const double dxA2 = eps * gby[2 * q], dyA1 = eps * gbx[2 * q + 1];
        const double dzA1 = eps * z_derivative(c, beta.x, q), dzA2 = eps * z_derivative(c, beta.y, q);
        const Vec3 curl{dyA3 - dzA2, dzA1 - dxA3, dxA2 - dyA1};
        v.curl[q] = curl;
        v.direct[q] = A1 * curl.x + A2 * curl.y + A3 * curl.z;
        if (v.direct[q] < v.min_direct) {
            v.min_direct = v.direct[q];
            v.argmin = q;
        }
        const Metric2& g = c.metric(q);
        const Metric2 gi = g.inverse();
        const double a = gL[2 * q], b = gL[2 * q + 1];
        const double norm2 = gi.g11 * a * a + 2 * gi.g12 * a * b + gi.g22 * b * b;
        v.expansion[q] = eps * f * std::sqrt(g.det()) * (norm2 - lap[q]);
        const std::size_t leaf = q % c.leaf_nodes();
        const int i = static_cast<int>(leaf % c.nx()), j = static_cast<int>(leaf / c.nx());
        if (std::isfinite(v.expansion[q]) && c.is_leaf_interior(i, j))
            v.max_disagreement = std::max(v.max_disagreement, std::fabs(v.direct[q] - v.expansion[q]));
    }
    v.positive = v.min_direct > 0.0;
    return v;
}

ReebField reeb_field(const FoliatedChart& c, const OneForm3& alpha, const ContactVolume& vol) {
    const std::size_t N = c.node_count();
    ReebField r;
    r.R.resize(N);
    for (std::size_t q = 0; q < N; ++q) {
        const Vec3 w = vol.curl[q];
        const double cn = std::sqrt(w.x * w.x + w.y * w.y + w.z * w.z);
        const double V = vol.direct[q];
        if (!(std::fabs(V) > 1e-14 * cn * std::fabs(alpha.z[q])) || cn == 0.0)
            throw DegenerateReeb("Reeb field undefined at node " + std::to_string(q) + ": alpha^d(alpha) vanishes");
        const Vec3 R{w.x / V, w.y / V, w.z / V};
        r.R[q] = R;
        // i_R d(alpha) = curl x R, which vanishes for R parallel to curl
        const Vec3 k{w.y * R.z - w.z * R.y, w.z * R.x - w.x * R.z, w.x * R.y - w.y * R.x};
        const double rn = std::sqrt(R.x * R.x + R.y * R.y + R.z * R.z);
        r.max_kernel_residual =
            std::max(r.max_kernel_residual, std::sqrt(k.x * k.x + k.y * k.y + k.z * k.z) / (cn * rn));
        r.max_normalization_residual =
            std::max(r.max_normalization_residual, std::fabs(alpha.x[q] * R.x + alpha.y[q] * R.y + alpha.z[q] * R.z - 1.0));
    }
    return r;
}

TransverseReport check_reeb_transverse(const FoliatedChart& c, const TransverseMeasureField& tau, double eps,
                                       bool use_channels, double zero_tol) {
    TransverseReport t;
    t.eps = eps;
    const OneForm3 beta = build_beta(c, tau, use_channels);
    const OneForm3 alpha = build_alpha(c, tau, beta, eps);
    const ContactVolume vol = contact_volume(c, tau, beta, eps, use_channels);
    std::optional<ReebField> reeb;
    try {
        reeb = reeb_field(c, alpha, vol);
    } catch (const DegenerateReeb&) {
        t.degenerate = true;
    }
    t.min_dalpha_sigma = std::numeric_limits<double>::infinity();
    t.min_tau_R = std::numeric_limits<double>::infinity();
    bool all_positive = true;
    for (std::size_t q = 0; q < c.node_count(); ++q) {
        const double ds = vol.curl[q].z / std::sqrt(c.metric(q).det());
        if (ds < t.min_dalpha_sigma) {
            t.min_dalpha_sigma = ds;
            t.worst_node = q;
        }
        const bool ds_pos = ds > zero_tol;
        all_positive = all_positive && ds_pos;
        if (reeb) {
            const double tr = tau.f(q) * reeb->R[q].z;
            t.min_tau_R = std::min(t.min_tau_R, tr);
            const bool tr_pos = tr > zero_tol;
            const bool tr_neg = tr < -zero_tol, ds_neg = ds < -zero_tol;
            if ((ds_pos && tr_neg) || (ds_neg && tr_pos)) t.criteria_agree = false;
            all_positive = all_positive && tr_pos;
        }
    }
    if (!reeb) t.min_tau_R = std::numeric_limits<double>::quiet_NaN();
    t.verdict = all_positive && reeb && t.criteria_agree ? Verdict::Pass : Verdict::Fail;
    return t;
}

std::optional<double> auto_epsilon(const FoliatedChart& c, const TransverseMeasureField& tau, bool use_channels) {
    const OneForm3 beta = build_beta(c, tau, use_channels);
    for (int k = 0; k <= 40; ++k) {
        const double eps = std::ldexp(1.0, -k);
        const ContactVolume vol = contact_volume(c, tau, beta, eps, use_channels);
        if (!vol.positive) continue;
        bool ok = true;
        for (std::size_t q = 0; q < c.node_count() && ok; ++q) ok = vol.curl[q].z > 0.0;
        if (ok) return eps;
    }
    return std::nullopt;
}

}  // namespace reebfol
