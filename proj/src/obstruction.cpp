#include "reebfol/obstruction.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

namespace reebfol {

namespace {

struct Incidence {
    std::size_t face;
    int coef;
};

std::vector<std::vector<Incidence>> edge_faces(const LeafComplex& c) {
    std::vector<std::vector<Incidence>> ef(c.edges());
    for (std::size_t f = 0; f < c.faces(); ++f)
        for (const auto& [e, s] : c.face_edges[f]) {
            if (e >= c.edges()) throw ComplexError("face " + std::to_string(f) + " refers to a missing edge");
            ef[e].push_back({f, s});
        }
    return ef;
}

// Exact phase one: min sum of artificials for M x = b, x >= 0, b >= 0.
struct PhaseOne {
    bool feasible = false;
    std::vector<mpq_class> x;  // size n
    std::vector<mpq_class> y;  // row duals of the phase-one problem
    std::size_t pivots = 0;
};

PhaseOne phase_one(const std::vector<std::vector<mpq_class>>& M, const std::vector<mpq_class>& b, std::size_t n) {
    const std::size_t r = M.size(), cols = n + r;
    std::vector<std::vector<mpq_class>> T(r, std::vector<mpq_class>(cols + 1));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) T[i][j] = M[i][j];
        T[i][n + i] = 1;
        T[i][cols] = b[i];
    }
    std::vector<std::size_t> basis(r);
    std::iota(basis.begin(), basis.end(), n);
    // reduced costs: 1 on artificials minus column sums
    std::vector<mpq_class> rc(cols + 1);
    for (std::size_t j = 0; j <= cols; ++j) {
        mpq_class s = 0;
        for (std::size_t i = 0; i < r; ++i) s += T[i][j];
        rc[j] = (j >= n && j < cols ? mpq_class(1) : mpq_class(0)) - s;
    }
    PhaseOne out;
    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (sgn(rc[j]) < 0) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = r;
        mpq_class best;
        for (std::size_t i = 0; i < r; ++i) {
            if (sgn(T[i][enter]) <= 0) continue;
            mpq_class ratio = T[i][cols] / T[i][enter];
            if (leave == r || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == r) break;  // cannot happen: phase one is bounded below by 0
        const mpq_class piv = T[leave][enter];
        for (auto& v : T[leave]) v /= piv;
        for (std::size_t i = 0; i < r; ++i) {
            if (i == leave || sgn(T[i][enter]) == 0) continue;
            const mpq_class m = T[i][enter];
            for (std::size_t j = 0; j <= cols; ++j)
                if (sgn(T[leave][j]) != 0) T[i][j] -= m * T[leave][j];
        }
        if (sgn(rc[enter]) != 0) {
            const mpq_class m = rc[enter];
            for (std::size_t j = 0; j <= cols; ++j)
                if (sgn(T[leave][j]) != 0) rc[j] -= m * T[leave][j];
        }
        basis[leave] = enter;
        ++out.pivots;
    }
    // objective value is -rc[cols]
    out.feasible = sgn(rc[cols]) == 0;
    out.x.assign(n, 0);
    for (std::size_t i = 0; i < r; ++i)
        if (basis[i] < n) out.x[basis[i]] = T[i][cols];
    out.y.resize(r);
    for (std::size_t i = 0; i < r; ++i) out.y[i] = 1 - rc[n + i];
    return out;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::string to_string(LPOutcome::Kind k) { return k == LPOutcome::Kind::FeasibleBeta ? "FeasibleBeta" : "Obstruction"; }

std::size_t LeafComplex::marked() const {
    return static_cast<std::size_t>(std::count_if(mark.begin(), mark.end(), [](int s) { return s != 0; }));
}

std::size_t LeafComplex::add_edge(int sign) {
    mark.push_back(sign);
    return mark.size() - 1;
}

std::size_t LeafComplex::add_face(mpq_class a, std::vector<std::pair<std::size_t, int>> boundary) {
    area.push_back(std::move(a));
    face_edges.push_back(std::move(boundary));
    return area.size() - 1;
}

void LeafComplex::validate() const {
    if (face_edges.size() != area.size()) throw ComplexError("face and area counts differ");
    for (std::size_t f = 0; f < faces(); ++f)
        if (sgn(area[f]) <= 0) throw ComplexError("face " + std::to_string(f) + " has non-positive area");
    for (std::size_t e = 0; e < edges(); ++e)
        if (mark[e] < -1 || mark[e] > 1) throw ComplexError("edge " + std::to_string(e) + " has a bad mark");
    for (std::size_t f = 0; f < faces(); ++f)
        for (const auto& [e, s] : face_edges[f])
            if (s != 1 && s != -1) throw ComplexError("incidence coefficients must be +1 or -1");
    const auto ef = edge_faces(*this);
    for (std::size_t e = 0; e < edges(); ++e)
        if (ef[e].size() > 2) throw ComplexError("edge " + std::to_string(e) + " lies on more than two faces");
    if (edge_vertices.empty()) return;
    if (edge_vertices.size() != edges()) throw ComplexError("edge geometry size mismatch");
    // dd = 0: every face boundary is a cycle
    for (std::size_t f = 0; f < faces(); ++f) {
        std::map<std::size_t, int> net;
        for (const auto& [e, s] : face_edges[f]) {
            net[edge_vertices[e].second] += s;
            net[edge_vertices[e].first] -= s;
        }
        for (const auto& [v, k] : net)
            if (k != 0) throw ComplexError("boundary of face " + std::to_string(f) + " is not a cycle");
    }
}

LPOutcome solve_beta_lp(const LeafComplex& c) {
    c.validate();
    const std::size_t F = c.faces(), E = c.edges();
    const auto ef = edge_faces(c);

    // Blocks: faces joined by unmarked edges with opposite coefficients carry equal
    // weight. Boundary edges and parity edges (equal coefficients) force weight 0.
    UnionFind uf(F);
    enum EdgeRole : char { Marked, Good, Boundary, Parity, Isolated };
    std::vector<char> role(E, Isolated);
    for (std::size_t e = 0; e < E; ++e) {
        if (c.mark[e] != 0) {
            role[e] = Marked;
        } else if (ef[e].size() == 1) {
            role[e] = Boundary;
        } else if (ef[e].size() == 2) {
            role[e] = ef[e][0].coef == ef[e][1].coef ? Parity : Good;
            if (role[e] == Good) uf.unite(ef[e][0].face, ef[e][1].face);
        }
    }
    std::vector<std::size_t> block(F), first_face;
    std::map<std::size_t, std::size_t> block_id;
    for (std::size_t f = 0; f < F; ++f) {
        const auto [it, fresh] = block_id.emplace(uf.find(f), block_id.size());
        if (fresh) first_face.push_back(f);
        block[f] = it->second;
    }
    const std::size_t K = block_id.size();
    std::vector<char> killed(K, 0);
    std::vector<std::optional<std::size_t>> anchor(K);  // boundary or same-block parity edge
    std::vector<std::vector<std::size_t>> links(K);     // parity edges to other blocks
    for (std::size_t e = 0; e < E; ++e) {
        if (role[e] == Boundary) {
            const std::size_t k = block[ef[e][0].face];
            killed[k] = 1;
            if (!anchor[k]) anchor[k] = e;
        } else if (role[e] == Parity) {
            const std::size_t a = block[ef[e][0].face], b2 = block[ef[e][1].face];
            killed[a] = killed[b2] = 1;
            if (a == b2) {
                if (!anchor[a]) anchor[a] = e;
            } else {
                links[a].push_back(e);
                links[b2].push_back(e);
            }
        }
    }
    std::vector<std::size_t> live_index(K, K);
    std::vector<std::size_t> live;
    for (std::size_t k = 0; k < K; ++k)
        if (!killed[k]) {
            live_index[k] = live.size();
            live.push_back(k);
        }
    std::vector<mpq_class> block_area(K, 0);
    for (std::size_t f = 0; f < F; ++f) block_area[block[f]] += c.area[f];

    // reduced rows: marked edges, by their pattern on live blocks
    std::map<std::vector<std::pair<std::size_t, int>>, std::size_t> row_of;
    std::vector<std::vector<std::pair<std::size_t, int>>> rows;
    std::vector<std::size_t> row_edge;
    for (std::size_t e = 0; e < E; ++e) {
        if (c.mark[e] == 0) continue;
        std::map<std::size_t, int> entry;
        for (const auto& inc : ef[e]) {
            const std::size_t li = live_index[block[inc.face]];
            if (li < K) entry[li] += c.mark[e] * inc.coef;
        }
        std::vector<std::pair<std::size_t, int>> key;
        for (const auto& [li, v] : entry)
            if (v != 0) key.emplace_back(li, v);
        if (key.empty()) continue;
        if (row_of.emplace(key, rows.size()).second) {
            rows.push_back(key);
            row_edge.push_back(e);
        }
    }

    // dual: R W + t = 0, area . W = 1, W, t >= 0
    const std::size_t m = rows.size(), L = live.size(), n = L + m;
    std::vector<std::vector<mpq_class>> M(m + 1, std::vector<mpq_class>(n, 0));
    std::vector<mpq_class> b(m + 1, 0);
    for (std::size_t r = 0; r < m; ++r) {
        for (const auto& [li, v] : rows[r]) M[r][li] = v;
        M[r][L + r] = 1;
    }
    for (std::size_t li = 0; li < L; ++li) M[m][li] = block_area[live[li]];
    b[m] = 1;
    const PhaseOne p1 = phase_one(M, b, n);

    LPOutcome out;
    out.reduced_rows = m + 1;
    out.reduced_columns = n;
    out.pivots = p1.pivots;
    if (p1.feasible) {
        out.kind = LPOutcome::Kind::Obstruction;
        out.weights.assign(F, 0);
        mpq_class smallest = 0;
        for (std::size_t li = 0; li < L; ++li)
            if (sgn(p1.x[li]) > 0 && (sgn(smallest) == 0 || p1.x[li] < smallest)) smallest = p1.x[li];
        for (std::size_t f = 0; f < F; ++f) {
            const std::size_t li = live_index[block[f]];
            if (li < K) out.weights[f] = p1.x[li] / smallest;
        }
        return out;
    }

    // Farkas multipliers: lambda_r = -y_r >= 0 with R^T lambda >= nu area on live blocks
    out.kind = LPOutcome::Kind::FeasibleBeta;
    out.beta.assign(E, 0);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t e = row_edge[r];
        out.beta[e] = -p1.y[r] * c.mark[e];
    }
    std::vector<mpq_class> marked_in(F, 0), block_marked(K, 0);
    for (std::size_t e = 0; e < E; ++e) {
        if (c.mark[e] == 0 || sgn(out.beta[e]) == 0) continue;
        for (const auto& inc : ef[e]) marked_in[inc.face] += inc.coef * out.beta[e];
    }
    for (std::size_t f = 0; f < F; ++f) block_marked[block[f]] += marked_in[f];
    mpq_class delta = 1;
    for (std::size_t i = 0; i < L; ++i) {
        const mpq_class d = block_marked[live[i]] / block_area[live[i]];
        if (i == 0 || d < delta) delta = d;
    }
    out.delta = delta;

    // what the unmarked edges must still supply to each face; targets are lower bounds,
    // so a block may take a surplus
    std::vector<mpq_class> need(F), S(K, 0);
    for (std::size_t f = 0; f < F; ++f) {
        const std::size_t k = block[f];
        const mpq_class density = killed[k] ? delta : block_marked[k] / block_area[k];
        need[f] = c.area[f] * density - marked_in[f];
        S[k] += need[f];
    }
    mpq_class bound = 1;
    for (std::size_t k = 0; k < K; ++k) bound += abs(S[k]);
    auto set_free = [&](std::size_t e, const mpq_class& y) {  // contributes y to each incident face
        out.beta[e] = y / ef[e][0].coef;
        for (const auto& inc : ef[e]) {
            need[inc.face] -= y;
            S[block[inc.face]] -= y;
        }
    };
    // parity links between blocks: spanning forest, leaves first
    std::vector<char> seen_block(K, 0);
    std::vector<std::size_t> parent_link(K, E);
    for (std::size_t k0 = 0; k0 < K; ++k0) {
        if (seen_block[k0] || !killed[k0]) continue;
        std::vector<std::size_t> group{k0};
        seen_block[k0] = 1;
        for (std::size_t q = 0; q < group.size(); ++q)
            for (std::size_t e : links[group[q]]) {
                const std::size_t o = block[ef[e][0].face] == group[q] ? block[ef[e][1].face] : block[ef[e][0].face];
                if (seen_block[o]) continue;
                seen_block[o] = 1;
                parent_link[o] = e;
                group.push_back(o);
            }
        std::size_t root = k0;
        for (std::size_t k : group)
            if (anchor[k]) {
                root = k;
                break;
            }
        // re-root: orient the forest from the chosen root
        if (root != k0) {
            for (std::size_t k : group) seen_block[k] = 0, parent_link[k] = E;
            group.assign(1, root);
            seen_block[root] = 1;
            for (std::size_t q = 0; q < group.size(); ++q)
                for (std::size_t e : links[group[q]]) {
                    const std::size_t o =
                        block[ef[e][0].face] == group[q] ? block[ef[e][1].face] : block[ef[e][0].face];
                    if (seen_block[o]) continue;
                    seen_block[o] = 1;
                    parent_link[o] = e;
                    group.push_back(o);
                }
        }
        const bool anchored = anchor[root].has_value();
        for (std::size_t q = group.size(); q-- > 1;) {
            const std::size_t k = group[q], e = parent_link[k];
            const std::size_t own = block[ef[e][0].face] == k ? ef[e][0].face : ef[e][1].face;
            const mpq_class have = S[k];
            const mpq_class y = anchored ? have : (sgn(have) > 0 ? have : mpq_class(0)) + bound;
            need[own] += y - have;  // surplus
            S[k] += y - have;
            set_free(e, y);
        }
        if (anchored) {
            const std::size_t e = *anchor[root];
            if (role[e] == Parity) set_free(e, S[root] / 2);
        } else if (group.size() > 1) {
            need[first_face[root]] -= S[root];  // S[root] < 0 here: surplus
            S[root] = 0;
        }
    }

    // spanning-tree flows over good edges inside each block
    std::vector<std::vector<std::size_t>> adj(F);
    for (std::size_t e = 0; e < E; ++e)
        if (role[e] == Good && ef[e][0].face != ef[e][1].face) {
            adj[ef[e][0].face].push_back(e);
            adj[ef[e][1].face].push_back(e);
        }
    std::vector<char> seen(F, 0);
    std::vector<std::size_t> parent_edge(F, E), order;
    for (std::size_t k = 0; k < K; ++k) {
        const bool boundary_anchor = anchor[k] && role[*anchor[k]] == Boundary;
        const std::size_t root = boundary_anchor ? ef[*anchor[k]][0].face : first_face[k];
        order.assign(1, root);
        seen[root] = 1;
        for (std::size_t q = 0; q < order.size(); ++q) {
            const std::size_t f = order[q];
            for (std::size_t e : adj[f]) {
                const std::size_t g = ef[e][0].face == f ? ef[e][1].face : ef[e][0].face;
                if (seen[g]) continue;
                seen[g] = 1;
                parent_edge[g] = e;
                order.push_back(g);
            }
        }
        for (std::size_t q = order.size(); q-- > 1;) {
            const std::size_t f = order[q], e = parent_edge[f];
            const Incidence& mine = ef[e][0].face == f ? ef[e][0] : ef[e][1];
            const Incidence& other = ef[e][0].face == f ? ef[e][1] : ef[e][0];
            out.beta[e] = need[f] / mine.coef;
            need[other.face] -= other.coef * out.beta[e];
            need[f] = 0;
        }
        if (boundary_anchor) {
            const std::size_t e = *anchor[k];
            out.beta[e] = need[root] / ef[e][0].coef;
            need[root] = 0;
        }
    }
    return out;
}

bool verify_certificate(const LPOutcome& o, const LeafComplex& c) {
    const std::size_t F = c.faces(), E = c.edges();
    if (o.kind == LPOutcome::Kind::FeasibleBeta) {
        if (o.beta.size() != E) throw ComplexError("certificate has " + std::to_string(o.beta.size()) +
                                                   " edge values for a complex with " + std::to_string(E) + " edges");
        if (sgn(o.delta) <= 0) return false;
        for (std::size_t e = 0; e < E; ++e)
            if (c.mark[e] != 0 && sgn(o.beta[e]) * c.mark[e] < 0) return false;
        for (std::size_t f = 0; f < F; ++f) {
            mpq_class d = 0;
            for (const auto& [e, s] : c.face_edges[f]) d += s * o.beta[e];
            if (d < o.delta * c.area[f]) return false;
        }
        return true;
    }
    if (o.weights.size() != F) throw ComplexError("certificate has " + std::to_string(o.weights.size()) +
                                                  " face weights for a complex with " + std::to_string(F) + " faces");
    mpq_class total = 0;
    for (std::size_t f = 0; f < F; ++f) {
        if (sgn(o.weights[f]) < 0) return false;
        total += o.weights[f] * c.area[f];
    }
    if (sgn(total) <= 0) return false;
    std::vector<mpq_class> boundary(E, 0);
    for (std::size_t f = 0; f < F; ++f)
        for (const auto& [e, s] : c.face_edges[f]) boundary[e] += s * o.weights[f];
    for (std::size_t e = 0; e < E; ++e) {
        if (c.mark[e] == 0 && sgn(boundary[e]) != 0) return false;
        if (c.mark[e] != 0 && sgn(boundary[e]) * c.mark[e] > 0) return false;
    }
    return true;
}

SweepReport superharmonic_feasibility_sweep(const std::vector<SweepCase>& cases) {
    SweepReport r;
    for (const auto& sc : cases) {
        const LeafComplex cx = extract_complex(*sc.chart, *sc.tau, sc.slice, sc.n_levels);
        const LPOutcome o = solve_beta_lp(cx);
        SweepEntry e{sc.name, cx.faces(), cx.marked(), o.kind, verify_certificate(o, cx)};
        if (o.kind == LPOutcome::Kind::Obstruction) ++r.obstructions;
        r.entries.push_back(e);
    }
    return r;
}

}  // namespace reebfol
