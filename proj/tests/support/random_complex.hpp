#pragma once

#include <array>
#include <map>
#include <random>

#include "reebfol/obstruction.hpp"

namespace oracle {

// Random triangulated grid complex: optional periodic axes, random rational areas,
// random marked edges and signs, and (optionally) faces with reversed orientation,
// which produce edges with equal coefficients on both sides.
inline reebfol::LeafComplex random_complex(std::mt19937_64& rng, int max_faces = 500, bool allow_flips = true) {
    using reebfol::LeafComplex;
    std::uniform_int_distribution<int> side(1, 15);
    int nx, ny;
    do {
        nx = side(rng);
        ny = side(rng);
    } while (2 * nx * ny > max_faces);
    const bool px = nx >= 3 && rng() % 2, py = ny >= 3 && rng() % 2;
    const double p_mark = std::uniform_real_distribution<double>(0.0, 0.4)(rng);
    const bool flips = allow_flips && rng() % 4 == 0;
    LeafComplex c;
    const int vx = px ? nx : nx + 1, vy = py ? ny : ny + 1;
    auto vid = [&](int i, int j) { return static_cast<std::size_t>((j % vy) * vx + (i % vx)); };
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edges;
    auto edge = [&](std::size_t u, std::size_t v) -> std::pair<std::size_t, int> {
        const auto key = std::minmax(u, v);
        auto it = edges.find(key);
        if (it == edges.end()) {
            const int mark = std::bernoulli_distribution(p_mark)(rng) ? (rng() % 2 ? 1 : -1) : 0;
            const std::size_t e = c.add_edge(mark);
            c.edge_vertices.emplace_back(u, v);
            it = edges.emplace(key, e).first;
        }
        return {it->second, c.edge_vertices[it->second].first == u ? 1 : -1};
    };
    std::uniform_int_distribution<int> num(1, 9);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t a = vid(i, j), b = vid(i + 1, j), d = vid(i + 1, j + 1), e = vid(i, j + 1);
            for (auto tri : {std::array<std::size_t, 3>{a, b, d}, std::array<std::size_t, 3>{a, d, e}}) {
                std::vector<std::pair<std::size_t, int>> bnd;
                for (int s = 0; s < 3; ++s) bnd.push_back(edge(tri[s], tri[(s + 1) % 3]));
                if (flips && rng() % 5 == 0)
                    for (auto& be : bnd) be.second = -be.second;
                c.add_face(mpq_class(num(rng), num(rng)), std::move(bnd));
            }
        }
    for (auto& a : c.area) a.canonicalize();
    c.vertices.resize(static_cast<std::size_t>(vx) * vy);
    return c;
}

// Closed consistently oriented torus, no marks: Stokes forces the obstruction.
inline reebfol::LeafComplex stokes_torus(std::mt19937_64& rng) {
    const int nx = 3 + static_cast<int>(rng() % 10), ny = 3 + static_cast<int>(rng() % 10);
    reebfol::LeafComplex t;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edges;
    auto vid = [&](int i, int j) { return static_cast<std::size_t>((j % ny) * nx + (i % nx)); };
    auto edge = [&](std::size_t u, std::size_t v) -> std::pair<std::size_t, int> {
        const auto key = std::minmax(u, v);
        auto it = edges.find(key);
        if (it == edges.end()) {
            const std::size_t e = t.add_edge(0);
            t.edge_vertices.emplace_back(u, v);
            it = edges.emplace(key, e).first;
        }
        return {it->second, t.edge_vertices[it->second].first == u ? 1 : -1};
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t a = vid(i, j), b = vid(i + 1, j), d = vid(i + 1, j + 1), e = vid(i, j + 1);
            t.add_face(mpq_class(1 + rng() % 5, 1 + rng() % 5), {edge(a, b), edge(b, d), edge(d, a)});
            t.add_face(mpq_class(1 + rng() % 5, 1 + rng() % 5), {edge(a, d), edge(d, e), edge(e, a)});
        }
    for (auto& a : t.area) a.canonicalize();
    return t;
}

}  // namespace oracle
