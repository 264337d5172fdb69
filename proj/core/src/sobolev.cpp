#include "sbridge/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sbridge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Components {
    std::vector<int> label;  // -1 for cells touching no edge
    int count = 0;
};

Components components(std::size_t n, const std::vector<WeightedEdge>& edges) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<char> touched(n, 0);
    for (const auto& e : edges) {
        touched[e.a] = touched[e.b] = 1;
        parent[find(e.a)] = find(e.b);
    }
    Components c;
    c.label.assign(n, -1);
    std::vector<int> root_label(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!touched[i]) continue;
        std::size_t r = find(i);
        if (root_label[r] < 0) root_label[r] = c.count++;
        c.label[i] = root_label[r];
    }
    return c;
}

void project(std::vector<double>& v, const Components& c) {
    std::vector<double> sum(c.count, 0.0);
    std::vector<std::size_t> cnt(c.count, 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (c.label[i] < 0) {
            v[i] = 0;
            continue;
        }
        sum[c.label[i]] += v[i];
        cnt[c.label[i]]++;
    }
    for (std::size_t i = 0; i < v.size(); ++i)
        if (c.label[i] >= 0) v[i] -= sum[c.label[i]] / static_cast<double>(cnt[c.label[i]]);
}

void laplacian(const std::vector<WeightedEdge>& edges, const std::vector<double>& x, std::vector<double>& y) {
    std::fill(y.begin(), y.end(), 0.0);
    for (const auto& e : edges) {
        double f = e.w * (x[e.a] - x[e.b]);
        y[e.a] += f;
        y[e.b] -= f;
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<WeightedEdge> poisson_edges(const DiscreteMeasure& mu) {
    const Grid& g = mu.grid();
    std::vector<WeightedEdge> edges;
    auto mass = [&](std::size_t c) { return mu[c] > kMassFloor ? mu[c] : 0.0; };
    for (std::size_t c = 0; c < g.size(); ++c) {
        auto ij = g.multi(c);
        for (int a = 0; a < g.dim(); ++a) {
            if (ij[a] + 1 >= g.axis_size(a)) continue;
            auto m = ij;
            m[a] += 1;
            std::size_t d = g.index(m[0], m[1]);
            double w = 0.5 * (mass(c) + mass(d)) / g.sq_dist(c, d);
            if (w > 0) edges.push_back({c, d, w});
        }
    }
    return edges;
}

HMinusOneResult h_minus_one(const SignedMeasure& nu, const DiscreteMeasure& mu, double cg_tol) {
    require_same_grid(nu.grid, mu.grid(), "h_minus_one");
    const std::size_t n = mu.size();
    double scale = 0;
    for (double v : nu.weights) scale += std::abs(v);
    if (std::abs(nu.total()) > 1e-10)
        throw std::invalid_argument("h_minus_one: signed measure must have zero total mass");

    HMinusOneResult res;
    res.potential.assign(n, 0.0);
    if (scale == 0) return res;

    auto edges = poisson_edges(mu);
    auto comp = components(n, edges);
    std::vector<double> b(nu.weights);
    std::vector<double> net(comp.count, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (comp.label[i] < 0) {
            if (std::abs(b[i]) > kMassFloor) {
                res.norm = kInf;
                res.finite = false;
                res.diagnostic = "signed measure charges a cell outside the weight's support";
                return res;
            }
        } else {
            net[comp.label[i]] += b[i];
        }
    }
    for (int k = 0; k < comp.count; ++k) {
        if (std::abs(net[k]) > 1e-10) {
            std::ostringstream os;
            os << "support of the weight is disconnected: component " << k << " carries net mass " << net[k];
            res.norm = kInf;
            res.finite = false;
            res.diagnostic = os.str();
            return res;
        }
    }
    project(b, comp);

    // Jacobi-preconditioned CG, iterates kept orthogonal to per-component constants.
    std::vector<double> diag(n, 0.0);
    for (const auto& e : edges) {
        diag[e.a] += e.w;
        diag[e.b] += e.w;
    }
    std::vector<double>& x = res.potential;
    std::vector<double> r(b), z(n), p(n), q(n);
    auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) out[i] = diag[i] > 0 ? in[i] / diag[i] : 0.0;
        project(out, comp);
    };
    const double bnorm = std::sqrt(dot(b, b));
    precond(r, z);
    p = z;
    double rz = dot(r, z);
    const std::size_t max_iter = 20 * n + 100;
    std::size_t it = 0;
    double rel = 1;
    for (; it < max_iter; ++it) {
        rel = std::sqrt(dot(r, r)) / bnorm;
        if (rel <= cg_tol) break;
        laplacian(edges, p, q);
        double pq = dot(p, q);
        if (!(pq > 0)) break;
        double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        project(r, comp);
        precond(r, z);
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    project(x, comp);
    res.cg_iterations = it;
    res.relative_residual = rel;
    res.converged = rel <= cg_tol;
    if (!res.converged) res.diagnostic = "conjugate gradients stopped above tolerance";
    for (const auto& e : edges) res.dirichlet_energy += e.w * (x[e.a] - x[e.b]) * (x[e.a] - x[e.b]);
    res.norm = std::sqrt(std::max(0.0, dot(x, b)));
    return res;
}

double h_minus_one_norm(const SignedMeasure& nu, const DiscreteMeasure& mu, double cg_tol) {
    return h_minus_one(nu, mu, cg_tol).norm;
}

double wasserstein2_points_1d(std::vector<double> xs, std::vector<double> ws, std::vector<double> ys,
                              std::vector<double> vs) {
    auto sort_by = [](std::vector<double>& pts, std::vector<double>& w) {
        std::vector<std::size_t> idx(pts.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pts[a] < pts[b]; });
        std::vector<double> p2(pts.size()), w2(pts.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            p2[k] = pts[idx[k]];
            w2[k] = w[idx[k]];
        }
        pts.swap(p2);
        w.swap(w2);
    };
    if (xs.size() != ws.size() || ys.size() != vs.size()) throw StructuralError("wasserstein2_points_1d: size mismatch");
    sort_by(xs, ws);
    sort_by(ys, vs);
    std::size_t i = 0, j = 0;
    double ri = xs.empty() ? 0 : ws[0], rj = ys.empty() ? 0 : vs[0];
    double cost = 0;
    while (i < xs.size() && j < ys.size()) {
        double m = std::min(ri, rj);
        cost += m * (xs[i] - ys[j]) * (xs[i] - ys[j]);
        ri -= m;
        rj -= m;
        if (ri <= 0 && ++i < xs.size()) ri = ws[i];
        if (rj <= 0 && ++j < ys.size()) rj = vs[j];
    }
    return std::sqrt(cost);
}

namespace {

// Quantile function pieces: on u in [u0, u0+mass) the quantile runs linearly
// from lo to hi (lo == hi for atoms).
struct Piece {
    double u0, mass, lo, hi;
};

std::vector<Piece> pieces(const DiscreteMeasure& p, Representation rep) {
    const Grid& g = p.grid();
    std::vector<Piece> out;
    double u = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] <= 0) continue;
        double x = g.nodes(0)[k], h = g.width(0, k);
        if (rep == Representation::Atoms)
            out.push_back({u, p[k], x, x});
        else
            out.push_back({u, p[k], x - 0.5 * h, x + 0.5 * h});
        u += p[k];
    }
    return out;
}

double quantile_at(const std::vector<Piece>& ps, double u) {
    // right-continuous: first piece whose end exceeds u
    auto it = std::upper_bound(ps.begin(), ps.end(), u, [](double v, const Piece& pc) { return v < pc.u0 + pc.mass; });
    if (it == ps.end()) --it;
    double t = std::clamp((u - it->u0) / it->mass, 0.0, 1.0);
    return it->lo + t * (it->hi - it->lo);
}

}  // namespace

double wasserstein2_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, std::size_t n_quantiles,
                       Representation rep) {
    if (mu.grid().dim() != 1 || nu.grid().dim() != 1) throw StructuralError("wasserstein2_1d: grids must be 1d");
    auto a = pieces(mu, rep), b = pieces(nu, rep);
    if (n_quantiles > 0) {
        double s = 0;
        for (std::size_t k = 0; k < n_quantiles; ++k) {
            double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n_quantiles);
            double d = quantile_at(a, u) - quantile_at(b, u);
            s += d * d;
        }
        return std::sqrt(s / static_cast<double>(n_quantiles));
    }
    // exact: both quantiles are linear between merged breakpoints
    std::size_t i = 0, j = 0;
    double u = 0, cost = 0;
    while (i < a.size() && j < b.size()) {
        double end_a = a[i].u0 + a[i].mass, end_b = b[j].u0 + b[j].mass;
        double u1 = std::min(end_a, end_b);
        if (u1 > u) {
            auto q = [](const Piece& pc, double v) { return pc.lo + (v - pc.u0) / pc.mass * (pc.hi - pc.lo); };
            double d0 = q(a[i], u) - q(b[j], u);
            double d1 = q(a[i], u1) - q(b[j], u1);
            cost += (u1 - u) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
            u = u1;
        }
        if (end_a <= u1) ++i;
        if (end_b <= u1) ++j;
    }
    return std::sqrt(cost);
}

double wasserstein2_exact_small(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_same_grid(mu.grid(), nu.grid(), "wasserstein2_exact_small");
    std::vector<std::size_t> S, D;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu[i] > 0) S.push_back(i);
    for (std::size_t j = 0; j < nu.size(); ++j)
        if (nu[j] > 0) D.push_back(j);
    if (S.size() > 64 || D.size() > 64) throw std::invalid_argument("wasserstein2_exact_small: more than 64 atoms");
    const std::size_t n1 = S.size(), n2 = D.size(), V = n1 + n2;
    const Grid& g = mu.grid();
    std::vector<double> c(n1 * n2), flow(n1 * n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) c[i * n2 + j] = g.sq_dist(S[i], D[j]);
    std::vector<double> supply(n1), demand(n2);
    for (std::size_t i = 0; i < n1; ++i) supply[i] = mu[S[i]];
    for (std::size_t j = 0; j < n2; ++j) demand[j] = nu[D[j]];

    // Successive shortest paths; Bellman-Ford since backward edges carry -c.
    constexpr double eps = 1e-15;
    std::vector<double> dist(V);
    std::vector<long> pred(V);
    for (std::size_t round = 0; round < 10 * V * V; ++round) {
        double left = 0;
        for (double s : supply) left += s;
        if (left <= 1e-13) break;
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(pred.begin(), pred.end(), -1);
        for (std::size_t i = 0; i < n1; ++i)
            if (supply[i] > eps) dist[i] = 0;
        for (std::size_t pass = 0; pass < V; ++pass) {
            bool changed = false;
            for (std::size_t i = 0; i < n1; ++i) {
                if (dist[i] == kInf) continue;
                for (std::size_t j = 0; j < n2; ++j) {
                    double nd = dist[i] + c[i * n2 + j];
                    if (nd < dist[n1 + j] - 1e-15) {
                        dist[n1 + j] = nd;
                        pred[n1 + j] = static_cast<long>(i);
                        changed = true;
                    }
                }
            }
            for (std::size_t j = 0; j < n2; ++j) {
                if (dist[n1 + j] == kInf) continue;
                for (std::size_t i = 0; i < n1; ++i) {
                    if (flow[i * n2 + j] <= eps) continue;
                    double nd = dist[n1 + j] - c[i * n2 + j];
                    if (nd < dist[i] - 1e-15) {
                        dist[i] = nd;
                        pred[i] = static_cast<long>(n1 + j);
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        std::size_t best = n2;
        for (std::size_t j = 0; j < n2; ++j)
            if (demand[j] > eps && (best == n2 || dist[n1 + j] < dist[n1 + best])) best = j;
        if (best == n2 || dist[n1 + best] == kInf) break;
        // walk back to a source supply node and find the bottleneck
        double amount = demand[best];
        std::size_t v = n1 + best;
        while (true) {
            long p = pred[v];
            if (p < 0) break;
            if (v < n1) amount = std::min(amount, flow[v * n2 + (static_cast<std::size_t>(p) - n1)]);
            v = static_cast<std::size_t>(p);
        }
        amount = std::min(amount, supply[v]);
        const std::size_t source = v;
        v = n1 + best;
        while (true) {
            long p = pred[v];
            if (p < 0) break;
            if (v >= n1)
                flow[static_cast<std::size_t>(p) * n2 + (v - n1)] += amount;
            else
                flow[v * n2 + (static_cast<std::size_t>(p) - n1)] -= amount;
            v = static_cast<std::size_t>(p);
        }
        supply[source] -= amount;
        demand[best] -= amount;
    }
    double cost = 0;
    for (std::size_t k = 0; k < flow.size(); ++k) cost += flow[k] * c[k];
    return std::sqrt(std::max(0.0, cost));
}

InequalityReport w2_h_minus_one_comparison(const DiscreteMeasure& mu, const DiscreteMeasure& mu_bar) {
    require_same_grid(mu.grid(), mu_bar.grid(), "w2_h_minus_one_comparison");
    double w2 = mu.grid().dim() == 1 ? wasserstein2_1d(mu, mu_bar, 0, Representation::Cells)
                                     : wasserstein2_exact_small(mu, mu_bar);
    auto h = h_minus_one(difference(mu, mu_bar), mu);
    Digest d;
    d.add("w2_hminus1").add(std::span<const double>(mu.weights())).add(std::span<const double>(mu_bar.weights()));
    auto r = make_report("w2_hminus1", w2, 2 * h.norm, PassRule{0.0, 1e-6}, d.hex());
    if (!h.finite) r.notes.push_back(h.diagnostic);
    if (!h.converged) flag(r, h.diagnostic);
    return r;
}

}  // namespace sbridge
