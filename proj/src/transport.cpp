#include "pphi/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pphi {

namespace {

// Spanning-tree basis over m source nodes (0..m-1) and n sink nodes
// (m..m+n-1), rooted at source 0. Children are kept in doubly linked
// sibling lists so a pivot re-hangs a subtree in time proportional to its
// size. On basic arcs the potentials satisfy c(i,j) = u_i + v_j.
struct Basis {
    int m = 0, n = 0;
    std::vector<int> parent, first_child, next_sib, prev_sib, depth;
    std::vector<double> flow_to_parent, potential;
    std::vector<int> stack;

    void init(int m_, int n_) {
        m = m_;
        n = n_;
        const int total = m + n;
        parent.assign(total, -1);
        first_child.assign(total, -1);
        next_sib.assign(total, -1);
        prev_sib.assign(total, -1);
        depth.assign(total, 0);
        flow_to_parent.assign(total, 0.0);
        potential.assign(total, 0.0);
    }

    bool is_source(int node) const { return node < m; }

    void detach(int v) {
        const int p = parent[v];
        if (p < 0) return;
        if (prev_sib[v] >= 0)
            next_sib[prev_sib[v]] = next_sib[v];
        else
            first_child[p] = next_sib[v];
        if (next_sib[v] >= 0) prev_sib[next_sib[v]] = prev_sib[v];
        parent[v] = -1;
        prev_sib[v] = -1;
        next_sib[v] = -1;
    }

    void attach(int v, int p) {
        parent[v] = p;
        prev_sib[v] = -1;
        next_sib[v] = first_child[p];
        if (first_child[p] >= 0) prev_sib[first_child[p]] = v;
        first_child[p] = v;
    }

    // Depths and potentials over the subtree rooted at v; potentials shift
    // by +s on one bipartite side and -s on the other.
    void update_subtree(int v, double s_source) {
        stack.clear();
        stack.push_back(v);
        while (!stack.empty()) {
            const int x = stack.back();
            stack.pop_back();
            depth[x] = depth[parent[x]] + 1;
            potential[x] += is_source(x) ? s_source : -s_source;
            for (int c = first_child[x]; c >= 0; c = next_sib[c]) stack.push_back(c);
        }
    }

    // Full recomputation from the parent structure (used once at the start
    // and once before reporting, to wash out incremental drift).
    template <class F>
    void refresh(F&& cost) {
        stack.clear();
        stack.push_back(0);
        depth[0] = 0;
        potential[0] = 0.0;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int c = first_child[v]; c >= 0; c = next_sib[c]) {
                depth[c] = depth[v] + 1;
                const int src = is_source(c) ? c : v;
                const int snk = is_source(c) ? v : c;
                potential[c] = cost(src, snk - m) - potential[v];
                stack.push_back(c);
            }
        }
    }
};

} // namespace

TransportSolution solve_transport(const std::vector<double>& supply,
                                  const std::vector<double>& demand,
                                  const std::function<double(int, int)>& cost) {
    const int m = static_cast<int>(supply.size());
    const int n = static_cast<int>(demand.size());
    if (m == 0 || n == 0)
        throw std::invalid_argument("solve_transport: empty marginals");

    double sa = 0.0, sb = 0.0;
    for (double a : supply) {
        if (a < 0.0) throw std::invalid_argument("solve_transport: negative supply");
        sa += a;
    }
    for (double b : demand) {
        if (b < 0.0) throw std::invalid_argument("solve_transport: negative demand");
        sb += b;
    }
    if (sa <= 0.0 || std::abs(sa - sb) > 1e-9 * std::max(sa, sb))
        throw std::invalid_argument("solve_transport: marginals must balance");

    // Perturb supplies to break degeneracy, then rescale demands so the two
    // sides match exactly. The optimal value moves by at most
    // (perturbation mass) * (cost range), about 1e-13 * m.
    const double delta = 2e-13 / (m + 1);
    std::vector<double> a(supply), b(demand);
    double extra = 0.0;
    for (int i = 0; i < m; ++i) {
        const double d = delta * (i + 1);
        a[i] += d;
        extra += d;
    }
    const double scale = (sa + extra) / sb;
    for (int j = 0; j < n; ++j) b[j] *= scale;

    // Cache costs in a dense matrix when affordable; pricing scans every
    // arc repeatedly and indirect calls dominate otherwise.
    std::vector<double> cost_cache;
    const bool cached = static_cast<long>(m) * n <= 16000000L;
    if (cached) {
        cost_cache.resize(static_cast<std::size_t>(m) * n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                cost_cache[static_cast<std::size_t>(i) * n + j] = cost(i, j);
    }
    auto arc_cost = [&](int i, int j) -> double {
        return cached ? cost_cache[static_cast<std::size_t>(i) * n + j] : cost(i, j);
    };

    Basis basis;
    basis.init(m, n);

    // Northwest-corner initial basis: the staircase allocates m+n-1 arcs and
    // each new arc attaches exactly one fresh node, so the result is always
    // a spanning tree. Callers that sort both sides by a common coordinate
    // make this start near-optimal.
    {
        std::vector<double> al(a), bl(b);
        int i = 0, j = 0;
        bool first = true;
        while (true) {
            const double f = std::min(al[i], bl[j]);
            if (first) {
                basis.attach(m + j, i);
                basis.flow_to_parent[m + j] = f;
                first = false;
            } else if (basis.parent[m + j] < 0 && m + j != 0) {
                basis.attach(m + j, i);
                basis.flow_to_parent[m + j] = f;
            } else {
                basis.attach(i, m + j);
                basis.flow_to_parent[i] = f;
            }
            al[i] -= f;
            bl[j] -= f;
            if (i == m - 1 && j == n - 1) break;
            if (al[i] <= 0.0 && i < m - 1)
                ++i;
            else
                ++j;
        }
    }
    basis.refresh(arc_cost);

    const double price_tol = 1e-13;
    const long max_pivots = 3000L * (m + n) + 1000000L;
    long pivots = 0;

    const int rows_per_block = std::max(1, 16384 / n);
    int cursor_row = 0;

    std::vector<int> path_i, path_j;
    for (;;) {
        // Block pricing over row ranges: cyclic scan, stop at the first
        // block containing a negative reduced cost; a clean full sweep
        // proves optimality.
        int enter_i = -1, enter_j = -1;
        double best = -price_tol;
        int scanned_rows = 0;
        while (scanned_rows < m) {
            const int row_end = std::min(cursor_row + rows_per_block, m);
            for (int i = cursor_row; i < row_end; ++i) {
                const double ui = basis.potential[i];
                const double* vrow = basis.potential.data() + m;
                if (cached) {
                    const double* crow =
                        cost_cache.data() + static_cast<std::size_t>(i) * n;
                    for (int j = 0; j < n; ++j) {
                        const double r = crow[j] - ui - vrow[j];
                        if (r < best) {
                            best = r;
                            enter_i = i;
                            enter_j = j;
                        }
                    }
                } else {
                    for (int j = 0; j < n; ++j) {
                        const double r = cost(i, j) - ui - vrow[j];
                        if (r < best) {
                            best = r;
                            enter_i = i;
                            enter_j = j;
                        }
                    }
                }
            }
            scanned_rows += row_end - cursor_row;
            cursor_row = (row_end >= m) ? 0 : row_end;
            if (enter_i >= 0) break;
        }
        if (enter_i < 0) break; // optimal

        if (++pivots > max_pivots)
            throw std::runtime_error("solve_transport: pivot limit exceeded");
        const double reduced = best;

        // Tree paths from both endpoints of the entering arc to their
        // junction.
        int x = enter_i, y = m + enter_j;
        path_i.clear();
        path_j.clear();
        while (basis.depth[x] > basis.depth[y]) {
            path_i.push_back(x);
            x = basis.parent[x];
        }
        while (basis.depth[y] > basis.depth[x]) {
            path_j.push_back(y);
            y = basis.parent[y];
        }
        while (x != y) {
            path_i.push_back(x);
            path_j.push_back(y);
            x = basis.parent[x];
            y = basis.parent[y];
        }

        // The entering arc gains theta; walking away from either of its
        // endpoints the tree arcs alternate -theta, +theta, ... starting
        // with a loss on both sides.
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        bool leave_on_i_side = true;
        for (std::size_t t = 0; t < path_i.size(); t += 2) {
            if (basis.flow_to_parent[path_i[t]] < theta) {
                theta = basis.flow_to_parent[path_i[t]];
                leave = path_i[t];
                leave_on_i_side = true;
            }
        }
        for (std::size_t t = 0; t < path_j.size(); t += 2) {
            if (basis.flow_to_parent[path_j[t]] < theta) {
                theta = basis.flow_to_parent[path_j[t]];
                leave = path_j[t];
                leave_on_i_side = false;
            }
        }
        if (leave < 0) throw std::runtime_error("solve_transport: no leaving arc");

        for (std::size_t t = 0; t < path_i.size(); ++t)
            basis.flow_to_parent[path_i[t]] += (t % 2 == 0) ? -theta : theta;
        for (std::size_t t = 0; t < path_j.size(); ++t)
            basis.flow_to_parent[path_j[t]] += (t % 2 == 0) ? -theta : theta;

        // Re-hang the entering endpoint's side: reverse parent pointers from
        // the entering endpoint down to the leaving arc; the entering arc
        // carries theta.
        const int from = leave_on_i_side ? enter_i : (m + enter_j);
        const int other = leave_on_i_side ? (m + enter_j) : enter_i;
        int prev = other;
        double carry = theta;
        int node = from;
        while (true) {
            const int next = basis.parent[node];
            const double next_flow = basis.flow_to_parent[node];
            basis.detach(node);
            basis.attach(node, prev);
            basis.flow_to_parent[node] = carry;
            if (node == leave) break;
            prev = node;
            carry = next_flow;
            node = next;
        }

        // Potentials move by the entering reduced cost on the re-hung
        // subtree, with opposite signs on the two bipartite sides.
        basis.update_subtree(from, basis.is_source(from) ? reduced : -reduced);
    }

    basis.refresh(arc_cost); // wash out incremental drift before reporting

    TransportSolution sol;
    sol.pivots = pivots;
    double primal = 0.0;
    for (int v = 1; v < m + n; ++v) {
        const int p = basis.parent[v];
        const int src = basis.is_source(v) ? v : p;
        const int snk = basis.is_source(v) ? p : v;
        primal += basis.flow_to_parent[v] * arc_cost(src, snk - m);
    }
    sol.cost = primal;

    // Dual certificate on the unperturbed marginals.
    double dual = 0.0;
    for (int i = 0; i < m; ++i) dual += supply[i] * basis.potential[i];
    for (int j = 0; j < n; ++j) dual += demand[j] * basis.potential[m + j];
    sol.dual_value = dual;
    return sol;
}

} // namespace pphi
