#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "refdet/commutators.hpp"
#include "refdet/linalg.hpp"
#include "refdet/radical.hpp"
#include "refdet/weights.hpp"

namespace refdet {

// ---------------------------------------------------------------------------
// DOOMBs: directed graphs with in-degree <= 1 and out-degree <= 1 everywhere,
// so every component is an oriented chain or an oriented cycle.
// ---------------------------------------------------------------------------

struct Doomb {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;  // (start, end), vertices 1-based
};

struct DoombComponent {
    enum Kind { Chain, Cycle } kind;
    int size;  // edge count
    int least_vertex;
};

struct DoombClassification {
    bool valid = false;
    std::vector<DoombComponent> components;
};

inline DoombClassification classify_doomb(const std::vector<std::pair<int, int>>& edges) {
    DoombClassification result;
    std::map<int, int> out_to, in_from;
    for (const auto& [p, q] : edges) {
        if (out_to.count(p) || in_from.count(q)) return result;  // invalid
        out_to[p] = q;
        in_from[q] = p;
    }
    result.valid = true;
    // Undirected component walk over the incident vertices.
    std::set<int> vertices;
    for (const auto& [p, q] : edges) {
        vertices.insert(p);
        vertices.insert(q);
    }
    std::set<int> seen;
    for (int v : vertices) {
        if (seen.count(v)) continue;
        std::vector<int> stack{v};
        std::set<int> comp;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            if (!comp.insert(x).second) continue;
            if (auto it = out_to.find(x); it != out_to.end()) stack.push_back(it->second);
            if (auto it = in_from.find(x); it != in_from.end()) stack.push_back(it->second);
        }
        int edge_count = 0;
        for (int x : comp)
            if (out_to.count(x)) ++edge_count;
        DoombComponent c;
        c.size = edge_count;
        c.kind = (edge_count == static_cast<int>(comp.size())) ? DoombComponent::Cycle
                                                               : DoombComponent::Chain;
        c.least_vertex = *comp.begin();
        result.components.push_back(c);
        seen.insert(comp.begin(), comp.end());
    }
    std::sort(result.components.begin(), result.components.end(),
              [](const DoombComponent& a, const DoombComponent& b) {
                  return a.least_vertex < b.least_vertex;
              });
    return result;
}

// All DOOMBs with exactly n edges on vertices 1..N, each edge set once,
// edges sorted by (start, end), stream sorted lexicographically.
inline std::vector<Doomb> enumerate_doombs(int N, int n) {
    std::vector<Doomb> all;
    if (n == 0) {
        all.push_back({N, {}});
        return all;
    }
    if (n > N) return all;
    // Ends are n distinct vertices; starts are n distinct vertices (degree
    // conditions), assigned injectively to the chosen ends.
    std::vector<int> ends(n);
    std::function<void(int, int)> choose_ends = [&](int from, int depth) {
        if (depth == n) {
            std::vector<int> starts(n);
            std::vector<bool> used(N + 1, false);
            std::function<void(int)> choose_starts = [&](int t) {
                if (t == n) {
                    Doomb d;
                    d.vertex_count = N;
                    for (int i = 0; i < n; ++i) d.edges.emplace_back(starts[i], ends[i]);
                    std::sort(d.edges.begin(), d.edges.end());
                    all.push_back(std::move(d));
                    return;
                }
                for (int p = 1; p <= N; ++p) {
                    if (used[p]) continue;
                    used[p] = true;
                    starts[t] = p;
                    choose_starts(t + 1);
                    used[p] = false;
                }
            };
            choose_starts(0);
            return;
        }
        for (int q = from; q <= N; ++q) {
            ends[depth] = q;
            choose_ends(q + 1, depth + 1);
        }
    };
    choose_ends(1, 0);
    std::sort(all.begin(), all.end(),
              [](const Doomb& a, const Doomb& b) { return a.edges < b.edges; });
    return all;
}

// Directed partial pair matchings with m edges on vertices 1..N: no two edge
// endpoints coincide anywhere. Each edge set appears once; output sorted.
inline std::vector<std::vector<std::pair<int, int>>> enumerate_pair_matchings(int N, int m) {
    std::vector<std::vector<std::pair<int, int>>> all;
    std::vector<std::pair<int, int>> edges;
    std::vector<bool> used(N + 1, false);
    // Scan vertices in increasing order; each undecided vertex either stays
    // uncovered or pairs with a larger undecided vertex, in either direction.
    std::function<void(int)> recurse = [&](int v) {
        if (static_cast<int>(edges.size()) == m) {
            auto sorted = edges;
            std::sort(sorted.begin(), sorted.end());
            all.push_back(std::move(sorted));
            return;
        }
        if (v > N) return;
        if (used[v]) {
            recurse(v + 1);
            return;
        }
        recurse(v + 1);  // leave v uncovered
        for (int q = v + 1; q <= N; ++q) {
            if (used[q]) continue;
            used[q] = true;
            edges.emplace_back(v, q);
            recurse(v + 1);
            edges.pop_back();
            edges.emplace_back(q, v);
            recurse(v + 1);
            edges.pop_back();
            used[q] = false;
        }
    };
    recurse(1);
    std::sort(all.begin(), all.end());
    return all;
}

// ---------------------------------------------------------------------------
// Labeled trees (Pruefer bijection), 3-trees, B-basic graphs.
// ---------------------------------------------------------------------------

// All labeled trees on vertices 0..v-1, edges as sorted (min,max) pairs,
// streamed in Pruefer-sequence order.
inline std::vector<std::vector<std::pair<int, int>>> enumerate_trees(int v) {
    std::vector<std::vector<std::pair<int, int>>> all;
    if (v == 1) {
        all.push_back({});
        return all;
    }
    if (v == 2) {
        all.push_back({{0, 1}});
        return all;
    }
    std::vector<int> seq(v - 2, 0);
    while (true) {
        std::vector<int> degree(v, 1);
        for (int a : seq) ++degree[a];
        std::vector<std::pair<int, int>> edges;
        std::vector<bool> done(v, false);
        std::vector<int> deg = degree;
        for (int a : seq) {
            int leaf = -1;
            for (int i = 0; i < v; ++i)
                if (!done[i] && deg[i] == 1) {
                    leaf = i;
                    break;
                }
            edges.emplace_back(std::min(leaf, a), std::max(leaf, a));
            done[leaf] = true;
            --deg[a];
        }
        std::vector<int> last;
        for (int i = 0; i < v; ++i)
            if (!done[i]) last.push_back(i);
        edges.emplace_back(last[0], last[1]);
        std::sort(edges.begin(), edges.end());
        all.push_back(std::move(edges));
        int pos = v - 3;
        while (pos >= 0 && seq[pos] == v - 1) seq[pos--] = 0;
        if (pos < 0) break;
        ++seq[pos];
    }
    return all;
}

using Triple = std::array<int, 3>;

struct ThreeTree {
    std::vector<Triple> triangles;  // increasing triples, list sorted
};

// All sets of m increasing vertex triples over 0..v-1 whose union is
// connected and covers exactly the v = 2m+1 vertices.
inline std::vector<ThreeTree> enumerate_3trees(int m, int v) {
    if (v != 2 * m + 1)
        throw DimensionMismatchError("a 3-tree with m triangles covers exactly 2m+1 vertices");
    std::vector<Triple> candidates;
    for (int i = 0; i < v; ++i)
        for (int j = i + 1; j < v; ++j)
            for (int k = j + 1; k < v; ++k) candidates.push_back({i, j, k});
    std::vector<ThreeTree> all;
    std::vector<int> pick;
    std::function<void(int)> recurse = [&](int from) {
        if (static_cast<int>(pick.size()) == m) {
            std::vector<int> parent(v);
            for (int i = 0; i < v; ++i) parent[i] = i;
            std::function<int(int)> find = [&](int x) {
                while (parent[x] != x) x = parent[x] = parent[parent[x]];
                return x;
            };
            std::set<int> covered;
            int merges = 0;
            for (int c : pick)
                for (int t = 0; t < 3; ++t) {
                    covered.insert(candidates[c][t]);
                    int a = find(candidates[c][t]), b = find(candidates[c][(t + 1) % 3]);
                    if (a != b) {
                        parent[a] = b;
                        ++merges;
                    }
                }
            if (static_cast<int>(covered.size()) == v && merges == v - 1) {
                ThreeTree t;
                for (int c : pick) t.triangles.push_back(candidates[c]);
                all.push_back(std::move(t));
            }
            return;
        }
        for (int c = from; c < static_cast<int>(candidates.size()); ++c) {
            pick.push_back(c);
            recurse(c + 1);
            pick.pop_back();
        }
    };
    recurse(0);
    return all;
}

// Independent contractibility check: connected and Euler characteristic 1
// for the simplicial complex with the triangles as 2-cells.
inline bool three_tree_contractible(const std::vector<Triple>& triangles) {
    std::set<int> vertices;
    std::set<std::pair<int, int>> edges;
    for (const auto& t : triangles) {
        for (int x : t) vertices.insert(x);
        edges.insert({std::min(t[0], t[1]), std::max(t[0], t[1])});
        edges.insert({std::min(t[1], t[2]), std::max(t[1], t[2])});
        edges.insert({std::min(t[0], t[2]), std::max(t[0], t[2])});
    }
    if (vertices.empty()) return false;
    std::map<int, int> parent;
    for (int v : vertices) parent[v] = v;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [a, b] : edges)
        parent[find(a)] = find(b);
    std::set<int> roots;
    for (int v : vertices) roots.insert(find(v));
    long chi = static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) +
               static_cast<long>(triangles.size());
    return roots.size() == 1 && chi == 1;
}

// Parity of the permutation read off the product of the oriented 3-cycles
// (i_1 j_1 k_1)...(i_m j_m k_m), composed right-to-left. The product must be
// one full cycle on the covered vertices.
inline int delta_sign(const std::vector<Triple>& triangles) {
    std::set<int> covered;
    for (const auto& t : triangles) covered.insert(t.begin(), t.end());
    std::map<int, int> pi;
    for (int v : covered) pi[v] = v;
    for (auto it = triangles.rbegin(); it != triangles.rend(); ++it) {
        const auto& [i, j, k] = *it;
        std::map<int, int> cyc = pi;
        for (auto& [x, y] : cyc) {
            if (y == i)
                pi[x] = j;
            else if (y == j)
                pi[x] = k;
            else if (y == k)
                pi[x] = i;
        }
    }
    const int v = static_cast<int>(covered.size());
    std::vector<int> orbit;
    int start = *covered.begin();
    int x = start;
    do {
        orbit.push_back(x);
        x = pi[x];
    } while (x != start && static_cast<int>(orbit.size()) <= v);
    if (static_cast<int>(orbit.size()) != v)
        throw NotSingleCycleError("3-cycle product is not a single full cycle");
    int inversions = 0;
    for (int a = 0; a < v; ++a)
        for (int b = a + 1; b < v; ++b)
            if (orbit[a] > orbit[b]) ++inversions;
    return inversions % 2 ? -1 : 1;
}

// Volume sign of an ordered list of directed tree edges on vertices 0..n,
// rooted at 0: sign of the outer-endpoint permutation times (-1)^(number of
// edges directed toward the root).
inline int tree_volume_sign(const std::vector<std::pair<int, int>>& directed_edges) {
    const int n = static_cast<int>(directed_edges.size());
    const int v = n + 1;
    std::vector<std::vector<int>> adj(v);
    for (const auto& [a, b] : directed_edges) {
        if (a < 0 || a >= v || b < 0 || b >= v || a == b)
            throw NotATreeError("edge endpoints out of range");
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> parent(v, -2);
    std::vector<int> order{0};
    parent[0] = -1;
    for (size_t head = 0; head < order.size(); ++head) {
        int x = order[head];
        for (int y : adj[x])
            if (parent[y] == -2) {
                parent[y] = x;
                order.push_back(y);
            }
    }
    if (static_cast<int>(order.size()) != v) throw NotATreeError("edge set is not a tree");
    std::vector<int> outer;
    int rootward = 0;
    for (const auto& [a, b] : directed_edges) {
        if (parent[a] == b) {
            outer.push_back(a);
            ++rootward;  // arrow a -> b looks toward the root
        } else if (parent[b] == a) {
            outer.push_back(b);
        } else {
            throw NotATreeError("edge set is not a tree");
        }
    }
    int inversions = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (outer[i] > outer[j]) ++inversions;
    int eps1 = inversions % 2 ? -1 : 1;
    int eps2 = rootward % 2 ? -1 : 1;
    return eps1 * eps2;
}

// ---------------------------------------------------------------------------
// B-basic graphs: n vertices, n edges from {loop(i), "+"{i,j}, "-"{i,j}}, each
// component carrying exactly one cycle, which is a loop or has an odd number
// of "+"-edges.
// ---------------------------------------------------------------------------

struct BEdge {
    enum Kind { Plus, Minus, Loop } kind;
    int i, j;  // i < j for pair edges; i == j for loops; 1-based

    auto operator<=>(const BEdge&) const = default;
};

struct BBasicGraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> minus_edges;  // directed i -> j presentation
    std::vector<std::pair<int, int>> plus_edges;
    std::vector<int> loops;
};

inline bool is_bbasic(int n, const std::vector<BEdge>& edges) {
    if (static_cast<int>(edges.size()) != n) return false;
    std::vector<int> parent(n + 1);
    for (int i = 1; i <= n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges) parent[find(e.i)] = find(e.j);
    std::map<int, std::vector<int>> comp_vertices;
    for (int i = 1; i <= n; ++i) comp_vertices[find(i)].push_back(i);
    std::map<int, std::vector<BEdge>> comp_edges;
    for (const auto& e : edges) comp_edges[find(e.i)].push_back(e);

    for (const auto& [root, verts] : comp_vertices) {
        const auto& ce = comp_edges[root];
        if (ce.size() != verts.size()) return false;  // not exactly one cycle
        int loops = 0;
        for (const auto& e : ce)
            if (e.kind == BEdge::Loop) ++loops;
        if (loops == 1) continue;  // the unique cycle is the loop
        if (loops > 1) return false;
        // Peel leaves; the surviving edges form the unique cycle.
        std::map<int, int> degree;
        for (const auto& e : ce) {
            ++degree[e.i];
            ++degree[e.j];
        }
        std::vector<BEdge> remaining = ce;
        bool peeled = true;
        while (peeled) {
            peeled = false;
            for (size_t t = 0; t < remaining.size(); ++t) {
                const auto& e = remaining[t];
                if (degree[e.i] == 1 || degree[e.j] == 1) {
                    --degree[e.i];
                    --degree[e.j];
                    remaining.erase(remaining.begin() + t);
                    peeled = true;
                    break;
                }
            }
        }
        int plus = 0;
        for (const auto& e : remaining)
            if (e.kind == BEdge::Plus) ++plus;
        if (plus % 2 == 0) return false;
    }
    return true;
}

inline int bbasic_component_count(int n, const std::vector<BEdge>& edges) {
    std::vector<int> parent(n + 1);
    for (int i = 1; i <= n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges) parent[find(e.i)] = find(e.j);
    std::set<int> roots;
    for (int i = 1; i <= n; ++i) roots.insert(find(i));
    return static_cast<int>(roots.size());
}

// Candidate edges in the canonical order: per pair i<j a "+" then a "-" edge,
// then loops 1..n. Matches the B_n root listing.
inline std::vector<BEdge> bn_candidate_edges(int n) {
    std::vector<BEdge> c;
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            c.push_back({BEdge::Plus, i, j});
            c.push_back({BEdge::Minus, i, j});
        }
    for (int i = 1; i <= n; ++i) c.push_back({BEdge::Loop, i, i});
    return c;
}

inline std::vector<std::vector<BEdge>> enumerate_bbasic_edge_sets(int n) {
    std::vector<BEdge> candidates = bn_candidate_edges(n);
    std::vector<std::vector<BEdge>> all;
    std::vector<BEdge> pick;
    std::function<void(int)> recurse = [&](int from) {
        if (static_cast<int>(pick.size()) == n) {
            if (is_bbasic(n, pick)) all.push_back(pick);
            return;
        }
        for (int c = from; c < static_cast<int>(candidates.size()); ++c) {
            pick.push_back(candidates[c]);
            recurse(c + 1);
            pick.pop_back();
        }
    };
    recurse(0);
    return all;
}

inline std::vector<BBasicGraph> enumerate_bbasic(int n) {
    std::vector<BBasicGraph> all;
    for (const auto& edges : enumerate_bbasic_edge_sets(n)) {
        BBasicGraph g;
        g.vertex_count = n;
        for (const auto& e : edges) {
            if (e.kind == BEdge::Plus) g.plus_edges.emplace_back(e.i, e.j);
            else if (e.kind == BEdge::Minus) g.minus_edges.emplace_back(e.i, e.j);
            else g.loops.push_back(e.i);
        }
        all.push_back(std::move(g));
    }
    return all;
}

// ---------------------------------------------------------------------------
// Right-hand-side evaluation with exact unit-length bookkeeping. Vectors are
// raw; every vector instance of a term occurs exactly twice, so dividing by
// (e,e) once per instance recovers the unit-vector value exactly. The
// occurrence counts are tracked and asserted, not assumed.
// ---------------------------------------------------------------------------

namespace detail {

struct OccurrenceLedger {
    std::map<int, int> uses;  // instance id -> count
    Rational norm_product{1};

    void note(int instance, const Rational& norm_sq) {
        if (++uses[instance] == 2) norm_product *= norm_sq;
    }
    void assert_paired() const {
        for (const auto& [inst, c] : uses)
            if (c != 2)
                throw std::logic_error("normalization bookkeeping: instance used " +
                                       std::to_string(c) + " times");
    }
};

}  // namespace detail

// k-weight of the edge (p,q): sum over length-k vertex paths p -> q of
// u_path times the chain of consecutive raw inner products, divided by (e,e)
// once per interior slot. Endpoint normalization is applied where the edge
// meets its volume factor.
template <class R>
R k_weight_partial(const VectorSystem& system, const WeightAssignment<R>& u, int p, int q) {
    const int k = u.arity;
    if (k == 1) return p == q ? u.get({p}) : R(0);
    R total(0);
    MultiIndex path(k);
    path[0] = p;
    path[k - 1] = q;
    std::function<void(int)> recurse = [&](int depth) {
        if (depth == k - 1) {
            detail::OccurrenceLedger ledger;
            Rational chain(1);
            for (int s = 0; s + 1 < k; ++s) {
                chain *= inner(system.vec(path[s]), system.vec(path[s + 1]));
                if (refdet::is_zero(chain)) return;
            }
            // Interior slots occur twice in the chain; endpoints once each.
            for (int s = 1; s + 1 < k; ++s) {
                ledger.note(s, system.norm_sq(path[s]));
                ledger.note(s, system.norm_sq(path[s]));
            }
            ledger.assert_paired();
            total += ring_scale(u.get(path), chain / ledger.norm_product);
            return;
        }
        for (int i = 1; i <= system.count(); ++i) {
            path[depth] = i;
            recurse(depth + 1);
        }
    };
    recurse(1);
    return total;
}

// Spec-shaped wrapper taking the raw weights.
template <class R>
R k_weight(const VectorSystem& system, const WeightAssignment<R>& w, int k, int p, int q) {
    if (k != w.arity) throw ArityMismatchError("k_weight arity mismatch");
    return k_weight_partial(system, u_table(w), p, q);
}

template <class R>
std::map<std::pair<int, int>, R> k_weight_table(const VectorSystem& system,
                                                const WeightAssignment<R>& u) {
    std::map<std::pair<int, int>, R> table;
    for (int p = 1; p <= system.count(); ++p)
        for (int q = 1; q <= system.count(); ++q)
            table[{p, q}] = k_weight_partial(system, u, p, q);
    return table;
}

// Term of one DOOMB (or one edge list with distinct starts and distinct
// ends): product of k-weights times vol(starts) vol(ends), endpoint
// normalization applied here.
template <class R>
R gendet_edge_list_term(const VectorSystem& system, const std::map<std::pair<int, int>, R>& weights,
                        const std::vector<std::pair<int, int>>& edges) {
    R product(1);
    for (const auto& e : edges) {
        const R& wk = weights.at(e);
        if (refdet::is_zero(wk)) return R(0);
        product *= wk;
    }
    std::vector<VectorQ> starts, ends;
    detail::OccurrenceLedger ledger;
    int instance = 0;
    for (const auto& [p, q] : edges) {
        starts.push_back(system.vec(p));
        ends.push_back(system.vec(q));
        // Each endpoint: one chain occurrence inside the k-weight, one here.
        ledger.note(instance, system.norm_sq(p));
        ledger.note(instance, system.norm_sq(p));
        ++instance;
        ledger.note(instance, system.norm_sq(q));
        ledger.note(instance, system.norm_sq(q));
        ++instance;
    }
    ledger.assert_paired();
    Rational vol2 = paired_volume(starts, ends);
    if (refdet::is_zero(vol2)) return R(0);
    return ring_scale(product, vol2 / ledger.norm_product);
}

enum class GendetForm { MultiIndex, Doomb };

// det P_w^(k) right-hand side: sum over n-tuples of multi-indices with
// increasing end components (equivalently over n-edge DOOMBs weighted by
// k-weights), times vol(starts) vol(ends).
template <class R>
R rhs_gendet(const VectorSystem& system, const WeightAssignment<R>& w, int k, GendetForm form,
             long* term_count = nullptr) {
    if (k < 2) throw ArityMismatchError("rhs_gendet requires k >= 2");
    if (k != w.arity) throw ArityMismatchError("rhs_gendet arity mismatch");
    const int n = system.span_dim();
    const int N = system.count();
    long terms = 0;
    R total(0);
    WeightAssignment<R> u = u_table(w);

    if (form == GendetForm::Doomb) {
        auto table = k_weight_table(system, u);
        for (const auto& doomb : enumerate_doombs(N, n)) {
            R term = gendet_edge_list_term(system, table, doomb.edges);
            if (!refdet::is_zero(term)) {
                total += term;
                ++terms;
            }
        }
        if (term_count) *term_count = terms;
        return total;
    }

    // Multi-index form: explicit tuples (j^(1)..j^(n)) with j_k^(1) < ... <
    // j_k^(n), assembled term by term without the per-edge grouping.
    std::vector<MultiIndex> tuple(n, MultiIndex(k));
    std::vector<int> ends(n);
    std::function<void(int)> fill_prefix = [&](int t) {
        if (t == n) {
            detail::OccurrenceLedger ledger;
            R coeff(1);
            Rational chain(1);
            std::vector<VectorQ> starts, evecs;
            for (int tt = 0; tt < n; ++tt) {
                coeff *= u.get(tuple[tt]);
                if (refdet::is_zero(coeff)) return;
                for (int s = 0; s + 1 < k; ++s)
                    chain *= inner(system.vec(tuple[tt][s]), system.vec(tuple[tt][s + 1]));
                if (refdet::is_zero(chain)) return;
                for (int s = 0; s < k; ++s) {
                    int uses = (s == 0 || s == k - 1) ? 1 : 2;  // chain occurrences
                    for (int r = 0; r < uses; ++r)
                        ledger.note(tt * k + s, system.norm_sq(tuple[tt][s]));
                }
            }
            std::vector<VectorQ> start_list, end_list;
            for (int tt = 0; tt < n; ++tt) {
                start_list.push_back(system.vec(tuple[tt][0]));
                end_list.push_back(system.vec(tuple[tt][k - 1]));
                ledger.note(tt * k + 0, system.norm_sq(tuple[tt][0]));
                ledger.note(tt * k + (k - 1), system.norm_sq(tuple[tt][k - 1]));
            }
            ledger.assert_paired();
            Rational vol2 = paired_volume(start_list, end_list);
            if (refdet::is_zero(vol2)) return;
            total += ring_scale(coeff, chain * vol2 / ledger.norm_product);
            ++terms;
            return;
        }
        // All (k-1)-prefixes for edge t; the end component is already fixed.
        std::function<void(int)> fill_slot = [&](int s) {
            if (s == k - 1) {
                fill_prefix(t + 1);
                return;
            }
            for (int i = 1; i <= N; ++i) {
                tuple[t][s] = i;
                fill_slot(s + 1);
            }
        };
        tuple[t][k - 1] = ends[t];
        fill_slot(0);
    };
    std::function<void(int, int)> choose_ends = [&](int from, int depth) {
        if (depth == n) {
            fill_prefix(0);
            return;
        }
        for (int q = from; q <= N; ++q) {
            ends[depth] = q;
            choose_ends(q + 1, depth + 1);
        }
    };
    choose_ends(1, 0);
    if (term_count) *term_count = terms;
    return total;
}

// det P_w^(1) right-hand side: 2^n sum over increasing n-subsets of the
// weight product times the squared volume (normalized Gram determinant).
template <class R>
R rhs_k1(const VectorSystem& system, const WeightAssignment<R>& w, long* term_count = nullptr) {
    if (w.arity != 1) throw ArityMismatchError("rhs_k1 requires arity-1 weights");
    const int n = system.span_dim();
    const int N = system.count();
    R total(0);
    long terms = 0;
    std::vector<int> subset(n);
    std::function<void(int, int)> recurse = [&](int from, int depth) {
        if (depth == n) {
            detail::OccurrenceLedger ledger;
            R coeff(1);
            std::vector<VectorQ> vecs;
            for (int t = 0; t < n; ++t) {
                coeff *= w.get({subset[t]});
                vecs.push_back(system.vec(subset[t]));
                ledger.note(t, system.norm_sq(subset[t]));
                ledger.note(t, system.norm_sq(subset[t]));  // vol appears squared
            }
            if (refdet::is_zero(coeff)) return;
            ledger.assert_paired();
            Rational vol2 = paired_volume(vecs, vecs);
            if (refdet::is_zero(vol2)) return;
            total += ring_scale(coeff, vol2 / ledger.norm_product);
            ++terms;
            return;
        }
        for (int i = from; i <= N; ++i) {
            subset[depth] = i;
            recurse(i + 1, depth + 1);
        }
    };
    recurse(1, 0);
    if (term_count) *term_count = terms;
    return ring_scale(total, pow2(n));
}

// One directed-matching term of the k-even Pfaffian sum, exact.
template <class R>
Radical<R> keven_matching_term(const VectorSystem& system,
                               const std::map<std::pair<int, int>, R>& weights,
                               const std::vector<std::pair<int, int>>& matching) {
    R product(1);
    for (const auto& e : matching) {
        const R& wk = weights.at(e);
        if (refdet::is_zero(wk)) return Radical<R>(R(0), 1);
        product *= wk;
    }
    std::vector<VectorQ> vecs;
    detail::OccurrenceLedger ledger;
    int instance = 0;
    for (const auto& [p, q] : matching) {
        vecs.push_back(system.vec(p));
        vecs.push_back(system.vec(q));
        ledger.note(instance, system.norm_sq(p));
        ledger.note(instance, system.norm_sq(p));
        ++instance;
        ledger.note(instance, system.norm_sq(q));
        ledger.note(instance, system.norm_sq(q));
        ++instance;
    }
    ledger.assert_paired();
    Radical<Rational> vol = oriented_volume(vecs, system);
    if (vol.is_zero()) return Radical<R>(R(0), 1);
    return Radical<R>(ring_scale(product, vol.coefficient / ledger.norm_product), vol.radicand);
}

// Pf right-hand side (k even): sum of k-weights of all directed partial pair
// matchings with n/2 edges, each times the volume over its vertices. Exact
// when all nonzero terms share one radicand; MixedRadicandError otherwise.
template <class R>
Radical<R> rhs_keven_pf(const VectorSystem& system, const WeightAssignment<R>& w, int k,
                        long* term_count = nullptr) {
    if (k % 2) throw ArityMismatchError("rhs_keven_pf requires even k");
    if (k != w.arity) throw ArityMismatchError("rhs_keven_pf arity mismatch");
    const int n = system.span_dim();
    if (n % 2) throw DimensionMismatchError("rhs_keven_pf requires even span dimension");
    auto table = k_weight_table(system, u_table(w));
    Radical<R> total(R(0), 1);
    long terms = 0;
    for (const auto& matching : enumerate_pair_matchings(system.count(), n / 2)) {
        Radical<R> term = keven_matching_term(system, table, matching);
        if (!term.is_zero()) {
            total = radical_add(total, term);
            ++terms;
        }
    }
    if (term_count) *term_count = terms;
    return total;
}

// Float fallback for systems whose volume radicands mix.
inline double rhs_keven_pf_float(const VectorSystem& system, const WeightAssignment<Rational>& w,
                                 int k, long* term_count = nullptr) {
    if (k % 2) throw ArityMismatchError("rhs_keven_pf requires even k");
    const int n = system.span_dim();
    if (n % 2) throw DimensionMismatchError("rhs_keven_pf requires even span dimension");
    auto table = k_weight_table(system, u_table(w));
    double total = 0.0;
    long terms = 0;
    for (const auto& matching : enumerate_pair_matchings(system.count(), n / 2)) {
        double product = 1.0;
        Rational norms(1);
        std::vector<VectorQ> vecs;
        bool zero = false;
        for (const auto& e : matching) {
            const Rational& wk = table.at(e);
            if (refdet::is_zero(wk)) {
                zero = true;
                break;
            }
            product *= to_double(wk);
            vecs.push_back(system.vec(e.first));
            vecs.push_back(system.vec(e.second));
            norms *= system.norm_sq(e.first) * system.norm_sq(e.second);
        }
        if (zero) continue;
        Radical<Rational> vol = oriented_volume(vecs, system);
        if (vol.is_zero()) continue;
        total += product * to_double(vol) / to_double(norms);
        ++terms;
    }
    if (term_count) *term_count = terms;
    return total;
}

// ---------------------------------------------------------------------------
// Combinatorial right-hand sides of the named specializations.
// ---------------------------------------------------------------------------

// Spanning-tree weight sum on vertices 0..n (matrix-tree right side).
template <class R>
R rhs_matrix_tree(int vertex_count, const std::function<R(int, int)>& pair_weight,
                  long* term_count = nullptr) {
    R total(0);
    long terms = 0;
    for (const auto& tree : enumerate_trees(vertex_count)) {
        R product(1);
        for (const auto& [a, b] : tree) product *= pair_weight(a, b);
        total += product;
        ++terms;
    }
    if (term_count) *term_count = terms;
    return total;
}

// Pfaffian-3-tree right side: sum over spanning 3-trees of delta times the
// product of u over the increasing triples.
template <class R>
R rhs_mv_3tree(int m, const std::function<R(int, int, int)>& u_triple,
               long* term_count = nullptr) {
    R total(0);
    long terms = 0;
    for (const auto& tree : enumerate_3trees(m, 2 * m + 1)) {
        int delta = delta_sign(tree.triangles);
        R product(1);
        for (const auto& t : tree.triangles) product *= u_triple(t[0], t[1], t[2]);
        total += ring_scale(product, Rational(delta));
        ++terms;
    }
    if (term_count) *term_count = terms;
    return total;
}

// B-basic right side with the derived exponent: sum over B-basic graphs of
// 2^(2d - l) times the edge-weight product (d components, l loops).
template <class R>
R rhs_bn_tree(int n, const std::function<R(int, int)>& w_plus,
              const std::function<R(int, int)>& w_minus, const std::function<R(int)>& w_loop,
              long* term_count = nullptr) {
    R total(0);
    long terms = 0;
    for (const auto& edges : enumerate_bbasic_edge_sets(n)) {
        R product(1);
        int loops = 0;
        for (const auto& e : edges) {
            if (e.kind == BEdge::Plus) product *= w_plus(e.i, e.j);
            else if (e.kind == BEdge::Minus) product *= w_minus(e.i, e.j);
            else {
                product *= w_loop(e.i);
                ++loops;
            }
        }
        int d = bbasic_component_count(n, edges);
        total += ring_scale(product, pow2(2 * d - loops));
        ++terms;
    }
    if (term_count) *term_count = terms;
    return total;
}

}  // namespace refdet
