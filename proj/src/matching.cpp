// Exact maximum-weight matching in general graphs, O(n^3).
//
// Classic primal-dual blossom method (Galil's formulation) over integer
// weights. Vertex duals carry a factor of two so that all slack arithmetic
// stays integral; blossoms occupy ids [n, 2n). The public wrappers in
// scheduler.cpp reduce minimum-weight perfect matching to this routine.

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

#include "cosched/error.hpp"
#include "cosched/scheduler.hpp"

namespace cosched::detail {

namespace {

using Edge = std::array<std::int64_t, 3>; // i, j, weight

constexpr int kLabelFree = 0;
constexpr int kLabelS = 1;
constexpr int kLabelT = 2;
constexpr int kLabelCrumb = 5; // breadcrumb used by scanBlossom

class Matcher {
public:
    Matcher(int n, const std::vector<Edge>& edges, bool max_cardinality)
        : n_(n), edges_(edges), maxcard_(max_cardinality) {
        const int m = static_cast<int>(edges_.size());
        std::int64_t maxweight = 0;
        endpoint_.resize(2 * m);
        neighbend_.assign(n_, {});
        for (int k = 0; k < m; ++k) {
            const auto& [i, j, w] = edges_[k];
            assert(i >= 0 && i < n_ && j >= 0 && j < n_ && i != j);
            endpoint_[2 * k] = static_cast<int>(i);
            endpoint_[2 * k + 1] = static_cast<int>(j);
            neighbend_[i].push_back(2 * k + 1);
            neighbend_[j].push_back(2 * k);
            maxweight = std::max(maxweight, w);
        }
        maxweight = std::max<std::int64_t>(maxweight, 0);

        mate_.assign(n_, -1);
        label_.assign(2 * n_, kLabelFree);
        labelend_.assign(2 * n_, -1);
        inblossom_.resize(n_);
        for (int v = 0; v < n_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * n_, -1);
        blossomchilds_.assign(2 * n_, {});
        blossombase_.assign(2 * n_, -1);
        for (int v = 0; v < n_; ++v) blossombase_[v] = v;
        blossomendps_.assign(2 * n_, {});
        bestedge_.assign(2 * n_, -1);
        blossombestedges_.assign(2 * n_, {});
        has_bestedges_.assign(2 * n_, 0);
        for (int b = 2 * n_ - 1; b >= n_; --b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * n_, 0);
        for (int v = 0; v < n_; ++v) dualvar_[v] = maxweight;
        allowedge_.assign(m, 0);
    }

    std::vector<int> run() {
        if (edges_.empty()) return std::vector<int>(n_, -1);
        for (int stage = 0; stage < n_; ++stage)
            if (!run_stage()) break;
        verify_optimum();
        std::vector<int> partner(n_, -1);
        for (int v = 0; v < n_; ++v)
            if (mate_[v] >= 0) partner[v] = endpoint_[mate_[v]];
        for (int v = 0; v < n_; ++v)
            certify(partner[v] == -1 || partner[partner[v]] == v, "asymmetric matching");
        return partner;
    }

private:
    std::int64_t slack(int k) const {
        const auto& [i, j, w] = edges_[k];
        return dualvar_[i] + dualvar_[j] - 2 * w;
    }

    void collect_leaves(int b, std::vector<int>& out) const {
        if (b < n_) {
            out.push_back(b);
        } else {
            for (int child : blossomchilds_[b]) collect_leaves(child, out);
        }
    }

    std::vector<int> blossom_leaves(int b) const {
        std::vector<int> out;
        collect_leaves(b, out);
        return out;
    }

    // Python-style wrapped indexing into a blossom's children/endpoints.
    static int wrap(int idx, int size) {
        idx %= size;
        return idx < 0 ? idx + size : idx;
    }
    int child_at(int b, int j) const {
        const auto& c = blossomchilds_[b];
        return c[wrap(j, static_cast<int>(c.size()))];
    }
    int endp_at(int b, int j) const {
        const auto& e = blossomendps_[b];
        return e[wrap(j, static_cast<int>(e.size()))];
    }

    void assign_label(int w, int t, int p) {
        const int b = inblossom_[w];
        assert(label_[w] == kLabelFree && label_[b] == kLabelFree);
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == kLabelS) {
            for (int v : blossom_leaves(b)) queue_.push_back(v);
        } else if (t == kLabelT) {
            const int base = blossombase_[b];
            assert(mate_[base] >= 0);
            assign_label(endpoint_[mate_[base]], kLabelS, mate_[base] ^ 1);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            assert(label_[b] == kLabelS);
            path.push_back(b);
            label_[b] = kLabelCrumb;
            assert(labelend_[b] == mate_[blossombase_[b]]);
            if (labelend_[b] == -1) {
                v = -1; // reached a single vertex
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                assert(label_[b] == kLabelT);
                assert(labelend_[b] >= 0);
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = kLabelS;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = static_cast<int>(edges_[k][0]);
        int w = static_cast<int>(edges_[k][1]);
        const int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        const int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();
        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& path = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        path.clear();
        endps.clear();
        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            assert(label_[bv] == kLabelT ||
                   (label_[bv] == kLabelS && labelend_[bv] == mate_[blossombase_[bv]]));
            assert(labelend_[bv] >= 0);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            assert(label_[bw] == kLabelT ||
                   (label_[bw] == kLabelS && labelend_[bw] == mate_[blossombase_[bw]]));
            assert(labelend_[bw] >= 0);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }
        assert(label_[bb] == kLabelS);
        label_[b] = kLabelS;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0;
        for (int leaf : blossom_leaves(b)) {
            if (label_[inblossom_[leaf]] == kLabelT) queue_.push_back(leaf);
            inblossom_[leaf] = b;
        }
        // Merge least-slack edge lists of the children.
        std::vector<int> bestedgeto(2 * n_, -1);
        for (int child : path) {
            std::vector<std::vector<int>> nblists;
            if (!has_bestedges_[child]) {
                for (int leaf : blossom_leaves(child)) {
                    std::vector<int> l;
                    l.reserve(neighbend_[leaf].size());
                    for (int p : neighbend_[leaf]) l.push_back(p / 2);
                    nblists.push_back(std::move(l));
                }
            } else {
                nblists.push_back(blossombestedges_[child]);
            }
            for (const auto& nblist : nblists) {
                for (int edge : nblist) {
                    int i = static_cast<int>(edges_[edge][0]);
                    int j = static_cast<int>(edges_[edge][1]);
                    if (inblossom_[j] == b) std::swap(i, j);
                    const int bj = inblossom_[j];
                    if (bj != b && label_[bj] == kLabelS &&
                        (bestedgeto[bj] == -1 || slack(edge) < slack(bestedgeto[bj])))
                        bestedgeto[bj] = edge;
                }
            }
            blossombestedges_[child].clear();
            has_bestedges_[child] = 0;
            bestedge_[child] = -1;
        }
        auto& kept = blossombestedges_[b];
        kept.clear();
        for (int e : bestedgeto)
            if (e != -1) kept.push_back(e);
        has_bestedges_[b] = 1;
        bestedge_[b] = -1;
        for (int e : kept)
            if (bestedge_[b] == -1 || slack(e) < slack(bestedge_[b])) bestedge_[b] = e;
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < n_) {
                inblossom_[s] = s;
            } else if (endstage && dualvar_[s] == 0) {
                expand_blossom(s, endstage);
            } else {
                for (int leaf : blossom_leaves(s)) inblossom_[leaf] = s;
            }
        }
        if (!endstage && label_[b] == kLabelT) {
            assert(labelend_[b] >= 0);
            const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            const int len = static_cast<int>(blossomchilds_[b].size());
            int j = 0;
            for (int idx = 0; idx < len; ++idx)
                if (blossomchilds_[b][idx] == entrychild) {
                    j = idx;
                    break;
                }
            int jstep, endptrick;
            if (j & 1) {
                j -= len;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = kLabelFree;
                label_[endpoint_[endp_at(b, j - endptrick) ^ endptrick ^ 1]] = kLabelFree;
                assign_label(endpoint_[p ^ 1], kLabelT, p);
                allowedge_[endp_at(b, j - endptrick) / 2] = 1;
                j += jstep;
                p = endp_at(b, j - endptrick) ^ endptrick;
                allowedge_[p / 2] = 1;
                j += jstep;
            }
            const int bv = child_at(b, j);
            label_[endpoint_[p ^ 1]] = label_[bv] = kLabelT;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (child_at(b, j) != entrychild) {
                const int bw = child_at(b, j);
                if (label_[bw] == kLabelS) {
                    j += jstep;
                    continue;
                }
                int reached = -1;
                for (int leaf : blossom_leaves(bw))
                    if (label_[leaf] != kLabelFree) {
                        reached = leaf;
                        break;
                    }
                if (reached >= 0) {
                    assert(label_[reached] == kLabelT);
                    assert(inblossom_[reached] == bw);
                    label_[reached] = kLabelFree;
                    label_[endpoint_[mate_[blossombase_[bw]]]] = kLabelFree;
                    assign_label(reached, kLabelT, labelend_[reached]);
                }
                j += jstep;
            }
        }
        label_[b] = kLabelFree;
        labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        has_bestedges_[b] = 0;
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= n_) augment_blossom(t, v);
        const int len = static_cast<int>(blossomchilds_[b].size());
        int i = 0;
        for (int idx = 0; idx < len; ++idx)
            if (blossomchilds_[b][idx] == t) {
                i = idx;
                break;
            }
        int j = i;
        int jstep, endptrick;
        if (i & 1) {
            j -= len;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        while (j != 0) {
            j += jstep;
            int child = child_at(b, j);
            const int p = endp_at(b, j - endptrick) ^ endptrick;
            if (child >= n_) augment_blossom(child, endpoint_[p]);
            j += jstep;
            child = child_at(b, j);
            if (child >= n_) augment_blossom(child, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(blossomchilds_[b].begin(), blossomchilds_[b].begin() + i, blossomchilds_[b].end());
        std::rotate(blossomendps_[b].begin(), blossomendps_[b].begin() + i, blossomendps_[b].end());
        blossombase_[b] = blossombase_[blossomchilds_[b][0]];
        assert(blossombase_[b] == v);
    }

    void augment_matching(int k) {
        const int v = static_cast<int>(edges_[k][0]);
        const int w = static_cast<int>(edges_[k][1]);
        const std::pair<int, int> sides[2] = {{v, 2 * k + 1}, {w, 2 * k}};
        for (auto [s, p] : sides) {
            while (true) {
                const int bs = inblossom_[s];
                assert(label_[bs] == kLabelS);
                assert(labelend_[bs] == mate_[blossombase_[bs]]);
                if (bs >= n_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break; // reached a single vertex
                const int t = endpoint_[labelend_[bs]];
                const int bt = inblossom_[t];
                assert(label_[bt] == kLabelT);
                assert(labelend_[bt] >= 0);
                s = endpoint_[labelend_[bt]];
                const int j = endpoint_[labelend_[bt] ^ 1];
                assert(blossombase_[bt] == t);
                if (bt >= n_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    // One stage: grow alternating trees until an augmenting path is found or
    // the duals certify that no improvement remains. Returns whether the
    // matching was augmented.
    bool run_stage() {
        std::fill(label_.begin(), label_.end(), kLabelFree);
        std::fill(bestedge_.begin(), bestedge_.end(), -1);
        for (int b = n_; b < 2 * n_; ++b) {
            blossombestedges_[b].clear();
            has_bestedges_[b] = 0;
        }
        std::fill(allowedge_.begin(), allowedge_.end(), 0);
        queue_.clear();
        for (int v = 0; v < n_; ++v)
            if (mate_[v] == -1 && label_[inblossom_[v]] == kLabelFree) assign_label(v, kLabelS, -1);

        bool augmented = false;
        while (true) {
            while (!queue_.empty() && !augmented) {
                const int v = queue_.back();
                queue_.pop_back();
                assert(label_[inblossom_[v]] == kLabelS);
                for (int p : neighbend_[v]) {
                    const int k = p / 2;
                    const int w = endpoint_[p];
                    if (inblossom_[v] == inblossom_[w]) continue;
                    std::int64_t kslack = 0;
                    if (!allowedge_[k]) {
                        kslack = slack(k);
                        if (kslack <= 0) allowedge_[k] = 1;
                    }
                    if (allowedge_[k]) {
                        if (label_[inblossom_[w]] == kLabelFree) {
                            assign_label(w, kLabelT, p ^ 1);
                        } else if (label_[inblossom_[w]] == kLabelS) {
                            const int base = scan_blossom(v, w);
                            if (base >= 0) {
                                add_blossom(base, k);
                            } else {
                                augment_matching(k);
                                augmented = true;
                                break;
                            }
                        } else if (label_[w] == kLabelFree) {
                            assert(label_[inblossom_[w]] == kLabelT);
                            label_[w] = kLabelT;
                            labelend_[w] = p ^ 1;
                        }
                    } else if (label_[inblossom_[w]] == kLabelS) {
                        const int b = inblossom_[v];
                        if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                    } else if (label_[w] == kLabelFree) {
                        if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                    }
                }
            }
            if (augmented) break;

            // Choose the smallest dual adjustment that creates new structure.
            int deltatype = -1;
            std::int64_t delta = 0;
            int deltaedge = -1, deltablossom = -1;
            if (!maxcard_) {
                deltatype = 1;
                delta = std::max<std::int64_t>(0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n_));
            }
            for (int v = 0; v < n_; ++v) {
                if (label_[inblossom_[v]] == kLabelFree && bestedge_[v] != -1) {
                    const std::int64_t d = slack(bestedge_[v]);
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 2;
                        deltaedge = bestedge_[v];
                    }
                }
            }
            for (int b = 0; b < 2 * n_; ++b) {
                if (blossomparent_[b] == -1 && label_[b] == kLabelS && bestedge_[b] != -1) {
                    const std::int64_t kslack = slack(bestedge_[b]);
                    assert(kslack % 2 == 0);
                    const std::int64_t d = kslack / 2;
                    if (deltatype == -1 || d < delta) {
                        delta = d;
                        deltatype = 3;
                        deltaedge = bestedge_[b];
                    }
                }
            }
            for (int b = n_; b < 2 * n_; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == kLabelT &&
                    (deltatype == -1 || dualvar_[b] < delta)) {
                    delta = dualvar_[b];
                    deltatype = 4;
                    deltablossom = b;
                }
            }
            if (deltatype == -1) {
                // No further improvement possible; max-cardinality optimum.
                assert(maxcard_);
                deltatype = 1;
                delta = std::max<std::int64_t>(0, *std::min_element(dualvar_.begin(), dualvar_.begin() + n_));
            }

            for (int v = 0; v < n_; ++v) {
                if (label_[inblossom_[v]] == kLabelS)
                    dualvar_[v] -= delta;
                else if (label_[inblossom_[v]] == kLabelT)
                    dualvar_[v] += delta;
            }
            for (int b = n_; b < 2 * n_; ++b) {
                if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                    if (label_[b] == kLabelS)
                        dualvar_[b] += delta;
                    else if (label_[b] == kLabelT)
                        dualvar_[b] -= delta;
                }
            }

            if (deltatype == 1) break;
            if (deltatype == 2) {
                allowedge_[deltaedge] = 1;
                int i = static_cast<int>(edges_[deltaedge][0]);
                int j = static_cast<int>(edges_[deltaedge][1]);
                if (label_[inblossom_[i]] == kLabelFree) std::swap(i, j);
                assert(label_[inblossom_[i]] == kLabelS);
                queue_.push_back(i);
            } else if (deltatype == 3) {
                allowedge_[deltaedge] = 1;
                const int i = static_cast<int>(edges_[deltaedge][0]);
                assert(label_[inblossom_[i]] == kLabelS);
                queue_.push_back(i);
            } else {
                expand_blossom(deltablossom, false);
            }
        }

        if (augmented) {
            // Discard S-blossoms whose dual dropped to zero.
            for (int b = n_; b < 2 * n_; ++b)
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == kLabelS && dualvar_[b] == 0)
                    expand_blossom(b, true);
        }
        return augmented;
    }

    // Checks the complementary-slackness certificate; cheap relative to the
    // solve and catches any structural corruption outright. Active in all
    // build types.
    static void certify(bool ok, const char* what) {
        if (!ok) fail("internal_error", std::string("matching optimality certificate violated: ") + what);
    }

    void verify_optimum() const {
        std::int64_t vdualoffset = 0;
        if (maxcard_) {
            const std::int64_t mn = *std::min_element(dualvar_.begin(), dualvar_.begin() + n_);
            vdualoffset = std::max<std::int64_t>(0, -mn);
        }
        for (int v = 0; v < n_; ++v) certify(dualvar_[v] + vdualoffset >= 0, "negative vertex dual");
        for (int b = n_; b < 2 * n_; ++b)
            certify(blossombase_[b] < 0 || dualvar_[b] >= 0, "negative blossom dual");
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const int i = static_cast<int>(edges_[k][0]);
            const int j = static_cast<int>(edges_[k][1]);
            std::int64_t s = dualvar_[i] + dualvar_[j] - 2 * edges_[k][2];
            std::vector<int> iblossoms{i}, jblossoms{j};
            while (blossomparent_[iblossoms.back()] != -1) iblossoms.push_back(blossomparent_[iblossoms.back()]);
            while (blossomparent_[jblossoms.back()] != -1) jblossoms.push_back(blossomparent_[jblossoms.back()]);
            std::reverse(iblossoms.begin(), iblossoms.end());
            std::reverse(jblossoms.begin(), jblossoms.end());
            for (std::size_t z = 0; z < std::min(iblossoms.size(), jblossoms.size()); ++z) {
                if (iblossoms[z] != jblossoms[z]) break;
                s += 2 * dualvar_[iblossoms[z]];
            }
            certify(s >= 0, "negative edge slack");
            const int ki = static_cast<int>(k);
            if ((mate_[i] >= 0 && mate_[i] / 2 == ki) || (mate_[j] >= 0 && mate_[j] / 2 == ki)) {
                certify(mate_[i] >= 0 && mate_[i] / 2 == ki && mate_[j] >= 0 && mate_[j] / 2 == ki,
                        "half-matched edge");
                certify(s == 0, "matched edge with nonzero slack");
            }
        }
        for (int v = 0; v < n_; ++v)
            certify(mate_[v] >= 0 || dualvar_[v] + vdualoffset == 0, "exposed vertex with nonzero dual");
        for (int b = n_; b < 2 * n_; ++b) {
            if (blossombase_[b] >= 0 && dualvar_[b] > 0) {
                certify(blossomendps_[b].size() % 2 == 1, "even blossom");
                for (std::size_t z = 1; z < blossomendps_[b].size(); z += 2) {
                    const int p = blossomendps_[b][z];
                    certify(mate_[endpoint_[p]] == (p ^ 1), "blossom edge unmatched");
                    certify(mate_[endpoint_[p ^ 1]] == p, "blossom edge unmatched");
                }
            }
        }
    }

    const int n_;
    const std::vector<Edge>& edges_;
    const bool maxcard_;

    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<char> has_bestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<std::int64_t> dualvar_;
    std::vector<char> allowedge_;
    std::vector<int> queue_;
};

} // namespace

std::vector<int> max_weight_matching(int n, const std::vector<std::array<std::int64_t, 3>>& edges,
                                     bool max_cardinality) {
    if (n <= 0) return {};
    Matcher matcher(n, edges, max_cardinality);
    return matcher.run();
}

} // namespace cosched::detail
