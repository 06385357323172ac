#include "contracta/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace contracta {
namespace hierarchy {

namespace {

long long ipow(long long b, int e) {
  long long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

std::vector<std::vector<int>> all_permutations(int m) {
  std::vector<int> p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::vector<int> invert(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t p = 0; p < perm.size(); ++p) inv[static_cast<std::size_t>(perm[p])] = static_cast<int>(p);
  return inv;
}

bool is_identity(const std::vector<int>& perm) {
  for (std::size_t p = 0; p < perm.size(); ++p)
    if (perm[p] != static_cast<int>(p)) return false;
  return true;
}

// Composite index machinery for A (x) B_1 ... B_m with B_m least significant.
struct Layout {
  int d_a = 0, d_b = 0, m = 0;
  int bm = 0;  // d_b^m

  std::vector<int> decode_b(int bidx) const {
    std::vector<int> t(static_cast<std::size_t>(m));
    for (int p = m - 1; p >= 0; --p) {
      t[static_cast<std::size_t>(p)] = bidx % d_b;
      bidx /= d_b;
    }
    return t;
  }
  int encode_b(const std::vector<int>& t) const {
    int b = 0;
    for (int p = 0; p < m; ++p) b = b * d_b + t[static_cast<std::size_t>(p)];
    return b;
  }
  // gather: out_p = in[perm[p]]
  int gather_b(int bidx, const std::vector<int>& perm) const {
    const std::vector<int> t = decode_b(bidx);
    std::vector<int> o(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) o[static_cast<std::size_t>(p)] = t[static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])];
    return encode_b(o);
  }
  int gather_full(int y, const std::vector<int>& perm) const {
    return (y / bm) * bm + gather_b(y % bm, perm);
  }
};

// <A, U^pi W U^pi*> = <remap(A, pi), W>; the index map is the gather by
// pi^{-1} applied to rows and columns.
std::vector<sdp::CoeffEntry> remap_entries(const std::vector<sdp::CoeffEntry>& in,
                                           const std::vector<int>& pi,
                                           const Layout& lay) {
  const std::vector<int> inv = invert(pi);
  std::vector<sdp::CoeffEntry> out;
  out.reserve(in.size());
  for (const sdp::CoeffEntry& e : in)
    out.push_back({lay.gather_full(e.row, inv), lay.gather_full(e.col, inv), e.value});
  return out;
}

template <typename F>
void for_each_hermitian_basis(int n, F&& f) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<sdp::CoeffEntry> e;
  for (int p = 0; p < n; ++p) {
    e = {{p, p, Complex(1.0, 0.0)}};
    f(e);
  }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      e = {{p, q, Complex(s, 0.0)}, {q, p, Complex(s, 0.0)}};
      f(e);
      e = {{p, q, Complex(0.0, -s)}, {q, p, Complex(0.0, s)}};
      f(e);
    }
}

template <typename F>
void for_each_traceless_hermitian_basis(int n, F&& f) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<sdp::CoeffEntry> e;
  for (int p = 0; p + 1 < n; ++p) {
    const double norm = std::sqrt(static_cast<double>(p + 1) * (p + 2));
    e.clear();
    for (int q = 0; q <= p; ++q) e.push_back({q, q, Complex(1.0 / norm, 0.0)});
    e.push_back({p + 1, p + 1, Complex(-static_cast<double>(p + 1) / norm, 0.0)});
    f(e);
  }
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      e = {{p, q, Complex(s, 0.0)}, {q, p, Complex(s, 0.0)}};
      f(e);
      e = {{p, q, Complex(0.0, -s)}, {q, p, Complex(0.0, s)}};
      f(e);
    }
}

// kron of sparse coefficients: left factor on dim_left, right on dim_right,
// composite index = left * dim_right + right.
std::vector<sdp::CoeffEntry> kron_entries(const std::vector<sdp::CoeffEntry>& a,
                                          const std::vector<sdp::CoeffEntry>& b,
                                          int dim_right) {
  std::vector<sdp::CoeffEntry> out;
  out.reserve(a.size() * b.size());
  for (const sdp::CoeffEntry& ea : a)
    for (const sdp::CoeffEntry& eb : b)
      out.push_back({ea.row * dim_right + eb.row, ea.col * dim_right + eb.col,
                     ea.value * eb.value});
  return out;
}

struct RawTerm {
  int full = 0;  // encoded tuple
  double weight = 1.0;
  std::vector<sdp::CoeffEntry> entries;
};

struct Builder {
  BuiltLevel out;
  Layout lay;
  int k = 0, m = 0;

  int rep_of(int full) const { return out.full_to_rep[static_cast<std::size_t>(full)]; }

  std::vector<sdp::Coeff> rewrite(const std::vector<RawTerm>& terms) const {
    std::map<int, std::vector<sdp::CoeffEntry>> acc;  // sdp block -> entries
    for (const RawTerm& t : terms) {
      const int rep = rep_of(t.full);
      const std::vector<int>& pi = out.full_perm[static_cast<std::size_t>(t.full)];
      std::vector<sdp::CoeffEntry> e =
          is_identity(pi) ? t.entries : remap_entries(t.entries, pi, lay);
      auto& dst = acc[out.rep_sdp_block[static_cast<std::size_t>(rep)]];
      for (sdp::CoeffEntry& en : e) {
        en.value *= t.weight;
        dst.push_back(en);
      }
    }
    std::vector<sdp::Coeff> coeffs;
    for (auto& [blk, entries] : acc) {
      sdp::Coeff c;
      c.block = blk;
      c.entries = std::move(entries);
      coeffs.push_back(std::move(c));
    }
    return coeffs;
  }

  void emit_constraint(const std::vector<RawTerm>& terms, double rhs) {
    sdp::Constraint& con = out.problem.new_constraint(rhs);
    con.terms = rewrite(terms);
  }
};

}  // namespace

int encode_tuple(const std::vector<int>& tuple, int k) {
  int idx = 0;
  for (int v : tuple) idx = idx * k + v;
  return idx;
}

std::vector<int> decode_tuple(int index, int k, int m) {
  std::vector<int> t(static_cast<std::size_t>(m) + 1);
  for (int p = m; p >= 0; --p) {
    t[static_cast<std::size_t>(p)] = index % k;
    index /= k;
  }
  return t;
}

BuiltLevel build_sdp(const KrausChannel& ch, const LevelSpec& spec) {
  channels::require_valid(ch);
  if (spec.k < 2) throw std::invalid_argument("hierarchy: k must be >= 2");
  if (spec.m < 1) throw std::invalid_argument("hierarchy: m must be >= 1");
  if (spec.m > 3)
    throw std::invalid_argument("hierarchy: levels above m = 3 are not supported");
  if (!spec.first_marginal_over_messages && spec.m > spec.k)
    throw std::invalid_argument(
        "hierarchy: the verbatim first-marginal variant needs m <= k");

  Builder B;
  B.k = spec.k;
  B.m = spec.m;
  B.lay.d_a = ch.d_in;
  B.lay.d_b = ch.d_out;
  B.lay.m = spec.m;
  B.lay.bm = static_cast<int>(ipow(ch.d_out, spec.m));
  B.out.spec = spec;
  B.out.d_a = ch.d_in;
  B.out.d_b = ch.d_out;
  B.out.block_dim = ch.d_in * B.lay.bm;

  const int k = spec.k, m = spec.m;
  const int n_full = static_cast<int>(ipow(k, m + 1));
  const int dim = B.out.block_dim;

  // Group elements: message relabelings x position permutations.
  std::vector<std::vector<int>> relabels;
  if (spec.label_symmetry) {
    relabels = all_permutations(k);
  } else {
    relabels.push_back(std::vector<int>(static_cast<std::size_t>(k)));
    std::iota(relabels.back().begin(), relabels.back().end(), 0);
  }
  std::vector<std::vector<int>> pos_perms;
  if (spec.symmetry_reduction) {
    pos_perms = all_permutations(m);
  } else {
    pos_perms.push_back(std::vector<int>(static_cast<std::size_t>(m)));
    std::iota(pos_perms.back().begin(), pos_perms.back().end(), 0);
  }

  auto act = [&](const std::vector<int>& tuple, const std::vector<int>& sigma,
                 const std::vector<int>& pi) {
    std::vector<int> o(tuple.size());
    o[0] = sigma[static_cast<std::size_t>(tuple[0])];
    for (int p = 0; p < m; ++p)
      o[static_cast<std::size_t>(p) + 1] =
          sigma[static_cast<std::size_t>(tuple[static_cast<std::size_t>(pi[static_cast<std::size_t>(p)]) + 1])];
    return o;
  };

  B.out.full_to_rep.assign(static_cast<std::size_t>(n_full), -1);
  B.out.full_perm.assign(static_cast<std::size_t>(n_full), {});
  std::vector<std::vector<std::vector<int>>> stabilizers;  // per rep, position perms
  for (int idx = 0; idx < n_full; ++idx) {
    if (B.out.full_to_rep[static_cast<std::size_t>(idx)] >= 0) continue;
    const int rep_id = static_cast<int>(B.out.reps.size());
    const std::vector<int> tuple = decode_tuple(idx, k, m);
    B.out.reps.push_back(tuple);
    stabilizers.push_back({});
    std::set<std::vector<int>> stab_set;
    for (const auto& sigma : relabels)
      for (const auto& pi : pos_perms) {
        const int target = encode_tuple(act(tuple, sigma, pi), k);
        if (target == idx && !is_identity(pi)) stab_set.insert(pi);
        if (B.out.full_to_rep[static_cast<std::size_t>(target)] < 0) {
          B.out.full_to_rep[static_cast<std::size_t>(target)] = rep_id;
          B.out.full_perm[static_cast<std::size_t>(target)] = pi;
        }
      }
    for (const auto& pi : stab_set)
      stabilizers.back().push_back(pi);
  }

  // PPT cut sets per representative (bit 0 = A, bit p = B_p).
  std::vector<std::set<int>> ppt_cuts(B.out.reps.size());
  if (spec.ppt) {
    std::vector<int> base_cuts;
    base_cuts.push_back(1);  // A
    int mask = 0;
    for (int p = 1; p < m; ++p) {
      mask |= 1 << p;
      base_cuts.push_back(mask << 1);
    }
    for (int idx = 0; idx < n_full; ++idx) {
      const int rep = B.out.full_to_rep[static_cast<std::size_t>(idx)];
      const std::vector<int>& pi = B.out.full_perm[static_cast<std::size_t>(idx)];
      for (int cut : base_cuts) {
        int transformed = cut & 1;
        for (int p = 0; p < m; ++p)
          if (cut & (1 << (p + 1)))
            transformed |= 1 << (pi[static_cast<std::size_t>(p)] + 1);
        ppt_cuts[static_cast<std::size_t>(rep)].insert(transformed);
      }
    }
  }

  // Memory budget: real entries across all PSD blocks.
  {
    std::size_t entries = 0;
    for (std::size_t r = 0; r < B.out.reps.size(); ++r)
      entries += (1 + ppt_cuts[r].size()) * 2ull * static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
    if (entries > spec.memory_budget)
      throw std::invalid_argument("hierarchy: level exceeds the memory budget");
  }

  for (std::size_t r = 0; r < B.out.reps.size(); ++r) {
    std::string label = "W(";
    for (std::size_t p = 0; p < B.out.reps[r].size(); ++p)
      label += (p ? "," : "") + std::to_string(B.out.reps[r][p]);
    label += ")";
    B.out.rep_sdp_block.push_back(B.out.problem.add_psd_block(label, dim));
  }

  const Matrix j = channels::choi(ch);
  const int da = ch.d_in, db = ch.d_out;
  const int rest = B.lay.bm / db;  // d_B^{m-1}

  // Objective: (d_A / (k d_B^{m-1})) tr(J W_{AB_1}) summed over j_1 = i.
  {
    const double scale = static_cast<double>(da) / (static_cast<double>(k) * rest);
    std::vector<sdp::CoeffEntry> jent;
    for (int r = 0; r < da * db; ++r)
      for (int c = 0; c < da * db; ++c)
        if (std::abs(j(r, c)) > 1e-15) {
          const int ra = r / db, rb = r % db;
          const int ca = c / db, cb = c % db;
          for (int t = 0; t < rest; ++t)
            jent.push_back({(ra * db + rb) * rest + t, (ca * db + cb) * rest + t,
                            scale * j(r, c)});
        }
    std::vector<RawTerm> terms;
    for (int idx = 0; idx < n_full; ++idx) {
      const std::vector<int> t = decode_tuple(idx, k, m);
      if (t[1] != t[0]) continue;
      terms.push_back({idx, 1.0, jent});
    }
    for (sdp::Coeff& c : B.rewrite(terms)) B.out.problem.add_objective(c);
  }

  // Normalization: tr of the sum equals k d_B^m.
  {
    std::vector<sdp::CoeffEntry> id_ent;
    for (int x = 0; x < dim; ++x) id_ent.push_back({x, x, Complex(1.0, 0.0)});
    std::vector<RawTerm> terms;
    for (int idx = 0; idx < n_full; ++idx) terms.push_back({idx, 1.0, id_ent});
    B.emit_constraint(terms, static_cast<double>(k) * B.lay.bm);
  }

  // Last-system marginal: sum_j W^{(i, j_1^{m-1} j)} has its B_m factor equal
  // to I/d_B; tested against G (x) T with T traceless on B_m.
  {
    const int dl = da * rest;  // A B_1..B_{m-1}
    for (int i = 0; i < k; ++i)
      for (int pre = 0; pre < static_cast<int>(ipow(k, m - 1)); ++pre) {
        std::vector<std::vector<int>> tuples;
        for (int jj = 0; jj < k; ++jj) {
          std::vector<int> t(static_cast<std::size_t>(m) + 1);
          t[0] = i;
          int p = pre;
          for (int q = m - 2; q >= 0; --q) {
            t[static_cast<std::size_t>(q) + 1] = p % k;
            p /= k;
          }
          t[static_cast<std::size_t>(m)] = jj;
          tuples.push_back(t);
        }
        for_each_hermitian_basis(dl, [&](const std::vector<sdp::CoeffEntry>& g) {
          for_each_traceless_hermitian_basis(db, [&](const std::vector<sdp::CoeffEntry>& t) {
            const std::vector<sdp::CoeffEntry> gt = kron_entries(g, t, db);
            std::vector<RawTerm> terms;
            for (const auto& tp : tuples)
              terms.push_back({encode_tuple(tp, k), 1.0, gt});
            B.emit_constraint(terms, 0.0);
          });
        });
      }
  }

  // First-system marginal tr_A W^{(i, j)} equal across the message index.
  {
    std::vector<std::vector<sdp::CoeffEntry>> lifted;  // I_A (x) G
    for_each_hermitian_basis(B.lay.bm, [&](const std::vector<sdp::CoeffEntry>& g) {
      std::vector<sdp::CoeffEntry> e;
      for (int a = 0; a < da; ++a)
        for (const sdp::CoeffEntry& eg : g)
          e.push_back({a * B.lay.bm + eg.row, a * B.lay.bm + eg.col, eg.value});
      lifted.push_back(std::move(e));
    });
    for (int jt = 0; jt < static_cast<int>(ipow(k, m)); ++jt) {
      auto tuple_for = [&](int msg) {
        std::vector<int> t(static_cast<std::size_t>(m) + 1);
        t[0] = msg;
        int p = jt;
        for (int q = m - 1; q >= 0; --q) {
          t[static_cast<std::size_t>(q) + 1] = p % k;
          p /= k;
        }
        return t;
      };
      if (spec.first_marginal_over_messages) {
        for (int i = 1; i < k; ++i)
          for (const auto& g : lifted) {
            std::vector<RawTerm> terms;
            terms.push_back({encode_tuple(tuple_for(i), k), 1.0, g});
            terms.push_back({encode_tuple(tuple_for(0), k), -1.0, g});
            B.emit_constraint(terms, 0.0);
          }
      } else {
        for (int i = 0; i < k; ++i)
          for (const auto& g : lifted) {
            std::vector<RawTerm> terms;
            terms.push_back({encode_tuple(tuple_for(i), k), 1.0, g});
            for (int l = 0; l < m; ++l)
              terms.push_back({encode_tuple(tuple_for(l), k),
                               -1.0 / static_cast<double>(k), g});
            B.emit_constraint(terms, 0.0);
          }
      }
    }
  }

  // Permutation covariance.
  if (spec.symmetry_reduction) {
    for (std::size_t r = 0; r < B.out.reps.size(); ++r)
      for (const std::vector<int>& pi : stabilizers[r])
        for_each_hermitian_basis(dim, [&](const std::vector<sdp::CoeffEntry>& h) {
          std::vector<sdp::CoeffEntry> diff = h;
          for (const sdp::CoeffEntry& e : remap_entries(h, pi, B.lay))
            diff.push_back({e.row, e.col, -e.value});
          sdp::Constraint& con = B.out.problem.new_constraint(0.0);
          sdp::Coeff c;
          c.block = B.out.rep_sdp_block[r];
          c.entries = std::move(diff);
          con.terms.push_back(std::move(c));
        });
  } else if (m > 1) {
    for (int t = 0; t + 1 < m; ++t) {
      std::vector<int> pi(static_cast<std::size_t>(m));
      std::iota(pi.begin(), pi.end(), 0);
      std::swap(pi[static_cast<std::size_t>(t)], pi[static_cast<std::size_t>(t) + 1]);
      for (int idx = 0; idx < n_full; ++idx) {
        std::vector<int> tuple = decode_tuple(idx, k, m);
        std::vector<int> permuted = tuple;
        for (int p = 0; p < m; ++p)
          permuted[static_cast<std::size_t>(p) + 1] =
              tuple[static_cast<std::size_t>(pi[static_cast<std::size_t>(p)]) + 1];
        const int target = encode_tuple(permuted, k);
        if (target < idx) continue;  // each relation once
        for_each_hermitian_basis(dim, [&](const std::vector<sdp::CoeffEntry>& h) {
          std::vector<RawTerm> terms;
          if (target == idx) {
            std::vector<sdp::CoeffEntry> diff = h;
            for (const sdp::CoeffEntry& e : remap_entries(h, pi, B.lay))
              diff.push_back({e.row, e.col, -e.value});
            terms.push_back({idx, 1.0, diff});
          } else {
            terms.push_back({target, 1.0, h});
            std::vector<sdp::CoeffEntry> rem = remap_entries(h, pi, B.lay);
            terms.push_back({idx, -1.0, rem});
          }
          B.emit_constraint(terms, 0.0);
        });
      }
    }
  }

  // PPT blocks Y = T_cut(W), Y PSD.
  if (spec.ppt) {
    for (std::size_t r = 0; r < B.out.reps.size(); ++r) {
      for (int cut : ppt_cuts[r]) {
        const int y = B.out.problem.add_psd_block(
            "ppt" + std::to_string(cut) + "_of_" +
                B.out.problem.blocks[static_cast<std::size_t>(B.out.rep_sdp_block[r])].label,
            dim);
        auto transpose_index = [&](int row, int col) {
          // Swap the components selected by the cut between row and col.
          const int ra = row / B.lay.bm, ca = col / B.lay.bm;
          std::vector<int> rb = B.lay.decode_b(row % B.lay.bm);
          std::vector<int> cb = B.lay.decode_b(col % B.lay.bm);
          int nra = ra, nca = ca;
          if (cut & 1) std::swap(nra, nca);
          for (int p = 0; p < m; ++p)
            if (cut & (1 << (p + 1))) std::swap(rb[static_cast<std::size_t>(p)], cb[static_cast<std::size_t>(p)]);
          return std::pair<int, int>(nra * B.lay.bm + B.lay.encode_b(rb),
                                     nca * B.lay.bm + B.lay.encode_b(cb));
        };
        for_each_hermitian_basis(dim, [&](const std::vector<sdp::CoeffEntry>& h) {
          sdp::Constraint& con = B.out.problem.new_constraint(0.0);
          sdp::Coeff cy;
          cy.block = y;
          cy.entries = h;
          con.terms.push_back(std::move(cy));
          sdp::Coeff cw;
          cw.block = B.out.rep_sdp_block[r];
          for (const sdp::CoeffEntry& e : h) {
            const auto [tr_, tc_] = transpose_index(e.row, e.col);
            cw.entries.push_back({tr_, tc_, -e.value});
          }
          con.terms.push_back(std::move(cw));
        });
      }
    }
  }

  return B.out;
}

LevelResult solve_level(const KrausChannel& ch, const LevelSpec& spec,
                        const sdp::Options& solver) {
  BuiltLevel built = build_sdp(ch, spec);
  sdp::Solution sol = sdp::solve(built.problem, solver);
  LevelResult res;
  res.spec = spec;
  res.status = sol.status;
  res.certificate = sdp::certify(sol, built.problem);
  res.psucc = sol.primal_value;
  if (spec.k == 2) {
    res.eta_raw = 2.0 * res.psucc - 1.0;
    res.eta = std::min(1.0, std::max(0.0, res.eta_raw));
    res.clipped = res.eta != res.eta_raw;
  } else {
    res.eta_raw = res.eta = std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

double eta_upper_bound(const KrausChannel& ch, int m, bool ppt) {
  LevelSpec spec;
  spec.k = 2;
  spec.m = m;
  spec.ppt = ppt;
  return solve_level(ch, spec).eta;
}

BilinearCheck bilinear_form_check(const KrausChannel& ch, int k,
                                  const sdp::Options& solver) {
  BilinearCheck out;
  {
    LevelSpec spec;
    spec.k = k;
    spec.m = 1;
    out.sdp_value = solve_level(ch, spec, solver).psucc;
  }

  const int da = ch.d_in, db = ch.d_out;
  const int dim = da * k * db * k;
  auto at = [&](int a, int abar, int b, int bbar) {
    return ((a * k + abar) * db + b) * k + bbar;
  };

  sdp::Problem prob;
  const int w = prob.add_psd_block("W", dim);

  const Matrix j = channels::choi(ch);
  {
    // d_A d_B * J_{AB} (x) Psi^{(k)}, reordered to (A, Abar, B, Bbar).
    Matrix obj = Matrix::Zero(dim, dim);
    for (int a = 0; a < da; ++a)
      for (int ap = 0; ap < da; ++ap)
        for (int b = 0; b < db; ++b)
          for (int bp = 0; bp < db; ++bp)
            for (int i = 0; i < k; ++i)
              obj(at(a, i, b, i), at(ap, i, bp, i)) =
                  static_cast<double>(da) * db * j(a * db + b, ap * db + bp);
    prob.add_objective(sdp::coeff_from_dense(w, obj, 1e-15));
  }

  prob.new_constraint(1.0).terms.push_back(
      sdp::coeff_from_dense(w, Matrix::Identity(dim, dim)));

  // tr_A W = I_Abar / k (x) W_{B Bbar}.
  {
    const int dh = k * db * k;
    const std::vector<Matrix> basis = la::hermitian_basis(dh);
    for (const Matrix& h : basis) {
      Matrix coeff = Matrix::Zero(dim, dim);
      auto hat = [&](int abar, int b, int bbar) { return (abar * db + b) * k + bbar; };
      for (int a = 0; a < da; ++a)
        for (int abar = 0; abar < k; ++abar)
          for (int b = 0; b < db; ++b)
            for (int bbar = 0; bbar < k; ++bbar)
              for (int abar2 = 0; abar2 < k; ++abar2)
                for (int b2 = 0; b2 < db; ++b2)
                  for (int bbar2 = 0; bbar2 < k; ++bbar2)
                    coeff(at(a, abar, b, bbar), at(a, abar2, b2, bbar2)) +=
                        h(hat(abar, b, bbar), hat(abar2, b2, bbar2));
      // minus (1/k) I_{A Abar} (x) tr_Abar(h)
      Matrix htr = Matrix::Zero(db * k, db * k);
      for (int abar = 0; abar < k; ++abar)
        for (int b = 0; b < db; ++b)
          for (int bbar = 0; bbar < k; ++bbar)
            for (int b2 = 0; b2 < db; ++b2)
              for (int bbar2 = 0; bbar2 < k; ++bbar2)
                htr(b * k + bbar, b2 * k + bbar2) +=
                    h(hat(abar, b, bbar), hat(abar, b2, bbar2));
      for (int a = 0; a < da; ++a)
        for (int abar = 0; abar < k; ++abar)
          for (int b = 0; b < db; ++b)
            for (int bbar = 0; bbar < k; ++bbar)
              for (int b2 = 0; b2 < db; ++b2)
                for (int bbar2 = 0; bbar2 < k; ++bbar2)
                  coeff(at(a, abar, b, bbar), at(a, abar, b2, bbar2)) -=
                      htr(b * k + bbar, b2 * k + bbar2) / static_cast<double>(k);
      sdp::Coeff c = sdp::coeff_from_dense(w, coeff, 1e-15);
      if (!c.entries.empty()) prob.new_constraint(0.0).terms.push_back(c);
    }
  }

  // tr_Bbar W = W_{A Abar} (x) I_B / d_B, tested against H (x) T with T
  // traceless on B.
  {
    const std::vector<Matrix> hb = la::hermitian_basis(da * k);
    const std::vector<Matrix> tb = la::traceless_hermitian_basis(db);
    for (const Matrix& h : hb)
      for (const Matrix& t : tb) {
        Matrix coeff = Matrix::Zero(dim, dim);
        for (int a = 0; a < da; ++a)
          for (int abar = 0; abar < k; ++abar)
            for (int a2 = 0; a2 < da; ++a2)
              for (int abar2 = 0; abar2 < k; ++abar2)
                for (int b = 0; b < db; ++b)
                  for (int b2 = 0; b2 < db; ++b2)
                    for (int bbar = 0; bbar < k; ++bbar)
                      coeff(at(a, abar, b, bbar), at(a2, abar2, b2, bbar)) +=
                          h(a * k + abar, a2 * k + abar2) * t(b, b2);
        sdp::Coeff c = sdp::coeff_from_dense(w, coeff, 1e-15);
        if (!c.entries.empty()) prob.new_constraint(0.0).terms.push_back(c);
      }
  }

  sdp::Solution sol = sdp::solve(prob, solver);
  out.tilde_value = sol.primal_value;
  out.difference = std::abs(out.tilde_value - out.sdp_value);
  return out;
}

}  // namespace hierarchy
}  // namespace contracta
