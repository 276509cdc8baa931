#include "mimosel/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "mimosel/errors.hpp"

namespace mimosel {

namespace {

using u128 = unsigned __int128;
constexpr u128 kSaturated = std::numeric_limits<std::uint64_t>::max();

u128 sat_mul(u128 a, u128 b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return std::min(a * b, kSaturated);
}

u128 binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays exact because r is C(n - k + i - 1, i - 1).
    if (r > kSaturated / static_cast<u128>(n - k + i)) return kSaturated;
    r = r * static_cast<u128>(n - k + i) / static_cast<u128>(i);
  }
  return r;
}

u128 ipow(u128 b, int e) {
  u128 r = 1;
  for (int i = 0; i < e; ++i) r = sat_mul(r, b);
  return r;
}

// Enumeration size before de-duplication.
u128 raw_count(const SelectionMode& mode, const ArrayGeometry& g) {
  switch (mode.kind) {
    case ModeKind::joint:
      return binom(g.M * g.N, mode.k);
    case ModeKind::factored:
      return sat_mul(binom(g.M, mode.k_t), binom(g.N, mode.k_r));
    case ModeKind::mfc:
    case ModeKind::hybrid:
      return sat_mul(binom(g.N, mode.k_r), ipow(binom(g.M, mode.k_m), mode.k_r));
  }
  return 0;
}

// Calls fn(idx) for every ascending k-subset of {0..n-1}, in lexicographic order.
template <typename Fn>
void for_each_combination(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<std::uint64_t> subset_masks(int n, int k) {
  std::vector<std::uint64_t> out;
  for_each_combination(n, k, [&](const std::vector<int>& idx) {
    std::uint64_t m = 0;
    for (int i : idx) m |= std::uint64_t{1} << i;
    out.push_back(m);
  });
  return out;
}

// Spread an M-bit transmitter subset onto receiver row rx of the flat index.
std::uint64_t row_mask(std::uint64_t tx_subset, int rx, const ArrayGeometry& g) {
  std::uint64_t m = 0;
  for (int tx = 0; tx < g.M; ++tx)
    if (tx_subset >> tx & 1) m |= std::uint64_t{1} << g.flat(rx, tx);
  return m;
}

void check_mask_geometry(const ArrayGeometry& g) {
  if (g.size() > 64)
    throw InvalidArgument("enumeration needs M*N <= 64 (got " + std::to_string(g.size()) + ")");
}

}  // namespace

void check_oracle_budget(const SelectionMode& mode, const ArrayGeometry& g, std::uint64_t budget) {
  mode.validate(g);
  check_mask_geometry(g);
  const u128 n = raw_count(mode, g);
  if (n > budget) {
    throw BudgetExceeded("enumeration of " + mode.label() + " needs " +
                         (n >= kSaturated ? std::string("more than 2^64")
                                          : std::to_string(static_cast<std::uint64_t>(n))) +
                         " candidates, budget is " + std::to_string(budget));
  }
}

namespace {

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t mask = 0;
  bool set = false;

  void offer(double v, std::uint64_t m) {
    if (!set || v > value || (v == value && mask_less(m, mask))) {
      value = v;
      mask = m;
      set = true;
    }
  }
  void merge(const Best& o) {
    if (o.set) offer(o.value, o.mask);
  }
};

// Depth-first search over k-subsets that grows the Cholesky factor of R_S one
// row at a time, so each leaf costs O(k^2).
class JointSearch {
 public:
  JointSearch(const std::vector<double>& re, const std::vector<double>& im,
              const std::vector<double>& a_re, const std::vector<double>& a_im, int n, int k)
      : Rre_(re), Rim_(im), are_(a_re), aim_(a_im), n_(n), k_(k),
        Lre_(k * k), Lim_(k * k), yre_(k), yim_(k), acc_(k + 1), idx_(k) {}

  // All subsets whose smallest element is `first`.
  void run_from(int first) {
    acc_[0] = 0.0;
    visit(0, first, first + 1, 0);
  }

  const Best& best() const noexcept { return best_; }
  std::uint64_t leaves() const noexcept { return leaves_; }

 private:
  void visit(int d, int j_lo, int j_hi, std::uint64_t mask) {
    double* Lre_d = &Lre_[d * k_];
    double* Lim_d = &Lim_[d * k_];
    for (int j = j_lo; j < j_hi; ++j) {
      const double* cre = &Rre_[static_cast<std::size_t>(j) * n_];
      const double* cim = &Rim_[static_cast<std::size_t>(j) * n_];
      // Solve L w = R(S, j); the new factor row is conj(w).
      double wsq = 0.0;
      double tre = are_[j], tim = aim_[j];
      for (int r = 0; r < d; ++r) {
        double sre = cre[idx_[r]], sim = cim[idx_[r]];
        const double* lre = &Lre_[r * k_];
        const double* lim = &Lim_[r * k_];
        for (int q = 0; q < r; ++q) {
          // s -= L(r,q) * w_q, with w_q = conj(L(d,q))
          const double wre = Lre_d[q], wim = -Lim_d[q];
          sre -= lre[q] * wre - lim[q] * wim;
          sim -= lre[q] * wim + lim[q] * wre;
        }
        const double wre = sre / lre[r], wim = sim / lre[r];
        Lre_d[r] = wre;
        Lim_d[r] = -wim;
        wsq += wre * wre + wim * wim;
        // t -= conj(w_r) * y_r
        tre -= wre * yre_[r] + wim * yim_[r];
        tim -= wre * yim_[r] - wim * yre_[r];
      }
      const double delta2 = cre[j] - wsq;
      if (!(delta2 > 0.0)) throw NotPositiveDefinite("reduced covariance is not positive definite");
      const double delta = std::sqrt(delta2);
      Lre_d[d] = delta;
      Lim_d[d] = 0.0;
      yre_[d] = tre / delta;
      yim_[d] = tim / delta;
      const double value = acc_[d] + yre_[d] * yre_[d] + yim_[d] * yim_[d];
      const std::uint64_t m = mask | (std::uint64_t{1} << j);
      if (d + 1 == k_) {
        ++leaves_;
        best_.offer(value, m);
      } else {
        idx_[d] = j;
        acc_[d + 1] = value;
        visit(d + 1, j + 1, n_ - (k_ - d - 2), m);
      }
    }
  }

  const std::vector<double>& Rre_;
  const std::vector<double>& Rim_;
  const std::vector<double>& are_;
  const std::vector<double>& aim_;
  int n_, k_;
  std::vector<double> Lre_, Lim_, yre_, yim_, acc_;
  std::vector<int> idx_;
  Best best_;
  std::uint64_t leaves_ = 0;
};

template <typename Work>
void parallel_for(int count, int threads, Work&& work) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) work(0, i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i; (i = next.fetch_add(1)) < count;) work(t, i);
      } catch (...) {
        errors[t] = std::current_exception();
        next.store(count);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

OracleResult joint_optimum(const CovarianceModel& model, int k, const OracleConfig& config) {
  const int n = static_cast<int>(model.size());
  const CMatrix R = covariance_full(model);
  std::vector<double> re(static_cast<std::size_t>(n) * n), im(re.size()), are(n), aim(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      re[static_cast<std::size_t>(j) * n + i] = R(i, j).real();
      im[static_cast<std::size_t>(j) * n + i] = R(i, j).imag();
    }
    are[j] = model.a_s()[j].real();
    aim[j] = model.a_s()[j].imag();
  }

  const int threads = std::max(1, config.threads);
  std::vector<Best> best(threads);
  std::vector<std::uint64_t> leaves(threads, 0);
  parallel_for(n - k + 1, threads, [&](int t, int first) {
    JointSearch search(re, im, are, aim, n, k);
    search.run_from(first);
    best[t].merge(search.best());
    leaves[t] += search.leaves();
  });

  Best total;
  std::uint64_t evaluated = 0;
  for (int t = 0; t < threads; ++t) {
    total.merge(best[t]);
    evaluated += leaves[t];
  }
  OracleResult out;
  out.best = SelectionVector::from_mask(total.mask, model.geometry().M, model.geometry().N);
  out.sinr_db = linear_to_db(model.sigma_s2() * total.value);
  out.candidates_evaluated = evaluated;
  return out;
}

// sum |L^-1 a_S|^2 for the selection in `mask`.
double quadratic_gain(const CMatrix& R, const CVector& a, std::uint64_t mask, CMatrix& Rs,
                      CVector& as) {
  const int k = std::popcount(mask);
  std::vector<int> idx;
  idx.reserve(k);
  for (std::uint64_t m = mask; m; m &= m - 1) idx.push_back(std::countr_zero(m));
  Rs.resize(k, k);
  as.resize(k);
  for (int c = 0; c < k; ++c) {
    as[c] = a[idx[c]];
    for (int r = 0; r < k; ++r) Rs(r, c) = R(idx[r], idx[c]);
  }
  Eigen::LLT<CMatrix> llt(Rs);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("reduced covariance is not positive definite");
  return llt.matrixL().solve(as).squaredNorm();
}

}  // namespace

bool mask_less(std::uint64_t a, std::uint64_t b) noexcept {
  const std::uint64_t d = a ^ b;
  if (d == 0) return false;
  return ((a >> std::countr_zero(d)) & 1) == 0;
}

std::uint64_t feasible_count(const SelectionMode& mode, const ArrayGeometry& g) {
  mode.validate(g);
  if (mode.kind != ModeKind::hybrid) return static_cast<std::uint64_t>(raw_count(mode, g));
  // Rows times k_r-tuples of k_m-subsets whose union has at most k_t columns,
  // counted by exact union size j with inclusion-exclusion.
  __int128 sum = 0;
  for (int j = mode.k_m; j <= mode.k_t; ++j) {
    __int128 onto = 0;
    for (int i = 0; i <= j; ++i) {
      const __int128 term = static_cast<__int128>(binom(j, i)) *
                            static_cast<__int128>(ipow(binom(j - i, mode.k_m), mode.k_r));
      onto += (i % 2 == 0) ? term : -term;
    }
    sum += static_cast<__int128>(binom(g.M, j)) * onto;
  }
  return static_cast<std::uint64_t>(sat_mul(binom(g.N, mode.k_r), static_cast<u128>(sum)));
}

void enumerate_feasible(const SelectionMode& mode, const ArrayGeometry& g,
                        const std::function<void(std::uint64_t)>& visit, std::uint64_t budget) {
  mode.validate(g);
  check_mask_geometry(g);
  check_oracle_budget(mode, g, budget);

  switch (mode.kind) {
    case ModeKind::joint: {
      for_each_combination(g.M * g.N, mode.k, [&](const std::vector<int>& idx) {
        std::uint64_t m = 0;
        for (int i : idx) m |= std::uint64_t{1} << i;
        visit(m);
      });
      return;
    }
    case ModeKind::factored: {
      for_each_combination(g.N, mode.k_r, [&](const std::vector<int>& rows) {
        for_each_combination(g.M, mode.k_t, [&](const std::vector<int>& cols) {
          std::uint64_t m = 0;
          for (int rx : rows)
            for (int tx : cols) m |= std::uint64_t{1} << g.flat(rx, tx);
          visit(m);
        });
      });
      return;
    }
    case ModeKind::mfc:
    case ModeKind::hybrid: {
      const auto subsets = subset_masks(g.M, mode.k_m);
      const int kr = mode.k_r;
      const bool hybrid = mode.kind == ModeKind::hybrid;
      std::vector<std::size_t> choice(kr);
      for_each_combination(g.N, kr, [&](const std::vector<int>& rows) {
        std::vector<std::vector<std::uint64_t>> per_row(kr);
        for (int r = 0; r < kr; ++r)
          for (std::uint64_t s : subsets) per_row[r].push_back(row_mask(s, rows[r], g));
        std::fill(choice.begin(), choice.end(), 0);
        while (true) {
          std::uint64_t m = 0, used = 0;
          for (int r = 0; r < kr; ++r) {
            m |= per_row[r][choice[r]];
            used |= subsets[choice[r]];
          }
          if (!hybrid || std::popcount(used) <= mode.k_t) visit(m);
          int r = kr - 1;
          while (r >= 0 && ++choice[r] == subsets.size()) choice[r--] = 0;
          if (r < 0) break;
        }
      });
      return;
    }
  }
}

OracleResult exhaustive_optimum(const CovarianceModel& model, const SelectionMode& mode,
                                const OracleConfig& config) {
  const ArrayGeometry& g = model.geometry();
  mode.validate(g);
  check_mask_geometry(g);
  check_oracle_budget(mode, g, config.budget);
  if (mode.kind == ModeKind::joint) return joint_optimum(model, mode.k, config);

  std::vector<std::uint64_t> masks;
  enumerate_feasible(mode, g, [&](std::uint64_t m) { masks.push_back(m); }, config.budget);

  const CMatrix R = covariance_full(model);
  const CVector a = model.a_s();
  const int threads = std::max(1, config.threads);
  constexpr int kChunk = 4096;
  const int chunks = static_cast<int>((masks.size() + kChunk - 1) / kChunk);
  std::vector<Best> best(threads);
  parallel_for(chunks, threads, [&](int t, int chunk) {
    CMatrix Rs;
    CVector as;
    const std::size_t lo = static_cast<std::size_t>(chunk) * kChunk;
    const std::size_t hi = std::min(masks.size(), lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) best[t].offer(quadratic_gain(R, a, masks[i], Rs, as), masks[i]);
  });
  Best total;
  for (const auto& b : best) total.merge(b);

  OracleResult out;
  out.best = SelectionVector::from_mask(total.mask, g.M, g.N);
  out.sinr_db = linear_to_db(model.sigma_s2() * total.value);
  out.candidates_evaluated = masks.size();
  return out;
}

}  // namespace mimosel
