#include "mimosel/selection.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mimosel/errors.hpp"

namespace mimosel {

SelectionVector::SelectionVector(int M, int N) : M_(M), N_(N) {
  if (M < 1 || N < 1) throw InvalidArgument("selection vector needs M, N >= 1");
  bits_.assign(static_cast<std::size_t>(M) * static_cast<std::size_t>(N), 0);
}

SelectionVector SelectionVector::ones(int M, int N) {
  SelectionVector s(M, N);
  std::fill(s.bits_.begin(), s.bits_.end(), std::uint8_t{1});
  return s;
}

SelectionVector SelectionVector::from_mask(std::uint64_t mask, int M, int N) {
  SelectionVector s(M, N);
  if (s.size() > 64) throw InvalidArgument("mask form needs M*N <= 64");
  for (std::size_t i = 0; i < s.size(); ++i) s.bits_[i] = (mask >> i) & 1u;
  return s;
}

SelectionVector SelectionVector::from_bitstring(std::string_view bits, int M, int N) {
  SelectionVector s(M, N);
  if (bits.size() != s.size()) {
    throw InvalidArgument("bit string length " + std::to_string(bits.size()) +
                          " does not match M*N = " + std::to_string(s.size()));
  }
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw InvalidArgument("bit string must contain only 0/1");
    s.bits_[i] = bits[i] == '1';
  }
  return s;
}

SelectionVector SelectionVector::from_real(const RVector& c, int M, int N) {
  SelectionVector s(M, N);
  if (static_cast<std::size_t>(c.size()) != s.size()) throw InvalidArgument("length mismatch");
  for (std::size_t i = 0; i < s.size(); ++i) s.bits_[i] = c[static_cast<Eigen::Index>(i)] >= 0.5;
  return s;
}

std::size_t SelectionVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

int SelectionVector::column_count(int tx) const noexcept {
  int s = 0;
  for (int n = 0; n < N_; ++n) s += bits_[index(n, tx)];
  return s;
}

int SelectionVector::row_count(int rx) const noexcept {
  int s = 0;
  for (int m = 0; m < M_; ++m) s += bits_[index(rx, m)];
  return s;
}

std::vector<std::size_t> SelectionVector::selected() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

std::uint64_t SelectionVector::to_mask() const {
  if (bits_.size() > 64) throw InvalidArgument("mask form needs M*N <= 64");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) mask |= std::uint64_t{1} << i;
  return mask;
}

std::string SelectionVector::to_bitstring() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

RVector SelectionVector::to_real() const {
  RVector c(static_cast<Eigen::Index>(bits_.size()));
  for (std::size_t i = 0; i < bits_.size(); ++i) c[static_cast<Eigen::Index>(i)] = bits_[i];
  return c;
}

// ---------------------------------------------------------------------------

const char* to_string(ModeKind kind) {
  switch (kind) {
    case ModeKind::joint: return "joint";
    case ModeKind::factored: return "factored";
    case ModeKind::mfc: return "mfc";
    case ModeKind::hybrid: return "hybrid";
  }
  return "unknown";
}

ModeKind parse_mode_kind(std::string_view name) {
  if (name == "joint") return ModeKind::joint;
  if (name == "factored") return ModeKind::factored;
  if (name == "mfc") return ModeKind::mfc;
  if (name == "hybrid") return ModeKind::hybrid;
  throw InvalidArgument("unknown selection mode '" + std::string(name) + "'");
}

SelectionMode SelectionMode::joint(int k) { return {ModeKind::joint, k, 0, 0, 0}; }
SelectionMode SelectionMode::factored(int k_t, int k_r) {
  return {ModeKind::factored, 0, k_t, k_r, 0};
}
SelectionMode SelectionMode::mfc(int k_m, int k_r) { return {ModeKind::mfc, 0, 0, k_r, k_m}; }
SelectionMode SelectionMode::hybrid(int k_t, int k_m, int k_r) {
  return {ModeKind::hybrid, 0, k_t, k_r, k_m};
}

int SelectionMode::total() const noexcept {
  switch (kind) {
    case ModeKind::joint: return k;
    case ModeKind::factored: return k_t * k_r;
    case ModeKind::mfc:
    case ModeKind::hybrid: return k_m * k_r;
  }
  return 0;
}

int SelectionMode::active_transmitters(int M) const noexcept {
  return (kind == ModeKind::factored || kind == ModeKind::hybrid) ? k_t : M;
}

void SelectionMode::validate(const ArrayGeometry& geom) const {
  auto fail = [&](const std::string& why) {
    throw InvalidArgument("invalid " + std::string(to_string(kind)) + " counts: " + why);
  };
  const int MN = geom.M * geom.N;
  switch (kind) {
    case ModeKind::joint:
      if (k < 1 || k > MN) fail("need 1 <= k <= M*N");
      break;
    case ModeKind::factored:
      if (k_t < 1 || k_t > geom.M) fail("need 1 <= k_t <= M");
      if (k_r < 1 || k_r > geom.N) fail("need 1 <= k_r <= N");
      break;
    case ModeKind::mfc:
      if (k_m < 1 || k_m > geom.M) fail("need 1 <= k_m <= M");
      if (k_r < 1 || k_r > geom.N) fail("need 1 <= k_r <= N");
      break;
    case ModeKind::hybrid:
      if (k_m < 1 || k_m > k_t || k_t > geom.M) fail("need 1 <= k_m <= k_t <= M");
      if (k_r < 1 || k_r > geom.N) fail("need 1 <= k_r <= N");
      break;
  }
}

std::string SelectionMode::label() const {
  const std::string name = to_string(kind);
  switch (kind) {
    case ModeKind::joint: return name + ":" + std::to_string(k);
    case ModeKind::factored:
      return name + ":" + std::to_string(k_t) + ":" + std::to_string(k_r);
    case ModeKind::mfc: return name + ":" + std::to_string(k_m) + ":" + std::to_string(k_r);
    case ModeKind::hybrid:
      return name + ":" + std::to_string(k_t) + ":" + std::to_string(k_m) + ":" +
             std::to_string(k_r);
  }
  return name;
}

// ---------------------------------------------------------------------------

MembershipSets::MembershipSets(int M, int N) : M_(M), N_(N), columns_(M), rows_(N) {
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const std::size_t i = static_cast<std::size_t>(m) * N + n;
      columns_[m].push_back(i);
      rows_[n].push_back(i);
    }
  }
}

namespace {

// Plain sums over the columns / rows of the N x M view of c.
void line_sums(const RVector& c, int M, int N, RVector& col, RVector& row) {
  col = RVector::Zero(M);
  row = RVector::Zero(N);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const double v = c[m * N + n];
      col[m] += v;
      row[n] += v;
    }
  }
}

void check_length(const RVector& c, int M, int N) {
  if (c.size() != static_cast<Eigen::Index>(M) * N) {
    throw InvalidArgument("vector length " + std::to_string(c.size()) + " does not match M*N = " +
                          std::to_string(M * N));
  }
}

}  // namespace

double QuadraticForm::value(const RVector& c) const {
  check_length(c, M, N);
  switch (kind) {
    case FormKind::norm: return c.squaredNorm();
    case FormKind::column: return c.segment(static_cast<Eigen::Index>(index) * N, N).squaredNorm();
    case FormKind::row: {
      double s = 0.0;
      for (int m = 0; m < M; ++m) s += c[m * N + index] * c[m * N + index];
      return s;
    }
    default: break;
  }
  RVector col, row;
  line_sums(c, M, N, col, row);
  switch (kind) {
    case FormKind::q: return col.squaredNorm() + row.squaredNorm();
    case FormKind::q_r: return row.squaredNorm();
    case FormKind::q_t: return col.squaredNorm();
    default: return 0.0;
  }
}

RVector QuadraticForm::gradient(const RVector& c) const {
  check_length(c, M, N);
  RVector g = RVector::Zero(c.size());
  switch (kind) {
    case FormKind::norm: return 2.0 * c;
    case FormKind::column:
      g.segment(static_cast<Eigen::Index>(index) * N, N) =
          2.0 * c.segment(static_cast<Eigen::Index>(index) * N, N);
      return g;
    case FormKind::row:
      for (int m = 0; m < M; ++m) g[m * N + index] = 2.0 * c[m * N + index];
      return g;
    default: break;
  }
  RVector col, row;
  line_sums(c, M, N, col, row);
  const bool use_col = kind == FormKind::q || kind == FormKind::q_t;
  const bool use_row = kind == FormKind::q || kind == FormKind::q_r;
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      g[m * N + n] = 2.0 * ((use_col ? col[m] : 0.0) + (use_row ? row[n] : 0.0));
    }
  }
  return g;
}

void QuadraticForm::add_hessian(RMatrix& H, double scale) const {
  const double s2 = 2.0 * scale;
  switch (kind) {
    case FormKind::norm:
      for (int i = 0; i < M * N; ++i) H(i, i) += s2;
      return;
    case FormKind::column:
      for (int n = 0; n < N; ++n) H(index * N + n, index * N + n) += s2;
      return;
    case FormKind::row:
      for (int m = 0; m < M; ++m) H(m * N + index, m * N + index) += s2;
      return;
    default: break;
  }
  const bool use_col = kind == FormKind::q || kind == FormKind::q_t;
  const bool use_row = kind == FormKind::q || kind == FormKind::q_r;
  if (use_col) {
    // Same transmitter column: dense N x N block of ones.
    for (int m = 0; m < M; ++m)
      H.block(m * N, m * N, N, N).array() += s2;
  }
  if (use_row) {
    for (int n = 0; n < N; ++n)
      for (int m1 = 0; m1 < M; ++m1)
        for (int m2 = 0; m2 < M; ++m2) H(m1 * N + n, m2 * N + n) += s2;
  }
}

std::string QuadraticForm::name() const {
  switch (kind) {
    case FormKind::norm: return "c'c";
    case FormKind::q: return "c'Qc";
    case FormKind::q_r: return "c'Q_r c";
    case FormKind::q_t: return "c'Q_t c";
    case FormKind::column: return "col[" + std::to_string(index) + "]";
    case FormKind::row: return "row[" + std::to_string(index) + "]";
  }
  return "?";
}

double QuadraticConstraint::violation(const RVector& c) const {
  const double v = form.value(c);
  switch (sense) {
    case Sense::le: return std::max(0.0, v - bound);
    case Sense::ge: return std::max(0.0, bound - v);
    case Sense::eq: return std::abs(v - bound);
  }
  return 0.0;
}

QuadraticFormValues eval_quadratic_forms(const RVector& c, const MembershipSets& sets) {
  const int M = sets.M();
  const int N = sets.N();
  check_length(c, M, N);
  QuadraticFormValues out;
  line_sums(c, M, N, out.column_sums, out.row_sums);
  out.column_forms = RVector::Zero(M);
  out.row_forms = RVector::Zero(N);
  for (int m = 0; m < M; ++m)
    for (std::size_t i : sets.column(m)) out.column_forms[m] += c[static_cast<Eigen::Index>(i)] * c[static_cast<Eigen::Index>(i)];
  for (int n = 0; n < N; ++n)
    for (std::size_t i : sets.row(n)) out.row_forms[n] += c[static_cast<Eigen::Index>(i)] * c[static_cast<Eigen::Index>(i)];
  out.norm = c.squaredNorm();
  out.q_t = out.column_sums.squaredNorm();
  out.q_r = out.row_sums.squaredNorm();
  out.q = out.q_t + out.q_r;
  return out;
}

std::vector<QuadraticConstraint> constraints_for(const SelectionMode& mode,
                                                 const ArrayGeometry& geom) {
  mode.validate(geom);
  const int M = geom.M;
  const int N = geom.N;
  auto form = [&](FormKind kind, int index = 0) { return QuadraticForm{kind, index, M, N}; };
  std::vector<QuadraticConstraint> out;
  auto lines = [&](double col_bound, double row_bound) {
    for (int m = 0; m < M; ++m) out.push_back({form(FormKind::column, m), Sense::le, col_bound});
    for (int n = 0; n < N; ++n) out.push_back({form(FormKind::row, n), Sense::le, row_bound});
  };
  const double kt = mode.k_t, kr = mode.k_r, km = mode.k_m;
  switch (mode.kind) {
    case ModeKind::joint:
      out.push_back({form(FormKind::norm), Sense::eq, static_cast<double>(mode.k)});
      break;
    case ModeKind::factored:
      out.push_back({form(FormKind::norm), Sense::eq, kt * kr});
      out.push_back({form(FormKind::q), Sense::eq, kr * kt * (kr + kt)});
      lines(kr, kt);
      break;
    case ModeKind::mfc:
      out.push_back({form(FormKind::norm), Sense::eq, km * kr});
      out.push_back({form(FormKind::q_r), Sense::eq, km * km * kr});
      lines(kr, km);
      break;
    case ModeKind::hybrid:
      out.push_back({form(FormKind::norm), Sense::eq, km * kr});
      out.push_back({form(FormKind::q_r), Sense::eq, km * km * kr});
      out.push_back({form(FormKind::q_t), Sense::ge, (kr * km) * (kr * km) / kt});
      out.push_back({form(FormKind::q_t), Sense::le, kr * kr * km});
      lines(kr, km);
      break;
  }
  return out;
}

namespace {

bool mfc_pattern(const SelectionVector& c, int k_m, int k_r) {
  int rows = 0;
  for (int n = 0; n < c.N(); ++n) {
    const int r = c.row_count(n);
    if (r == 0) continue;
    if (r != k_m) return false;
    ++rows;
  }
  return rows == k_r;
}

}  // namespace

bool is_feasible(const SelectionVector& c, const SelectionMode& mode) {
  const int M = c.M();
  const int N = c.N();
  switch (mode.kind) {
    case ModeKind::joint: return static_cast<int>(c.count()) == mode.k;
    case ModeKind::factored: {
      std::vector<int> rows, cols;
      for (int n = 0; n < N; ++n)
        if (c.row_count(n) > 0) rows.push_back(n);
      for (int m = 0; m < M; ++m)
        if (c.column_count(m) > 0) cols.push_back(m);
      if (static_cast<int>(rows.size()) != mode.k_r || static_cast<int>(cols.size()) != mode.k_t)
        return false;
      for (int n : rows)
        for (int m : cols)
          if (!c.at(n, m)) return false;
      return true;
    }
    case ModeKind::mfc: return mfc_pattern(c, mode.k_m, mode.k_r);
    case ModeKind::hybrid: {
      if (!mfc_pattern(c, mode.k_m, mode.k_r)) return false;
      int used = 0;
      for (int m = 0; m < M; ++m) used += c.column_count(m) > 0;
      return used <= mode.k_t;
    }
  }
  return false;
}

FactoredMembership factored_quadratic_membership(const SelectionVector& c, int k_t, int k_r) {
  // Integer arithmetic: for binary c every form is an exact count.
  long long q = 0;
  FactoredMembership out;
  out.s2 = true;
  out.s3 = true;
  for (int m = 0; m < c.M(); ++m) {
    const long long s = c.column_count(m);
    q += s * s;
    if (s > k_r) out.s2 = false;
  }
  for (int n = 0; n < c.N(); ++n) {
    const long long s = c.row_count(n);
    q += s * s;
    if (s > k_t) out.s3 = false;
  }
  out.s1 = q == static_cast<long long>(k_r) * k_t * (k_r + k_t);
  out.s4 = static_cast<long long>(c.count()) == static_cast<long long>(k_t) * k_r;
  return out;
}

namespace {

/// Indices of the `count` largest values, ties to the lowest index; returned
/// in descending-value order.
std::vector<int> top_indices(const std::vector<double>& values, int count) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  idx.resize(static_cast<std::size_t>(std::min<int>(count, static_cast<int>(idx.size()))));
  return idx;
}

}  // namespace

SelectionVector structured_round(const RVector& z, const SelectionMode& mode,
                                 const ArrayGeometry& geom) {
  mode.validate(geom);
  const int M = geom.M;
  const int N = geom.N;
  check_length(z, M, N);
  SelectionVector out(M, N);
  auto at = [&](int n, int m) { return z[m * N + n]; };

  std::vector<double> col(M, 0.0), row(N, 0.0);
  for (int m = 0; m < M; ++m)
    for (int n = 0; n < N; ++n) {
      col[m] += at(n, m);
      row[n] += at(n, m);
    }

  switch (mode.kind) {
    case ModeKind::joint: {
      std::vector<double> v(z.data(), z.data() + z.size());
      for (int i : top_indices(v, mode.k)) out.set(static_cast<std::size_t>(i), true);
      break;
    }
    case ModeKind::factored: {
      const auto rows = top_indices(row, mode.k_r);
      const auto cols = top_indices(col, mode.k_t);
      for (int n : rows)
        for (int m : cols) out.set(n, m, true);
      break;
    }
    case ModeKind::mfc: {
      for (int n : top_indices(row, mode.k_r)) {
        std::vector<double> entries(M);
        for (int m = 0; m < M; ++m) entries[m] = at(n, m);
        for (int m : top_indices(entries, mode.k_m)) out.set(n, m, true);
      }
      break;
    }
    case ModeKind::hybrid: {
      auto cols = top_indices(col, mode.k_t);
      std::sort(cols.begin(), cols.end());
      std::vector<double> kept_row(N, 0.0);
      for (int n = 0; n < N; ++n)
        for (int m : cols) kept_row[n] += at(n, m);
      for (int n : top_indices(kept_row, mode.k_r)) {
        std::vector<double> entries;
        for (int m : cols) entries.push_back(at(n, m));
        for (int j : top_indices(entries, mode.k_m)) out.set(n, cols[j], true);
      }
      break;
    }
  }
  return out;
}

}  // namespace mimosel
