#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimosel/array_model.hpp"
#include "mimosel/types.hpp"

namespace mimosel {

/// Binary selection over the M*N virtual array. Bit i follows the flat index
/// convention of ArrayGeometry (receiver i % N, transmitter i / N).
class SelectionVector {
 public:
  SelectionVector() = default;
  SelectionVector(int M, int N);

  static SelectionVector ones(int M, int N);
  /// Bit i of mask -> element i. Requires M*N <= 64.
  static SelectionVector from_mask(std::uint64_t mask, int M, int N);
  /// Character 0 of the string is element 0.
  static SelectionVector from_bitstring(std::string_view bits, int M, int N);
  /// Entries >= 0.5 become 1.
  static SelectionVector from_real(const RVector& c, int M, int N);

  int M() const noexcept { return M_; }
  int N() const noexcept { return N_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
  bool at(int rx, int tx) const noexcept { return bits_[index(rx, tx)] != 0; }
  void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
  void set(int rx, int tx, bool value) { set(index(rx, tx), value); }

  std::size_t count() const noexcept;
  int column_count(int tx) const noexcept;
  int row_count(int rx) const noexcept;
  /// Indices of selected elements, ascending.
  std::vector<std::size_t> selected() const;

  std::uint64_t to_mask() const;
  std::string to_bitstring() const;
  RVector to_real() const;

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool operator==(const SelectionVector&) const = default;
  /// Lexicographic order on the bit string ('0' < '1').
  bool operator<(const SelectionVector& other) const noexcept {
    return bits_ < other.bits_;
  }

 private:
  std::size_t index(int rx, int tx) const noexcept {
    return static_cast<std::size_t>(tx) * static_cast<std::size_t>(N_) +
           static_cast<std::size_t>(rx);
  }

  int M_ = 0;
  int N_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class ModeKind { joint, factored, mfc, hybrid };

const char* to_string(ModeKind kind);
ModeKind parse_mode_kind(std::string_view name);

/// Which selection strategy is applied and its counts. Unused counts are 0.
struct SelectionMode {
  ModeKind kind = ModeKind::joint;
  int k = 0;    // joint
  int k_t = 0;  // factored, hybrid (allowed transmitters)
  int k_r = 0;  // factored, mfc, hybrid
  int k_m = 0;  // mfc, hybrid (matched filters per receiver)

  static SelectionMode joint(int k);
  static SelectionMode factored(int k_t, int k_r);
  static SelectionMode mfc(int k_m, int k_r);
  static SelectionMode hybrid(int k_t, int k_m, int k_r);

  /// Number of selected virtual elements.
  int total() const noexcept;
  /// Number of transmitters that may be active (M for joint and MFC).
  int active_transmitters(int M) const noexcept;
  /// Throws InvalidArgument if the counts are inconsistent with the geometry.
  void validate(const ArrayGeometry& geom) const;
  /// e.g. "joint:12", "factored:3:4", "mfc:3:4", "hybrid:4:3:4".
  std::string label() const;

  bool operator==(const SelectionMode&) const = default;
};

/// Index sets of the transmitter columns v_t,i and receiver rows v_r,i of the
/// selection matrix.
class MembershipSets {
 public:
  MembershipSets(int M, int N);

  int M() const noexcept { return M_; }
  int N() const noexcept { return N_; }
  std::span<const std::size_t> column(int tx) const { return columns_.at(tx); }
  std::span<const std::size_t> row(int rx) const { return rows_.at(rx); }

 private:
  int M_;
  int N_;
  std::vector<std::vector<std::size_t>> columns_;
  std::vector<std::vector<std::size_t>> rows_;
};

enum class FormKind {
  norm,    // c'c
  q,       // c'Qc, Q = PP', P = [v_t,1..v_t,M, v_r,1..v_r,N]
  q_r,     // c'Q_r c, sum of squared row sums
  q_t,     // c'Q_t c, sum of squared column sums
  column,  // c'P_t,i c
  row,     // c'P_r,i c
};

/// A PSD quadratic form c'Wc over the selection vector. W is never stored;
/// value, gradient and Hessian are computed from the row/column structure.
struct QuadraticForm {
  FormKind kind = FormKind::norm;
  int index = 0;  // column or row index for FormKind::column / FormKind::row
  int M = 1;
  int N = 1;

  double value(const RVector& c) const;
  /// 2 W c.
  RVector gradient(const RVector& c) const;
  /// H += scale * 2W, on the leading M*N block of H.
  void add_hessian(RMatrix& H, double scale) const;
  std::string name() const;
};

enum class Sense { le, eq, ge };

struct QuadraticConstraint {
  QuadraticForm form;
  Sense sense = Sense::le;
  double bound = 0.0;

  /// False only for lower bounds on a PSD form (the set {c'Wc >= b} is not
  /// convex).
  bool convex() const noexcept { return sense != Sense::ge; }
  double violation(const RVector& c) const;
};

struct QuadraticFormValues {
  double norm = 0.0;
  double q = 0.0;
  double q_r = 0.0;
  double q_t = 0.0;
  RVector column_forms;  // c'P_t,i c
  RVector row_forms;     // c'P_r,i c
  RVector column_sums;   // 1'(c restricted to column i)
  RVector row_sums;
};

QuadraticFormValues eval_quadratic_forms(const RVector& c, const MembershipSets& sets);

/// The structured quadratic constraint set of a mode (without the binary
/// constraint).
std::vector<QuadraticConstraint> constraints_for(const SelectionMode& mode,
                                                 const ArrayGeometry& geom);

/// Structural feasibility of a binary selection for a mode.
bool is_feasible(const SelectionVector& c, const SelectionMode& mode);

/// Membership of a binary c in the four quadratic sets whose intersection
/// characterizes factored selections:
///   s1: c'Qc = k_r k_t (k_r + k_t)   s2: column forms <= k_r
///   s3: row forms <= k_t             s4: c'c = k_t k_r
struct FactoredMembership {
  bool s1 = false;
  bool s2 = false;
  bool s3 = false;
  bool s4 = false;
  bool all() const noexcept { return s1 && s2 && s3 && s4; }
};

FactoredMembership factored_quadratic_membership(const SelectionVector& c, int k_t,
                                                 int k_r);

/// Mode-aware rounding of a fractional vector to a feasible binary selection.
/// Ties are broken towards the lowest index.
SelectionVector structured_round(const RVector& z, const SelectionMode& mode,
                                 const ArrayGeometry& geom);

}  // namespace mimosel
