#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bilap/errors.hpp"
#include "bilap/geometry.hpp"

namespace bilap {

/// Node classes partition the lattice points of the closed upper half ball.
///  Interior: y > 0, |z| < 1 - h        (free unknown)
///  Outer:    y > 0, |z| >= 1 - h       (Dirichlet data)
///  Thin:     y = 0, |x| < 1 - h        (free unknown, carries the thin nonlinearity)
///  Corner:   y = 0, |x| >= 1 - h       (Dirichlet data)
enum class NodeClass : std::uint8_t { Interior, Outer, Thin, Corner };

inline const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Interior: return "interior";
    case NodeClass::Outer: return "outer";
    case NodeClass::Thin: return "thin";
    case NodeClass::Corner: return "corner";
  }
  return "?";
}

/// Integer lattice coordinates (i, j, k) of z = h (i, j, k); j = 0 when n = 1.
/// k may be negative: such an index names the even reflection of (i, j, -k).
struct LatticeIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  friend bool operator==(const LatticeIndex&, const LatticeIndex&) = default;
};

inline LatticeIndex reflect(LatticeIndex idx) noexcept { return {idx.i, idx.j, -idx.k}; }

/// Uniform Cartesian discretization of B_1^+ u B_1'. Immutable after construction.
class HalfBallGrid {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  HalfBallGrid(int n, double h) : n_(n) {
    if (n != 1 && n != 2) throw ConfigError("grid: thin dimension n must be 1 or 2, got " + std::to_string(n));
    if (!(h > 0.0)) throw ConfigError("grid: spacing h must be positive");
    const double inv = 1.0 / h;
    const long m = std::lround(inv);
    if (m < 1 || std::abs(inv - static_cast<double>(m)) > 1e-9 * inv) {
      throw ConfigError("grid: spacing h must divide 1 (1/h integer), got h = " + std::to_string(h));
    }
    m_ = static_cast<int>(m);
    h_ = 1.0 / m_;
    width_ = 2 * m_ + 1;
    depth_ = n_ == 2 ? width_ : 1;
    lookup_.assign(static_cast<std::size_t>(width_) * depth_ * (m_ + 1), npos);

    const long r2 = static_cast<long>(m_) * m_;
    const long inner2 = static_cast<long>(m_ - 1) * (m_ - 1);
    const int jmax = n_ == 2 ? m_ : 0;
    for (int k = 0; k <= m_; ++k) {
      for (int j = -jmax; j <= jmax; ++j) {
        for (int i = -m_; i <= m_; ++i) {
          const long s = static_cast<long>(i) * i + static_cast<long>(j) * j + static_cast<long>(k) * k;
          if (s > r2) continue;
          NodeClass c;
          if (k == 0) {
            c = s >= inner2 ? NodeClass::Corner : NodeClass::Thin;
          } else {
            c = s >= inner2 ? NodeClass::Outer : NodeClass::Interior;
          }
          const std::size_t id = lattice_.size();
          lattice_.push_back({i, j, k});
          class_.push_back(c);
          lookup_[slot(i, j, k)] = id;
          if (c == NodeClass::Thin) thin_.push_back(id);
          if (c == NodeClass::Thin || c == NodeClass::Interior) {
            free_.push_back(id);
          } else {
            dirichlet_.push_back(id);
          }
        }
      }
    }
    free_index_.assign(lattice_.size(), npos);
    for (std::size_t f = 0; f < free_.size(); ++f) free_index_[free_[f]] = f;
  }

  int dim() const noexcept { return n_; }
  int ambient_dim() const noexcept { return n_ + 1; }
  double spacing() const noexcept { return h_; }
  int cells_per_unit() const noexcept { return m_; }
  std::size_t size() const noexcept { return lattice_.size(); }

  LatticeIndex lattice(std::size_t id) const { return lattice_[id]; }
  NodeClass node_class(std::size_t id) const { return class_[id]; }
  bool is_free(std::size_t id) const {
    return class_[id] == NodeClass::Interior || class_[id] == NodeClass::Thin;
  }

  Point position(std::size_t id) const {
    const auto& l = lattice_[id];
    return {h_ * l.i, h_ * l.j, h_ * l.k};
  }

  /// Node id of a lattice index, applying the even reflection for k < 0; npos if absent.
  std::size_t find(LatticeIndex idx) const {
    if (idx.k < 0) idx = reflect(idx);
    if (std::abs(idx.i) > m_ || std::abs(idx.j) > (n_ == 2 ? m_ : 0) || idx.k > m_) return npos;
    return lookup_[slot(idx.i, idx.j, idx.k)];
  }

  /// Neighbor along ambient axis a (0..n, n is y) in direction dir = +-1, with reflection at y = 0.
  std::size_t neighbor(std::size_t id, int a, int dir) const {
    LatticeIndex l = lattice_[id];
    if (a == n_) {
      l.k += dir;
    } else if (a == 0) {
      l.i += dir;
    } else {
      l.j += dir;
    }
    return find(l);
  }

  const std::vector<std::size_t>& free_nodes() const noexcept { return free_; }
  const std::vector<std::size_t>& dirichlet_nodes() const noexcept { return dirichlet_; }
  const std::vector<std::size_t>& thin_nodes() const noexcept { return thin_; }
  /// Position of a node inside free_nodes(), npos for Dirichlet nodes.
  std::size_t free_index(std::size_t id) const { return free_index_[id]; }

  /// Control volume of a free node: h^{n+1}, halved on the thin space.
  double cell_volume(std::size_t id) const {
    const double v = std::pow(h_, n_ + 1);
    return class_[id] == NodeClass::Thin ? 0.5 * v : v;
  }

  /// Thin-space measure carried by a thin node, h^n.
  double thin_weight() const noexcept { return std::pow(h_, n_); }

 private:
  std::size_t slot(int i, int j, int k) const {
    const int jj = n_ == 2 ? j + m_ : 0;
    return (static_cast<std::size_t>(k) * depth_ + jj) * width_ + (i + m_);
  }

  int n_;
  int m_ = 0;
  double h_ = 0.0;
  int width_ = 0;
  int depth_ = 0;
  std::vector<LatticeIndex> lattice_;
  std::vector<NodeClass> class_;
  std::vector<std::size_t> lookup_;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> dirichlet_;
  std::vector<std::size_t> thin_;
  std::vector<std::size_t> free_index_;
};

using GridPtr = std::shared_ptr<const HalfBallGrid>;

inline GridPtr build_grid(int n, double h) { return std::make_shared<const HalfBallGrid>(n, h); }

}  // namespace bilap
