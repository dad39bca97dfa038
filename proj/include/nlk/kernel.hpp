#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nlk/grid.hpp"

namespace nlk {

enum class KernelVariant { Singular, Truncated };

std::string to_string(KernelVariant v);

struct KernelSpec {
  KernelVariant variant = KernelVariant::Singular;
  double epsilon = 0.0;

  static KernelSpec singular() { return {KernelVariant::Singular, 0.0}; }
  static KernelSpec truncated(double eps) { return {KernelVariant::Truncated, eps}; }
};

/// |x-y|^-(d+2s). Throws SingularityError for r <= 0.
double psi(double r, int d, double s);

/// (|x-y| + eps)^-(d+2s); finite at r = 0.
double psi_eps(double r, int d, double s, double eps);

/// Dense symmetric matrix, row-major. Only the storage; no algebra.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n);
  SymmetricMatrix(std::size_t n, std::vector<double> row_major);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  /// Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Raw pairwise kernel values k(x_i, x_j) with a zero diagonal.
SymmetricMatrix pairwise_kernel(const Grid& grid, KernelSpec spec, double s);

/// W_ij = k(x_i, x_j) * w for i != j, W_ii = 0. The single factor w is the
/// dy quadrature weight; row sums are cached.
class KernelMatrix {
 public:
  KernelMatrix(KernelSpec spec, double s, int dimension, int nodes_per_axis,
               double cell_volume, std::uint64_t grid_fingerprint, SymmetricMatrix weights);

  KernelVariant variant() const { return spec_.variant; }
  const KernelSpec& spec() const { return spec_; }
  double s() const { return s_; }
  double epsilon() const { return spec_.epsilon; }
  int dimension() const { return dimension_; }
  int nodes_per_axis() const { return nodes_per_axis_; }
  double cell_volume() const { return cell_volume_; }
  std::uint64_t grid_fingerprint() const { return grid_fingerprint_; }

  std::size_t size() const { return weights_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return weights_(i, j); }
  std::span<const double> row(std::size_t i) const { return weights_.row(i); }
  const SymmetricMatrix& weights() const { return weights_; }

  double row_sum(std::size_t i) const { return row_sums_[i]; }
  std::span<const double> row_sums() const { return row_sums_; }
  double max_row_sum() const { return max_row_sum_; }

 private:
  KernelSpec spec_;
  double s_;
  int dimension_;
  int nodes_per_axis_;
  double cell_volume_;
  std::uint64_t grid_fingerprint_;
  SymmetricMatrix weights_;
  std::vector<double> row_sums_;
  double max_row_sum_ = 0.0;
};

/// Validates s in (0,1) and eps > 0 for the truncated variant. Allocation
/// failure is reported as ResourceError.
KernelMatrix assemble_kernel_matrix(const Grid& grid, KernelSpec spec, double s);

struct LipschitzBounds {
  double k_eps = 0.0;       ///< max_i sum_j psi_eps(x_i,x_j)^2 w
  double k_eps_star = 0.0;  ///< max_i sum_j psi_eps(x_i,x_j) w
  double l_eps = 0.0;       ///< (C(Omega) (k_eps + k_eps_star^2))^(1/2), L2 Lipschitz constant
  double l_inf = 0.0;       ///< 2 k_eps_star, Linf Lipschitz constant
};

/// C(Omega) = 2 max{|Omega|, 1}.
double lipschitz_domain_constant(const Grid& grid);

/// Discrete sums include the j = i term (psi_eps is finite there).
LipschitzBounds lipschitz_bounds(const Grid& grid, double s, double eps);

// Binary cache: header of five float64 {d, n, s, variant, eps} followed by the
// N*N row-major float64 weights. Native byte order.

std::string kernel_cache_key(const Grid& grid, KernelSpec spec, double s);
void write_kernel_cache(const std::filesystem::path& path, const KernelMatrix& matrix);
/// Throws IoError on unreadable file or a header that does not match `grid`.
KernelMatrix read_kernel_cache(const std::filesystem::path& path, const Grid& grid);
/// Reads `<dir>/<key>.bin` if present, otherwise assembles and writes it.
KernelMatrix load_or_assemble(const Grid& grid, KernelSpec spec, double s,
                              const std::filesystem::path& cache_dir);

}  // namespace nlk
