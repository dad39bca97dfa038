#include "nlk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <new>
#include <sstream>

#include "nlk/errors.hpp"

namespace nlk {

namespace {

void check_s(double s, const char* who) {
  if (!(s > 0.0 && s < 1.0)) {
    throw ParameterError(std::string(who) + ": s must lie in (0,1)");
  }
}

void check_spec(const KernelSpec& spec, const char* who) {
  if (spec.variant == KernelVariant::Truncated && !(spec.epsilon > 0.0)) {
    throw ParameterError(std::string(who) + ": truncated kernel needs epsilon > 0");
  }
}

double exponent(int d, double s) { return d + 2.0 * s; }

}  // namespace

std::string to_string(KernelVariant v) {
  return v == KernelVariant::Singular ? "singular" : "truncated";
}

double psi(double r, int d, double s) {
  check_s(s, "psi");
  if (!(r > 0.0)) throw SingularityError("psi: distance must be positive (exclude the diagonal)");
  return std::pow(r, -exponent(d, s));
}

double psi_eps(double r, int d, double s, double eps) {
  check_s(s, "psi_eps");
  if (!(eps > 0.0)) throw ParameterError("psi_eps: epsilon must be positive");
  if (r < 0.0) throw ParameterError("psi_eps: distance must be nonnegative");
  return std::pow(r + eps, -exponent(d, s));
}

SymmetricMatrix::SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

SymmetricMatrix::SymmetricMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), data_(std::move(row_major)) {
  if (data_.size() != n * n) throw ContractError("SymmetricMatrix: storage size is not n*n");
}

SymmetricMatrix pairwise_kernel(const Grid& grid, KernelSpec spec, double s) {
  check_s(s, "pairwise_kernel");
  check_spec(spec, "pairwise_kernel");
  const std::size_t n = grid.size();
  SymmetricMatrix m;
  try {
    m = SymmetricMatrix(n);
  } catch (const std::bad_alloc&) {
    std::ostringstream msg;
    msg << "kernel assembly: cannot allocate a dense " << n << "x" << n
        << " matrix (" << (static_cast<double>(n) * n * 8.0 / (1 << 20))
        << " MiB); reduce grid.nodes";
    throw ResourceError(msg.str());
  }
  const double k = exponent(grid.dimension(), s);
  const double eps = spec.variant == KernelVariant::Truncated ? spec.epsilon : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      m.set(i, j, std::pow(grid.distance(i, j) + eps, -k));
    }
  }
  return m;
}

KernelMatrix::KernelMatrix(KernelSpec spec, double s, int dimension, int nodes_per_axis,
                           double cell_volume, std::uint64_t grid_fingerprint,
                           SymmetricMatrix weights)
    : spec_(spec),
      s_(s),
      dimension_(dimension),
      nodes_per_axis_(nodes_per_axis),
      cell_volume_(cell_volume),
      grid_fingerprint_(grid_fingerprint),
      weights_(std::move(weights)),
      row_sums_(weights_.size(), 0.0) {
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    double acc = 0.0;
    for (double v : weights_.row(i)) acc += v;
    row_sums_[i] = acc;
    max_row_sum_ = std::max(max_row_sum_, acc);
  }
}

KernelMatrix assemble_kernel_matrix(const Grid& grid, KernelSpec spec, double s) {
  SymmetricMatrix raw = pairwise_kernel(grid, spec, s);
  const std::size_t n = raw.size();
  const double w = grid.cell_volume();
  std::vector<double> scaled(raw.data().begin(), raw.data().end());
  for (double& v : scaled) v *= w;
  return KernelMatrix(spec, s, grid.dimension(), grid.nodes_per_axis(), w, grid.fingerprint(),
                      SymmetricMatrix(n, std::move(scaled)));
}

double lipschitz_domain_constant(const Grid& grid) {
  return 2.0 * std::max(grid.measure(), 1.0);
}

LipschitzBounds lipschitz_bounds(const Grid& grid, double s, double eps) {
  check_s(s, "lipschitz_bounds");
  if (!(eps > 0.0)) throw ParameterError("lipschitz_bounds: epsilon must be positive");
  const std::size_t n = grid.size();
  const double w = grid.cell_volume();
  const double k = exponent(grid.dimension(), s);
  LipschitzBounds b;
  for (std::size_t i = 0; i < n; ++i) {
    double sum1 = 0.0;
    double sum2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = std::pow(grid.distance(i, j) + eps, -k);
      sum1 += v * w;
      sum2 += v * v * w;
    }
    b.k_eps_star = std::max(b.k_eps_star, sum1);
    b.k_eps = std::max(b.k_eps, sum2);
  }
  b.l_eps = std::sqrt(lipschitz_domain_constant(grid) * (b.k_eps + b.k_eps_star * b.k_eps_star));
  b.l_inf = 2.0 * b.k_eps_star;
  return b;
}

std::string kernel_cache_key(const Grid& grid, KernelSpec spec, double s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "kernel_%016llx_%s_s%.17g_e%.17g",
                static_cast<unsigned long long>(grid.fingerprint()),
                to_string(spec.variant).c_str(), s,
                spec.variant == KernelVariant::Truncated ? spec.epsilon : 0.0);
  return buf;
}

void write_kernel_cache(const std::filesystem::path& path, const KernelMatrix& matrix) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open kernel cache for writing: " + path.string());
  const double header[5] = {static_cast<double>(matrix.dimension()),
                            static_cast<double>(matrix.nodes_per_axis()), matrix.s(),
                            matrix.variant() == KernelVariant::Singular ? 0.0 : 1.0,
                            matrix.epsilon()};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  const auto data = matrix.weights().data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw IoError("failed writing kernel cache: " + path.string());
}

KernelMatrix read_kernel_cache(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open kernel cache: " + path.string());
  double header[5];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in) throw IoError("truncated kernel cache header: " + path.string());
  if (static_cast<int>(header[0]) != grid.dimension() ||
      static_cast<int>(header[1]) != grid.nodes_per_axis()) {
    throw IoError("kernel cache does not match grid: " + path.string());
  }
  const KernelSpec spec = header[3] == 0.0 ? KernelSpec::singular()
                                           : KernelSpec::truncated(header[4]);
  const std::size_t n = grid.size();
  std::vector<double> data(n * n);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw IoError("truncated kernel cache body: " + path.string());
  return KernelMatrix(spec, header[2], grid.dimension(), grid.nodes_per_axis(),
                      grid.cell_volume(), grid.fingerprint(),
                      SymmetricMatrix(n, std::move(data)));
}

KernelMatrix load_or_assemble(const Grid& grid, KernelSpec spec, double s,
                              const std::filesystem::path& cache_dir) {
  const auto path = cache_dir / (kernel_cache_key(grid, spec, s) + ".bin");
  if (std::filesystem::exists(path)) return read_kernel_cache(path, grid);
  KernelMatrix m = assemble_kernel_matrix(grid, spec, s);
  std::filesystem::create_directories(cache_dir);
  write_kernel_cache(path, m);
  return m;
}

}  // namespace nlk
