#include "spectral_backend.hpp"

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace mvlab::detail {
namespace {

// FFTW's planner is not thread-safe, execution on distinct arrays is. Plans
// are built once per (dim, M) under a lock with FFTW_ESTIMATE so the chosen
// codelets never depend on timing, and every execution uses fftw_malloc'd
// buffers so alignment matches the planning arrays.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
};

struct RealBuffer {
  double* data = nullptr;
  explicit RealBuffer(std::size_t n) : data(fftw_alloc_real(n)) {}
  ~RealBuffer() { fftw_free(data); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
};

struct ComplexBuffer {
  fftw_complex* data = nullptr;
  explicit ComplexBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
  ~ComplexBuffer() { fftw_free(data); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int dim, int m) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({dim, m});
  if (it != cache.end()) return it->second;

  PlanPair pp;
  pp.real_size = dim == 1 ? std::size_t(m) : std::size_t(m) * m;
  pp.complex_size = dim == 1 ? std::size_t(m / 2 + 1) : std::size_t(m) * (m / 2 + 1);
  RealBuffer r(pp.real_size);
  ComplexBuffer c(pp.complex_size);
  if (dim == 1) {
    pp.forward = fftw_plan_dft_r2c_1d(m, r.data, c.data, FFTW_ESTIMATE);
    pp.backward = fftw_plan_dft_c2r_1d(m, c.data, r.data, FFTW_ESTIMATE);
  } else {
    pp.forward = fftw_plan_dft_r2c_2d(m, m, r.data, c.data, FFTW_ESTIMATE);
    pp.backward = fftw_plan_dft_c2r_2d(m, m, c.data, r.data, FFTW_ESTIMATE);
  }
  return cache.emplace(std::pair{dim, m}, pp).first->second;
}

struct Scratch {
  std::unique_ptr<RealBuffer> real;
  std::unique_ptr<ComplexBuffer> spec;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;

  void ensure(const PlanPair& pp) {
    if (real_size != pp.real_size) {
      real = std::make_unique<RealBuffer>(pp.real_size);
      real_size = pp.real_size;
    }
    if (complex_size != pp.complex_size) {
      spec = std::make_unique<ComplexBuffer>(pp.complex_size);
      complex_size = pp.complex_size;
    }
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

// |xi|^2 for half-spectrum index (row, col); row is unused in 1D.
template <class F>
void for_each_mode(const SpatialGrid& grid, F&& fn) {
  const int m = grid.points_per_dim();
  const int half = m / 2 + 1;
  if (grid.dim() == 1) {
    for (int j = 0; j < half; ++j) {
      const double xi = grid.wavenumber(j);
      fn(std::size_t(j), xi * xi, j == 0 || j == m / 2 ? 1.0 : 2.0);
    }
    return;
  }
  for (int r = 0; r < m; ++r) {
    const double xr = grid.wavenumber(r);
    for (int c = 0; c < half; ++c) {
      const double xc = grid.wavenumber(c);
      fn(std::size_t(r) * half + c, xr * xr + xc * xc, c == 0 || c == m / 2 ? 1.0 : 2.0);
    }
  }
}

}  // namespace

void apply_radial_multiplier(const SpatialGrid& grid, std::span<const double> in, std::span<double> out,
                             const std::function<double(double)>& multiplier) {
  const PlanPair& pp = plans_for(grid.dim(), grid.points_per_dim());
  Scratch& s = scratch();
  s.ensure(pp);
  std::copy(in.begin(), in.end(), s.real->data);
  fftw_execute_dft_r2c(pp.forward, s.real->data, s.spec->data);

  const double norm = 1.0 / double(pp.real_size);
  fftw_complex* spec = s.spec->data;
  for_each_mode(grid, [&](std::size_t k, double xi_sq, double) {
    const double factor = multiplier(xi_sq) * norm;
    spec[k][0] *= factor;
    spec[k][1] *= factor;
  });
  fftw_execute_dft_c2r(pp.backward, s.spec->data, s.real->data);
  std::copy(s.real->data, s.real->data + pp.real_size, out.begin());
}

double spectral_energy(const SpatialGrid& grid, std::span<const double> in) {
  const PlanPair& pp = plans_for(grid.dim(), grid.points_per_dim());
  Scratch& s = scratch();
  s.ensure(pp);
  std::copy(in.begin(), in.end(), s.real->data);
  fftw_execute_dft_r2c(pp.forward, s.real->data, s.spec->data);
  double acc = 0.0;
  const fftw_complex* spec = s.spec->data;
  for_each_mode(grid, [&](std::size_t k, double, double weight) {
    acc += weight * (spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1]);
  });
  return acc / double(pp.real_size);
}

}  // namespace mvlab::detail
