#include "wickwave/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace wickwave {

SpectralField::SpectralField(int band) : band_(band) {
  if (band < 0) throw std::invalid_argument("SpectralField: negative band");
  const std::size_t w = 2 * static_cast<std::size_t>(band) + 1;
  data_.assign(w * w, cplx{});
}

void SpectralField::set_pair(FreqIndex n, cplx c) {
  if (!in_disk(n, band_)) throw std::out_of_range("SpectralField::set_pair: mode outside band");
  if (n.x == 0 && n.y == 0) {
    data_[offset(n)] = cplx{c.real(), 0.0};
    return;
  }
  data_[offset(n)] = c;
  data_[offset(-n)] = std::conj(c);
}

bool SpectralField::is_hermitian(double tol) const {
  for (int x = -band_; x <= band_; ++x)
    for (int y = -band_; y <= band_; ++y) {
      const FreqIndex n{x, y};
      if (!in_disk(n, band_)) continue;
      if (std::abs(at(-n) - std::conj(at(n))) > tol) return false;
    }
  return std::abs(at({0, 0}).imag()) <= tol;
}

double SpectralField::max_abs() const {
  double m = 0.0;
  for (const auto& c : data_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField SpectralField::with_band(int band) const {
  SpectralField out(band);
  const int b = std::min(band, band_);
  for (int x = -b; x <= b; ++x)
    for (int y = -b; y <= b; ++y) {
      const FreqIndex n{x, y};
      if (in_disk(n, b)) out.ref(n) = at(n);
    }
  return out;
}

namespace {

void accumulate(SpectralField& dst, const SpectralField& src, double s) {
  if (src.band() > dst.band()) dst = dst.with_band(src.band());
  const int b = src.band();
  for (int x = -b; x <= b; ++x)
    for (int y = -b; y <= b; ++y) {
      const FreqIndex n{x, y};
      if (in_disk(n, b)) dst.ref(n) += s * src.at(n);
    }
}

}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  accumulate(*this, o, 1.0);
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  accumulate(*this, o, -1.0);
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
  accumulate(*this, o, s);
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : data_) c *= s;
  return *this;
}

SpectralField project(const SpectralField& f, int N) {
  if (N < 0) throw std::invalid_argument("project: negative N");
  return f.with_band(std::min(f.band(), N));
}

// ---------------------------------------------------------------------------
// FFTW plumbing. Plans are created once per grid size under a lock and executed
// through the new-array interface, which is thread-safe.

namespace {

struct PlanPair {
  fftw_plan backward = nullptr;  // c2r
  fftw_plan forward = nullptr;   // r2c
};

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int M) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(M);
  if (it != cache.end()) return it->second;
  const std::size_t nreal = static_cast<std::size_t>(M) * M;
  const std::size_t ncplx = static_cast<std::size_t>(M) * (M / 2 + 1);
  FftwBuffer r(sizeof(double) * nreal);
  FftwBuffer c(sizeof(fftw_complex) * ncplx);
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.backward = fftw_plan_dft_c2r_2d(M, M, static_cast<fftw_complex*>(c.ptr),
                                    static_cast<double*>(r.ptr), flags);
  p.forward = fftw_plan_dft_r2c_2d(M, M, static_cast<double*>(r.ptr),
                                   static_cast<fftw_complex*>(c.ptr), flags);
  if (!p.backward || !p.forward) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(M, p).first->second;
}

int wrap(int k, int M) { return ((k % M) + M) % M; }

void require_grid(int band, int M, const char* who) {
  if (M < 2 * band + 1)
    throw std::invalid_argument(std::string(who) + ": grid size " + std::to_string(M) +
                                " too small for band " + std::to_string(band) +
                                " (need M >= 2*band+1)");
}

}  // namespace

PhysicalGrid to_physical(const SpectralField& f, int M) {
  require_grid(f.band(), M, "to_physical");
  const int B = f.band();
  const int H = M / 2 + 1;
  std::vector<cplx> half(static_cast<std::size_t>(M) * H, cplx{});
  const double scale = 1.0 / kTwoPi;
  for (int x = -B; x <= B; ++x)
    for (int y = 0; y <= B; ++y) {
      const FreqIndex n{x, y};
      if (!in_disk(n, B)) continue;
      half[static_cast<std::size_t>(wrap(x, M)) * H + y] = scale * f.at(n);
    }
  PhysicalGrid g;
  g.size = M;
  g.values.assign(static_cast<std::size_t>(M) * M, 0.0);
  const auto& p = plans_for(M);
  fftw_execute_dft_c2r(p.backward, reinterpret_cast<fftw_complex*>(half.data()), g.values.data());
  return g;
}

SpectralField to_spectral(const PhysicalGrid& grid, int band) {
  const int M = grid.size;
  require_grid(band, M, "to_spectral");
  const int H = M / 2 + 1;
  std::vector<cplx> half(static_cast<std::size_t>(M) * H);
  std::vector<double> in = grid.values;
  const auto& p = plans_for(M);
  fftw_execute_dft_r2c(p.forward, in.data(), reinterpret_cast<fftw_complex*>(half.data()));
  const double scale = kTwoPi / (static_cast<double>(M) * M);
  SpectralField out(band);
  // Fill the upper half-lattice and mirror, so symmetry holds exactly.
  for (int x = 0; x <= band; ++x)
    for (int y = -band; y <= band; ++y) {
      const FreqIndex n{x, y};
      if (!in_disk(n, band)) continue;
      if (!(n.x == 0 && n.y == 0) && !in_upper_half(n)) continue;
      cplx c;
      if (y >= 0) {
        c = half[static_cast<std::size_t>(wrap(x, M)) * H + y];
      } else {
        c = std::conj(half[static_cast<std::size_t>(wrap(-x, M)) * H + (-y)]);
      }
      out.set_pair(n, scale * c);
    }
  return out;
}

int fft_friendly_size(int m) {
  for (int n = std::max(m, 1);; ++n) {
    int r = n;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return n;
  }
}

SpectralField multiply_fft(const SpectralField& f, const SpectralField& g) {
  const int band = f.band() + g.band();
  const int M = fft_friendly_size(2 * band + 1);
  const PhysicalGrid pf = to_physical(f, M);
  PhysicalGrid pg = to_physical(g, M);
  for (std::size_t i = 0; i < pg.values.size(); ++i) pg.values[i] *= pf.values[i];
  return to_spectral(pg, band);
}

SpectralField multiply_direct(const SpectralField& f, const SpectralField& g) {
  const int band = f.band() + g.band();
  SpectralField out(band);
  const auto fm = disk_modes(f.band());
  const auto gm = disk_modes(g.band());
  const double scale = 1.0 / kTwoPi;
  for (const auto& m : fm) {
    const cplx a = f.at(m);
    if (a == cplx{}) continue;
    for (const auto& k : gm) out.ref(m + k) += scale * a * g.at(k);
  }
  out.ref({0, 0}).imag(0.0);
  return out;
}

SpectralField multiply_dealiased(const SpectralField& f, const SpectralField& g) {
  const double wf = 2.0 * f.band() + 1.0;
  const double wg = 2.0 * g.band() + 1.0;
  if (wf * wf * wg * wg <= 4.0e4) return multiply_direct(f, g);
  return multiply_fft(f, g);
}

SpectralField multiply_projected(const SpectralField& f, const SpectralField& g, int band) {
  if (band < 0) throw std::invalid_argument("multiply_projected: negative band");
  const int need = std::max({f.band() + g.band() + band + 1, 2 * f.band() + 1, 2 * g.band() + 1,
                             2 * band + 1});
  const int M = fft_friendly_size(need);
  const PhysicalGrid pf = to_physical(f, M);
  PhysicalGrid pg = to_physical(g, M);
  for (std::size_t i = 0; i < pg.values.size(); ++i) pg.values[i] *= pf.values[i];
  return to_spectral(pg, band);
}

cplx product_coefficient(const SpectralField& f, const SpectralField& g, FreqIndex n) {
  cplx acc{};
  const int B = f.band();
  for (int x = -B; x <= B; ++x)
    for (int y = -B; y <= B; ++y) {
      const FreqIndex m{x, y};
      if (!in_disk(m, B)) continue;
      const FreqIndex k = n - m;
      if (!in_disk(k, g.band())) continue;
      acc += f.at(m) * g.at(k);
    }
  return acc / kTwoPi;
}

double sobolev_norm(const SpectralField& f, double s) {
  double acc = 0.0;
  const int B = f.band();
  for (int x = -B; x <= B; ++x)
    for (int y = -B; y <= B; ++y) {
      const FreqIndex n{x, y};
      if (!in_disk(n, B)) continue;
      const double w = std::pow(jbracket_sq(n), s);
      acc += w * std::norm(f.at(n));
    }
  return std::sqrt(acc);
}

SpectralField dyadic_part(const SpectralField& f, int j) {
  const int b = std::min(f.band(), j == 0 ? 1 : (1 << j));
  SpectralField out(b);
  for (int x = -b; x <= b; ++x)
    for (int y = -b; y <= b; ++y) {
      const FreqIndex n{x, y};
      if (in_disk(n, b) && dyadic_block(n) == j) out.ref(n) = f.at(n);
    }
  return out;
}

double besov_sup_norm(const SpectralField& f, double s) {
  double best = 0.0;
  const int J = max_dyadic_block(f.band());
  for (int j = 0; j <= J; ++j) {
    const SpectralField part = dyadic_part(f, j);
    if (part.max_abs() == 0.0) continue;
    const int M = fft_friendly_size(std::max(4 * part.band() + 1, 8));
    const PhysicalGrid g = to_physical(part, M);
    double sup = 0.0;
    for (double v : g.values) sup = std::max(sup, std::abs(v));
    best = std::max(best, std::pow(2.0, s * j) * sup);
  }
  return best;
}

namespace {

/// Sum of blocks lo..hi (clamped) of f.
SpectralField block_range(const std::vector<SpectralField>& blocks, int lo, int hi) {
  SpectralField acc(0);
  lo = std::max(lo, 0);
  hi = std::min(hi, static_cast<int>(blocks.size()) - 1);
  for (int j = lo; j <= hi; ++j) acc += blocks[j];
  return acc;
}

std::vector<SpectralField> blocks_of(const SpectralField& f) {
  std::vector<SpectralField> out;
  const int J = max_dyadic_block(f.band());
  out.reserve(J + 1);
  for (int j = 0; j <= J; ++j) out.push_back(dyadic_part(f, j));
  return out;
}

}  // namespace

ParaproductParts paraproduct_split(const SpectralField& f, const SpectralField& g) {
  const auto fb = blocks_of(f);
  const auto gb = blocks_of(g);
  const int band = f.band() + g.band();
  ParaproductParts parts{SpectralField(band), SpectralField(band), SpectralField(band)};
  const int Jf = static_cast<int>(fb.size()) - 1;
  const int Jg = static_cast<int>(gb.size()) - 1;
  for (int k = 3; k <= Jg; ++k) {
    const SpectralField low = block_range(fb, 0, k - 3);
    parts.lo += multiply_dealiased(low, gb[k]);
  }
  for (int j = 3; j <= Jf; ++j) {
    const SpectralField low = block_range(gb, 0, j - 3);
    parts.hi += multiply_dealiased(fb[j], low);
  }
  for (int j = 0; j <= Jf; ++j) {
    if (j - 2 > Jg) break;
    const SpectralField near = block_range(gb, j - 2, j + 2);
    parts.resonant += multiply_dealiased(fb[j], near);
  }
  parts.lo = parts.lo.with_band(band);
  parts.hi = parts.hi.with_band(band);
  parts.resonant = parts.resonant.with_band(band);
  return parts;
}

SpectralField resonant_part(const SpectralField& f, const SpectralField& g) {
  const auto fb = blocks_of(f);
  const auto gb = blocks_of(g);
  const int band = f.band() + g.band();
  SpectralField res(band);
  const int Jf = static_cast<int>(fb.size()) - 1;
  const int Jg = static_cast<int>(gb.size()) - 1;
  for (int j = 0; j <= Jf; ++j) {
    if (j - 2 > Jg) break;
    res += multiply_dealiased(fb[j], block_range(gb, j - 2, j + 2));
  }
  return res.with_band(band);
}

cplx resonant_coefficient(const SpectralField& f, const SpectralField& g, FreqIndex n) {
  cplx acc{};
  const int B = f.band();
  for (int x = -B; x <= B; ++x)
    for (int y = -B; y <= B; ++y) {
      const FreqIndex m{x, y};
      if (!in_disk(m, B)) continue;
      const FreqIndex k = n - m;
      if (!in_disk(k, g.band())) continue;
      if (std::abs(dyadic_block(m) - dyadic_block(k)) > 2) continue;
      acc += f.at(m) * g.at(k);
    }
  return acc / kTwoPi;
}

}  // namespace wickwave
