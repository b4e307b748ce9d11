#pragma once

// Band-limited real fields on the 2-torus (R/2piZ)^2 in the orthonormal basis
// e_n(x) = exp(i n.x) / (2 pi), plus transforms, dealiased products, norms and
// the sharp-annulus paraproduct decomposition.

#include <complex>
#include <span>
#include <vector>

#include "wickwave/lattice.hpp"

namespace wickwave {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Fourier coefficients of a real field, stored on the square [-B, B]^2 with
/// entries outside the disk |n| <= B held at zero.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int band);

  int band() const { return band_; }

  /// Coefficient at n; zero outside the band.
  cplx at(FreqIndex n) const {
    return in_disk(n, band_) ? data_[offset(n)] : cplx{};
  }

  /// Sets coeff(n) = c and coeff(-n) = conj(c). At n = 0 only the real part is kept.
  void set_pair(FreqIndex n, cplx c);

  /// Raw mutable access; the caller keeps Hermitian symmetry.
  cplx& ref(FreqIndex n) { return data_[offset(n)]; }

  std::span<const cplx> raw() const { return data_; }

  bool is_hermitian(double tol = 0.0) const;
  /// Max |coeff(n)| over the band.
  double max_abs() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  /// this += s * o
  SpectralField& axpy(double s, const SpectralField& o);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// Same coefficients in a larger (or smaller, truncating) band.
  SpectralField with_band(int band) const;

 private:
  std::size_t offset(FreqIndex n) const {
    const int w = 2 * band_ + 1;
    return static_cast<std::size_t>(n.x + band_) * w + static_cast<std::size_t>(n.y + band_);
  }

  int band_;
  std::vector<cplx> data_;
};

/// pi_N: zero every |n| > N. The result band is min(band, N).
SpectralField project(const SpectralField& f, int N);

/// Real grid values u(x_a, y_b), x_a = 2 pi a / M, stored row-major (a major).
struct PhysicalGrid {
  int size = 0;
  std::vector<double> values;

  double operator()(int a, int b) const { return values[static_cast<std::size_t>(a) * size + b]; }
};

/// Evaluate on an M x M grid. Requires M >= 2 band + 1.
PhysicalGrid to_physical(const SpectralField& f, int grid_size);

/// Exact inverse of to_physical for fields of the given band. Requires M >= 2 band + 1.
SpectralField to_spectral(const PhysicalGrid& grid, int band);

/// Smallest 7-smooth integer >= m (cheap FFT length).
int fft_friendly_size(int m);

/// Dealiased product through a zero-padded transform on M >= 2(Bf+Bg)+1 points.
SpectralField multiply_fft(const SpectralField& f, const SpectralField& g);

/// Direct O(B^4) convolution coeff(n) = (1/2pi) sum f(m) g(n-m).
SpectralField multiply_direct(const SpectralField& f, const SpectralField& g);

/// Exact product with band(f) + band(g); picks the cheaper route.
SpectralField multiply_dealiased(const SpectralField& f, const SpectralField& g);

/// pi_B(f g) on the smallest alias-free grid, M >= band(f) + band(g) + B + 1.
SpectralField multiply_projected(const SpectralField& f, const SpectralField& g, int band);

/// Single output coefficient of the product, by direct summation.
cplx product_coefficient(const SpectralField& f, const SpectralField& g, FreqIndex n);

/// (sum <n>^{2s} |coeff(n)|^2)^{1/2}
double sobolev_norm(const SpectralField& f, double s);

/// sup_j 2^{sj} || P_j f ||_{L^inf}, sup norms taken on an oversampled grid.
double besov_sup_norm(const SpectralField& f, double s);

/// Block-j part P_j f with sharp annuli.
SpectralField dyadic_part(const SpectralField& f, int j);

struct ParaproductParts {
  SpectralField lo;        ///< sum_{j < k-2} P_j f P_k g
  SpectralField resonant;  ///< sum_{|j-k| <= 2} P_j f P_k g
  SpectralField hi;        ///< sum_{k < j-2} P_j f P_k g
};

ParaproductParts paraproduct_split(const SpectralField& f, const SpectralField& g);

/// Resonant part only.
SpectralField resonant_part(const SpectralField& f, const SpectralField& g);

/// Single coefficient of the resonant part, by direct summation over block pairs.
cplx resonant_coefficient(const SpectralField& f, const SpectralField& g, FreqIndex n);

}  // namespace wickwave
