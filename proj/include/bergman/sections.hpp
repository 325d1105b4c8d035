#pragma once

// Gaussian holomorphic sections S = sum eta_l c_l z^l of the disc model and their zeros.
// The factor z (the puncture) is divided out: zeros are those of P(z) = sum eta_l c_l z^(l-1).

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "bergman/disc_kernel.hpp"
#include "bergman/rng.hpp"

namespace bergman {

struct SectionSample {
  std::shared_ptr<const DiscSpace> space;
  std::vector<complex> eta;  // eta[l-1] multiplies c_l z^l
  std::uint64_t seed = 0;
  SeedPath seed_path;
};

/// eta_l i.i.d. standard complex Gaussian, drawn from the counter stream (seed, path).
SectionSample sample_section(std::shared_ptr<const DiscSpace> space, std::uint64_t seed, SeedPath path);

/// A section with prescribed coefficients (length must equal space->length()).
SectionSample section_from_coefficients(std::shared_ptr<const DiscSpace> space, std::vector<complex> eta);

/// |s(z)|_{h_p} and arg s(z), s = sum eta_l c_l z^l.
KernelValue evaluate(const SectionSample& sample, complex z);

/// Smallest L with sum_{l>L} c_l^2 b^{2l} <= eps^2 sum_{l<=L} c_l^2 b^{2l}.
std::size_t truncation_length(int p, double outer_radius, double eps);

enum class ZeroMethod { companion, argument_principle };

struct Zero {
  complex location;
  int multiplicity = 1;
  bool converged = true;   // Newton polish reached |P/P'| < 1e-12
  double newton_step = 0;  // last |P/P'|
};

struct ZeroSet {
  std::vector<Zero> zeros;  // sorted by radius, then angle
  Annulus region{0.5, 0.5};
  ZeroMethod method = ZeroMethod::companion;
  int merged = 0;       // roots merged as multiple (anomalies for Gaussian sections)
  int unconverged = 0;  // roots whose polish did not converge

  int count() const;
};

/// All roots of P (degree L-1), polished, merged and sorted.
ZeroSet polynomial_zeros(const SectionSample& sample);

/// Roots of P in the closed annulus (radius tolerance 1e-10).
ZeroSet find_zeros(const SectionSample& sample, const Annulus& region);

struct ContourCount {
  int count = 0;
  int winding_inner = 0;
  int winding_outer = 0;
  double inner = 0.0;  // radii actually used
  double outer = 0.0;
  int perturbations = 0;
};

/// Winding number of P = s/z on |z| = radius: the zeros of P in |z| < radius, which is the
/// winding of s minus one. Returns -1 when a zero lies within 1e-8 of the circle.
int winding_number(const SectionSample& sample, double radius);

/// Zeros in the annulus by the argument principle; radii are perturbed by 1e-6 (up to 3 times)
/// when a zero lies within 1e-8 of a boundary circle.
ContourCount count_zeros_argument_principle(const SectionSample& sample, const Annulus& region);

/// sum over zeros of multiplicity * f(zero).
double linear_statistic(const ZeroSet& zeros, const std::function<double(complex)>& f);

}  // namespace bergman
