#pragma once

#include <cstdint>
#include <vector>

#include "modlab/harness/sweeps.hpp"

namespace modlab::harness {

// Check batches of the verify-ops experiment, one per acceptance group. Random families are
// drawn from generators seeded by `seed` plus a fixed per-batch offset.

/// riesz_convolve against the direct sum: 1-d (n = 128) and 3-d (n = 32) Gaussians.
std::vector<Check> verify_convolution();
/// Modulated interaction energy of random mean-zero differences stays >= -1e-12 max|d|^2.
std::vector<Check> verify_positivity(int cases, std::uint64_t seed);
/// Coulomb commutator ratio over random smooth triples at n = 32 and n = 64 in 3-d.
std::vector<Check> verify_commutator(int cases, std::uint64_t seed);
/// Closed-form extension recursions and the Leibniz expansion on random source clouds.
std::vector<Check> verify_recursions(std::uint64_t seed);
/// Energy rewrite and representations, Hessian split ratio, polyharmonic identity.
std::vector<Check> verify_identities(double xi_max, double radius);
/// wasserstein1_1d against exhaustive assignment on equal-mass atom pairs.
std::vector<Check> verify_w1(int cases, std::uint64_t seed);

/// Exact W1 between two sets of equal-weight atoms of equal count (at most 16), by dynamic
/// programming over assignments.
double assignment_w1(const std::vector<double>& from, const std::vector<double>& to);

SweepResult run_verify_ops(const ExperimentConfig& config);

}  // namespace modlab::harness
