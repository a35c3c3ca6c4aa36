#pragma once

#include <string>

#include "magnls/field_state.hpp"

namespace magnls {

/// Binary layout (little endian): "MNLS", u32 version, u32 cutoff, u32 N_z,
/// f64 L_z, f64 t, then (re, im) f64 pairs for every mode (degree-major, k1
/// ascending) and, inside a mode, every wavenumber in ascending order.
inline constexpr unsigned snapshot_version = 1;

void write_snapshot(const SpectralField& field, const std::string& path);

/// Reads into `disc`, which must match the stored cutoff, N_z and L_z.
SpectralField read_snapshot(const std::string& path, std::shared_ptr<const Discretization> disc);

/// Reads and builds a discretization from the header (given potential,
/// default node count 2 cutoff + 2).
SpectralField read_snapshot(const std::string& path,
                            const PotentialSpec& potential = PotentialSpec::zero());

}  // namespace magnls
