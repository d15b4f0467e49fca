//
// retrosynth - Copyright 2026 The retrosynth Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace retro::chem {

inline constexpr int kMaxAtomicNumber = 118;

/// Atomic number for a case-sensitive element symbol ("C", "Cl", "Na").
std::optional<int> element_from_symbol(std::string_view symbol);

std::string_view element_symbol(int atomic_number);

/// Elements that may appear without brackets in SMILES.
bool in_organic_subset(int atomic_number);

/// Elements that may be written as lowercase aromatic symbols.
bool can_be_aromatic(int atomic_number);

/// Allowed valences used for implicit hydrogen completion and valence
/// checks, ascending. Charged atoms use the valences of their
/// isoelectronic neighbour (N+ behaves as C, O- as F). Empty when the
/// element has no valence model.
std::span<const int> allowed_valences(int atomic_number, int charge);

}  // namespace retro::chem
