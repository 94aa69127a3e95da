#pragma once

#include "phasecut/signal.hpp"

#include <istream>
#include <string>
#include <vector>

namespace phasecut {

struct Atom {
  std::string element;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double occupancy = 1.0;
};

// Atomic number of an element symbol; unknown symbols count as carbon.
int atomic_number(const std::string& element);

// Fixed-column ATOM/HETATM parser: coordinates from columns 31-54, occupancy
// from 55-60 (default 1.0 when blank), element from columns 77-78 with the
// atom-name field as fallback. Other record types are ignored.
std::vector<Atom> parse_pdb(std::istream& in);
std::vector<Atom> parse_pdb_file(const std::string& path);

// Projects atoms to 2D by dropping z (the integral of an isotropic 3D
// Gaussian along z is a 2D Gaussian), maps coordinates into the central 80%
// of the grid preserving aspect ratio, deposits blobs weighted by atomic
// number times occupancy, and normalizes to unit total mass.
ComplexImage project_density(const std::vector<Atom>& atoms, int side,
                             double sigma_pixels);

// Default blob width: 1.2 px at 128 x 128, scaled as 128/N on other grids.
double default_density_sigma(int side);

// Builtin synthetic density: a few fixed Gaussian blobs, used by the
// experiment harness when no PDB file is given.
ComplexImage synthetic_blob_density(int side);

} // namespace phasecut
