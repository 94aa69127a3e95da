#include "phasecut/pdb.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace phasecut {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string field(const std::string& line, size_t col_1based, size_t width) {
  if (line.size() < col_1based) return "";
  return trim(line.substr(col_1based - 1, std::min(width, line.size() - col_1based + 1)));
}

double parse_coord(const std::string& text, int line_number, const char* what) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (...) {
    std::ostringstream msg;
    msg << "pdb line " << line_number << ": malformed " << what << " field '" << text << "'";
    throw std::runtime_error(msg.str());
  }
}

} // namespace

int atomic_number(const std::string& element) {
  static const std::map<std::string, int> table = {
      {"H", 1},  {"HE", 2}, {"LI", 3}, {"B", 5},   {"C", 6},   {"N", 7},
      {"O", 8},  {"F", 9},  {"NA", 11}, {"MG", 12}, {"P", 15},  {"S", 16},
      {"CL", 17}, {"K", 19}, {"CA", 20}, {"MN", 25}, {"FE", 26}, {"ZN", 30},
      {"BR", 35}, {"I", 53}};
  std::string key;
  for (char c : element) key.push_back(static_cast<char>(std::toupper(c)));
  const auto it = table.find(key);
  return it != table.end() ? it->second : 6;
}

std::vector<Atom> parse_pdb(std::istream& in) {
  std::vector<Atom> atoms;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string record = field(line, 1, 6);
    if (record != "ATOM" && record != "HETATM") continue;
    Atom atom;
    atom.x = parse_coord(field(line, 31, 8), line_number, "x");
    atom.y = parse_coord(field(line, 39, 8), line_number, "y");
    atom.z = parse_coord(field(line, 47, 8), line_number, "z");
    const std::string occ = field(line, 55, 6);
    atom.occupancy = occ.empty() ? 1.0 : parse_coord(occ, line_number, "occupancy");
    atom.element = field(line, 77, 2);
    if (atom.element.empty()) {
      // Fallback: first alphabetic character of the atom-name field.
      const std::string name = field(line, 13, 4);
      for (char c : name)
        if (std::isalpha(static_cast<unsigned char>(c))) {
          atom.element = std::string(1, c);
          break;
        }
    }
    atoms.push_back(std::move(atom));
  }
  if (atoms.empty()) throw std::runtime_error("pdb: no ATOM/HETATM records found");
  return atoms;
}

std::vector<Atom> parse_pdb_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("pdb: cannot open " + path);
  return parse_pdb(in);
}

ComplexImage project_density(const std::vector<Atom>& atoms, int side,
                             double sigma_pixels) {
  if (atoms.empty()) throw std::invalid_argument("project_density: no atoms");
  double min_x = atoms[0].x, max_x = atoms[0].x;
  double min_y = atoms[0].y, max_y = atoms[0].y;
  for (const Atom& a : atoms) {
    min_x = std::min(min_x, a.x);
    max_x = std::max(max_x, a.x);
    min_y = std::min(min_y, a.y);
    max_y = std::max(max_y, a.y);
  }
  const double extent = std::max(max_x - min_x, max_y - min_y);
  const double usable = 0.8 * side;
  const double scale = extent > 0.0 ? usable / extent : 0.0;
  const double center = 0.5 * (side - 1);

  Eigen::MatrixXd density = Eigen::MatrixXd::Zero(side, side);
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma_pixels * sigma_pixels);
  for (const Atom& a : atoms) {
    const double px = center + scale * (a.x - 0.5 * (min_x + max_x));
    const double py = center + scale * (a.y - 0.5 * (min_y + max_y));
    const double weight = atomic_number(a.element) * a.occupancy;
    for (int c = 0; c < side; ++c)
      for (int r = 0; r < side; ++r) {
        const double dx = c - px;
        const double dy = r - py;
        density(r, c) += weight * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
      }
  }
  const double mass = density.sum();
  if (mass > 0.0) density /= mass;
  return make_image(density.cast<std::complex<double>>(), true);
}

double default_density_sigma(int side) { return 1.2 * 128.0 / side; }

ComplexImage synthetic_blob_density(int side) {
  // Three fixed blobs; smooth enough that the diffraction pattern is
  // strongly compressible at any grid size.
  std::vector<Atom> atoms = {
      {"C", 0.30, 0.35, 0.0, 1.0},
      {"N", 0.62, 0.40, 0.0, 1.0},
      {"O", 0.45, 0.68, 0.0, 1.0},
  };
  return project_density(atoms, side, std::max(1.0, side / 8.0));
}

} // namespace phasecut
