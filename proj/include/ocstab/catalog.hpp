#ifndef OCSTAB_CATALOG_HPP
#define OCSTAB_CATALOG_HPP

#include <string>

#include "ocstab/grid.hpp"

namespace ocstab {

/// Field catalog expressions: products of the atoms
///   constant(c)
///   linear(axis, slope, offset)           offset + slope * x_axis
///   sinpi(amplitude, modes...)            amp * prod sin(m_d pi xhat_d)
///   bump(center, width, height)           compact quartic bump per axis
///   indicator(a, b, value)                value where every x_d in [a, b]
/// joined with '*', e.g. "linear(0,1,-0.5)*linear(0,1,-0.5)".
/// sinpi takes one mode per axis; xhat is the axis coordinate normalized
/// to (0,1).
GridField parse_field(const std::string& expr, const GridDomain& d);

/// Catalog listing used in error messages.
const char* field_catalog_help();

}  // namespace ocstab

#endif
