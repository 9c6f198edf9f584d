#pragma once

#include <string>

#include "faraday/field.hpp"

namespace faraday {

// Binary layout (little-endian host order):
//   16 bytes  magic "FARADAYF v1" padded with NUL
//   u32 x 5   kind (0 surface, 1 volume), ncomp, n1, n2, nz
//   f64 x 3   L1, L2, b
//   f64 pairs (re, im) per coefficient, component-major, then [level][i1][i2]
//
// CSV layout: '#'-prefixed header lines carrying the same metadata, one "# component=c" line per
// component block, then rows "m1,m2,z_index,re,im" printed with 17 significant digits.

template <FieldKind K>
void write_binary(const Field<K>& f, const std::string& path);
template <FieldKind K>
Field<K> read_binary(const std::string& path);

template <FieldKind K>
void write_csv(const Field<K>& f, const std::string& path);
template <FieldKind K>
Field<K> read_csv(const std::string& path);

}  // namespace faraday
