#pragma once

#include <cstdint>
#include <string>

#include "prunetrace/field.hpp"

namespace prunetrace {

// P5 8-bit PGM; material = 255, void = 0. Rows are written top-first
// (j = ny-1 first) so the image matches the y-up world orientation.
void write_pgm(const std::string& path, const IndicatorField& f);

// min-max normalized to 0..255; constant fields write 0
void write_pgm(const std::string& path, const ScalarField& f);

// binary P5 only; cells with value >= 128 classify as material
IndicatorField read_pgm(const std::string& path, double h, double ox = 0.0, double oy = 0.0);

// one CSV row per cell row, top-first, "%.10g" formatting
void write_csv(const std::string& path, const ScalarField& f);

std::string format_double(double v); // "%.10g", the single float format for all artifacts

std::uint64_t fnv1a(const std::string& bytes);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace prunetrace
