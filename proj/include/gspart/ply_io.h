#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gspart/scene.h"

namespace gspart {

// Reads a binary little-endian splat PLY. Requires vertex properties
// x,y,z, opacity, scale_0..2, rot_0..3 (rot_0 is w); other scalar
// properties are ignored. Opacity is passed through a logistic when any raw
// value lies outside [0,1]; scales are exponentiated when any raw value is
// negative. Quaternions are normalized.
// Throws kFormat (missing property, unsupported layout), kParse (malformed
// or truncated file, with byte offset) or kIo.
std::vector<Gaussian3D> load_splat_ply(const std::filesystem::path& path);

// Writes activated values (opacity in [0,1], linear scales) as float32.
void save_splat_ply(std::span<const Gaussian3D> gaussians, const std::filesystem::path& path);

}  // namespace gspart
