#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gspart/camera.h"

namespace gspart {

struct ColmapLoadOptions {
  double z_near = 0.01;
  double z_far = 1000.0;
};

// Reads cameras.txt + images.txt (COLMAP text model). One CameraView per
// registered image, id = IMAGE_ID, in file order. Supports PINHOLE and
// SIMPLE_PINHOLE. Throws kFormat for other models, kConsistency for a
// dangling CAMERA_ID, kParse with file:line for malformed lines, kIo.
std::vector<CameraView> load_colmap_cameras(const std::filesystem::path& dir,
                                            const ColmapLoadOptions& options = {});

// Writes one PINHOLE camera per view (CAMERA_ID = view id) and an
// images.txt with empty point lines. Creates dir if needed.
void write_colmap_cameras(std::span<const CameraView> cameras, const std::filesystem::path& dir);

}  // namespace gspart
