#pragma once

#include <map>
#include <string>
#include <vector>

#include "sart/grid.hpp"
#include "sart/spectral.hpp"

namespace sart {

using Meta = std::map<std::string, std::string>;

// Raw little-endian float64 payload at `path` with a text header at
// `path + ".hdr"` (ndim, shape, spacing, origin, kind, meta.*). Both files
// are written to temporaries and renamed, header last.
void write_image(const std::string& path, const Image& img, const Meta& meta = {});
void write_data(const std::string& path, const DataField& data, const Meta& meta = {});
void write_spectrum(const std::string& path, const SpectralField& spec, const Meta& meta = {});

Image read_image(const std::string& path, Meta* meta = nullptr);
DataField read_data(const std::string& path, Meta* meta = nullptr);
SpectralField read_spectrum(const std::string& path, Meta* meta = nullptr);

// "image", "data" or "spectrum" from the header.
std::string read_kind(const std::string& path);

// 16-bit binary PGM, min..max mapped to 0..65535, scale kept in a comment.
// Row 0 of the file is the top (largest y) of the image.
void write_pgm(const std::string& path, const Image& img);
void write_pgm(const std::string& path, const DataField& data);

void write_profile_csv(const std::string& path, const Profile& p, const std::string& axis = "x");

}  // namespace sart
