#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "rau/autodiff/params.hpp"

namespace rau::ad {

/// Binary weight file layout (all integers and reals little-endian):
///   "RAUW" | u32 version | records...
///   record = u32 name_len | name bytes | u32 rows | u32 cols | rows*cols f64 (row-major)
inline constexpr std::uint32_t kWeightFormatVersion = 1;

void write_weights(std::ostream& out, const ParamSet& params);
ParamSet read_weights(std::istream& in);

void save_weights(const std::filesystem::path& path, const ParamSet& params);
ParamSet load_weights(const std::filesystem::path& path);

}  // namespace rau::ad
