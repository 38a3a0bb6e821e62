#include "rau/autodiff/weights_io.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "detail/le_io.hpp"
#include "rau/error.hpp"

namespace rau::ad {
namespace {

constexpr std::array<char, 4> kMagic = {'R', 'A', 'U', 'W'};

using detail::get_le;
using detail::put_f64;
using detail::put_le;

double get_f64(std::istream& in) {
  double d = 0.0;
  if (!detail::get_f64(in, d)) throw ValidationError("weights: truncated payload");
  return d;
}

}  // namespace

void write_weights(std::ostream& out, const ParamSet& params) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kWeightFormatVersion);
  for (const auto& p : params) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.cols()));
    for (double v : p.value.values()) put_f64(out, v);
  }
  if (!out) throw ValidationError("weights: write failed");
}

ParamSet read_weights(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw ValidationError("weights: bad magic (expected RAUW)");
  std::uint32_t version = 0;
  if (!get_le(in, version)) throw ValidationError("weights: truncated header");
  if (version != kWeightFormatVersion)
    throw ValidationError("weights: unsupported format version " + std::to_string(version));
  ParamSet params;
  std::uint32_t name_len = 0;
  while (get_le(in, name_len)) {
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw ValidationError("weights: truncated name");
    std::uint32_t rows = 0, cols = 0;
    if (!get_le(in, rows) || !get_le(in, cols)) throw ValidationError("weights: truncated shape");
    std::vector<double> values(static_cast<std::size_t>(rows) * cols);
    for (double& v : values) v = get_f64(in);
    params.add(std::move(name), Matrix(rows, cols, std::move(values)));
  }
  return params;
}

void save_weights(const std::filesystem::path& path, const ParamSet& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("weights: cannot open " + path.string() + " for writing");
  write_weights(out, params);
}

ParamSet load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("weights: cannot open " + path.string());
  return read_weights(in);
}

}  // namespace rau::ad
