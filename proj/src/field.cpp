#include "sbe/field.hpp"

#include <cstdio>
#include <cstring>

namespace sbe {

namespace {
constexpr uint32_t kMagic = 0x46454253;  // "SBEF"
constexpr uint32_t kVersion = 1;

struct Header {
  uint32_t magic;
  uint32_t version;
  uint32_t n;
  uint32_t reserved;
  double L;
  double tau;
  uint64_t seed;
};
}  // namespace

void write_field(const std::string& path, const RealField& f, double tau, uint64_t seed) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("write_field: cannot open " + path);
  Header h{kMagic, kVersion, static_cast<uint32_t>(f.N), 0, f.L, tau, seed};
  std::fwrite(&h, sizeof(h), 1, fp);
  std::fwrite(f.v.data(), sizeof(double), f.v.size(), fp);
  std::fclose(fp);
}

RealField read_field(const std::string& path, double* tau_out, uint64_t* seed_out) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("read_field: cannot open " + path);
  Header h;
  if (std::fread(&h, sizeof(h), 1, fp) != 1 || h.magic != kMagic || h.version != kVersion) {
    std::fclose(fp);
    throw std::runtime_error("read_field: bad header in " + path);
  }
  RealField f(static_cast<int>(h.n), h.L);
  size_t want = f.v.size();
  size_t got = std::fread(f.v.data(), sizeof(double), want, fp);
  std::fclose(fp);
  if (got != want) throw std::runtime_error("read_field: truncated file " + path);
  if (tau_out) *tau_out = h.tau;
  if (seed_out) *seed_out = h.seed;
  return f;
}

void write_field_csv(const std::string& path, const RealField& f) {
  FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("write_field_csv: cannot open " + path);
  std::fprintf(fp, "ix,iy,value\n");
  for (int iy = 0; iy < f.N; ++iy)
    for (int ix = 0; ix < f.N; ++ix)
      std::fprintf(fp, "%d,%d,%.17g\n", ix, iy, f.at(ix, iy));
  std::fclose(fp);
}

}  // namespace sbe
