#include "faraday/field_io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "faraday/errors.hpp"

namespace faraday {

namespace {

constexpr std::array<char, 16> kMagic = {'F', 'A', 'R', 'A', 'D', 'A', 'Y', 'F',
                                         ' ', 'v', '1', 0,   0,   0,   0,   0};

template <FieldKind K>
constexpr std::uint32_t kind_code() {
  return K == FieldKind::surface ? 0u : 1u;
}

struct Header {
  std::uint32_t kind = 0, ncomp = 0, n1 = 0, n2 = 0, nz = 0;
  double L1 = 0.0, L2 = 0.0, b = 0.0;
};

template <FieldKind K>
Field<K> allocate(const Header& h, const std::string& path) {
  if (h.kind != kind_code<K>()) throw ConfigError(path + ": field kind mismatch");
  if (h.ncomp < 1 || h.n1 < 2 || h.n2 < 2 || h.nz < 4 || h.n1 > 512 || h.n2 > 512 || h.nz > 257) {
    throw ConfigError(path + ": invalid field dimensions");
  }
  auto grid = std::make_shared<const Grid>(h.L1, h.L2, h.b, static_cast<int>(h.n1),
                                           static_cast<int>(h.n2), static_cast<int>(h.nz));
  return Field<K>(grid, static_cast<int>(h.ncomp));
}

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ConfigError(path + ": truncated field file");
  return value;
}

int index_of(int m, int n) { return m < 0 ? m + n : m; }

}  // namespace

template <FieldKind K>
void write_binary(const Field<K>& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const Grid& g = f.grid();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kind_code<K>());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.components()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n1()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n2()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.nz()));
  put(out, g.L1());
  put(out, g.L2());
  put(out, g.b());
  for (int c = 0; c < f.components(); ++c) {
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      put(out, f.coeffs(c)(i).real());
      put(out, f.coeffs(c)(i).imag());
    }
  }
  if (!out) throw ConfigError("write failed for " + path);
}

template <FieldKind K>
Field<K> read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::array<char, 16> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError(path + ": not a FARADAYF v1 file");
  Header h;
  h.kind = get<std::uint32_t>(in, path);
  h.ncomp = get<std::uint32_t>(in, path);
  h.n1 = get<std::uint32_t>(in, path);
  h.n2 = get<std::uint32_t>(in, path);
  h.nz = get<std::uint32_t>(in, path);
  h.L1 = get<double>(in, path);
  h.L2 = get<double>(in, path);
  h.b = get<double>(in, path);
  Field<K> f = allocate<K>(h, path);
  for (int c = 0; c < f.components(); ++c) {
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double re = get<double>(in, path);
      const double im = get<double>(in, path);
      f.coeffs(c)(i) = cd(re, im);
    }
  }
  return f;
}

template <FieldKind K>
void write_csv(const Field<K>& f, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  const Grid& g = f.grid();
  std::fprintf(out, "# kind=%s\n# ncomp=%d\n# n1=%d\n# n2=%d\n# nz=%d\n",
               K == FieldKind::surface ? "surface" : "volume", f.components(), g.n1(), g.n2(),
               g.nz());
  std::fprintf(out, "# L1=%.17g\n# L2=%.17g\n# b=%.17g\n", g.L1(), g.L2(), g.b());
  for (int c = 0; c < f.components(); ++c) {
    std::fprintf(out, "# component=%d\nm1,m2,z_index,re,im\n", c);
    for (int l = 0; l < f.levels(); ++l) {
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        for (int i2 = 0; i2 < g.n2(); ++i2) {
          const cd v = f.at(c, l, i1, i2);
          std::fprintf(out, "%d,%d,%d,%.17g,%.17g\n", g.m1(i1), g.m2(i2), l, v.real(), v.imag());
        }
      }
    }
  }
  const bool ok = std::fclose(out) == 0;
  if (!ok) throw ConfigError("write failed for " + path);
}

template <FieldKind K>
Field<K> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Header h;
  std::string line;
  std::vector<std::string> rows;
  std::vector<int> row_component;
  int current = -1;
  bool have_kind = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "kind") {
        h.kind = value == "surface" ? 0u : 1u;
        have_kind = true;
      } else if (key == "ncomp") {
        h.ncomp = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "n1") {
        h.n1 = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "n2") {
        h.n2 = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "nz") {
        h.nz = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "L1") {
        h.L1 = std::stod(value);
      } else if (key == "L2") {
        h.L2 = std::stod(value);
      } else if (key == "b") {
        h.b = std::stod(value);
      } else if (key == "component") {
        current = std::stoi(value);
      }
      continue;
    }
    if (line.rfind("m1,", 0) == 0) continue;
    rows.push_back(line);
    row_component.push_back(current);
  }
  if (!have_kind) throw ConfigError(path + ": missing kind header");
  Field<K> f = allocate<K>(h, path);
  const Grid& g = f.grid();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int m1 = 0, m2 = 0, level = 0;
    double re = 0.0, im = 0.0;
    char extra = 0;
    if (std::sscanf(rows[r].c_str(), "%d,%d,%d,%lf,%lf%c", &m1, &m2, &level, &re, &im, &extra) !=
        5) {
      throw ConfigError(path + ": malformed row '" + rows[r] + "'");
    }
    const int c = row_component[r];
    if (c < 0 || c >= f.components() || level < 0 || level >= f.levels() || m1 < -g.n1() / 2 ||
        m1 >= g.n1() / 2 || m2 < -g.n2() / 2 || m2 >= g.n2() / 2) {
      throw ConfigError(path + ": row out of range '" + rows[r] + "'");
    }
    f.at(c, level, index_of(m1, g.n1()), index_of(m2, g.n2())) = cd(re, im);
  }
  return f;
}

template void write_binary(const SurfaceField&, const std::string&);
template void write_binary(const VolumeField&, const std::string&);
template SurfaceField read_binary<FieldKind::surface>(const std::string&);
template VolumeField read_binary<FieldKind::volume>(const std::string&);
template void write_csv(const SurfaceField&, const std::string&);
template void write_csv(const VolumeField&, const std::string&);
template SurfaceField read_csv<FieldKind::surface>(const std::string&);
template VolumeField read_csv<FieldKind::volume>(const std::string&);

}  // namespace faraday
