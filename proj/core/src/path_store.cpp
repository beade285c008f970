#include "symito/path_store.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace symito {
namespace {

constexpr char kMagic[8] = {'S', 'Y', 'M', 'I', 'T', 'O', 'P', 'S'};

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void get(std::ifstream& in, T* v) {
  in.read(reinterpret_cast<char*>(v), sizeof *v);
  if (!in) throw std::runtime_error("path store: truncated file");
}

}  // namespace

void store_paths(std::span<const SamplePath> paths, const std::string& dir,
                 const ProcessSpec* spec_echo) {
  std::filesystem::create_directories(dir);

  nlohmann::json manifest;
  manifest["format"] = "symito-path-store";
  manifest["version"] = kPathStoreVersion;
  manifest["count"] = paths.size();
  if (!paths.empty()) {
    manifest["dim"] = paths[0].dim;
    manifest["dt"] = paths[0].dt;
    manifest["steps"] = paths[0].steps();
    manifest["horizon"] = paths[0].horizon();
    manifest["file"] = "paths.bin";
  }
  if (spec_echo) {
    nlohmann::json& e = manifest["spec"];
    e["kind"] = static_cast<int>(spec_echo->kind);
    e["sigma2"] = spec_echo->sigma2;
    e["alpha"] = spec_echo->alpha;
    e["scale"] = spec_echo->scale;
    e["delta"] = spec_echo->delta;
    e["rate"] = spec_echo->rate;
    e["a11"] = spec_echo->a11;
    e["a12"] = spec_echo->a12;
    e["a22"] = spec_echo->a22;
    e["x0"] = spec_echo->x0;
    e["y0"] = spec_echo->y0;
  }
  std::ofstream mf(dir + "/store_manifest.json");
  mf << manifest.dump(2) << "\n";

  if (paths.empty()) return;

  std::ofstream out(dir + "/paths.bin", std::ios::binary);
  if (!out) throw std::runtime_error("path store: cannot write " + dir);
  out.write(kMagic, sizeof kMagic);
  put(out, kPathStoreVersion);
  put(out, static_cast<std::uint32_t>(paths[0].dim));
  put(out, paths[0].dt);
  put(out, static_cast<std::uint64_t>(paths.size()));
  for (const SamplePath& p : paths) {
    put(out, p.seed);
    put(out, static_cast<std::uint64_t>(p.steps()));
    put(out, static_cast<std::uint8_t>(p.binning_warning ? 1 : 0));
    put(out, static_cast<std::uint64_t>(p.jumps.size()));
    out.write(reinterpret_cast<const char*>(p.values.data()),
              static_cast<std::streamsize>(p.values.size() * sizeof(double)));
    out.write(
        reinterpret_cast<const char*>(p.cont_increments.data()),
        static_cast<std::streamsize>(p.cont_increments.size() * sizeof(double)));
    for (const JumpRecord& j : p.jumps) {
      put(out, j.index);
      put(out, j.left[0]);
      put(out, j.left[1]);
      put(out, j.size[0]);
      put(out, j.size[1]);
    }
  }
}

std::vector<SamplePath> load_paths(const std::string& dir) {
  std::ifstream mf(dir + "/store_manifest.json");
  if (!mf) throw std::runtime_error("path store: missing manifest in " + dir);
  nlohmann::json manifest;
  mf >> manifest;
  if (manifest.value("version", 0u) != kPathStoreVersion)
    throw std::runtime_error("path store: format version mismatch");
  if (manifest.value("count", 0u) == 0) return {};

  std::ifstream in(dir + "/paths.bin", std::ios::binary);
  if (!in) throw std::runtime_error("path store: missing paths.bin in " + dir);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("path store: bad magic");
  std::uint32_t version = 0;
  get(in, &version);
  if (version != kPathStoreVersion)
    throw std::runtime_error("path store: format version mismatch");
  std::uint32_t dim = 0;
  double dt = 0.0;
  std::uint64_t count = 0;
  get(in, &dim);
  get(in, &dt);
  get(in, &count);

  std::vector<SamplePath> paths(count);
  for (SamplePath& p : paths) {
    p.dim = static_cast<int>(dim);
    p.dt = dt;
    std::uint64_t steps = 0, n_jumps = 0;
    std::uint8_t warn = 0;
    get(in, &p.seed);
    get(in, &steps);
    get(in, &warn);
    get(in, &n_jumps);
    p.binning_warning = warn != 0;
    p.values.resize((steps + 1) * dim);
    p.cont_increments.resize(steps * dim);
    in.read(reinterpret_cast<char*>(p.values.data()),
            static_cast<std::streamsize>(p.values.size() * sizeof(double)));
    in.read(
        reinterpret_cast<char*>(p.cont_increments.data()),
        static_cast<std::streamsize>(p.cont_increments.size() * sizeof(double)));
    if (!in) throw std::runtime_error("path store: truncated file");
    p.jumps.resize(n_jumps);
    for (JumpRecord& j : p.jumps) {
      get(in, &j.index);
      get(in, &j.left[0]);
      get(in, &j.left[1]);
      get(in, &j.size[0]);
      get(in, &j.size[1]);
    }
  }
  return paths;
}

void export_paths_csv(std::span<const SamplePath> paths,
                      const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("path store: cannot write " + file);
  out << "# symito paths csv v1\n";
  out << "path,step,time,value,value2,cont_increment,cont_increment2,jump,"
         "jump2\n";
  char buf[512];
  for (std::size_t pi = 0; pi < paths.size(); ++pi) {
    const SamplePath& p = paths[pi];
    for (std::size_t i = 0; i <= p.steps(); ++i) {
      const double c1 = i < p.steps() ? p.increment(i, 0) : 0.0;
      const double c2 =
          (p.dim == 2 && i < p.steps()) ? p.increment(i, 1) : 0.0;
      std::snprintf(buf, sizeof buf,
                    "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", pi,
                    i, p.time_at(i), p.value(i, 0),
                    p.dim == 2 ? p.value(i, 1) : 0.0, c1, c2, p.jump_at(i, 0),
                    p.dim == 2 ? p.jump_at(i, 1) : 0.0);
      out << buf;
    }
  }
}

}  // namespace symito
