#include "a3gnn/design_space.hpp"

#include <algorithm>

namespace a3gnn {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::sequential: return "sequential";
    case Mode::pmode1: return "pmode1";
    case Mode::pmode2: return "pmode2";
  }
  return "?";
}

std::string to_string(Device d) { return d == Device::cpu ? "cpu" : "gpu"; }

Mode mode_from_string(const std::string& s) {
  if (s == "sequential") return Mode::sequential;
  if (s == "pmode1") return Mode::pmode1;
  if (s == "pmode2") return Mode::pmode2;
  throw ParameterError("unknown mode: " + s);
}

Device device_from_string(const std::string& s) {
  if (s == "cpu") return Device::cpu;
  if (s == "gpu") return Device::gpu;
  throw ParameterError("unknown device: " + s);
}

DesignSpace DesignSpace::defaults(std::uint32_t max_partitions, std::uint64_t max_cache_bytes) {
  DesignSpace s;
  s.batch_sizes = {64, 128, 256, 512, 1024};
  for (std::uint32_t p = 1; p <= max_partitions; p *= 2) s.partitions.push_back(p);
  s.bias_rates = {1, 2, 4, 8, 16, 32};
  s.sampling_devices = {Device::cpu, Device::gpu};
  s.workers = {1, 2, 4, 8};
  s.cache_volumes = {0, max_cache_bytes / 4, max_cache_bytes / 2, max_cache_bytes};
  s.modes = {Mode::sequential, Mode::pmode1, Mode::pmode2};
  return s;
}

namespace {

template <typename T>
void check_grid(const std::vector<T>& v, const char* name) {
  if (v.empty()) throw ParameterError(std::string("design space: empty grid for ") + name);
  if (!std::is_sorted(v.begin(), v.end())) {
    throw ParameterError(std::string("design space: grid not sorted for ") + name);
  }
}

}  // namespace

void DesignSpace::validate() const {
  check_grid(batch_sizes, "batch_size");
  if (batch_sizes.front() < 64 || batch_sizes.back() > 1024) {
    throw ParameterError("design space: batch sizes must lie in [64, 1024]");
  }
  check_grid(partitions, "partitions");
  if (partitions.front() < 1) throw ParameterError("design space: partitions must be >= 1");
  check_grid(bias_rates, "bias_rate");
  if (bias_rates.front() < 1.0) throw ParameterError("design space: bias rate must be >= 1");
  if (sampling_devices.empty()) throw ParameterError("design space: empty device grid");
  check_grid(workers, "workers");
  if (workers.front() < 1) throw ParameterError("design space: workers must be >= 1");
  check_grid(cache_volumes, "cache_volume");
  if (modes.empty()) throw ParameterError("design space: empty mode grid");
}

std::size_t DesignSpace::level_count(std::size_t knob) const {
  switch (knob) {
    case 0: return batch_sizes.size();
    case 1: return partitions.size();
    case 2: return bias_rates.size();
    case 3: return sampling_devices.size();
    case 4: return workers.size();
    case 5: return cache_volumes.size();
    case 6: return modes.size();
    default: throw ParameterError("design space: bad knob index");
  }
}

std::uint64_t DesignSpace::total_points() const {
  std::uint64_t n = 1;
  for (std::size_t k = 0; k < kNumKnobs; ++k) n *= level_count(k);
  return n;
}

void check_point(const DesignSpace& space, const DesignPoint& p) {
  for (std::size_t k = 0; k < kNumKnobs; ++k) {
    if (p.idx[k] >= space.level_count(k)) {
      throw ParameterError("design point: knob index out of range");
    }
  }
}

ResolvedDesign resolve(const DesignSpace& space, const DesignPoint& p) {
  check_point(space, p);
  ResolvedDesign d;
  d.batch_size = space.batch_sizes[p.idx[0]];
  d.partitions = space.partitions[p.idx[1]];
  d.bias_rate = space.bias_rates[p.idx[2]];
  d.sampling_device = space.sampling_devices[p.idx[3]];
  d.workers = space.workers[p.idx[4]];
  d.cache_volume = space.cache_volumes[p.idx[5]];
  d.mode = space.modes[p.idx[6]];
  return d;
}

}  // namespace a3gnn
