#pragma once

// The configuration design space: seven quantized knobs and the metrics
// triple they are tuned against.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "a3gnn/common.hpp"

namespace a3gnn {

enum class Mode : std::uint8_t { sequential = 0, pmode1 = 1, pmode2 = 2 };
enum class Device : std::uint8_t { cpu = 0, gpu = 1 };

std::string to_string(Mode m);
std::string to_string(Device d);
Mode mode_from_string(const std::string& s);
Device device_from_string(const std::string& s);

// m = [thr, mem, acc]
struct Metrics {
  double throughput_eps = 0.0;
  double memory_bytes = 0.0;
  double accuracy = 0.0;
};

constexpr std::size_t kNumKnobs = 7;

// Knob order: batch, partitions, bias, device, workers, cache, mode.
struct DesignSpace {
  std::vector<std::uint32_t> batch_sizes;
  std::vector<std::uint32_t> partitions;
  std::vector<double> bias_rates;
  std::vector<Device> sampling_devices;
  std::vector<std::uint32_t> workers;
  std::vector<std::uint64_t> cache_volumes;
  std::vector<Mode> modes;

  static DesignSpace defaults(std::uint32_t max_partitions, std::uint64_t max_cache_bytes);

  // Non-empty sorted grids within the documented ranges; throws ParameterError.
  void validate() const;

  std::size_t level_count(std::size_t knob) const;
  std::uint64_t total_points() const;
};

struct DesignPoint {
  std::array<std::uint32_t, kNumKnobs> idx{};

  bool operator==(const DesignPoint&) const = default;
};

// Knob values at a point.
struct ResolvedDesign {
  std::uint32_t batch_size = 64;
  std::uint32_t partitions = 1;
  double bias_rate = 1.0;
  Device sampling_device = Device::cpu;
  std::uint32_t workers = 1;
  std::uint64_t cache_volume = 0;
  Mode mode = Mode::sequential;
};

ResolvedDesign resolve(const DesignSpace& space, const DesignPoint& p);

// Bounds-check a point against a space; throws ParameterError.
void check_point(const DesignSpace& space, const DesignPoint& p);

}  // namespace a3gnn
