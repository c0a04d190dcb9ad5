#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "minsurf/evolution.hpp"

namespace minsurf {

/// Knobs of a `run` invocation. Unset fields fall back to scenario or
/// built-in defaults; the CLI overlays its flags on top of a config file.
struct RunConfig {
  std::optional<std::string> scenario;
  std::optional<std::array<int, 3>> divisions;
  std::optional<double> epsilon;
  std::optional<int> max_steps;
  std::optional<double> alpha;
  std::optional<double> k_max;
  std::optional<double> c_j;
  std::optional<int> h_power;
  std::optional<int> ring_count;
  std::optional<ReinitMode> reinit;
  std::optional<NormMode> norm;
  std::optional<std::string> out_dir;
  std::optional<int> cadence;
};

/// `key = value` lines, '#' starts a comment, blank lines ignored.
/// Unknown keys or malformed values raise UsageError naming the line.
void load_config_file(const std::filesystem::path& path, RunConfig& into);

/// Parses "nx,ny,nz" (or a single count applied to all axes).
std::array<int, 3> parse_divisions(const std::string& text);

ReinitMode parse_reinit_mode(const std::string& text);
NormMode parse_norm_mode(const std::string& text);

/// Applies the optional knobs onto an EvolutionConfig.
void overlay(const RunConfig& rc, EvolutionConfig& cfg);

}  // namespace minsurf
