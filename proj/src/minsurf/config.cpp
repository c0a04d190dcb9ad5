#include "minsurf/config.hpp"

#include <charconv>
#include <fstream>
#include <string_view>

namespace minsurf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view text, int line) {
  double value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("config line " + std::to_string(line) +
                     ": expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text, int line) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw UsageError("config line " + std::to_string(line) +
                     ": expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::array<int, 3> parse_divisions(const std::string& text) {
  std::array<int, 3> out{};
  int count = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view part =
        trim(std::string_view(text).substr(start, comma == std::string::npos
                                                      ? std::string::npos
                                                      : comma - start));
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc{} || ptr != part.data() + part.size() || value < 1) {
      throw UsageError("divisions: expected positive integers, got '" + text +
                       "'");
    }
    if (count == 3) throw UsageError("divisions: too many values in '" + text + "'");
    out[count++] = value;
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (count == 1) return {out[0], out[0], out[0]};
  if (count != 3) {
    throw UsageError("divisions: expected one or three values in '" + text + "'");
  }
  return out;
}

ReinitMode parse_reinit_mode(const std::string& text) {
  if (text == "triangle") return ReinitMode::kTriangle;
  if (text == "vertex") return ReinitMode::kVertex;
  throw UsageError("reinit: expected 'triangle' or 'vertex', got '" + text +
                   "'");
}

NormMode parse_norm_mode(const std::string& text) {
  if (text == "nodal") return NormMode::kNodal;
  if (text == "l2") return NormMode::kL2;
  throw UsageError("norm: expected 'nodal' or 'l2', got '" + text + "'");
}

void load_config_file(const std::filesystem::path& path, RunConfig& into) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("config: cannot open '" + path.string() + "'");
  }
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text(raw);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;

    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line) +
                       ": expected 'key = value', got '" + raw + "'");
    }
    const std::string key{trim(text.substr(0, eq))};
    const std::string value{trim(text.substr(eq + 1))};
    if (key.empty() || value.empty()) {
      throw UsageError("config line " + std::to_string(line) +
                       ": empty key or value in '" + raw + "'");
    }

    if (key == "scenario") {
      into.scenario = value;
    } else if (key == "divisions") {
      try {
        into.divisions = parse_divisions(value);
      } catch (const UsageError& e) {
        throw UsageError("config line " + std::to_string(line) + ": " +
                         e.what());
      }
    } else if (key == "epsilon") {
      into.epsilon = parse_double(value, line);
    } else if (key == "max_steps") {
      into.max_steps = parse_int(value, line);
    } else if (key == "alpha") {
      into.alpha = parse_double(value, line);
    } else if (key == "k_max") {
      into.k_max = parse_double(value, line);
    } else if (key == "cj") {
      into.c_j = parse_double(value, line);
    } else if (key == "h_power") {
      into.h_power = parse_int(value, line);
    } else if (key == "ring_count") {
      into.ring_count = parse_int(value, line);
    } else if (key == "reinit") {
      try {
        into.reinit = parse_reinit_mode(value);
      } catch (const UsageError& e) {
        throw UsageError("config line " + std::to_string(line) + ": " +
                         e.what());
      }
    } else if (key == "norm") {
      try {
        into.norm = parse_norm_mode(value);
      } catch (const UsageError& e) {
        throw UsageError("config line " + std::to_string(line) + ": " +
                         e.what());
      }
    } else if (key == "out") {
      into.out_dir = value;
    } else if (key == "cadence") {
      into.cadence = parse_int(value, line);
    } else {
      throw UsageError("config line " + std::to_string(line) +
                       ": unknown key '" + key + "'");
    }
  }
}

void overlay(const RunConfig& rc, EvolutionConfig& cfg) {
  if (rc.epsilon) cfg.epsilon = *rc.epsilon;
  if (rc.max_steps) cfg.max_steps = *rc.max_steps;
  if (rc.alpha) cfg.alpha = *rc.alpha;
  if (rc.k_max) cfg.k_max = *rc.k_max;
  if (rc.c_j) cfg.c_j = *rc.c_j;
  if (rc.h_power) cfg.h_power = *rc.h_power;
  if (rc.ring_count) cfg.ring_count = *rc.ring_count;
  if (rc.reinit) cfg.reinit_mode = *rc.reinit;
  if (rc.norm) cfg.norm_mode = *rc.norm;
}

}  // namespace minsurf
