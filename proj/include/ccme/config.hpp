#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccme/errors.hpp"
#include "ccme/harness.hpp"

namespace ccme {

// Config file grammar:
//
//   # comment
//   key = value            top-level keys mirror the CLI flags without dashes
//   [synth]                optional synthetic sequence description
//   width = 128
//   height = 96
//   frames = 30
//   noise = 2
//   background = noise base=110 amp=30 cell=16 detail=2
//   layer = checker rect=16,16,32,32 motion=2,0;2,1 jitter=0 grain=0 base=128 amp=60 cell=4 detail=0
//
// Repeated top-level keys: the last one wins. `layer` lines accumulate in order.
struct ConfigFile {
  std::map<std::string, std::string> values;
  std::optional<SynthSpec> synth;
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline int to_int(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + std::string(what) + ": '" + s + "'");
  }
}

inline double to_double(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + std::string(what) + ": '" + s + "'");
  }
}

inline bool to_bool(const std::string& s, std::string_view what) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("bad boolean for " + std::string(what) + ": '" + s + "'");
}

inline TextureKind parse_texture_kind(const std::string& s) {
  if (s == "flat") return TextureKind::flat;
  if (s == "noise") return TextureKind::noise;
  if (s == "checker") return TextureKind::checker;
  throw ConfigError("unknown texture kind '" + s + "'");
}

inline MotionVector parse_mv(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ConfigError("motion vector must be dx,dy: '" + s + "'");
  return {to_int(parts[0], "motion dx"), to_int(parts[1], "motion dy")};
}

// "<kind> key=value ..." applied to a texture and, for layers, placement fields.
inline void parse_texture_line(const std::string& line, Texture& tex, SynthLayer* layer) {
  std::istringstream in(line);
  std::string kind;
  in >> kind;
  tex.kind = parse_texture_kind(kind);
  for (std::string tok; in >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "base") tex.base = to_int(val, key);
    else if (key == "amp") tex.amplitude = to_int(val, key);
    else if (key == "cell") tex.cell = to_int(val, key);
    else if (key == "detail") tex.detail = to_int(val, key);
    else if (layer && key == "rect") {
      const auto p = split(val, ',');
      if (p.size() != 4) throw ConfigError("rect must be x,y,w,h");
      layer->region = {to_int(p[0], "rect"), to_int(p[1], "rect"), to_int(p[2], "rect"), to_int(p[3], "rect")};
    } else if (layer && key == "motion") {
      for (const auto& mv : split(val, ';')) layer->motion.push_back(parse_mv(mv));
    } else if (layer && key == "jitter") layer->jitter = to_int(val, key);
    else if (layer && key == "grain") layer->grain = to_int(val, key);
    else throw ConfigError("unknown texture/layer key '" + key + "'");
  }
}

}  // namespace detail

inline ConfigFile parse_config(std::string_view text) {
  ConfigFile cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  int lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "synth") throw ConfigError("unknown section [" + section + "]");
      if (!cfg.synth) {
        cfg.synth = SynthSpec{};
        cfg.synth->layers.clear();
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::normalize_key(detail::trim(line.substr(0, eq)));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) {
      cfg.values[key] = value;
      continue;
    }
    SynthSpec& s = *cfg.synth;
    if (key == "width") s.width = detail::to_int(value, key);
    else if (key == "height") s.height = detail::to_int(value, key);
    else if (key == "frames") s.frames = detail::to_int(value, key);
    else if (key == "noise") s.noise_amplitude = detail::to_int(value, key);
    else if (key == "seed") s.seed = static_cast<std::uint64_t>(detail::to_int(value, key));
    else if (key == "background") detail::parse_texture_line(value, s.background, nullptr);
    else if (key == "layer") {
      SynthLayer layer;
      detail::parse_texture_line(value, layer.texture, &layer);
      s.layers.push_back(layer);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown [synth] key '" + key + "'");
    }
  }
  return cfg;
}

inline ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

inline std::vector<double> parse_scales(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : detail::split(s, ',')) out.push_back(detail::to_double(p, "scales"));
  return out;
}

inline std::vector<Method> parse_methods(const std::string& s) {
  std::vector<Method> out;
  for (const auto& p : detail::split(s, ',')) out.push_back(parse_method(p));
  return out;
}

inline void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& v) {
  const std::string key = detail::normalize_key(raw_key);
  if (key == "input") c.input = v;
  else if (key == "format") c.format = parse_format(v);
  else if (key == "width") c.width = detail::to_int(v, key);
  else if (key == "height") c.height = detail::to_int(v, key);
  else if (key == "frames") c.frames = detail::to_int(v, key);
  else if (key == "qp") {
    const int qp = detail::to_int(v, key);
    const CostParams fresh = CostParams::for_qp(qp);
    c.params.qp = fresh.qp;
    c.params.lambda_motion = fresh.lambda_motion;
  } else if (key == "th1") c.params.th1 = detail::to_int(v, key);
  else if (key == "th2") c.params.th2 = detail::to_int(v, key);
  else if (key == "class_eps") c.params.class_eps = detail::to_double(v, key);
  else if (key == "pac_th") c.params.pac_threshold = detail::to_int(v, key);
  else if (key == "method") c.method = parse_method(v);
  else if (key == "methods") c.methods = parse_methods(v);
  else if (key == "scale") c.budget_scale = detail::to_double(v, key);
  else if (key == "scales") c.scales = parse_scales(v);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(detail::to_int(v, key));
  else if (key == "out") c.out_dir = v;
  else if (key == "strict") c.strict = detail::to_bool(v, key);
  else throw ConfigError("unknown config key '" + raw_key + "'");
}

inline void apply_config(RunConfig& c, const ConfigFile& file) {
  // qp first
  if (auto it = file.values.find("qp"); it != file.values.end()) apply_setting(c, it->first, it->second);
  for (const auto& [k, v] : file.values) {
    if (k != "qp") apply_setting(c, k, v);
  }
  if (file.synth) {
    c.synth = file.synth;
    c.format = InputFormat::synth;
  }
}

}  // namespace ccme
