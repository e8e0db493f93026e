#include "mespot/config.hpp"

#include <fmt/format.h>

#include <functional>

#include "mespot/error.hpp"
#include "mespot/fileutil.hpp"

namespace mespot {
namespace {

struct Key {
  std::string name;
  std::function<std::string(const ToolkitConfig&)> get;
  std::function<bool(ToolkitConfig&, std::string_view)> set;  // false on bad value
};

template <typename T, typename Member>
Key int_key(std::string name, Member member) {
  return {std::move(name), [member](const ToolkitConfig& c) { return fmt::format("{}", member(const_cast<ToolkitConfig&>(c))); },
          [member](ToolkitConfig& c, std::string_view v) {
            const auto parsed = parse_integer(v);
            if (!parsed) return false;
            member(c) = static_cast<T>(*parsed);
            return true;
          }};
}

template <typename Member>
Key real_key(std::string name, Member member) {
  return {std::move(name), [member](const ToolkitConfig& c) { return fmt::format("{}", member(const_cast<ToolkitConfig&>(c))); },
          [member](ToolkitConfig& c, std::string_view v) {
            const auto parsed = parse_real(v);
            if (!parsed) return false;
            member(c) = *parsed;
            return true;
          }};
}

template <typename Member>
Key bool_key(std::string name, Member member) {
  return {std::move(name),
          [member](const ToolkitConfig& c) { return std::string(member(const_cast<ToolkitConfig&>(c)) ? "true" : "false"); },
          [member](ToolkitConfig& c, std::string_view v) {
            if (v == "true" || v == "1" || v == "yes") {
              member(c) = true;
            } else if (v == "false" || v == "0" || v == "no") {
              member(c) = false;
            } else {
              return false;
            }
            return true;
          }};
}

#define MEMBER(path) [](ToolkitConfig& c) -> auto& { return c.path; }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(int_key<int>("spotter.window_length", MEMBER(spotter.window_length)));
    k.push_back(int_key<int>("spotter.half_window", MEMBER(spotter.half_window)));
    k.push_back(int_key<int>("spotter.lbp_grid", MEMBER(spotter.lbp_grid)));
    k.push_back(int_key<int>("spotter.lbp_neighbors", MEMBER(spotter.lbp_neighbors)));
    k.push_back(int_key<int>("spotter.lbp_radius", MEMBER(spotter.lbp_radius)));
    k.push_back(real_key("spotter.peak_fraction", MEMBER(spotter.peak_fraction)));
    k.push_back(int_key<int>("spotter.mdmd_offset", MEMBER(spotter.mdmd_offset)));
    k.push_back(int_key<int>("spotter.mdmd_bins", MEMBER(spotter.mdmd_bins)));
    k.push_back(int_key<int>("spotter.mdmd_search_radius", MEMBER(spotter.mdmd_search_radius)));
    k.push_back(int_key<int>("spotter.landmark_window", MEMBER(spotter.landmark_window)));
    k.push_back(bool_key("spotter.apply_nms", MEMBER(spotter.apply_nms)));

    k.push_back({"stfeatures.kind", [](const ToolkitConfig& c) { return std::string(to_string(c.features.kind)); },
                 [](ToolkitConfig& c, std::string_view v) {
                   c.features.kind = parse_st_feature_kind(v);
                   return true;
                 }});
    k.push_back(int_key<int>("stfeatures.blocks_x", MEMBER(features.blocks_x)));
    k.push_back(int_key<int>("stfeatures.blocks_y", MEMBER(features.blocks_y)));
    k.push_back(int_key<int>("stfeatures.blocks_t", MEMBER(features.blocks_t)));
    k.push_back(real_key("stfeatures.overlap", MEMBER(features.overlap)));
    k.push_back(int_key<int>("stfeatures.bins", MEMBER(features.bins)));
    k.push_back(int_key<int>("stfeatures.window_length", MEMBER(features.window_length)));
    k.push_back({"stfeatures.scales",
                 [](const ToolkitConfig& c) { return fmt::format("{}", fmt::join(c.features.scales, " ")); },
                 [](ToolkitConfig& c, std::string_view v) {
                   std::vector<double> scales;
                   for (std::string_view rest = trim(v); !rest.empty();) {
                     const auto pos = rest.find_first_of(" \t");
                     const auto tok = rest.substr(0, pos);
                     const auto s = parse_real(tok);
                     if (!s) return false;
                     scales.push_back(*s);
                     rest = pos == std::string_view::npos ? std::string_view{} : trim(rest.substr(pos));
                   }
                   if (scales.empty()) return false;
                   c.features.scales = std::move(scales);
                   return true;
                 }});

    k.push_back(real_key("train.lambda", MEMBER(train.lambda)));
    k.push_back(int_key<int>("train.epochs", MEMBER(train.epochs)));
    k.push_back(real_key("train.initial_step", MEMBER(train.initial_step)));
    k.push_back(bool_key("train.balance_classes", MEMBER(train.balance_classes)));
    k.push_back(bool_key("train.standardize", MEMBER(train.standardize)));
    k.push_back(int_key<int>("train.negatives_per_positive", MEMBER(negatives_per_positive)));
    k.push_back(int_key<std::uint64_t>("train.seed", MEMBER(seed)));

    k.push_back(real_key("eval.epsilon", MEMBER(eval.epsilon)));
    k.push_back({"eval.criterion", [](const ToolkitConfig& c) { return std::string(to_string(c.eval.criterion)); },
                 [](ToolkitConfig& c, std::string_view v) {
                   c.eval.criterion = parse_criterion(v);
                   return true;
                 }});
    k.push_back(bool_key("eval.apex_mode", MEMBER(eval.apex_mode)));

    k.push_back(int_key<std::uint64_t>("synth.seed", MEMBER(synth.seed)));
    k.push_back(int_key<int>("synth.videos", MEMBER(synth.videos)));
    k.push_back(int_key<int>("synth.subjects", MEMBER(synth.subjects)));
    k.push_back(int_key<int>("synth.frames_per_video", MEMBER(synth.frames_per_video)));
    k.push_back(real_key("synth.fps", MEMBER(synth.fps)));
    k.push_back(int_key<int>("synth.mes_min", MEMBER(synth.mes_min)));
    k.push_back(int_key<int>("synth.mes_max", MEMBER(synth.mes_max)));
    k.push_back(int_key<int>("synth.me_length_min", MEMBER(synth.me_length_min)));
    k.push_back(int_key<int>("synth.me_length_max", MEMBER(synth.me_length_max)));
    k.push_back(int_key<int>("synth.separation", MEMBER(synth.separation)));
    k.push_back(real_key("synth.me_amplitude_min", MEMBER(synth.me_amplitude_min)));
    k.push_back(real_key("synth.me_amplitude_max", MEMBER(synth.me_amplitude_max)));
    k.push_back(real_key("synth.texture_amplitude", MEMBER(synth.texture_amplitude)));
    k.push_back(real_key("synth.noise_amplitude", MEMBER(synth.noise_amplitude)));
    k.push_back(real_key("synth.blink_rate", MEMBER(synth.distractors.blink)));
    k.push_back(real_key("synth.head_shift_rate", MEMBER(synth.distractors.head_shift)));
    k.push_back(real_key("synth.macro_expression_rate", MEMBER(synth.distractors.macro_expression)));
    k.push_back(int_key<int>("synth.width", MEMBER(synth.width)));
    k.push_back(int_key<int>("synth.height", MEMBER(synth.height)));
    return k;
  }();
  return table;
}

#undef MEMBER

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.name);
  return out;
}

std::string to_text(const ToolkitConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    const auto dot = k.name.find('.');
    const std::string sec = k.name.substr(0, dot);
    if (sec != section) {
      out += fmt::format("{}[{}]\n", section.empty() ? "" : "\n", sec);
      section = sec;
    }
    out += fmt::format("{} = {}\n", k.name.substr(dot + 1), k.get(cfg));
  }
  return out;
}

void set_config_value(ToolkitConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& k : keys()) {
    if (k.name == key) {
      if (!k.set(cfg, trim(value))) {
        fail(ErrorKind::Configuration, fmt::format("invalid value '{}' for {}", value, key));
      }
      return;
    }
  }
  fail(ErrorKind::Configuration, fmt::format("unknown configuration key '{}'", key));
}

void apply_override(ToolkitConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    fail(ErrorKind::Configuration, fmt::format("override '{}' is not key=value", assignment));
  }
  set_config_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void apply_config_text(ToolkitConfig& cfg, std::string_view text, std::string_view source) {
  std::string section;
  int line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Parse, fmt::format("{}:{}: malformed section", source, line_no));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Parse, fmt::format("{}:{}: expected key = value", source, line_no));
    }
    const std::string key = section.empty() ? std::string(trim(line.substr(0, eq)))
                                            : section + "." + std::string(trim(line.substr(0, eq)));
    try {
      set_config_value(cfg, key, trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.kind(), fmt::format("{}:{}: {}", source, line_no, e.detail()));
    }
  }
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  ToolkitConfig cfg;
  apply_config_text(cfg, read_text_file(path), path.string());
  return cfg;
}

}  // namespace mespot
