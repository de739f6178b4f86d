#include "mvn/config.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "mvn/errors.hpp"

namespace mvn {

namespace {

struct KeyDefault {
  const char* key;
  const char* value;
};

// Single registry of every recognized key with its desk-scale default.
// configs/full.cfg in the repo carries the full-scale settings.
constexpr std::array<KeyDefault, 48> kKeys{{
    {"seed", "1"},
    {"jobs", "1"},
    {"experiment", "simple"},  // simple | room
    {"bank.speech_clips", "40"},
    {"bank.noise_clips", "40"},
    {"bank.seed", "7"},
    {"data.mixtures", "10"},
    {"data.channels", "4"},
    {"data.scheme", "training_grid"},  // training_grid | decreasing | increasing
    {"data.per_frame_shuffle", "auto"},  // auto: on for simple, off for room
    {"data.write_wav", "off"},
    {"data.manifest", ""},  // train from a fixed manifest instead of resampling
    {"data.speech_dir", ""},
    {"data.noise_dir", ""},
    {"stft.window", "1024"},
    {"stft.hop", "512"},
    {"stft.window_kind", "hann"},  // hann | rect
    {"model.kind", "mvn"},  // mvn | avg_input | avg_output | max_output
    {"model.cell", "gru"},  // gru | vanilla
    {"model.hidden", "32"},
    {"model.first_channel", "prev_frame_last"},  // prev_frame_last | prev_frame_first
    {"train.epochs", "10"},
    {"train.batches_per_epoch", "25"},
    {"train.batch_size", "8"},
    {"train.channels", "4"},
    {"train.val_mixtures", "100"},
    {"train.fixed_epoch_data", "off"},
    {"train.lr_initial", "0.001"},
    {"train.lr_decay_factor", "0.25"},
    {"train.lr_decay_period", "20"},
    {"train.resume", ""},
    {"room.width", "20"},
    {"room.depth", "20"},
    {"room.absorption", "0.1"},
    {"room.ism_order", "4"},
    {"room.grid", "10"},
    {"room.margin", "0.5"},
    {"room.path_steps", "16"},
    {"room.path_jitter", "0.25"},
    {"room.diffuse_db", "-20"},
    {"room.mics", "30"},
    {"room.scenes", "16"},
    {"room.scenes_dir", ""},
    {"room.cache_render", "off"},
    {"eval.k_values", "2,4,8,16,30"},
    {"eval.runs", "3"},
    {"eval.mixtures_per_row", "32"},
    {"eval.schemes", "decreasing,increasing"},
}};

bool known_key(const std::string& key) {
  for (const auto& k : kKeys)
    if (key == k.key) return true;
  return false;
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  for (const auto& k : kKeys) c.kv_[k.key] = k.value;
  return c;
}

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
  RunConfig c = defaults();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool versioned = false;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments and surrounding whitespace
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + " line " + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "config_version") {
      if (value != "1")
        throw ConfigError(origin + " line " + std::to_string(line_no) +
                          ": unsupported config_version " + value);
      versioned = true;
      continue;
    }
    if (!known_key(key))
      throw ConfigError(origin + " line " + std::to_string(line_no) + ": unknown key '" +
                        key + "'");
    c.kv_[key] = value;
  }
  if (!versioned) throw ConfigError(origin + ": missing config_version=1 line");
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path + ": cannot open config");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_text(ss.str(), path);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
  kv_[key] = value;
}

bool RunConfig::has(const std::string& key) const {
  auto it = kv_.find(key);
  return it != kv_.end() && !it->second.empty();
}

const std::string& RunConfig::str(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("unregistered config key '" + key + "'");
  return it->second;
}

int64_t RunConfig::i64(const std::string& key) const {
  try {
    size_t pos = 0;
    int64_t v = std::stoll(str(key), &pos);
    if (pos != str(key).size()) throw std::invalid_argument("");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + str(key) + "'");
  }
}

double RunConfig::dbl(const std::string& key) const {
  try {
    size_t pos = 0;
    double v = std::stod(str(key), &pos);
    if (pos != str(key).size()) throw std::invalid_argument("");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + str(key) + "'");
  }
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& v = str(key);
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected on/off, got '" + v + "'");
}

std::vector<int> RunConfig::int_list(const std::string& key) const {
  std::vector<int> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': bad integer '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<std::string> RunConfig::str_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(str(key));
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string RunConfig::serialize() const {
  std::ostringstream s;
  s << "config_version=1\n";
  for (const auto& [k, v] : kv_) s << k << "=" << v << "\n";
  return s.str();
}

}  // namespace mvn
