#include "sklab/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sklab::cfg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// section -> key -> value, in canonical (sorted) order.
std::map<std::string, std::map<std::string, std::string>> parse_sections(const std::string& text) {
    std::map<std::string, std::map<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        if (section.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        out[section][key] = trim(line.substr(eq + 1));
    }
    return out;
}

double to_double(const std::string& field, const std::string& v) {
    try {
        std::size_t pos;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config field '" + field + "': not a number: " + v);
    }
}

long to_long(const std::string& field, const std::string& v) {
    try {
        std::size_t pos;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config field '" + field + "': not an integer: " + v);
    }
}

bool to_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config field '" + field + "': not a boolean: " + v);
}

std::vector<double> to_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_double(field, trim(item)));
    return out;
}

}  // namespace

sim::ExperimentConfig parse_experiment_config(const std::string& text) {
    auto sections = parse_sections(text);
    sim::ExperimentConfig c;
    double csnr_db = 20.0, power = 1.0;
    bool have_noise_var = false;
    double noise_var = 1.0;

    for (const auto& [section, kv] : sections) {
        for (const auto& [key, value] : kv) {
            const std::string field = section + "." + key;
            if (section == "mapping") {
                if (key == "kind") c.mapping.kind = map::mapping_kind_from_string(value);
                else if (key == "source_dim") c.mapping.source_dim = static_cast<int>(to_long(field, value));
                else if (key == "channel_dim") c.mapping.channel_dim = static_cast<int>(to_long(field, value));
                else if (key == "alpha") c.mapping.alpha = to_double(field, value);
                else if (key == "a") c.mapping.a = to_double(field, value);
                else if (key == "delta") c.mapping.delta = to_double(field, value);
                else if (key == "beta") c.mapping.beta = to_double(field, value);
                else if (key == "truncation_radius") c.mapping.truncation_radius = to_double(field, value);
                else if (key == "stretch") {
                    if (value == "identity") c.mapping.stretch = map::StretchKind::identity;
                    else if (value == "power_law") c.mapping.stretch = map::StretchKind::power_law;
                    else throw std::invalid_argument("config field '" + field + "': unknown stretch: " + value);
                } else throw std::invalid_argument("config field '" + field + "': unknown key");
            } else if (section == "source") {
                if (key == "dimension") c.source.dimension = static_cast<int>(to_long(field, value));
                else if (key == "sigma_x") c.source.sigma_x = to_double(field, value);
                else if (key == "truncation_sigmas") c.source.truncation_sigmas = to_double(field, value);
                else throw std::invalid_argument("config field '" + field + "': unknown key");
            } else if (section == "channel") {
                if (key == "csnr_db") csnr_db = to_double(field, value);
                else if (key == "power") power = to_double(field, value);
                else if (key == "noise_var") { noise_var = to_double(field, value); have_noise_var = true; }
                else throw std::invalid_argument("config field '" + field + "': unknown key");
            } else if (section == "decoder") {
                if (key == "grid_points_per_rms") c.decoder.grid_points_per_rms = static_cast<int>(to_long(field, value));
                else if (key == "max_refine_iterations") c.decoder.max_refine_iterations = static_cast<int>(to_long(field, value));
                else if (key == "anomaly_threshold") c.decoder.anomaly_threshold = to_double(field, value);
                else if (key == "mmse_scale") c.decoder.mmse_scale = to_bool(field, value);
                else throw std::invalid_argument("config field '" + field + "': unknown key");
            } else if (section == "run") {
                if (key == "trials") c.trials = to_long(field, value);
                else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(field, value));
                else if (key == "jobs") c.jobs = static_cast<int>(to_long(field, value));
                else if (key == "csnr_sweep_db") c.csnr_sweep_db = to_list(field, value);
                else throw std::invalid_argument("config field '" + field + "': unknown key");
            } else {
                throw std::invalid_argument("config section '" + section + "': unknown section");
            }
        }
    }
    c.channel = have_noise_var ? ChannelSpec(power, noise_var)
                               : ChannelSpec::from_csnr_db(power, csnr_db);
    c.validate();
    return c;
}

sim::ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not readable: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::uint64_t config_digest(const std::string& text) {
    auto sections = parse_sections(text);  // std::map: canonical order
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ull;
    };
    for (const auto& [section, kv] : sections)
        for (const auto& [key, value] : kv) {
            mix(section);
            mix(key);
            mix(value);
        }
    return h;
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    char digest[20];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(config_digest));
    j["config_digest"] = digest;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

}  // namespace sklab::cfg
