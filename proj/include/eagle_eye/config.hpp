#pragma once

// Flat `key = value` configuration text with `[section]` headers.
//
//   # comment
//   [pipeline]
//   fusion_scale = 4
//   downsample_taps = 1, 4, 6, 4, 1
//
// Keys are unique within a section; sections are unique within a document.
// Keys before the first header belong to the unnamed section "".

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eagle_eye {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace detail

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct ConfigSection {
    std::string name;
    std::vector<ConfigEntry> entries;
    int line = 0;
};

class KeyValueConfig {
public:
    [[nodiscard]] static KeyValueConfig parse(std::string_view text, const std::string& origin = "<config>")
    {
        KeyValueConfig doc;
        ConfigSection* current = &doc.section("");
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto end = text.find('\n', pos);
            std::string_view line =
                text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
            pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
            ++line_no;

            if (const auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = detail::trim(line);
            if (line.empty()) {
                continue;
            }
            auto fail = [&](const std::string& msg) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
            };
            if (line.front() == '[') {
                if (line.back() != ']') {
                    fail("unterminated section header");
                }
                const std::string name(detail::trim(line.substr(1, line.size() - 2)));
                if (name.empty()) {
                    fail("empty section name");
                }
                if (doc.find_section(name) != nullptr) {
                    fail("duplicate section [" + name + "]");
                }
                current = &doc.section(name);
                current->line = line_no;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                fail("expected `key = value`");
            }
            const std::string key(detail::trim(line.substr(0, eq)));
            const std::string value(detail::trim(line.substr(eq + 1)));
            if (key.empty()) {
                fail("missing key");
            }
            for (const ConfigEntry& e : current->entries) {
                if (e.key == key) {
                    fail("duplicate key `" + key + "`");
                }
            }
            current->entries.push_back({key, value, line_no});
        }
        return doc;
    }

    [[nodiscard]] static KeyValueConfig load(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw IoError("cannot open config file " + path.string());
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path.string());
    }

    [[nodiscard]] std::string serialize() const
    {
        std::ostringstream os;
        bool first = true;
        for (const ConfigSection& s : sections_) {
            if (s.entries.empty() && s.name.empty()) {
                continue;
            }
            if (!first) {
                os << '\n';
            }
            first = false;
            if (!s.name.empty()) {
                os << '[' << s.name << "]\n";
            }
            for (const ConfigEntry& e : s.entries) {
                os << e.key << " = " << e.value << '\n';
            }
        }
        return os.str();
    }

    void set(const std::string& section_name, const std::string& key, std::string value)
    {
        ConfigSection& s = section(section_name);
        for (ConfigEntry& e : s.entries) {
            if (e.key == key) {
                e.value = std::move(value);
                return;
            }
        }
        s.entries.push_back({key, std::move(value), 0});
    }

    [[nodiscard]] const ConfigSection* find_section(std::string_view name) const
    {
        for (const ConfigSection& s : sections_) {
            if (s.name == name) {
                return &s;
            }
        }
        return nullptr;
    }

    [[nodiscard]] const std::vector<ConfigSection>& sections() const { return sections_; }

private:
    ConfigSection& section(const std::string& name)
    {
        for (ConfigSection& s : sections_) {
            if (s.name == name) {
                return s;
            }
        }
        sections_.push_back({name, {}, 0});
        return sections_.back();
    }

    std::vector<ConfigSection> sections_;
};

// ---------------------------------------------------------------------------
// Value parsing and formatting

namespace config_value {

[[nodiscard]] inline double to_double(const std::string& s, const std::string& what)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw ConfigError(what + ": expected a finite number, got `" + s + "`");
    }
    return v;
}

[[nodiscard]] inline std::int64_t to_int(const std::string& s, const std::string& what)
{
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(what + ": expected an integer, got `" + s + "`");
    }
    return v;
}

[[nodiscard]] inline std::uint64_t to_uint(const std::string& s, const std::string& what)
{
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError(what + ": expected a non-negative integer, got `" + s + "`");
    }
    return v;
}

[[nodiscard]] inline bool to_bool(const std::string& s, const std::string& what)
{
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
        return true;
    }
    if (s == "false" || s == "no" || s == "off" || s == "0") {
        return false;
    }
    throw ConfigError(what + ": expected true/false, got `" + s + "`");
}

[[nodiscard]] inline std::vector<double> to_list(const std::string& s, const std::string& what)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto comma = s.find(',', pos);
        const std::string item(
            detail::trim(std::string_view(s).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
        out.push_back(to_double(item, what));
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

/// Shortest text that parses back to exactly `v`.
[[nodiscard]] inline std::string format(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

[[nodiscard]] inline std::string format(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format(values[i]);
    }
    return out;
}

}  // namespace config_value

}  // namespace eagle_eye
