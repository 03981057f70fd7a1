#pragma once

// Flat key = value experiment configuration with [section] headers.
// Keys are addressed as "section.key"; keys before any header live in "run".

#include <dchaos/common.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dchaos::cli {

class Config {
public:
    struct Entry {
        std::string value;
        std::string source;
        std::size_t line = 0;
    };

    static Config parse(std::istream& in, const std::string& source) {
        Config c;
        std::string line, section = "run";
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto t = trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']') throw ParseError(source, lineno, "unterminated section header");
                section = trim(t.substr(1, t.size() - 2));
                if (section.empty() || !valid_name(section))
                    throw ParseError(source, lineno, "invalid section name '" + section + "'");
                continue;
            }
            auto eq = t.find('=');
            if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
            auto key = trim(t.substr(0, eq));
            if (key.empty() || !valid_name(key)) throw ParseError(source, lineno, "invalid key '" + key + "'");
            auto value = trim(t.substr(eq + 1));
            if (auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
            const std::string full = section + "." + key;
            if (c.entries_.count(full)) throw ParseError(source, lineno, "duplicate key '" + full + "'");
            c.entries_[full] = {value, source, lineno};
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError(path, 0, "cannot open config file");
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) { entries_[key] = {value, "command line", 0}; }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::optional<std::string> get(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    std::string str(const std::string& key, const std::string& fallback) const { return get(key).value_or(fallback); }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::uint64_t v = 0;
        const auto& s = it->second.value;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) fail(it->second, key + " must be a nonnegative integer");
        return v;
    }

    double real(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        try {
            std::size_t used = 0;
            double v = std::stod(it->second.value, &used);
            if (used != it->second.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            fail(it->second, key + " must be a number");
        }
    }

    Rational rational(const std::string& key, const Rational& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        try {
            return parse_rational(it->second.value);
        } catch (const InvalidArgument&) {
            fail(it->second, key + " must be a rational (p/q or decimal)");
        }
    }

    bool boolean(const std::string& key, bool fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const auto& v = it->second.value;
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        fail(it->second, key + " must be true or false");
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        auto v = get(key);
        if (!v) return out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    std::vector<std::uint64_t> u64_list(const std::string& key) const {
        std::vector<std::uint64_t> out;
        for (const auto& s : list(key)) {
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size()) fail(entries_.at(key), key + " must list integers");
            out.push_back(v);
        }
        return out;
    }

    /// Throws a ParseError anchored at the key's line (or unanchored if absent).
    [[noreturn]] void reject(const std::string& key, const std::string& message) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ParseError("config", 0, key + ": " + message);
        fail(it->second, message);
    }

    /// Canonical text: sorted "section.key = value" lines.
    std::string canonical() const {
        std::string s;
        for (const auto& [k, e] : entries_) s += k + " = " + e.value + "\n";
        return s;
    }

    /// FNV-1a 64 of canonical()
    std::uint64_t hash() const {
        std::uint64_t h = 14695981039346656037ULL;
        for (unsigned char c : canonical()) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    std::string hash_hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
        return buf;
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    [[noreturn]] static void fail(const Entry& e, const std::string& message) {
        throw ParseError(e.source, e.line, message);
    }

    static bool valid_name(const std::string& s) {
        for (char ch : s)
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) return false;
        return true;
    }

    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    }

    std::map<std::string, Entry> entries_;
};

} // namespace dchaos::cli
