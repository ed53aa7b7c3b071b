#pragma once

// Strict "key=value,key=value" field parsing for the spec-string grammars
// (architectures, learners, synthetic data). Internal to the library.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace iplna::detail {

inline std::invalid_argument spec_error(const std::string& what, const std::string& msg) {
    return std::invalid_argument(what + ": " + msg);
}

inline double parse_double(const std::string& what, const std::string& key,
                           const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw spec_error(what, "invalid number for '" + key + "': '" + value + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& what, const std::string& key,
                               const std::string& value) {
    try {
        std::size_t pos = 0;
        if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw spec_error(what, "invalid unsigned integer for '" + key + "': '" + value + "'");
    }
}

inline long parse_long(const std::string& what, const std::string& key,
                       const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw spec_error(what, "invalid integer for '" + key + "': '" + value + "'");
    }
}

// Colon-separated list of doubles, e.g. "0.5:-1:2".
inline std::vector<double> parse_double_list(const std::string& what, const std::string& key,
                                             const std::string& value) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const std::size_t colon = value.find(':', start);
        const std::string tok = value.substr(start, colon == std::string::npos
                                                        ? std::string::npos
                                                        : colon - start);
        out.push_back(parse_double(what, key, tok));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    return out;
}

// Consumes "k=v,k=v" fields; rejects duplicates, unknown leftovers, and
// malformed pairs. `what` names the grammar for error messages.
class FieldReader {
public:
    FieldReader(std::string what, const std::string& fields) : what_(std::move(what)) {
        if (fields.empty()) return;
        std::size_t start = 0;
        while (start <= fields.size()) {
            const std::size_t comma = fields.find(',', start);
            const std::string tok = fields.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            const std::size_t eq = tok.find('=');
            if (eq == std::string::npos || eq == 0)
                throw spec_error(what_, "expected key=value, got '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            for (const auto& [k, v] : fields_)
                if (k == key) throw spec_error(what_, "duplicate field '" + key + "'");
            fields_.emplace_back(key, tok.substr(eq + 1));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }

    bool has(const std::string& key) const {
        for (const auto& [k, v] : fields_)
            if (k == key) return true;
        return false;
    }

    std::string take(const std::string& key) {
        for (auto& [k, v] : fields_) {
            if (k == key && !consumed(key)) {
                consumed_.push_back(key);
                return v;
            }
        }
        throw spec_error(what_, "missing required field '" + key + "'");
    }

    double take_double(const std::string& key) { return parse_double(what_, key, take(key)); }

    double take_double_or(const std::string& key, double def) {
        return has(key) ? take_double(key) : def;
    }

    long take_long(const std::string& key) { return parse_long(what_, key, take(key)); }

    long take_long_or(const std::string& key, long def) {
        return has(key) ? take_long(key) : def;
    }

    std::uint64_t take_u64(const std::string& key) { return parse_u64(what_, key, take(key)); }

    std::uint64_t take_u64_or(const std::string& key, std::uint64_t def) {
        return has(key) ? take_u64(key) : def;
    }

    bool take_flag_or(const std::string& key, bool def) {
        if (!has(key)) return def;
        const std::string v = take(key);
        if (v == "0") return false;
        if (v == "1") return true;
        throw spec_error(what_, "field '" + key + "' must be 0 or 1, got '" + v + "'");
    }

    std::vector<double> take_double_list(const std::string& key) {
        return parse_double_list(what_, key, take(key));
    }

    // Throws if any field was never consumed (unknown key).
    void finish() const {
        for (const auto& [k, v] : fields_)
            if (!consumed(k)) throw spec_error(what_, "unknown field '" + k + "'");
    }

private:
    bool consumed(const std::string& key) const {
        for (const auto& c : consumed_)
            if (c == key) return true;
        return false;
    }

    std::string what_;
    std::vector<std::pair<std::string, std::string>> fields_;
    std::vector<std::string> consumed_;
};

// Splits "head:rest" at the first separator; rest is empty if absent.
inline std::pair<std::string, std::string> split_head(const std::string& spec, char sep) {
    const std::size_t pos = spec.find(sep);
    if (pos == std::string::npos) return {spec, ""};
    return {spec.substr(0, pos), spec.substr(pos + 1)};
}

}  // namespace iplna::detail
