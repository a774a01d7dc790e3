#pragma once

// Structured text records: one `key=value` line per metric, with the
// requirement it was checked against in a trailing comment.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace stclab {

struct ReportLine {
    std::string key;
    std::string value;
    std::string requirement;  ///< empty for informational metrics
    bool pass = true;
};

class Report {
public:
    /// Metric checked against a requirement, e.g. check("x", 1e-16, "< 1e-12", 1e-16 < 1e-12).
    void check(std::string key, double value, std::string requirement, bool pass) {
        lines_.push_back({std::move(key), format(value), std::move(requirement), pass});
    }
    void check(std::string key, std::string value, std::string requirement, bool pass) {
        lines_.push_back({std::move(key), std::move(value), std::move(requirement), pass});
    }
    void info(std::string key, double value) { lines_.push_back({std::move(key), format(value), {}, true}); }
    void info(std::string key, std::string value) { lines_.push_back({std::move(key), std::move(value), {}, true}); }

    void append(const Report& other) { lines_.insert(lines_.end(), other.lines_.begin(), other.lines_.end()); }

    bool pass() const {
        for (const auto& l : lines_)
            if (!l.pass) return false;
        return true;
    }

    const std::vector<ReportLine>& lines() const noexcept { return lines_; }

    void write(std::ostream& out) const {
        for (const auto& l : lines_) {
            out << l.key << '=' << l.value;
            if (!l.requirement.empty()) out << "  # require " << l.requirement << (l.pass ? " PASS" : " FAIL");
            out << '\n';
        }
    }

    static std::string format(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6e", v);
        return buf;
    }

private:
    std::vector<ReportLine> lines_;
};

}  // namespace stclab
