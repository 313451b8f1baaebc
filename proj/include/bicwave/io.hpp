#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "bicwave/errors.hpp"
#include "bicwave/version.hpp"

namespace bicwave {

/// FNV-1a 64-bit; used to stamp outputs with a configuration fingerprint.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << v;
    return os.str();
}

/// Shortest round-trip double formatting; identical configs give identical bytes.
inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/**
 * CSV sink with a provenance comment line:
 *   # bicwave <version> <config-hash>
 * followed by a header row. Values are written with round-trip precision.
 */
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::string& config_fingerprint) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path);
        if (!out_) throw ConfigError("CsvWriter: cannot open " + path.string());
        out_ << "# bicwave " << kVersion << " " << config_fingerprint << "\n";
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

  private:
    std::ofstream out_;
};

/**
 * Dependency-free SVG line plot: one polyline (the field curve) plus optional
 * stem-and-marker amplitudes, mirroring the paper-style figure layout.
 */
class SvgPlot {
  public:
    SvgPlot(double xmin, double xmax, double ymin, double ymax, int width = 960,
            int height = 480)
        : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), w_(width), h_(height) {
        body_ << "<rect x='0' y='0' width='" << w_ << "' height='" << h_
              << "' fill='white' stroke='none'/>\n";
        // frame and zero axis
        body_ << "<rect x='" << margin_ << "' y='" << margin_ << "' width='" << w_ - 2 * margin_
              << "' height='" << h_ - 2 * margin_ << "' fill='none' stroke='black'/>\n";
        if (ymin_ < 0.0 && ymax_ > 0.0) {
            const double y0 = py(0.0);
            body_ << "<line x1='" << margin_ << "' y1='" << y0 << "' x2='" << w_ - margin_
                  << "' y2='" << y0 << "' stroke='#bbbbbb'/>\n";
        }
    }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color = "#1f77b4") {
        body_ << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < xs.size(); ++i)
            body_ << px(xs[i]) << "," << py(ys[i]) << " ";
        body_ << "'/>\n";
    }

    void stems(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::string& color = "#d62728") {
        const double y0 = py(0.0);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            body_ << "<line x1='" << px(xs[i]) << "' y1='" << y0 << "' x2='" << px(xs[i])
                  << "' y2='" << py(ys[i]) << "' stroke='" << color << "'/>\n";
            body_ << "<circle cx='" << px(xs[i]) << "' cy='" << py(ys[i])
                  << "' r='3' fill='" << color << "'/>\n";
        }
    }

    void title(const std::string& text) {
        body_ << "<text x='" << w_ / 2 << "' y='" << margin_ - 8
              << "' text-anchor='middle' font-family='sans-serif' font-size='14'>" << text
              << "</text>\n";
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out) throw ConfigError("SvgPlot: cannot open " + path.string());
        out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w_ << "' height='" << h_
            << "' viewBox='0 0 " << w_ << " " << h_ << "'>\n"
            << body_.str() << "</svg>\n";
    }

  private:
    double px(double x) const {
        return margin_ + (x - xmin_) / (xmax_ - xmin_) * (w_ - 2 * margin_);
    }
    double py(double y) const {
        return h_ - margin_ - (y - ymin_) / (ymax_ - ymin_) * (h_ - 2 * margin_);
    }

    double xmin_, xmax_, ymin_, ymax_;
    int w_, h_;
    static constexpr int margin_ = 40;
    std::ostringstream body_;
};

} // namespace bicwave
