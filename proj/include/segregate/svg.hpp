#pragma once

#include <string>
#include <vector>

namespace seg {

// Minimal self-contained SVG line plots; output is deterministic.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color);
    void add_points(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& color);
    void write(const std::string& path) const;

  private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        bool points = false;
    };
    std::string title_, xlabel_, ylabel_;
    std::vector<Series> series_;
};

} // namespace seg
