#pragma once

#include <string>
#include <vector>

namespace revlab {

// Minimal SVG line/scatter plotting: enough for the exponent, volume and
// decay figures without an external dependency.  CSV stays the authoritative
// output; these are companions for eyeballing.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
            bool logy = false);

    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& label, const std::string& color);
    void add_scatter(const std::vector<double>& x, const std::vector<double>& y,
                     const std::string& label, const std::string& color);

    void write(const std::string& path) const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string label, color;
        bool scatter = false;
    };
    std::string title_, xlabel_, ylabel_;
    bool logx_, logy_;
    std::vector<Series> series_;
};

}  // namespace revlab
