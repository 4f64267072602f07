#include "revlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "revlab/errors.hpp"

namespace revlab {

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx, bool logy)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
      logx_(logx), logy_(logy) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& label, const std::string& color) {
    series_.push_back({x, y, label, color, false});
}

void SvgPlot::add_scatter(const std::vector<double>& x, const std::vector<double>& y,
                          const std::string& label, const std::string& color) {
    series_.push_back({x, y, label, color, true});
}

void SvgPlot::write(const std::string& path) const {
    const double W = 720, H = 480;
    const double ml = 70, mr = 20, mt = 40, mb = 55;

    auto tx = [&](double v) { return logx_ ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy_ ? std::log10(v) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (logx_ && s.x[i] <= 0) continue;
            if (logy_ && s.y[i] <= 0) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    const double padx = 0.03 * (xmax - xmin), pady = 0.05 * (ymax - ymin);
    xmin -= padx, xmax += padx, ymin -= pady, ymax += pady;

    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
       << "' viewBox='0 0 " << W << " " << H << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    os << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title_
       << "</text>\n";
    os << "<text x='" << W / 2 << "' y='" << H - 12 << "' text-anchor='middle' font-size='12'>"
       << xlabel_ << "</text>\n";
    os << "<text x='16' y='" << H / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
       << H / 2 << ")'>" << ylabel_ << "</text>\n";
    os << "<rect x='" << ml << "' y='" << mt << "' width='" << W - ml - mr << "' height='"
       << H - mt - mb << "' fill='none' stroke='black'/>\n";

    // axis ticks (5 per axis, value labels in data units)
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        const double vx = logx_ ? std::pow(10.0, fx) : fx;
        const double vy = logy_ ? std::pow(10.0, fy) : fy;
        const double X = ml + (W - ml - mr) * i / 5.0;
        const double Y = H - mb - (H - mt - mb) * i / 5.0;
        os << "<line x1='" << X << "' y1='" << H - mb << "' x2='" << X << "' y2='" << H - mb + 5
           << "' stroke='black'/>\n";
        os << "<text x='" << X << "' y='" << H - mb + 18 << "' text-anchor='middle' font-size='10'>"
           << (std::abs(vx) < 1e-3 || std::abs(vx) >= 1e4 ? [&]{std::ostringstream t; t.precision(2); t << std::scientific << vx; return t.str();}() : [&]{std::ostringstream t; t.precision(4); t << vx; return t.str();}())
           << "</text>\n";
        os << "<line x1='" << ml - 5 << "' y1='" << Y << "' x2='" << ml << "' y2='" << Y
           << "' stroke='black'/>\n";
        os << "<text x='" << ml - 8 << "' y='" << Y + 3 << "' text-anchor='end' font-size='10'>"
           << (std::abs(vy) < 1e-3 || std::abs(vy) >= 1e4 ? [&]{std::ostringstream t; t.precision(2); t << std::scientific << vy; return t.str();}() : [&]{std::ostringstream t; t.precision(4); t << vy; return t.str();}())
           << "</text>\n";
    }

    int li = 0;
    for (const auto& s : series_) {
        if (s.scatter) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if ((logx_ && s.x[i] <= 0) || (logy_ && s.y[i] <= 0)) continue;
                os << "<circle cx='" << px(s.x[i]) << "' cy='" << py(s.y[i])
                   << "' r='2.5' fill='" << s.color << "'/>\n";
            }
        } else {
            os << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if ((logx_ && s.x[i] <= 0) || (logy_ && s.y[i] <= 0)) continue;
                os << px(s.x[i]) << "," << py(s.y[i]) << " ";
            }
            os << "'/>\n";
        }
        os << "<text x='" << W - mr - 8 << "' y='" << mt + 16 + 16 * li
           << "' text-anchor='end' font-size='11' fill='" << s.color << "'>" << s.label
           << "</text>\n";
        ++li;
    }
    os << "</svg>\n";

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw NumericalError("cannot open " + path);
    f << os.str();
}

}  // namespace revlab
