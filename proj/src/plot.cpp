#include "scorelife/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "scorelife/parallel.hpp"
#include "scorelife/poly_approx.hpp"

namespace scorelife {

Sampling parse_sampling(const std::string& s) {
    if (s == "uniform") return Sampling::uniform;
    if (s == "dyadic") return Sampling::dyadic;
    throw std::invalid_argument("unknown sampling '" + s + "' (uniform or dyadic)");
}

Curve sample_curve(const ScoreLifeRep& rep, std::size_t count, Sampling sampling, std::uint64_t seed,
                   std::string label) {
    if (count < 2) throw std::invalid_argument("a curve needs at least 2 samples");
    const unsigned m = rep.base();
    std::vector<LifeValue> points;
    if (sampling == Sampling::uniform) {
        points = sample_life_values(m, count, seed, 96);
        std::sort(points.begin(), points.end());
    } else {
        unsigned depth = 0;
        std::uint64_t n = 1;
        while (n < count) n *= m, ++depth;
        for (std::uint64_t k = 0; k < n; ++k) {
            std::vector<std::uint8_t> d(depth);
            auto v = k;
            for (unsigned i = depth; i-- > 0;) d[i] = static_cast<std::uint8_t>(v % m), v /= m;
            points.emplace_back(m, std::move(d));
        }
    }
    Curve c;
    c.label = std::move(label);
    c.l.resize(points.size());
    c.s.resize(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        c.l[i] = points[i].value();
        c.s[i] = rep.at(points[i]);
    });
    return c;
}

double total_variation(const Curve& c) {
    double tv = 0.0;
    for (std::size_t k = 1; k < c.s.size(); ++k) tv += std::abs(c.s[k] - c.s[k - 1]);
    return tv;
}

void write_curve_csv(std::ostream& out, const Curve& c) {
    out.precision(17);
    out << "l,S\n";
    for (std::size_t k = 0; k < c.l.size(); ++k) out << c.l[k] << ',' << c.s[k] << '\n';
}

void write_svg(std::ostream& out, const std::vector<Curve>& curves, const std::string& title) {
    constexpr double W = 640, H = 400, pad = 50;
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : curves)
        for (double v : c.s) lo = std::min(lo, v), hi = std::max(hi, v);
    if (!(hi > lo)) hi = lo + 1.0, lo -= 1.0;
    auto px = [&](double l) { return pad + l * (W - 2 * pad); };
    auto py = [&](double s) { return H - pad - (s - lo) / (hi - lo) * (H - 2 * pad); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << title << "</text>\n";
    out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<text x=\"" << pad << "\" y=\"" << H - pad + 16 << "\" text-anchor=\"middle\">0</text>\n";
    out << "<text x=\"" << W - pad << "\" y=\"" << H - pad + 16 << "\" text-anchor=\"middle\">1</text>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">l</text>\n";
    out << "<text x=\"" << pad - 6 << "\" y=\"" << py(lo) << "\" text-anchor=\"end\">" << lo << "</text>\n";
    out << "<text x=\"" << pad - 6 << "\" y=\"" << py(hi) + 4 << "\" text-anchor=\"end\">" << hi << "</text>\n";
    out << "</g>\n";
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const auto& c = curves[k];
        out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << colours[k % 6] << "\" points=\"";
        for (std::size_t i = 0; i < c.l.size(); ++i) out << (i ? " " : "") << px(c.l[i]) << ',' << py(c.s[i]);
        out << "\"/>\n";
        if (!c.label.empty())
            out << "<text x=\"" << W - pad - 4 << "\" y=\"" << pad + 16 + 14 * static_cast<double>(k)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colours[k % 6]
                << "\">" << c.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace scorelife
