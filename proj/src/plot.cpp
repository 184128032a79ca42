#include "heatpencil/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "heatpencil/error.hpp"
#include "heatpencil/io.hpp"
#include "heatpencil/model.hpp"

namespace heatpencil::plot {

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 90, kRight = 30, kTop = 50, kBottom = 70;

struct Series {
  std::vector<double> x, y;
  std::string color;
  std::string label;
  bool markers = false;
};

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string num(double v) { return fmt("%.2f", v); }

std::string tick_label(double v, bool log) {
  if (log) return "1e" + std::to_string(static_cast<int>(std::lround(v)));
  return fmt("%.3g", v);
}

std::string render(const std::string& title, const std::string& xlabel, const std::string& ylabel, const Axis& ax,
                   const Axis& ay, const std::vector<Series>& series, const std::string& extra = {}) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\" "
       "font-family=\"sans-serif\" font-size=\"13\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  s += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" + title + "</text>\n";
  s += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" + num(y0 - y1) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double vx = ax.lo + (ax.hi - ax.lo) * i / 5.0;
    const double px = x0 + (x1 - x0) * i / 5.0;
    s += "<line x1=\"" + num(px) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(px) + "\" y2=\"" + num(y0 + 5) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(px) + "\" y=\"" + num(y0 + 20) + "\" text-anchor=\"middle\">" + tick_label(vx, ax.log) +
         "</text>\n";
    const double vy = ay.lo + (ay.hi - ay.lo) * i / 5.0;
    const double py = y0 + (y1 - y0) * i / 5.0;
    s += "<line x1=\"" + num(x0 - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(py) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(py) +
         "\" stroke=\"#e0e0e0\"/>\n";
    s += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" + tick_label(vy, ay.log) +
         "</text>\n";
  }
  s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 22) + "\" text-anchor=\"middle\">" + xlabel +
       "</text>\n";
  s += "<text x=\"22\" y=\"" + num((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 22 " +
       num((y0 + y1) / 2) + ")\">" + ylabel + "</text>\n";

  double legend_y = y1 + 20;
  for (const Series& ser : series) {
    std::string points;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      const double px = ax.map(ser.x[i], x0, x1);
      const double py = ay.map(ser.y[i], y0, y1);
      points += num(px) + "," + num(py) + " ";
      if (ser.markers) {
        s += "<circle cx=\"" + num(px) + "\" cy=\"" + num(py) + "\" r=\"3.5\" fill=\"" + ser.color + "\"/>\n";
      }
    }
    s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
    s += "<line x1=\"" + num(x1 - 170) + "\" y1=\"" + num(legend_y) + "\" x2=\"" + num(x1 - 145) + "\" y2=\"" +
         num(legend_y) + "\" stroke=\"" + ser.color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(x1 - 138) + "\" y=\"" + num(legend_y + 4) + "\">" + ser.label + "</text>\n";
    legend_y += 20;
  }
  s += extra;
  s += "</svg>\n";
  return s;
}

std::vector<double> grid() {
  std::vector<double> x(kU0GridPoints);
  for (int i = 0; i < kU0GridPoints; ++i) x[static_cast<std::size_t>(i)] = i / double(kU0GridPoints - 1);
  return x;
}

}  // namespace

std::string gcv_csv(const pipeline::GcvSelection& gcv) {
  std::string out = "k,G\n";
  for (std::size_t i = 0; i < gcv.curve.size(); ++i) out += std::to_string(i + 1) + "," + fmt("%.17g", gcv.curve[i]) + "\n";
  return out;
}

std::string gcv_svg(const pipeline::GcvSelection& gcv) {
  require(!gcv.curve.empty(), "empty GCV curve");
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (const double g : gcv.curve) {
    if (g > 0.0 && std::isfinite(g)) {
      gmin = std::min(gmin, g);
      gmax = std::max(gmax, g);
    }
  }
  if (!(gmax > 0.0)) gmin = gmax = 1.0;
  Axis ay{std::floor(std::log10(gmin)) - 1.0, std::ceil(std::log10(gmax)), true};
  if (ay.hi <= ay.lo) ay.hi = ay.lo + 1.0;
  const double floor_value = std::pow(10.0, ay.lo);

  Series s{{}, {}, "#1f5fbf", "G(k)", true};
  for (std::size_t i = 0; i < gcv.curve.size(); ++i) {
    const double g = gcv.curve[i];
    s.x.push_back(static_cast<double>(i + 1));
    s.y.push_back(g > 0.0 && std::isfinite(g) ? std::max(g, floor_value) : floor_value);
  }
  Axis ax{1.0, std::max(2.0, static_cast<double>(gcv.curve.size())), false};

  std::string extra;
  if (gcv.k >= 1) {
    const double px = ax.map(gcv.k, kLeft, kWidth - kRight);
    extra += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(px) + "\" y2=\"" +
             num(kHeight - kBottom) + "\" stroke=\"#c03030\" stroke-dasharray=\"6 4\"/>\n";
    extra += "<text x=\"" + num(px + 6) + "\" y=\"" + num(kTop + 16) + "\" fill=\"#c03030\">k = " +
             std::to_string(gcv.k) + "</text>\n";
  }
  return render("GCV function", "truncation rank k", "G(k)", ax, ay, {s}, extra);
}

std::string u0_csv(const std::vector<double>& coeffs_hat, const std::map<int, double>* reference) {
  std::string out = reference ? "x,u0_hat,u0_ref\n" : "x,u0_hat\n";
  for (const double x : grid()) {
    out += fmt("%.17g", x) + "," + fmt("%.17g", model::evaluate_cosine_series(coeffs_hat, x));
    if (reference) out += "," + fmt("%.17g", model::evaluate_cosine_series(*reference, x));
    out += "\n";
  }
  return out;
}

std::string u0_svg(const std::vector<double>& coeffs_hat, const std::map<int, double>* reference) {
  const std::vector<double> xs = grid();
  Series hat{xs, {}, "#1f5fbf", "reconstructed", false};
  Series ref{xs, {}, "#c03030", "reference", false};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const double x : xs) {
    hat.y.push_back(model::evaluate_cosine_series(coeffs_hat, x));
    lo = std::min(lo, hat.y.back());
    hi = std::max(hi, hat.y.back());
    if (reference) {
      ref.y.push_back(model::evaluate_cosine_series(*reference, x));
      lo = std::min(lo, ref.y.back());
      hi = std::max(hi, ref.y.back());
    }
  }
  const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
  const Axis ax{0.0, 1.0, false};
  const Axis ay{lo - pad, hi + pad, false};
  std::vector<Series> series{hat};
  if (reference) series.push_back(ref);
  return render("Initial state", "x", "u0(x)", ax, ay, series);
}

void write_all(const std::filesystem::path& dir, const pipeline::IdentificationResult& result,
               const std::map<int, double>* reference) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  io::write_text(dir / "gcv.svg", gcv_svg(result.gcv));
  io::write_text(dir / "gcv.csv", gcv_csv(result.gcv));
  io::write_text(dir / "u0.svg", u0_svg(result.u0_coeffs_hat, reference));
  io::write_text(dir / "u0.csv", u0_csv(result.u0_coeffs_hat, reference));
}

}  // namespace heatpencil::plot
