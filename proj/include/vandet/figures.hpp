#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "vandet/error.hpp"
#include "vandet/metrics.hpp"
#include "vandet/text.hpp"

namespace vandet {

// Self-contained SVG overlay of one curve per model with a legend, mirroring
// the usual ROC / precision-recall figures. Output is deterministic: fixed
// palette, fixed-precision coordinates.
inline void write_curve_figure(const std::string& path, CurveKind kind,
                               const std::vector<std::string>& tags,
                               const std::vector<CurvePoints>& curves,
                               const std::vector<double>& aucs,
                               const std::string& provenance_comment) {
  if (tags.size() != curves.size() || tags.size() != aucs.size())
    raise(ErrorCode::MisalignedScores, "figure inputs misaligned");
  const double width = 720, height = 540;
  const double left = 70, right = 20, top = 30, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double x) { return left + x * plot_w; };
  auto py = [&](double y) { return top + (1.0 - y) * plot_h; };
  auto fmt = [](double v) { return format_fixed(v, 2); };

  static const std::vector<std::string> palette{"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#8c564b"};
  const bool is_roc = kind == CurveKind::roc;
  const std::string title = is_roc ? "ROC curves" : "Precision-recall curves";
  const std::string x_label = is_roc ? "False positive rate" : "Recall";
  const std::string y_label = is_roc ? "True positive rate" : "Precision";

  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::MissingInput, "cannot write " + path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<!-- " << provenance_comment << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(width / 2) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // grid + ticks every 0.2
  for (int i = 0; i <= 5; ++i) {
    double v = i / 5.0;
    out << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(v))
        << "\" y2=\"" << fmt(py(1)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(px(1))
        << "\" y2=\"" << fmt(py(v)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(py(0) + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_fixed(v, 1) << "</text>\n";
    out << "<text x=\"" << fmt(px(0) - 8) << "\" y=\"" << fmt(py(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_fixed(v, 1) << "</text>\n";
  }
  if (is_roc)
    out << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(1))
        << "\" y2=\"" << fmt(py(1)) << "\" stroke=\"#999999\" stroke-width=\"1\" "
        << "stroke-dasharray=\"6,4\"/>\n";
  out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(plot_w)
      << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  out << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(height - 15)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << fmt(top + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << fmt(top + plot_h / 2) << ")\">" << y_label
      << "</text>\n";

  for (std::size_t m = 0; m < curves.size(); ++m) {
    const std::string& color = palette[m % palette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : curves[m].points) out << fmt(px(x)) << "," << fmt(py(y)) << " ";
    out << "\"/>\n";
  }

  // legend box
  double lx = is_roc ? px(0.55) : px(0.55);
  double ly = is_roc ? py(0.05) - 18.0 * static_cast<double>(curves.size()) - 10 : py(0.95);
  out << "<rect x=\"" << fmt(lx - 8) << "\" y=\"" << fmt(ly - 14) << "\" width=\""
      << fmt(plot_w * 0.45) << "\" height=\"" << fmt(18.0 * static_cast<double>(curves.size()) + 8)
      << "\" fill=\"white\" stroke=\"#666666\"/>\n";
  for (std::size_t m = 0; m < tags.size(); ++m) {
    const std::string& color = palette[m % palette.size()];
    double y = ly + 18.0 * static_cast<double>(m);
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y - 4) << "\" x2=\"" << fmt(lx + 24)
        << "\" y2=\"" << fmt(y - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(y)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << tags[m] << " ("
        << (is_roc ? "ROC-AUC " : "PR-AUC ") << format_fixed(aucs[m], 4) << ")</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace vandet
