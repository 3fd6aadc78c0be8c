#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "p2s/harness/harness.hpp"
#include "p2s/util/text.hpp"

namespace p2s::harness {

namespace fs = std::filesystem;

std::vector<double> smooth(const std::vector<double>& xs, std::size_t window) {
  if (window == 0) throw std::invalid_argument("smoothing window must be positive");
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= window) sum -= xs[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

SmoothedSeries smoothed_series(const std::vector<loop::CurveRow>& rows, bool scale_value_loss, std::size_t window) {
  SmoothedSeries s;
  std::vector<double> reward, pl, vl;
  for (const auto& r : rows) {
    s.episode.push_back(r.episode);
    reward.push_back(r.reward);
    pl.push_back(r.policy_loss);
    vl.push_back(scale_value_loss ? r.value_loss * 1000.0 : r.value_loss);
  }
  s.reward = smooth(reward, window);
  s.policy_loss = smooth(pl, window);
  s.value_loss = smooth(vl, window);
  return s;
}

namespace {

constexpr double kW = 720, kH = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double v) {
  std::string s = fmt::format("{:.4g}", v);
  return s;
}

std::string polyline(const std::vector<std::int64_t>& xs, const std::vector<double>& ys, double x0, double x1,
                     double y0, double y1, const char* color, double width, double opacity) {
  std::string pts;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double px = kLeft + (x1 > x0 ? (static_cast<double>(xs[i]) - x0) / (x1 - x0) : 0.5) * (kW - kLeft - kRight);
    const double py = kTop + (y1 > y0 ? (y1 - ys[i]) / (y1 - y0) : 0.5) * (kH - kTop - kBottom);
    pts += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px, py);
  }
  return fmt::format(
      "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" stroke-opacity=\"{}\" points=\"{}\"/>\n", color,
      width, opacity, pts);
}

std::string svg_plot(const std::string& title, const std::string& ylabel, const std::vector<std::int64_t>& x,
                     const std::vector<double>& raw, const std::vector<double>& smoothed) {
  double y0 = *std::min_element(raw.begin(), raw.end());
  double y1 = *std::max_element(raw.begin(), raw.end());
  if (y1 - y0 < 1e-12) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double x0 = static_cast<double>(x.front());
  const double x1 = static_cast<double>(x.back());
  std::string s;
  s += fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n", kW,
                   kH, kW, kH);
  s += fmt::format("  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kW, kH);
  s += fmt::format("  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
                   kW / 2, title);
  // Axes.
  s += fmt::format("  <line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, kTop, kH - kBottom);
  s += fmt::format("  <line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kLeft, kH - kBottom,
                   kW - kRight);
  auto label = [&](double x, double y, const std::string& text, const char* anchor) {
    s += fmt::format("  <text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{}\">{}</text>\n",
                     x, y, anchor, text);
  };
  label(kLeft - 6, kTop + 4, num(y1), "end");
  label(kLeft - 6, kH - kBottom, num(y0), "end");
  label(kLeft, kH - kBottom + 16, num(x0), "middle");
  label(kW - kRight, kH - kBottom + 16, num(x1), "middle");
  label(kW / 2, kH - 12, "episode", "middle");
  s += fmt::format(
      "  <text x=\"16\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 {:.2f})\">{}</text>\n",
      kH / 2, kH / 2, ylabel);
  s += polyline(x, raw, x0, x1, y0, y1, "#7fa7d9", 1.0, 0.5);
  s += polyline(x, smoothed, x0, x1, y0, y1, "#1f4e9c", 2.0, 1.0);
  s += "</svg>\n";
  return s;
}

}  // namespace

CurveFiles render_training_curves(const fs::path& csv_log, const fs::path& out_dir, bool scale_value_loss) {
  std::vector<loop::CurveRow> rows;
  try {
    rows = loop::parse_curve_csv(read_file(csv_log));
  } catch (const std::exception& e) {
    throw SchemaError(csv_log.string() + ": " + e.what());
  }
  if (rows.empty()) throw SchemaError(csv_log.string() + ": training log has no rows");

  const SmoothedSeries s = smoothed_series(rows, scale_value_loss);
  std::vector<double> reward, pl, vl;
  for (const auto& r : rows) {
    reward.push_back(r.reward);
    pl.push_back(r.policy_loss);
    vl.push_back(scale_value_loss ? r.value_loss * 1000.0 : r.value_loss);
  }

  CurveFiles f{out_dir / "reward.svg", out_dir / "policy_loss.svg", out_dir / "value_loss.svg",
               out_dir / "curves_smoothed.csv"};
  write_file(f.reward_svg, svg_plot("Episode reward", "reward", s.episode, reward, s.reward));
  write_file(f.policy_loss_svg, svg_plot("Policy loss", "policy loss", s.episode, pl, s.policy_loss));
  const std::string vlabel = scale_value_loss ? "value loss x 1000" : "value loss";
  write_file(f.value_loss_svg, svg_plot("Value loss", vlabel, s.episode, vl, s.value_loss));

  std::string csv = fmt::format("episode,reward_smoothed,policy_loss_smoothed,{}\n",
                                scale_value_loss ? "value_loss_x1000_smoothed" : "value_loss_smoothed");
  for (size_t i = 0; i < s.episode.size(); ++i) {
    csv += fmt::format("{},{},{},{}\n", s.episode[i], s.reward[i], s.policy_loss[i], s.value_loss[i]);
  }
  write_file(f.smoothed_csv, csv);
  return f;
}

}  // namespace p2s::harness
