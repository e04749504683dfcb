#include "occutime/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "occutime/errors.hpp"

namespace occutime {

namespace {

constexpr const char* kVersion = "occutime 1.0.0";

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

Cell opt(const std::optional<double>& v) {
  return v ? Cell(*v) : Cell(std::numeric_limits<double>::quiet_NaN());
}

nlohmann::json cell_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
        }
        return v;
      },
      cell);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, double>) {
          if (std::isnan(v)) return "nan";
          if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
          char buf[40];
          std::snprintf(buf, sizeof buf, "%.17g", v);
          return buf;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string text = format_cell(row[i]);
      std::replace(text.begin(), text.end(), ',', ';');
      out << (i ? "," : "") << text;
    }
    out << '\n';
  }
}

std::vector<Table> report_tables(const StudyReport& r) {
  std::vector<Table> out;
  if (!r.errors.empty()) {
    Table t{"errors",
            {"function", "estimator", "n", "delta", "rms", "rms_se", "scaled_rms",
             "scaled_rms_se", "mean", "mean_se", "max_abs", "paths"},
            {}};
    for (const auto& e : r.errors) {
      t.rows.push_back({e.function, to_string(e.estimator), as_int(e.n), e.delta, e.rms,
                        e.rms_se, e.scaled_rms, e.scaled_rms_se, e.mean, e.mean_se, e.max_abs,
                        as_int(e.paths)});
    }
    out.push_back(std::move(t));
  }
  if (!r.slopes.empty()) {
    Table t{"slopes",
            {"function", "estimator", "slope", "slope_se", "ci_low", "ci_high", "lack_of_fit_p",
             "points_used", "points_dropped", "degenerate"},
            {}};
    for (const auto& s : r.slopes) {
      t.rows.push_back({s.function, to_string(s.estimator), opt(s.slope), s.slope_se, s.ci_low,
                        s.ci_high, s.lack_of_fit_p, as_int(s.points_used),
                        as_int(s.points_dropped), s.degenerate});
    }
    out.push_back(std::move(t));
  }
  if (!r.clt.empty()) {
    Table t{"clt",
            {"function", "n", "ks_statistic", "ks_p", "used", "excluded", "trapezoid_mean",
             "trapezoid_mean_se", "riemann_mean", "riemann_mean_se", "bias_mean",
             "bias_mean_se", "debiased_mean", "debiased_mean_se", "riemann_ks_statistic",
             "riemann_ks_p", "mean_conditional_variance", "mean_conditional_variance_se"},
            {}};
    for (const auto& c : r.clt) {
      t.rows.push_back({c.function, as_int(c.n), c.ks_statistic, c.ks_p, as_int(c.used),
                        as_int(c.excluded), c.trapezoid_mean, c.trapezoid_mean_se,
                        c.riemann_mean, c.riemann_mean_se, c.bias_mean, c.bias_mean_se,
                        c.debiased_mean, c.debiased_mean_se, c.riemann_ks_statistic,
                        c.riemann_ks_p, c.mean_conditional_variance,
                        c.mean_conditional_variance_se});
    }
    out.push_back(std::move(t));
  }
  if (!r.efficiency.empty()) {
    Table t{"efficiency",
            {"function", "n", "lower_bound", "lower_bound_se", "trapezoid_ratio",
             "trapezoid_ratio_se", "floor_respected", "ordering_respected"},
            {}};
    for (const auto& e : r.efficiency) {
      t.rows.push_back({e.function, as_int(e.n), e.lower_bound, e.lower_bound_se,
                        e.trapezoid_ratio, e.trapezoid_ratio_se, e.floor_respected,
                        e.ordering_respected});
    }
    out.push_back(std::move(t));
  }
  if (!r.decomposition.empty()) {
    Table t{"decomposition",
            {"u", "paths", "max_identity_gap", "max_drift_gap", "martingale_mean_re",
             "martingale_mean_re_se", "martingale_mean_im", "martingale_mean_im_se"},
            {}};
    for (const auto& d : r.decomposition) {
      t.rows.push_back({d.u, as_int(d.paths), d.max_identity_gap, d.max_drift_gap,
                        d.martingale_mean_re, d.martingale_mean_re_se, d.martingale_mean_im,
                        d.martingale_mean_im_se});
    }
    out.push_back(std::move(t));
  }
  if (!r.characteristic.empty()) {
    Table t{"characteristic", {"u", "lag", "exact", "monte_carlo", "tolerance"}, {}};
    for (const auto& c : r.characteristic) {
      t.rows.push_back({c.u, c.lag, c.exact, c.monte_carlo, c.tolerance});
    }
    out.push_back(std::move(t));
  }
  if (r.g_probe) {
    Table t{"g_probe", {"u", "n", "g_hat", "stderr"}, {}};
    for (const auto& g : r.g_probe->rows) {
      t.rows.push_back({g.u, as_int(g.n), g.g_hat, g.std_error});
    }
    out.push_back(std::move(t));
    Table trend{"g_trend", {"u", "kendall_tau", "p_value", "decreasing"}, {}};
    for (const auto& g : r.g_probe->trends) {
      trend.rows.push_back({g.u, g.kendall_tau, g.p_value, g.decreasing});
    }
    out.push_back(std::move(trend));
  }
  if (!r.per_path.empty()) {
    Table t{"per_path", {"path_id", "function", "estimator", "n", "t", "value", "reference", "error"},
            {}};
    for (const auto& p : r.per_path) {
      t.rows.push_back({as_int(p.path_id), p.function, to_string(p.estimator), as_int(p.n),
                        p.t, p.value, p.reference, p.error});
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string artifacts_json(const Artifacts& a) {
  nlohmann::ordered_json doc;
  doc["command"] = a.command;
  doc["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : a.config) doc["config"][k] = v;
  doc["flags"] = a.flags;
  doc["tables"] = nlohmann::ordered_json::object();
  for (const auto& table : a.tables) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
      rows.push_back(std::move(obj));
    }
    doc["tables"][table.name] = std::move(rows);
  }
  return doc.dump(2) + "\n";
}

std::string convergence_svg(const StudyReport& report) {
  if (report.errors.empty()) return {};
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
  };
  std::vector<Series> series;
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const auto& e : report.errors) {
    if (!(e.rms > 0.0)) continue;
    const std::string label = e.function + " / " + to_string(e.estimator);
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const Series& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}});
      it = series.end() - 1;
    }
    const double x = std::log10(e.delta), y = std::log10(e.rms);
    it->points.emplace_back(x, y);
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  }
  if (series.empty()) return {};
  if (x_hi - x_lo < 1e-9) x_hi = x_lo + 1.0;
  if (y_hi - y_lo < 1e-9) y_hi = y_lo + 1.0;

  const double w = 640, h = 420, ml = 70, mr = 220, mt = 20, mb = 50;
  auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
  auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream svg;
  char buf[160];
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"black\"/>\n",
                ml, mt, w - ml - mr, h - mt - mb);
  svg << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">log10 coarse step</text>\n",
                ml + 0.5 * (w - ml - mr), h - 12);
  svg << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%.1f\" transform=\"rotate(-90 16 %.1f)\" "
                "text-anchor=\"middle\">log10 RMS error</text>\n",
                mt + 0.5 * (h - mt - mb), mt + 0.5 * (h - mt - mb));
  svg << buf;
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + i * (x_hi - x_lo) / 4, yv = y_lo + i * (y_hi - y_lo) / 4;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.2f</text>\n", px(xv),
                  h - mb + 16, xv);
    svg << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n",
                  ml - 6, py(yv) + 4, yv);
    svg << buf;
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 8];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : series[s].points) {
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(x), py(y));
      svg << buf;
    }
    svg << "\"/>\n";
    for (const auto& [x, y] : series[s].points) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2.5\" fill=\"%s\"/>\n",
                    px(x), py(y), color);
      svg << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">", w - mr + 10,
                  mt + 14.0 * (s + 1), color);
    svg << buf << series[s].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> write_artifacts(const std::filesystem::path& dir,
                                         const Artifacts& artifacts) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  write_file(dir / "report.json", artifacts_json(artifacts));
  files.push_back("report.json");
  for (const auto& table : artifacts.tables) {
    std::ostringstream csv;
    write_csv(csv, table);
    const std::string name = table.name + ".csv";
    write_file(dir / name, csv.str());
    files.push_back(name);
  }
  if (!artifacts.svg.empty()) {
    write_file(dir / "plot.svg", artifacts.svg);
    files.push_back("plot.svg");
  }
  return files;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_manifest(const std::filesystem::path& dir, std::uint64_t config_hash,
                    std::uint64_t seed, double runtime_seconds, int threads,
                    const std::vector<std::string>& files) {
  std::ostringstream out;
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  out << "version: " << kVersion << "\n";
  out << "config_hash_fnv1a64: " << hash << "\n";
  out << "master_seed: " << seed << "\n";
  out << "threads: " << threads << "\n";
  out << "runtime_seconds: " << runtime_seconds << "\n";
  out << "files:";
  for (const auto& f : files) out << " " << f;
  out << "\n";
  write_file(dir / "manifest.txt", out.str());
}

}  // namespace occutime
