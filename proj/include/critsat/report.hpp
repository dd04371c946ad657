#pragma once

// Table export (CSV, JSON), CSV import, and SVG plots of P(SAT) against q.
//
// CSV columns: experiment_id,n,alpha,q,f,trials,sat_count,p_hat,stderr,seed
// An empty q field marks an unfixed row. Reals use the shortest decimal
// form that reads back to the same double.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "critsat/harness.hpp"

namespace critsat {

inline constexpr const char* kCsvHeader = "experiment_id,n,alpha,q,f,trials,sat_count,p_hat,stderr,seed";

enum class TableFormat { Csv, Json };

inline std::string format_double(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

inline std::string to_csv(const SweepTable& table) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : table.rows) {
    out += r.experiment_id + "," + std::to_string(r.n) + "," + format_double(r.alpha) + "," +
           (r.q ? format_double(*r.q) : "") + "," + std::to_string(r.f) + "," + std::to_string(r.trials) + "," +
           std::to_string(r.sat_count) + "," + format_double(r.p_hat) + "," + format_double(r.stderr_) + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const SweepRow& r) {
  return {{"experiment_id", r.experiment_id},
          {"n", r.n},
          {"alpha", r.alpha},
          {"q", r.q ? nlohmann::json(*r.q) : nlohmann::json(nullptr)},
          {"f", r.f},
          {"trials", r.trials},
          {"sat_count", r.sat_count},
          {"p_hat", r.p_hat},
          {"stderr", r.stderr_},
          {"seed", r.seed}};
}

inline nlohmann::json to_json(const SweepTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) rows.push_back(to_json(r));
  return rows;
}

namespace detail {

template <class T>
T parse_field(const std::string& s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorKind::SyntaxError, "csv line " + std::to_string(line) + ": bad field '" + s + "'");
  return v;
}

}  // namespace detail

inline SweepTable from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(ErrorKind::SyntaxError, "missing or unexpected csv header");
  SweepTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 10) throw Error(ErrorKind::SyntaxError, "csv line " + std::to_string(line_no) + ": expected 10 fields");
    SweepRow r;
    r.experiment_id = f[0];
    r.n = detail::parse_field<std::int32_t>(f[1], line_no);
    r.alpha = detail::parse_field<double>(f[2], line_no);
    if (!f[3].empty()) r.q = detail::parse_field<double>(f[3], line_no);
    r.f = detail::parse_field<std::int32_t>(f[4], line_no);
    r.trials = detail::parse_field<std::int64_t>(f[5], line_no);
    r.sat_count = detail::parse_field<std::int64_t>(f[6], line_no);
    r.p_hat = detail::parse_field<double>(f[7], line_no);
    r.stderr_ = detail::parse_field<double>(f[8], line_no);
    r.seed = detail::parse_field<std::uint64_t>(f[9], line_no);
    table.rows.push_back(std::move(r));
  }
  return table;
}

// Writes to a sibling temporary file and renames it over the target, so a
// failed run never leaves a partial file behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::IoError, "write failed for " + tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::IoError, "cannot rename into " + path.string());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json to_json(const FixedSet& fixed) {
  nlohmann::json a = nlohmann::json::array();
  for (Literal l : fixed) a.push_back(l.value());
  return a;
}

inline nlohmann::json to_json(const RoundRecord& r) {
  return {{"round", r.round_index},
          {"m0", r.counts.m0},
          {"m1", r.counts.m1},
          {"m2", r.counts.m2},
          {"mstar", r.counts.mstar},
          {"unit_conflict", r.unit_conflict},
          {"induced_fixed", to_json(r.induced_fixed)},
          {"cumulative_fixed", r.cumulative_fixed},
          {"padding", r.padding}};
}

inline nlohmann::json verdict_json(const PropagationTrace& trace) {
  nlohmann::json j = {{"outcome", std::string(to_string(trace.outcome))},
                      {"rounds", trace.rounds.size()},
                      {"residual_clauses", trace.residual.size()},
                      {"pending", to_json(trace.pending)}};
  const auto sat = trace.satisfiable();
  j["satisfiable"] = sat ? nlohmann::json(*sat) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const CategoryProbs& p) {
  nlohmann::json j;
  const std::array<const char*, 4> names{"p0", "p1", "p2", "pstar"};
  const auto exact = p.as_array();
  const auto approx = p.as_double();
  for (std::size_t k = 0; k < 4; ++k)
    j[names[k]] = {{"exact", std::to_string(exact[k].numerator()) + "/" + std::to_string(exact[k].denominator())},
                   {"value", approx[k]}};
  return j;
}

inline nlohmann::json to_json(const RoundBudget& b) {
  return {{"regime", std::string(to_string(b.regime))}, {"n", b.n}, {"q", b.q}, {"rounds", b.rounds}};
}

inline nlohmann::json to_json(const GwSurvival& s) {
  return {{"trials", s.trials}, {"survivors", s.survivors}, {"estimate", s.estimate}, {"stderr", s.stderr_}};
}

inline nlohmann::json to_json(const DistributionReport& r) {
  nlohmann::json cats = nlohmann::json::array();
  const std::array<const char*, 4> names{"M0", "M1", "M2", "Mstar"};
  for (std::size_t k = 0; k < 4; ++k)
    cats.push_back({{"category", names[k]},
                    {"p", r.probs[k]},
                    {"expected_mean", r.expected_mean[k]},
                    {"empirical_mean", r.empirical_mean[k]},
                    {"expected_var", r.expected_var[k]},
                    {"empirical_var", r.empirical_var[k]},
                    {"z", r.z[k]},
                    {"pooled_count", r.pooled_counts[k]}});
  return {{"n", r.n},
          {"f", r.f},
          {"m", r.m},
          {"samples", r.samples},
          {"categories", cats},
          {"chi_square", {{"statistic", r.chi.statistic}, {"df", r.chi.df}, {"p_value", r.chi.p_value}}},
          {"means_within_4sigma", r.means_within_4sigma},
          {"passes", r.passes()}};
}

inline nlohmann::json to_json(const TrajectoryStats& s) {
  auto hist = [](const std::map<std::int64_t, std::int64_t>& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [round, count] : h) j[std::to_string(round)] = count;
    return j;
  };
  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& rq : s.per_round)
    rounds.push_back({{"round", rq.round},
                      {"active", rq.active},
                      {"m1_p10", rq.p10},
                      {"m1_p50", rq.p50},
                      {"m1_p90", rq.p90},
                      {"m1_mean", rq.mean_m1},
                      {"cumulative_mean", rq.mean_cumulative}});
  auto finite_or_null = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  return {{"n", s.n},
          {"q", s.q},
          {"f", s.f},
          {"trials", s.trials},
          {"round_cap", s.round_cap},
          {"extinct", s.extinct},
          {"contradicted", s.contradicted},
          {"capped", s.capped},
          {"extinct_fraction", s.extinct_fraction()},
          {"extinct_stderr", s.extinct_stderr()},
          {"median_extinction_round", finite_or_null(s.median_extinction_round)},
          {"median_termination_round", s.median_termination_round},
          {"extinction_hist", hist(s.extinction_hist)},
          {"contradiction_hist", hist(s.contradiction_hist)},
          {"per_round", rounds}};
}

// Reads SweepConfig fields from a JSON object; absent keys keep their
// defaults, unknown keys are rejected.
inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidSpec, "sweep config must be a JSON object");
  SweepConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_list") c.n_list = value.get<std::vector<std::int32_t>>();
      else if (key == "q_list") c.q_list = value.get<std::vector<double>>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "trials") c.trials = value.get<std::int64_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "workers") c.workers = value.get<int>();
      else if (key == "include_baseline") c.include_baseline = value.get<bool>();
      else if (key == "f_override") {
        if (!value.is_null()) c.f_override = value.get<std::int32_t>();
      } else if (key == "mode") {
        const auto m = value.get<std::string>();
        if (m == "plain") c.mode = PropagationMode::Plain;
        else if (m == "proof-faithful" || m == "proof") c.mode = PropagationMode::ProofFaithful;
        else throw Error(ErrorKind::InvalidSpec, "unknown mode '" + m + "'");
      } else if (key == "fixing") {
        const auto m = value.get<std::string>();
        if (m == "uniform") c.fixing = FixingMode::Uniform;
        else if (m == "canonical") c.fixing = FixingMode::Canonical;
        else throw Error(ErrorKind::InvalidSpec, "unknown fixing '" + m + "'");
      } else {
        throw Error(ErrorKind::InvalidSpec, "unknown sweep config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("bad sweep config: ") + e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::json to_json(const SweepConfig& c) {
  return {{"n_list", c.n_list},
          {"q_list", c.q_list},
          {"alpha", c.alpha},
          {"trials", c.trials},
          {"seed", c.seed},
          {"mode", std::string(to_string(c.mode))},
          {"fixing", std::string(to_string(c.fixing))},
          {"f_override", c.f_override ? nlohmann::json(*c.f_override) : nlohmann::json(nullptr)},
          {"include_baseline", c.include_baseline},
          {"workers", c.workers}};
}

inline void export_table(const SweepTable& table, TableFormat format, const std::filesystem::path& path) {
  atomic_write(path, format == TableFormat::Csv ? to_csv(table) : to_json(table).dump(2) + "\n");
}

inline SweepTable import_csv(const std::filesystem::path& path) { return from_csv(read_file(path)); }

// p_hat against q, one polyline per n, with the unfixed baseline of each n
// as a dashed horizontal line and a dotted reference line at q = 1/3.
inline std::string render_svg(const SweepTable& table) {
  std::map<std::int32_t, std::vector<const SweepRow*>> curves;
  std::map<std::int32_t, double> baselines;
  double q_max = 0.0;
  for (const auto& r : table.rows) {
    if (r.q) {
      curves[r.n].push_back(&r);
      q_max = std::max(q_max, *r.q);
    } else {
      baselines[r.n] = r.p_hat;
    }
  }
  if (curves.empty()) throw Error(ErrorKind::InvalidSpec, "nothing to plot: table has no fixed-variable rows");
  q_max = std::max(q_max, 0.5);

  constexpr double W = 640, H = 420, L = 60, R = 150, T = 20, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  auto x = [&](double q) { return L + pw * q / q_max; };
  auto y = [&](double p) { return T + ph * (1.0 - p); };
  const std::array<const char*, 6> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << L + pw << "\" y2=\"" << y(0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << y(0) << "\" x2=\"" << L << "\" y2=\"" << y(1) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double p = i / 5.0;
    svg << "<text x=\"" << L - 8 << "\" y=\"" << y(p) + 4 << "\" text-anchor=\"end\">" << format_double(p) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double q = q_max * i / 5.0;
    svg << "<text x=\"" << x(q) << "\" y=\"" << y(0) + 18 << "\" text-anchor=\"middle\">" << format_double(std::round(q * 100) / 100) << "</text>\n";
  }
  svg << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">q (fixed variables f = n^q)</text>\n";
  svg << "<text x=\"16\" y=\"" << T + ph / 2 << "\" transform=\"rotate(-90 16 " << T + ph / 2 << ")\" text-anchor=\"middle\">P(SAT)</text>\n";
  svg << "<line class=\"reference\" x1=\"" << x(1.0 / 3.0) << "\" y1=\"" << y(0) << "\" x2=\"" << x(1.0 / 3.0) << "\" y2=\"" << y(1)
      << "\" stroke=\"gray\" stroke-dasharray=\"2,4\"/>\n";

  std::size_t idx = 0;
  for (auto& [n, rows] : curves) {
    std::sort(rows.begin(), rows.end(), [](const SweepRow* a, const SweepRow* b) { return *a->q < *b->q; });
    const char* color = colors[idx % colors.size()];
    svg << "<polyline class=\"curve\" data-n=\"" << n << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const SweepRow* r : rows) svg << x(*r->q) << "," << y(r->p_hat) << " ";
    svg << "\"/>\n";
    if (auto it = baselines.find(n); it != baselines.end())
      svg << "<line class=\"baseline\" x1=\"" << L << "\" y1=\"" << y(it->second) << "\" x2=\"" << L + pw << "\" y2=\"" << y(it->second)
          << "\" stroke=\"" << color << "\" stroke-dasharray=\"6,4\" stroke-width=\"1\"/>\n";
    const double ly = T + 20.0 + 18.0 * static_cast<double>(idx);
    svg << "<line x1=\"" << L + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << L + pw + 46 << "\" y=\"" << ly + 4 << "\">n = " << n << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void emit_plot(const SweepTable& table, const std::filesystem::path& path) {
  if (table.rows.empty()) throw Error(ErrorKind::InvalidSpec, "cannot plot an empty table");
  atomic_write(path, render_svg(table));
}

}  // namespace critsat
