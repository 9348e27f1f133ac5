#include "riemopt/bench/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace riemopt::bench {

bool weakly_precedes(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "Pareto comparison of different lengths");
  return (u.array() <= v.array()).all();
}

bool dominates(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return weakly_precedes(u, v) && u != v;
}

namespace {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

std::vector<ParetoPoint> nondominated_filter(std::vector<ParetoPoint> points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) { return lex_less(a.F, b.F); });
  std::vector<ParetoPoint> front;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].F == points[i - 1].F) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < points.size() && !dominated; ++j)
      dominated = j != i && dominates(points[j].F, points[i].F);
    if (!dominated) front.push_back(points[i]);
  }
  return front;
}

long count_dominated(const std::vector<ParetoPoint>& points, const std::vector<ParetoPoint>& by) {
  long count = 0;
  for (const ParetoPoint& p : points)
    if (std::any_of(by.begin(), by.end(), [&](const ParetoPoint& q) { return dominates(q.F, p.F); })) ++count;
  return count;
}

ParetoSweep pareto_sweep(const Instance& inst, Algorithm algo, const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const SolverConfig solver = cfg.solver_config();
  const CompositeObjective obj = make_objective(inst);
  ParetoSweep sweep;
  sweep.algorithm = algo;
  sweep.all.resize(static_cast<std::size_t>(cfg.n_starts));
  parallel_for(sweep.all.size(), [&](std::size_t s) {
    const Point x0 = random_sphere_point(obj.manifold(), seed, kStartStream + static_cast<std::uint32_t>(s));
    const RunResult r = run_algorithm(algo, obj, x0, solver);
    ParetoPoint& p = sweep.all[s];
    p.F = obj.eval_F(r.final_point);
    p.seed = seed;
    p.algorithm = algo;
    p.start = static_cast<int>(s);
  });
  sweep.front = nondominated_filter(sweep.all);
  return sweep;
}

void write_front_csv(std::ostream& os, const std::vector<ParetoPoint>& front) {
  const Eigen::Index m = front.empty() ? 2 : front.front().F.size();
  os << "algorithm,seed,start";
  for (Eigen::Index i = 0; i < m; ++i) os << ",F" << i + 1;
  os << '\n';
  for (const ParetoPoint& p : front) {
    os << to_string(p.algorithm) << ',' << p.seed << ',' << p.start;
    for (Eigen::Index i = 0; i < p.F.size(); ++i) os << ',' << format_double(p.F(i));
    os << '\n';
  }
}

void write_front_svg(std::ostream& os, const std::vector<std::pair<std::string, std::vector<ParetoPoint>>>& series) {
  constexpr double W = 640, H = 480, left = 70, right = 150, top = 20, bottom = 50;
  constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& [label, pts] : series)
    for (const ParetoPoint& p : pts) {
      if (p.F.size() < 2) throw Error(ErrorCode::DimensionMismatch, "SVG scatter needs two objectives");
      x0 = std::min(x0, p.F(0)), x1 = std::max(x1, p.F(0));
      y0 = std::min(y0, p.F(1)), y1 = std::max(y1, p.F(1));
    }
  if (!std::isfinite(x0)) x0 = y0 = 0, x1 = y1 = 1;
  const double padx = std::max(1e-12, 0.05 * (x1 - x0)), pady = std::max(1e-12, 0.05 * (y1 - y0));
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return top + ph - (v - y0) / (y1 - y0) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double vx = x0 + (x1 - x0) * t / 4, vy = y0 + (y1 - y0) * t / 4;
    std::ostringstream lx, ly;
    lx.precision(4), ly.precision(4);
    lx << vx, ly << vy;
    os << "<text x=\"" << sx(vx) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">" << lx.str() << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << sy(vy) + 4 << "\" text-anchor=\"end\">" << ly.str() << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">F1</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << top + ph / 2
     << ")\">F2</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % std::size(colors)];
    for (const ParetoPoint& p : series[s].second)
      os << "<circle cx=\"" << sx(p.F(0)) << "\" cy=\"" << sy(p.F(1)) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    const double ly = top + 14 + 18.0 * s;
    os << "<circle cx=\"" << W - right + 16 << "\" cy=\"" << ly - 4 << "\" r=\"4\" fill=\"" << c << "\"/>\n";
    os << "<text x=\"" << W - right + 26 << "\" y=\"" << ly << "\">" << series[s].first << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace riemopt::bench
