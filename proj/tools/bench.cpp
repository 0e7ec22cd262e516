#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <span>
#include <sstream>

#include "commands.hpp"
#include "index.hpp"
#include "io.hpp"

namespace orthorange::cli {

namespace {

struct LineFit {
  double slope = 0, r2 = 0;
  bool ok = false;
};

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  LineFit f;
  const std::size_t n = xs.size();
  if (n < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-12) return f;
  f.slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - f.slope * sx) / n;
  double ssr = 0, sst = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = f.slope * xs[i] + intercept;
    ssr += (ys[i] - pred) * (ys[i] - pred);
    sst += (ys[i] - mean) * (ys[i] - mean);
  }
  f.r2 = sst < 1e-12 ? 1.0 : 1.0 - ssr / sst;
  f.ok = true;
  return f;
}

struct TwoFit {
  double a = 0, b = 0, r2 = 0;
  bool ok = false;
};

// Least squares for y ~ a*f + b*g without intercept.
TwoFit fit_two(std::span<const double> f, std::span<const double> g,
               std::span<const double> y) {
  TwoFit out;
  const std::size_t n = f.size();
  if (n < 2) return out;
  double sff = 0, sfg = 0, sgg = 0, sfy = 0, sgy = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sff += f[i] * f[i];
    sfg += f[i] * g[i];
    sgg += g[i] * g[i];
    sfy += f[i] * y[i];
    sgy += g[i] * y[i];
    sy += y[i];
  }
  const double det = sff * sgg - sfg * sfg;
  if (std::abs(det) < 1e-9) {
    if (sff < 1e-12) return out;
    out.a = sfy / sff;
    out.b = 0;
  } else {
    out.a = (sfy * sgg - sgy * sfg) / det;
    out.b = (sgy * sff - sfy * sfg) / det;
  }
  double ssr = 0, sst = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = out.a * f[i] + out.b * g[i];
    ssr += (y[i] - pred) * (y[i] - pred);
    sst += (y[i] - mean) * (y[i] - mean);
  }
  out.r2 = sst < 1e-12 ? 1.0 : 1.0 - ssr / sst;
  out.ok = true;
  return out;
}

struct SeriesPoint {
  std::size_t n = 0;
  double build_ms = 0, p50_ms = 0, findany_mean = 0, iters_mean = 0;
  std::uint64_t cells_total = 0, entities = 0;
  std::vector<double> work, reported, loglog;  // per-query fit samples
};

double ms(std::chrono::steady_clock::duration d) {
  return std::chrono::duration<double, std::milli>(d).count();
}

QueryType query_type_for(const std::string& structure) {
  if (structure == "dominance4") return QueryType::dom4;
  if (structure == "general") return QueryType::box;
  return QueryType::five_sided;
}

}  // namespace

int cmd_bench(const BenchOptions& opt) {
  Distribution dist;
  if (!parse_distribution(opt.dist, dist)) {
    std::cerr << "orthorange: unknown distribution `" << opt.dist << "`\n";
    return kExitFail;
  }
  for (const std::string& s : opt.structures)
    if (!valid_kind(s)) {
      std::cerr << "orthorange: unknown structure `" << s << "`\n";
      return kExitFail;
    }
  std::vector<std::size_t> sizes = opt.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  std::ostringstream csv;
  csv << "n,structure,build_ms,query_p50_ms,findany_calls_mean,"
         "iterations_mean,cells_total\n";

  std::vector<std::pair<std::string, std::vector<SeriesPoint>>> series;
  for (const std::string& structure : opt.structures)
    series.push_back({structure, {}});

  try {
    for (auto& [structure, points] : series) {
      const QueryType qt = query_type_for(structure);
      for (std::size_t n : sizes) {
        SeriesPoint sp;
        sp.n = n;
        std::vector<double> query_ms;
        double build_total = 0;
        for (int rep = 0; rep < std::max(1, opt.reps); ++rep) {
          const std::uint64_t dseed = opt.seed + 977 * n + rep;
          auto rows = generate_rows(n, 4, dist, dseed);
          std::vector<PointId> ids(n);
          for (std::size_t i = 0; i < n; ++i)
            ids[i] = static_cast<PointId>(i);
          std::vector<std::vector<double>> raw(n, std::vector<double>(4));
          for (std::size_t i = 0; i < n; ++i)
            for (int d = 0; d < 4; ++d) raw[i][d] = rows[i][d];
          Dataset data = make_dataset(4, std::move(ids), std::move(raw));

          const auto t0 = std::chrono::steady_clock::now();
          const BuiltIndex idx =
              build_index(structure, std::move(data), opt.cfg);
          const auto t1 = std::chrono::steady_clock::now();
          build_total += ms(t1 - t0);
          sp.cells_total = idx.stats.tree_cells + idx.stats.nested_cells;
          sp.entities = idx.stats.total_entities();

          std::mt19937_64 rng(dseed ^ 0x5bf03635ULL);
          const double lgn = std::log2(std::max<double>(2, n));
          const double loglog = lgn * std::log2(std::max(2.0, lgn));
          for (std::size_t qi = 0; qi < opt.queries; ++qi) {
            const QuerySpec q = random_query(idx.data, qt, rng);
            const auto q0 = std::chrono::steady_clock::now();
            const QueryResult res = run_query(idx, q);
            const auto q1 = std::chrono::steady_clock::now();
            query_ms.push_back(ms(q1 - q0));
            sp.findany_mean += double(res.stats.findany_calls);
            sp.iters_mean += double(res.stats.iterations);
            sp.work.push_back(double(res.stats.work()));
            sp.reported.push_back(double(res.ids.size()));
            sp.loglog.push_back(loglog);
          }
        }
        const std::size_t total_q = query_ms.size();
        sp.build_ms = build_total / std::max(1, opt.reps);
        if (total_q > 0) {
          sp.findany_mean /= double(total_q);
          sp.iters_mean /= double(total_q);
          std::nth_element(query_ms.begin(),
                           query_ms.begin() + total_q / 2, query_ms.end());
          sp.p50_ms = query_ms[total_q / 2];
        }
        csv << n << "," << structure << "," << std::fixed
            << std::setprecision(3) << sp.build_ms << ","
            << std::setprecision(6) << sp.p50_ms << ","
            << std::setprecision(3) << sp.findany_mean << ","
            << sp.iters_mean << "," << sp.cells_total << "\n";
        csv.unsetf(std::ios::fixed);
        points.push_back(std::move(sp));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "orthorange: " << e.what() << "\n";
    return kExitFail;
  }

  // Trend fits: the per-query work model, the wall-clock exponent, and the
  // size growth, one comment line each so the CSV body stays parseable.
  for (const auto& [structure, points] : series) {
    if (points.size() < 2) continue;
    std::vector<double> work, rep, ll, lp50, lent, ln;
    for (const SeriesPoint& sp : points) {
      work.insert(work.end(), sp.work.begin(), sp.work.end());
      rep.insert(rep.end(), sp.reported.begin(), sp.reported.end());
      ll.insert(ll.end(), sp.loglog.begin(), sp.loglog.end());
      ln.push_back(std::log(double(sp.n)));
      lp50.push_back(std::log(std::max(sp.p50_ms, 1e-9)));
      lent.push_back(std::log(std::max<double>(1, double(sp.entities))));
    }
    const TwoFit wf = fit_two(ll, rep, work);
    if (wf.ok)
      csv << "# fit,structure=" << structure
          << ",metric=work,model=a*log2(n)*log2log2(n)+b*k,a=" << wf.a
          << ",b=" << wf.b << ",r2=" << wf.r2 << "\n";
    const LineFit pf = fit_line(ln, lp50);
    if (pf.ok)
      csv << "# fit,structure=" << structure
          << ",metric=query_p50_ms,model=c*n^alpha,alpha=" << pf.slope
          << ",r2=" << pf.r2 << "\n";
    const LineFit ef = fit_line(ln, lent);
    if (ef.ok)
      csv << "# fit,structure=" << structure
          << ",metric=total_entities,model=c*n^alpha,alpha=" << ef.slope
          << ",r2=" << ef.r2 << "\n";
  }

  try {
    std::ofstream file;
    std::ostream& out = open_output(opt.out, file);
    out << csv.str();
  } catch (const std::exception& e) {
    std::cerr << "orthorange: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitPass;
}

}  // namespace orthorange::cli
