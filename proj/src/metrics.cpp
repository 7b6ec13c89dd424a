#include "sysrisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace sysrisk {

namespace {

bool linked(const SquareMatrix& l, std::size_t i, std::size_t j) { return i != j && l(i, j) > 0.0; }

void degrees(const SquareMatrix& l, std::vector<int>& in, std::vector<int>& out) {
  const std::size_t n = l.size();
  in.assign(n, 0);
  out.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (linked(l, i, j)) {
        ++out[i];
        ++in[j];
      }
}

}  // namespace

std::string to_string(AssortativityConvention convention) {
  switch (convention) {
    case AssortativityConvention::SourceOutTargetIn: return "source_out_target_in";
    case AssortativityConvention::SourceInTargetOut: return "source_in_target_out";
    case AssortativityConvention::TotalDegree: return "total_degree";
  }
  return "?";
}

AssortativityConvention parse_assortativity_convention(const std::string& name) {
  for (auto c : {AssortativityConvention::SourceOutTargetIn, AssortativityConvention::SourceInTargetOut,
                 AssortativityConvention::TotalDegree})
    if (to_string(c) == name) return c;
  throw Error("unknown assortativity convention '" + name + "'");
}

std::size_t link_count(const SquareMatrix& l) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j) m += linked(l, i, j) ? 1 : 0;
  return m;
}

double link_density(const SquareMatrix& l) {
  const std::size_t n = l.size();
  if (n < 2) throw Error("link density needs at least two banks");
  return static_cast<double>(link_count(l)) / static_cast<double>(n * (n - 1));
}

std::optional<double> degree_assortativity(const SquareMatrix& l, AssortativityConvention convention) {
  std::vector<int> in, out;
  degrees(l, in, out);
  std::vector<double> js, ks;
  for (std::size_t i = 0; i < l.size(); ++i) {
    for (std::size_t j = 0; j < l.size(); ++j) {
      if (!linked(l, i, j)) continue;
      switch (convention) {
        case AssortativityConvention::SourceOutTargetIn:
          js.push_back(out[i] - 1.0);
          ks.push_back(in[j] - 1.0);
          break;
        case AssortativityConvention::SourceInTargetOut:
          js.push_back(in[i] - 1.0);
          ks.push_back(out[j] - 1.0);
          break;
        case AssortativityConvention::TotalDegree:
          js.push_back(in[i] + out[i] - 1.0);
          ks.push_back(in[j] + out[j] - 1.0);
          break;
      }
    }
  }
  const double m = static_cast<double>(js.size());
  if (js.size() < 2) return std::nullopt;
  double sj = 0, sk = 0, sjk = 0, sjj = 0, skk = 0;
  for (std::size_t t = 0; t < js.size(); ++t) {
    sj += js[t];
    sk += ks[t];
    sjk += js[t] * ks[t];
    sjj += js[t] * js[t];
    skk += ks[t] * ks[t];
  }
  const double var_j = sjj - sj * sj / m;
  const double var_k = skk - sk * sk / m;
  // Degrees are integers, so anything this small is a rounding residue of zero.
  if (var_j <= 1e-12 * std::max(1.0, sjj) || var_k <= 1e-12 * std::max(1.0, skk)) return std::nullopt;
  const double r = (sjk - sj * sk / m) / std::sqrt(var_j * var_k);
  return std::clamp(r, -1.0, 1.0);
}

Clustering avg_clustering(const SquareMatrix& l) {
  const std::size_t n = l.size();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (linked(l, i, j)) adj[i][j] = adj[j][i] = 1;
  Clustering c;
  c.local.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < n; ++j)
      if (adj[i][j]) nb.push_back(j);
    if (nb.size() < 2) continue;
    std::size_t closed = 0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) closed += adj[nb[a]][nb[b]];
    const double pairs = static_cast<double>(nb.size() * (nb.size() - 1) / 2);
    c.local[i] = static_cast<double>(closed) / pairs;
  }
  c.mean = n == 0 ? 0.0 : std::accumulate(c.local.begin(), c.local.end(), 0.0) / static_cast<double>(n);
  return c;
}

NearestNeighbourDegree weighted_nn_degree(const SquareMatrix& l) {
  const std::size_t n = l.size();
  std::vector<int> in, out;
  degrees(l, in, out);
  NearestNeighbourDegree r;
  r.values.assign(n, std::nullopt);
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double strength = 0.0, weighted = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = l(i, j) + l(j, i);
      strength += w;
      weighted += w * (in[j] + out[j]);
    }
    if (!(strength > 0.0)) continue;
    r.values[i] = weighted / strength;
    sum += *r.values[i];
    ++present;
  }
  if (present > 0) r.mean = sum / static_cast<double>(present);
  return r;
}

SquareMatrix threshold_network(const SquareMatrix& l, double coverage) {
  if (!(coverage > 0.0 && coverage <= 1.0)) throw Error("coverage must lie in (0, 1]");
  const std::size_t n = l.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> links;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (linked(l, i, j)) {
        links.emplace_back(l(i, j), i, j);
        total += l(i, j);
      }
  std::sort(links.begin(), links.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });
  SquareMatrix kept(n);
  const double target = coverage * total;
  // Summation order differs from the total, so allow a few ulps of slack.
  const double slack = 1e-12 * total;
  double cumulative = 0.0;
  for (const auto& [w, i, j] : links) {
    if (cumulative >= target - slack) break;
    kept(i, j) = w;
    cumulative += w;
  }
  return kept;
}

TopologyReport topology_report(const SquareMatrix& l, AssortativityConvention convention) {
  TopologyReport t;
  t.links = link_count(l);
  t.link_density = link_density(l);
  degrees(l, t.in_degree, t.out_degree);
  t.convention = convention;
  t.assortativity = degree_assortativity(l, convention);
  auto c = avg_clustering(l);
  t.local_clustering = std::move(c.local);
  t.mean_clustering = c.mean;
  auto nn = weighted_nn_degree(l);
  t.weighted_nn_degree = std::move(nn.values);
  t.mean_weighted_nn_degree = nn.mean;
  return t;
}

}  // namespace sysrisk
