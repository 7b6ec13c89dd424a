#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sysrisk/network.hpp"

namespace sysrisk {

/// Which excess degrees pair up across a directed link for the assortativity coefficient.
enum class AssortativityConvention {
  SourceOutTargetIn,  // default
  SourceInTargetOut,
  TotalDegree,
};

std::string to_string(AssortativityConvention convention);
AssortativityConvention parse_assortativity_convention(const std::string& name);

struct TopologyReport {
  std::size_t links = 0;
  double link_density = 0.0;
  std::vector<int> in_degree;
  std::vector<int> out_degree;
  AssortativityConvention convention = AssortativityConvention::SourceOutTargetIn;
  std::optional<double> assortativity;  // absent when undefined
  std::vector<double> local_clustering;
  double mean_clustering = 0.0;
  std::vector<std::optional<double>> weighted_nn_degree;  // absent for isolated banks
  std::optional<double> mean_weighted_nn_degree;
};

/// Strictly positive off-diagonal entries.
std::size_t link_count(const SquareMatrix& l);

/// m / (N (N - 1)). Requires N >= 2.
double link_density(const SquareMatrix& l);

/// Pearson coefficient of excess degrees at both ends of each directed link.
std::optional<double> degree_assortativity(
    const SquareMatrix& l, AssortativityConvention convention = AssortativityConvention::SourceOutTargetIn);

struct Clustering {
  std::vector<double> local;
  double mean = 0.0;
};

/// Clustering of the symmetrised, unweighted graph; banks with fewer than two neighbours get 0.
Clustering avg_clustering(const SquareMatrix& l);

struct NearestNeighbourDegree {
  std::vector<std::optional<double>> values;
  std::optional<double> mean;  // over banks with a value
};

NearestNeighbourDegree weighted_nn_degree(const SquareMatrix& l);

/// Keeps the largest links until they cover at least `coverage` of the total volume.
/// Equal weights are taken in (row, col) order.
SquareMatrix threshold_network(const SquareMatrix& l, double coverage);

TopologyReport topology_report(const SquareMatrix& l,
                               AssortativityConvention convention = AssortativityConvention::SourceOutTargetIn);

}  // namespace sysrisk
