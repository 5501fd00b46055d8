// Cluster a planted dataset and score it against the planted groups.

#include <iostream>

#include "hosc/clustering.hpp"
#include "hosc/evaluation.hpp"
#include "hosc/synthetic.hpp"

int main() {
  const hosc::PlantedData data = hosc::make_planted({});

  hosc::HosParams params;
  params.delta0 = 4.0;
  const hosc::ClusteringResult result = hosc::run_hos(data.points, params);

  std::cout << "points " << result.stats.n_points << ", occupied hyperoctants " << result.stats.n_occupied << '\n'
            << "clusters " << result.clusters.size() << ", noise " << result.noise.size() << '\n';

  const auto pred = result.assignments(data.points.size());
  std::cout << "AMI vs planted groups "
            << hosc::adjusted_mutual_information(std::span<const long>(pred), std::span<const std::size_t>(data.truth))
            << '\n';
}
