#include <limits>

#include "bequest/analysis.hpp"

namespace bequest {

const ReferenceTables& published_tables() {
  static const ReferenceTables tables = [] {
    ReferenceTables t;
    t.base = reference_base();
    t.consumption = {
        {0.0, 0.375, 0.625, {0.212, 0.637, 0.397, 0.0, 0.0}},
        {0.0005, 0.381, 0.631, {0.207, 0.622, 0.417, 0.0, 0.0}},
        {0.005, 0.403, 0.688, {0.428, 0.724, 0.560, 0.0, 0.0}},
        {0.01, 0.397, 0.750, {0.748, 0.983, 0.794, 0.159, 0.0}},
        {0.02, 0.354, 0.875, {1.407, 1.597, 1.191, 0.556, 0.0}},
        {0.03, 0.295, 1.000, {2.072, 2.223, 1.588, 0.953, 0.318}},
        {0.04, 0.215, 1.333, {2.693, 2.575, 1.932, 1.284, 0.615}},
        {0.05, 0.124, 1.667, {3.359, 2.893, 2.239, 1.573, 0.874}},
        {0.06, 0.028, 2.000, {3.851, 3.194, 2.528, 1.846, 1.122}},
        {0.0629, 0.0, 2.097, {3.937, 3.278, 2.609, 1.923, 1.193}},
    };
    t.premium = {
        {0.0, 0.0, 0.667, {0.400, 0.259, 0.118, 0.0, 0.0}},
        {0.01, 0.0, 0.750, {0.707, 0.490, 0.272, 0.0544, 0.0}},
        {0.02, 0.0, 0.800, {1.078, 0.770, 0.462, 0.154, 0.0}},
        {0.03, 0.133, 0.833, {1.407, 1.092, 0.683, 0.273, 0.0}},
        {0.04, 0.259, 0.857, {1.407, 1.447, 0.927, 0.408, 0.0}},
        {0.05, 0.357, 0.875, {1.407, 1.600, 1.191, 0.556, 0.0}},
        {0.10, 0.609, 0.923, {1.407, 1.600, 1.833, 1.402, 0.145}},
        {0.20, 0.782, 0.957, {1.407, 1.600, 1.833, 2.106, 0.724}},
        {0.50, 0.907, 0.981, {1.407, 1.600, 1.833, 2.106, 2.406}},
    };
    t.no_insurance = {std::numeric_limits<double>::infinity(), 1.0, 1.000,
                      {1.407, 1.600, 1.833, 2.106, 2.406}};
    return t;
  }();
  return tables;
}

}  // namespace bequest
