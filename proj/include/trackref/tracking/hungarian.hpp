#pragma once

#include <vector>

#include <Eigen/Dense>

namespace trackref::tracking {

// Entries at or above this sentinel mark forbidden pairs.
inline constexpr double kForbidden = 1e18;

struct Assignment {
    std::vector<int> row_to_col;  // -1 for unassigned rows
    std::vector<int> col_to_row;  // -1 for unassigned columns
    double total_cost = 0.0;      // over assigned (non-forbidden) pairs
    int size() const {
        int n = 0;
        for (int c : row_to_col) n += (c >= 0);
        return n;
    }
};

// Minimum-cost linear assignment by shortest augmenting paths. Among all
// maximum-size feasible matchings the returned one has minimal total cost;
// forbidden pairs are never assigned. Empty matrices yield an empty
// assignment. Entries must be finite or the forbidden sentinel.
Assignment hungarian(const Eigen::MatrixXd& cost);

}  // namespace trackref::tracking
