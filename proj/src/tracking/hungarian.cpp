#include <trackref/tracking/hungarian.hpp>

#include <cmath>
#include <limits>

#include <trackref/core/errors.hpp>

namespace trackref::tracking {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest-augmenting-path solve for a dense nr x nc matrix with nr <= nc.
// Returns col4row; every row gets a column (entries may be "unassignable"
// placeholder costs handled by the caller).
std::vector<int> solve_rectangular(const Eigen::MatrixXd& cost) {
    const int nr = static_cast<int>(cost.rows());
    const int nc = static_cast<int>(cost.cols());
    std::vector<double> u(nr, 0.0), v(nc, 0.0), shortest(nc);
    std::vector<int> path(nc, -1), col4row(nr, -1), row4col(nc, -1), remaining(nc);
    std::vector<char> scanned_rows(nr), scanned_cols(nc);

    for (int cur_row = 0; cur_row < nr; ++cur_row) {
        double min_val = 0.0;
        int i = cur_row;
        int num_remaining = nc;
        for (int it = 0; it < nc; ++it) remaining[it] = nc - it - 1;
        std::fill(scanned_rows.begin(), scanned_rows.end(), 0);
        std::fill(scanned_cols.begin(), scanned_cols.end(), 0);
        std::fill(shortest.begin(), shortest.end(), kInf);

        int sink = -1;
        while (sink == -1) {
            int index = -1;
            double lowest = kInf;
            scanned_rows[i] = 1;
            for (int it = 0; it < num_remaining; ++it) {
                const int j = remaining[it];
                const double r = min_val + cost(i, j) - u[i] - v[j];
                if (r < shortest[j]) {
                    path[j] = i;
                    shortest[j] = r;
                }
                if (shortest[j] < lowest || (shortest[j] == lowest && row4col[j] == -1)) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            if (!(min_val < kInf))
                throw NumericError("assignment: infeasible cost matrix");
            const int j = remaining[index];
            if (row4col[j] == -1)
                sink = j;
            else
                i = row4col[j];
            scanned_cols[j] = 1;
            remaining[index] = remaining[--num_remaining];
        }

        u[cur_row] += min_val;
        for (int r = 0; r < nr; ++r)
            if (scanned_rows[r] && r != cur_row) u[r] += min_val - shortest[col4row[r]];
        for (int c = 0; c < nc; ++c)
            if (scanned_cols[c]) v[c] -= min_val - shortest[c];

        int j = sink;
        while (true) {
            const int r = path[j];
            row4col[j] = r;
            std::swap(col4row[r], j);
            if (r == cur_row) break;
        }
    }
    return col4row;
}

}  // namespace

Assignment hungarian(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    Assignment out;
    out.row_to_col.assign(n, -1);
    out.col_to_row.assign(m, -1);
    if (n == 0 || m == 0) return out;

    // Replace forbidden entries with a finite cost that dominates any sum of
    // feasible entries, so the solver maximizes feasible matches first and
    // minimizes their cost second.
    double finite_sum = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c) {
            const double e = cost(r, c);
            if (!std::isfinite(e))
                throw NumericError("assignment: non-finite cost entry");
            if (e < kForbidden) finite_sum += std::abs(e);
        }
    const double big = 2.0 * finite_sum + 1.0;
    const bool transposed = n > m;
    Eigen::MatrixXd work = transposed ? cost.transpose() : cost;
    for (int r = 0; r < work.rows(); ++r)
        for (int c = 0; c < work.cols(); ++c)
            if (work(r, c) >= kForbidden) work(r, c) = big;

    std::vector<int> col4row = solve_rectangular(work);
    for (int r = 0; r < static_cast<int>(col4row.size()); ++r) {
        const int c = col4row[r];
        const int row = transposed ? c : r;
        const int col = transposed ? r : c;
        if (cost(row, col) >= kForbidden) continue;  // effectively unassigned
        out.row_to_col[row] = col;
        out.col_to_row[col] = row;
        out.total_cost += cost(row, col);
    }
    return out;
}

}  // namespace trackref::tracking
