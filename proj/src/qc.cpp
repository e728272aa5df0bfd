#include "scbench/qc.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "scbench/parallel.hpp"
#include "scbench/rng.hpp"
#include "scbench/stats.hpp"

namespace scbench {

DropoutReport dropout_rate(const CountMatrix& m) {
    if (m.n_cells() == 0 || m.n_genes() == 0) {
        throw DataError("dropout rate needs at least one cell and one gene");
    }
    std::uint64_t n_cells = m.n_cells();
    std::uint64_t total = n_cells * m.n_genes();

    DropoutReport out;
    out.overall_rate = static_cast<double>(total - m.nnz()) / static_cast<double>(total);
    out.per_gene_rate.resize(m.n_genes());
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        out.per_gene_rate[g] = static_cast<double>(n_cells - m.nonzero_in_gene(g)) / static_cast<double>(n_cells);
    }
    return out;
}

DetectionStats detection_stats(const CountMatrix& m) {
    if (m.n_cells() == 0) {
        throw DataError("detection statistics need at least one cell");
    }
    DetectionStats out;
    out.per_cell_detected.assign(m.n_cells(), 0);
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        for (auto c : m.cells_of(g)) {
            ++out.per_cell_detected[c];
        }
    }
    std::vector<double> sorted(out.per_cell_detected.begin(), out.per_cell_detected.end());
    std::sort(sorted.begin(), sorted.end());
    out.q1 = sorted_quantile(sorted, 0.25);
    out.median = sorted_quantile(sorted, 0.5);
    out.q3 = sorted_quantile(sorted, 0.75);
    return out;
}

namespace {

// Number of orderings if it does not exceed `cap`, else nothing.
std::optional<std::size_t> bounded_factorial(std::size_t n, std::size_t cap) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        f *= i;
        if (f > cap) {
            return std::nullopt;
        }
    }
    return f;
}

void accumulate_ordering(const CellMajorView& view, const std::vector<Index>& order, std::vector<char>& seen, std::vector<std::uint64_t>& totals) {
    std::fill(seen.begin(), seen.end(), 0);
    std::uint64_t detected = 0;
    for (std::size_t x = 0; x < order.size(); ++x) {
        for (auto g : view.genes_of(order[x])) {
            if (!seen[g]) {
                seen[g] = 1;
                ++detected;
            }
        }
        totals[x] += detected;
    }
}

}

CumulativeCurve cumulative_detection(const CountMatrix& m, const CumulativeOptions& options) {
    if (options.n_permutations == 0) {
        throw std::invalid_argument("cumulative detection needs at least one permutation");
    }
    std::size_t n = m.n_cells();
    CumulativeCurve out;
    out.seed = options.seed;
    if (n == 0) {
        out.n_permutations = options.n_permutations;
        return out;
    }
    auto view = m.by_cell();

    std::vector<std::vector<Index>> orders;
    auto exhaustive = bounded_factorial(n, options.n_permutations);
    if (exhaustive) {
        std::vector<Index> order(n);
        std::iota(order.begin(), order.end(), 0);
        do {
            orders.push_back(order);
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        orders.resize(options.n_permutations);
        for (std::size_t p = 0; p < options.n_permutations; ++p) {
            orders[p].resize(n);
            std::iota(orders[p].begin(), orders[p].end(), 0);
            Rng rng(derive_seed(options.seed, p));
            rng.shuffle(orders[p]);
        }
    }

    // Integer totals per ordering are exact, so the sum is independent of how work is split.
    std::vector<std::vector<std::uint64_t>> partial(orders.size(), std::vector<std::uint64_t>(n, 0));
    parallel_for(orders.size(), [&](std::size_t begin, std::size_t end) {
        std::vector<char> seen(m.n_genes());
        for (std::size_t p = begin; p < end; ++p) {
            accumulate_ordering(view, orders[p], seen, partial[p]);
        }
    });

    out.n_permutations = orders.size();
    out.x.resize(n);
    out.y.resize(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::uint64_t total = 0;
        for (const auto& p : partial) {
            total += p[x];
        }
        out.x[x] = x + 1;
        out.y[x] = static_cast<double>(total) / static_cast<double>(orders.size());
    }
    return out;
}

std::vector<SensitivityRow> method_sensitivity_table(const SplitMap& splits) {
    std::vector<SensitivityRow> out;
    for (const auto& [key, split] : splits) {
        auto detection = detection_stats(split.matrix);
        auto dropout = dropout_rate(split.matrix);
        out.push_back({ key.method, key.replicate, split.matrix.n_cells(), detection.median, detection.q1, detection.q3, dropout.overall_rate });
    }
    return out;
}

}
