#include "scbench/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace scbench {

namespace {

std::vector<std::string> generated_ids(const char* prefix, std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(prefix + std::to_string(i));
    }
    return out;
}

void check_ids(const std::vector<std::string>& ids, std::size_t expected, const char* what) {
    if (ids.size() != expected) {
        throw DataError(std::string(what) + " id list has length " + std::to_string(ids.size()) + ", expected " + std::to_string(expected));
    }
    std::unordered_set<std::string> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw DataError(std::string("duplicate ") + what + " id '" + id + "'");
        }
    }
}

}

Count CountMatrix::at(std::size_t cell, std::size_t gene) const {
    auto cells = cells_of(gene);
    auto it = std::lower_bound(cells.begin(), cells.end(), static_cast<Index>(cell));
    if (it == cells.end() || *it != cell) {
        return 0;
    }
    return counts_of(gene)[static_cast<std::size_t>(it - cells.begin())];
}

std::vector<Triplet> CountMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (std::size_t g = 0; g < n_genes(); ++g) {
        auto cells = cells_of(g);
        auto counts = counts_of(g);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out.push_back({ cells[i], static_cast<Index>(g), counts[i] });
        }
    }
    return out;
}

CellMajorView CountMatrix::by_cell() const {
    CellMajorView view;
    view.offsets.assign(n_cells() + 1, 0);
    for (auto c : cells_) {
        ++view.offsets[c + 1];
    }
    for (std::size_t c = 0; c < n_cells(); ++c) {
        view.offsets[c + 1] += view.offsets[c];
    }
    view.genes.resize(nnz());
    view.counts.resize(nnz());
    std::vector<std::size_t> cursor(view.offsets.begin(), view.offsets.end() - 1);
    for (std::size_t g = 0; g < n_genes(); ++g) {
        auto cells = cells_of(g);
        auto counts = counts_of(g);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            auto& pos = cursor[cells[i]];
            view.genes[pos] = static_cast<Index>(g);
            view.counts[pos] = counts[i];
            ++pos;
        }
    }
    return view;
}

CountMatrix CountMatrix::with_ids(std::vector<std::string> cell_ids, std::vector<std::string> gene_ids) const {
    check_ids(cell_ids, n_cells(), "cell");
    check_ids(gene_ids, n_genes(), "gene");
    CountMatrix out = *this;
    out.cell_ids_ = std::move(cell_ids);
    out.gene_ids_ = std::move(gene_ids);
    return out;
}

CountMatrix from_triplets(
    std::vector<Triplet> triplets,
    std::size_t n_cells,
    std::size_t n_genes,
    std::vector<std::string> cell_ids,
    std::vector<std::string> gene_ids)
{
    if (n_cells > std::numeric_limits<Index>::max() || n_genes > std::numeric_limits<Index>::max()) {
        throw DataError("matrix dimensions exceed the 32-bit index range");
    }
    if (cell_ids.empty() && n_cells > 0) {
        cell_ids = generated_ids("cell_", n_cells);
    }
    if (gene_ids.empty() && n_genes > 0) {
        gene_ids = generated_ids("gene_", n_genes);
    }
    check_ids(cell_ids, n_cells, "cell");
    check_ids(gene_ids, n_genes, "gene");

    std::erase_if(triplets, [](const Triplet& t) { return t.count == 0; });
    for (const auto& t : triplets) {
        if (t.cell >= n_cells || t.gene >= n_genes) {
            throw DataError("entry (" + std::to_string(t.cell) + ", " + std::to_string(t.gene) + ") is out of range");
        }
        if (t.count > std::numeric_limits<Count>::max()) {
            throw DataError("count " + std::to_string(t.count) + " overflows 32 bits");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.gene != b.gene ? a.gene < b.gene : a.cell < b.cell;
    });
    for (std::size_t i = 1; i < triplets.size(); ++i) {
        if (triplets[i].gene == triplets[i - 1].gene && triplets[i].cell == triplets[i - 1].cell) {
            throw DataError("duplicate entry (" + std::to_string(triplets[i].cell) + ", " + std::to_string(triplets[i].gene) + ")");
        }
    }

    CountMatrix out;
    out.offsets_.assign(n_genes + 1, 0);
    out.cells_.reserve(triplets.size());
    out.counts_.reserve(triplets.size());
    for (const auto& t : triplets) {
        ++out.offsets_[t.gene + 1];
        out.cells_.push_back(t.cell);
        out.counts_.push_back(static_cast<Count>(t.count));
    }
    for (std::size_t g = 0; g < n_genes; ++g) {
        out.offsets_[g + 1] += out.offsets_[g];
    }
    out.cell_ids_ = std::move(cell_ids);
    out.gene_ids_ = std::move(gene_ids);
    return out;
}

CountMatrix submatrix(const CountMatrix& m, const std::vector<bool>& cell_mask, const std::vector<bool>& gene_mask) {
    if (cell_mask.size() != m.n_cells() || gene_mask.size() != m.n_genes()) {
        throw DataError("mask lengths do not match matrix dimensions");
    }
    std::vector<Index> new_cell(m.n_cells());
    CountMatrix out;
    Index next = 0;
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        if (cell_mask[c]) {
            new_cell[c] = next++;
            out.cell_ids_.push_back(m.cell_ids()[c]);
        }
    }
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        if (!gene_mask[g]) {
            continue;
        }
        auto cells = m.cells_of(g);
        auto counts = m.counts_of(g);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cell_mask[cells[i]]) {
                out.cells_.push_back(new_cell[cells[i]]);
                out.counts_.push_back(counts[i]);
            }
        }
        out.offsets_.push_back(out.cells_.size());
        out.gene_ids_.push_back(m.gene_ids()[g]);
    }
    return out;
}

std::vector<double> gene_nonzero_fraction(const CountMatrix& m) {
    if (m.n_cells() == 0) {
        throw DataError("nonzero fraction needs at least one cell");
    }
    std::vector<double> out(m.n_genes());
    double n = static_cast<double>(m.n_cells());
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        out[g] = static_cast<double>(m.nonzero_in_gene(g)) / n;
    }
    return out;
}

GeneStats gene_stats(const CountMatrix& m) {
    if (m.n_cells() < 2) {
        throw DataError("gene statistics need at least two cells");
    }
    std::size_t n_genes = m.n_genes();
    double n = static_cast<double>(m.n_cells());
    GeneStats out;
    out.nonzero_cell_count.resize(n_genes);
    out.mean.resize(n_genes);
    out.standard_deviation.resize(n_genes);
    out.cv.resize(n_genes);

    for (std::size_t g = 0; g < n_genes; ++g) {
        auto counts = m.counts_of(g);
        double sum = 0;
        for (auto c : counts) {
            sum += c;
        }
        double mean = sum / n;

        // Two-pass variance: stored entries plus the implicit zeros.
        double ss = static_cast<double>(m.n_cells() - counts.size()) * mean * mean;
        for (auto c : counts) {
            double d = c - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / n);

        out.nonzero_cell_count[g] = counts.size();
        out.mean[g] = mean;
        out.standard_deviation[g] = sd;
        out.cv[g] = mean > 0 ? sd / mean : 0.0;
    }
    return out;
}

ExpressionMatrix to_dense(const CountMatrix& m, std::size_t budget) {
    if (m.n_genes() != 0 && m.n_cells() > budget / m.n_genes()) {
        throw DataError("densifying " + std::to_string(m.n_cells()) + "x" + std::to_string(m.n_genes()) + " exceeds the budget of " + std::to_string(budget) + " values");
    }
    ExpressionMatrix out;
    out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n_cells()), static_cast<Eigen::Index>(m.n_genes()));
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        auto cells = m.cells_of(g);
        auto counts = m.counts_of(g);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out.values(cells[i], static_cast<Eigen::Index>(g)) = counts[i];
        }
    }
    out.cell_ids = m.cell_ids();
    out.gene_ids = m.gene_ids();
    return out;
}

CountMatrix from_dense(const ExpressionMatrix& x) {
    std::vector<Triplet> triplets;
    for (Eigen::Index g = 0; g < x.values.cols(); ++g) {
        for (Eigen::Index c = 0; c < x.values.rows(); ++c) {
            double v = x.values(c, g);
            if (!(v >= 0) || v != std::floor(v) || v > std::numeric_limits<Count>::max()) {
                throw DataError("dense value is not a non-negative 32-bit integer");
            }
            if (v > 0) {
                triplets.push_back({ static_cast<Index>(c), static_cast<Index>(g), static_cast<std::uint64_t>(v) });
            }
        }
    }
    return from_triplets(std::move(triplets), x.n_cells(), x.n_genes(), x.cell_ids, x.gene_ids);
}

}
