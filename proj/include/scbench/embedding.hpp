#ifndef SCBENCH_EMBEDDING_HPP
#define SCBENCH_EMBEDDING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scbench {

enum class EmbeddingMethod {
    pca,
    tsne
};

inline const char* to_string(EmbeddingMethod m) {
    return m == EmbeddingMethod::pca ? "pca" : "tsne";
}

/**
 * @brief Low-dimensional coordinates for a set of cells, with the parameters that produced them.
 */
struct Embedding {
    /** Cells in rows, dimensions in columns. */
    Eigen::MatrixXd coordinates;
    EmbeddingMethod method = EmbeddingMethod::pca;
    /** Every hyperparameter used, serialized as text for provenance. */
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;
    std::vector<std::string> cell_ids;

    std::size_t n_cells() const { return static_cast<std::size_t>(coordinates.rows()); }
    std::size_t dims() const { return static_cast<std::size_t>(coordinates.cols()); }
};

}

#endif
