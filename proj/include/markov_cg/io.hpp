#pragma once

// JSON file formats.
//
//   chain:      { "n": int, "K": [[...], ...], "pi": [...] (optional) }
//   partition:  { "n": int, "assignment": [int, ...] }      (0-based)
//   tensor:     { "n": int, "entries": [[...]], "role": "primal" | "dual" }
//   graph:      { "n_hat": int, "membership": [...], "edges": [[k, l], ...],
//                 "undirected": [[k, l], ...] }
//
// Malformed files and schema violations raise Error(ErrorKind::Io); values
// that parse but fail validation (negative entries, bad row sums) raise the
// validation error of the owning module.

#include <optional>
#include <string>

#include <json.hpp>

#include "markov_cg/functionals.hpp"
#include "markov_cg/tensor_cg.hpp"

namespace markov_cg {

using Json = nlohmann::json;

struct ChainFile {
  MarkovMatrix K;
  std::optional<ProbVector> pi;
};

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

ChainFile parse_chain(const Json& j, double tol = 1e-12);
ChainFile read_chain_file(const std::string& path, double tol = 1e-12);
Json chain_to_json(const MarkovMatrix& K, const ProbVector* pi = nullptr);

ClusterMap parse_partition(const Json& j);
ClusterMap read_partition_file(const std::string& path);
Json partition_to_json(const ClusterMap& phi);

EdgeTensor parse_edge_tensor(const Json& j);
Json edge_tensor_to_json(const EdgeTensor& t);

Json quotient_graph_to_json(const QuotientGraph& g);

Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);
Matrix matrix_from_json(const Json& j);
Vector vector_from_json(const Json& j);

Json spectral_estimate_to_json(const SpectralEstimate& e);
Json spectral_report_to_json(const SpectralReport& r);

/// SHA-256 of a file's bytes, lowercase hex.
std::string file_digest(const std::string& path);

}  // namespace markov_cg
