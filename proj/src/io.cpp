#include "markov_cg/io.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

namespace markov_cg {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::Io, what);
}

const Json& require_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    schema_error(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

int require_n(const Json& j) {
  const Json& n = require_field(j, "n");
  if (!n.is_number_integer() || n.get<int>() < 1) {
    schema_error("field 'n' must be a positive integer");
  }
  return n.get<int>();
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    std::ostringstream os;
    os << path << ": parse error at byte " << e.byte << ": " << e.what();
    throw Error(ErrorKind::Io, os.str());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    schema_error("expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      schema_error("ragged matrix at row " + std::to_string(i));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<size_t>(c)];
      if (!v.is_number()) {
        schema_error("non-numeric matrix entry at row " + std::to_string(i));
      }
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) schema_error("expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) schema_error("non-numeric vector entry");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

ChainFile parse_chain(const Json& j, double tol) {
  const int n = require_n(j);
  const Matrix K = matrix_from_json(require_field(j, "K"));
  if (K.rows() != n || K.cols() != n) {
    schema_error("'K' must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  ChainFile out{validate_markov(K, tol), std::nullopt};
  if (j.contains("pi") && !j.at("pi").is_null()) {
    Vector pi = vector_from_json(j.at("pi"));
    if (pi.size() != n) schema_error("'pi' must have length n");
    out.pi = ProbVector::positive(std::move(pi), tol);
  }
  return out;
}

ChainFile read_chain_file(const std::string& path, double tol) {
  const Json j = read_json_file(path);
  try {
    return parse_chain(j, tol);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

Json chain_to_json(const MarkovMatrix& K, const ProbVector* pi) {
  Json j{{"n", K.rows()}, {"K", matrix_to_json(K.entries())}};
  if (pi != nullptr) j["pi"] = vector_to_json(pi->entries());
  return j;
}

ClusterMap parse_partition(const Json& j) {
  const int n = require_n(j);
  const Json& a = require_field(j, "assignment");
  if (!a.is_array() || static_cast<int>(a.size()) != n) {
    schema_error("'assignment' must be an array of length n");
  }
  std::vector<int> assignment;
  assignment.reserve(a.size());
  for (const Json& v : a) {
    if (!v.is_number_integer()) schema_error("non-integer cluster label");
    assignment.push_back(v.get<int>());
  }
  return ClusterMap::make(std::move(assignment));
}

ClusterMap read_partition_file(const std::string& path) {
  const Json j = read_json_file(path);
  try {
    return parse_partition(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

Json partition_to_json(const ClusterMap& phi) {
  return Json{{"n", phi.n()}, {"assignment", phi.assignment()}};
}

EdgeTensor parse_edge_tensor(const Json& j) {
  const int n = require_n(j);
  EdgeTensor t;
  t.entries = matrix_from_json(require_field(j, "entries"));
  if (t.entries.rows() != n || t.entries.cols() != n) {
    schema_error("'entries' must be n x n");
  }
  const Json& role = require_field(j, "role");
  if (role == "primal") {
    t.role = TensorRole::Primal;
  } else if (role == "dual") {
    t.role = TensorRole::Dual;
  } else {
    schema_error("'role' must be \"primal\" or \"dual\"");
  }
  return t;
}

Json edge_tensor_to_json(const EdgeTensor& t) {
  return Json{{"n", t.n()},
              {"entries", matrix_to_json(t.entries)},
              {"role", t.role == TensorRole::Primal ? "primal" : "dual"}};
}

Json quotient_graph_to_json(const QuotientGraph& g) {
  Json edges = Json::array();
  for (const auto& [k, l] : g.edges) edges.push_back({k, l});
  Json undirected = Json::array();
  for (const auto& [k, l] : g.symmetrized()) undirected.push_back({k, l});
  return Json{{"n_hat", g.n_hat},
              {"membership", g.membership},
              {"edges", std::move(edges)},
              {"undirected", std::move(undirected)}};
}

Json spectral_estimate_to_json(const SpectralEstimate& e) {
  return Json{{"value", e.value},
              {"method", e.method},
              {"certificate", vector_to_json(e.certificate)},
              {"iterations", e.iterations},
              {"best_start", e.best_start}};
}

Json spectral_report_to_json(const SpectralReport& r) {
  return Json{
      {"kind", r.kind == FunctionalKind::Poincare ? "poincare" : "log_sobolev"},
      {"profile", r.profile},
      {"lambda", r.fine.value},
      {"lambda_hat", r.coarse.value},
      {"fine", spectral_estimate_to_json(r.fine)},
      {"coarse", spectral_estimate_to_json(r.coarse)},
      {"monotone", r.monotone}};
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 4096> buf{};
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0')
       << static_cast<int>(md[i]);
  }
  return os.str();
}

}  // namespace markov_cg
