#include "riemopt/bench/instance.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "riemopt/random.hpp"

namespace riemopt::bench {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

enum Stream : std::uint32_t { kA1 = 1, kA2 = 2, kSupport = 3, kSignal = 4, kNoise1 = 5, kNoise2 = 6 };

MatrixXd gaussian_matrix(Index rows, Index cols, double stddev, CounterRng rng) {
  MatrixXd A(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = stddev * rng.normal();
  return A;
}

void put_doubles(std::string& out, const double* p, Index count) {
  for (Index i = 0; i < count; ++i) {
    auto bits = std::bit_cast<std::uint64_t>(p[i]);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

void get_doubles(const std::string& in, std::size_t& pos, double* p, Index count) {
  if (in.size() < pos + 8 * static_cast<std::size_t>(count))
    throw Error(ErrorCode::Io, "instance file is truncated");
  for (Index i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos++])) << (8 * b);
    p[i] = std::bit_cast<double>(bits);
  }
}

}  // namespace

int InstanceParams::support_size() const {
  return static_cast<int>(std::ceil(sparsity * static_cast<double>(n) - 1e-12));
}

void InstanceParams::validate() const {
  if (!(m_rows > 0 && n > m_rows)) throw Error(ErrorCode::InvalidArgument, "need n > m_rows > 0");
  if (!(sparsity > 0.0 && sparsity < 1.0)) throw Error(ErrorCode::InvalidArgument, "sparsity must lie in (0,1)");
  if (sparsity * n < 1.0) throw Error(ErrorCode::InvalidArgument, "sparsity * n < 1: empty support");
  if (2 * support_size() > n) throw Error(ErrorCode::InvalidArgument, "supports cannot be disjoint: 2k > n");
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambdas must be >= 0");
  if (!(noise_std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_std must be >= 0");
}

Instance generate_instance(const InstanceParams& params) {
  params.validate();
  const Index n = params.n, m = params.m_rows;
  const std::uint64_t seed = params.seed;
  Instance inst;
  inst.params = params;
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  inst.A1 = gaussian_matrix(m, n, sd, CounterRng(seed, kA1));
  inst.A2 = gaussian_matrix(m, n, sd, CounterRng(seed, kA2));

  // Fisher-Yates; the first k indices support x1*, the next k support x2*.
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  CounterRng shuffle(seed, kSupport);
  for (Index i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)], perm[shuffle.below(static_cast<std::uint64_t>(i) + 1)]);
  const int k = params.support_size();
  CounterRng values(seed, kSignal);
  inst.x1_star = VectorXd::Zero(n);
  inst.x2_star = VectorXd::Zero(n);
  for (int j = 0; j < k; ++j) inst.x1_star[perm[static_cast<std::size_t>(j)]] = values.normal();
  for (int j = 0; j < k; ++j) inst.x2_star[perm[static_cast<std::size_t>(k + j)]] = values.normal();
  inst.x1_star.normalize();
  inst.x2_star.normalize();

  inst.b1 = inst.A1 * inst.x1_star;
  inst.b2 = inst.A2 * inst.x2_star;
  if (params.noise_std > 0.0) {
    inst.b1 += params.noise_std * CounterRng(seed, kNoise1).normal_vector(m);
    inst.b2 += params.noise_std * CounterRng(seed, kNoise2).normal_vector(m);
  }
  return inst;
}

std::string serialize_instance(const Instance& inst) {
  const InstanceParams& p = inst.params;
  nlohmann::ordered_json header;
  header["n"] = p.n;
  header["m_rows"] = p.m_rows;
  header["sparsity"] = p.sparsity;
  header["lambda1"] = p.lambda1;
  header["lambda2"] = p.lambda2;
  header["noise_std"] = p.noise_std;
  header["seed"] = p.seed;
  header["format_version"] = kInstanceFormatVersion;
  std::string out = header.dump();
  out.push_back('\n');
  put_doubles(out, inst.A1.data(), inst.A1.size());
  put_doubles(out, inst.A2.data(), inst.A2.size());
  put_doubles(out, inst.b1.data(), inst.b1.size());
  put_doubles(out, inst.b2.data(), inst.b2.size());
  put_doubles(out, inst.x1_star.data(), inst.x1_star.size());
  put_doubles(out, inst.x2_star.data(), inst.x2_star.size());
  return out;
}

Instance deserialize_instance(const std::string& bytes) {
  const auto eol = bytes.find('\n');
  if (eol == std::string::npos) throw Error(ErrorCode::Io, "instance file has no header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, eol));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad instance header: ") + e.what());
  }
  Instance inst;
  InstanceParams& p = inst.params;
  try {
    if (header.at("format_version").get<int>() != kInstanceFormatVersion)
      throw Error(ErrorCode::Io, "unsupported instance format version");
    p.n = header.at("n").get<int>();
    p.m_rows = header.at("m_rows").get<int>();
    p.sparsity = header.at("sparsity").get<double>();
    p.lambda1 = header.at("lambda1").get<double>();
    p.lambda2 = header.at("lambda2").get<double>();
    p.noise_std = header.at("noise_std").get<double>();
    p.seed = header.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad instance header: ") + e.what());
  }
  if (p.n <= 0 || p.m_rows <= 0) throw Error(ErrorCode::Io, "bad instance dimensions");
  const Index n = p.n, m = p.m_rows;
  std::size_t pos = eol + 1;
  inst.A1.resize(m, n);
  inst.A2.resize(m, n);
  inst.b1.resize(m);
  inst.b2.resize(m);
  inst.x1_star.resize(n);
  inst.x2_star.resize(n);
  get_doubles(bytes, pos, inst.A1.data(), inst.A1.size());
  get_doubles(bytes, pos, inst.A2.data(), inst.A2.size());
  get_doubles(bytes, pos, inst.b1.data(), m);
  get_doubles(bytes, pos, inst.b2.data(), m);
  get_doubles(bytes, pos, inst.x1_star.data(), n);
  get_doubles(bytes, pos, inst.x2_star.data(), n);
  if (pos != bytes.size()) throw Error(ErrorCode::Io, "instance file has trailing bytes");
  return inst;
}

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  const std::string bytes = serialize_instance(inst);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(ErrorCode::Io, "write failed: " + path);
}

Instance load_instance(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path);
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return deserialize_instance(bytes);
}

CompositeObjective make_objective(const Instance& inst, RetractionKind kind) {
  const Manifold M = Manifold::sphere(inst.params.n, kind);
  return CompositeObjective(M, {{make_least_squares(inst.A1, inst.b1), make_l1(inst.params.lambda1)},
                                {make_least_squares(inst.A2, inst.b2), make_l1(inst.params.lambda2)}});
}

Point random_sphere_point(const Manifold& sphere, std::uint64_t seed, std::uint32_t stream) {
  CounterRng rng(seed, stream);
  VectorXd v = rng.normal_vector(sphere.dim());
  while (v.norm() == 0.0) v = rng.normal_vector(sphere.dim());
  return sphere.point(std::move(v));
}

}  // namespace riemopt::bench
