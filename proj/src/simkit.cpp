#include "nakasum/simkit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <thread>

#include "nakasum/errors.hpp"
#include "nakasum/linalg.hpp"

namespace nakasum {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Calls emit(first_row, rows, values) for every block; values is rows x L.
using BlockSink = std::function<void(std::size_t, std::size_t, const double*)>;

void generate_blocks(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed,
                     unsigned threads, const BlockSink& emit) {
  spec.validate();
  if (n < 1) throw ValidationError("sample count must be >= 1");
  const std::size_t nl = spec.branch_count();
  const Matrix chol = cholesky_psd(correlation_matrix(spec));
  const int layers = spec.fading_m;
  std::vector<double> scale(nl);
  for (std::size_t k = 0; k < nl; ++k) scale[k] = spec.powers[k] / (2.0 * layers);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;

  const auto work = [&](std::size_t first_block, std::size_t stride) {
    std::vector<double> out(kSampleBlock * nl);
    std::vector<double> g(nl);
    std::vector<double> acc(nl);
    for (std::size_t b = first_block; b < blocks; b += stride) {
      std::mt19937_64 eng(derive_seed(seed, b));
      std::normal_distribution<double> normal;
      const std::size_t start = b * kSampleBlock;
      const std::size_t rows = std::min(kSampleBlock, n - start);
      for (std::size_t i = 0; i < rows; ++i) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int layer = 0; layer < 2 * layers; ++layer) {
          for (auto& v : g) v = normal(eng);
          for (std::size_t k = 0; k < nl; ++k) {
            double x = 0.0;
            for (std::size_t j = 0; j <= k; ++j) x += chol(k, j) * g[j];
            acc[k] += x * x;
          }
        }
        for (std::size_t k = 0; k < nl; ++k) out[i * nl + k] = std::sqrt(scale[k] * acc[k]);
      }
      emit(start, rows, out.data());
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, blocks));
  if (workers == 1) {
    work(0, 1);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(w, workers);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("sample file truncated");
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  return v;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

SampleBatch sample_correlated_nakagami(const EnsembleSpec& spec, std::size_t n,
                                       std::uint64_t seed, unsigned threads) {
  SampleBatch batch;
  batch.n = n;
  batch.branches = spec.branch_count();
  batch.seed = seed;
  batch.spec = spec;
  batch.data.resize(n * batch.branches);
  const std::size_t nl = batch.branches;
  generate_blocks(spec, n, seed, threads, [&](std::size_t start, std::size_t rows, const double* v) {
    std::copy(v, v + rows * nl, batch.data.begin() + static_cast<std::ptrdiff_t>(start * nl));
  });
  return batch;
}

std::vector<double> sample_sum(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed,
                               unsigned threads) {
  std::vector<double> out(n);
  const std::size_t nl = spec.branch_count();
  generate_blocks(spec, n, seed, threads, [&](std::size_t start, std::size_t rows, const double* v) {
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < nl; ++k) s += v[i * nl + k];
      out[start + i] = s;
    }
  });
  return out;
}

PerfCurve simulate_egc_ber(const ReceiverSpec& rx, const std::vector<double>& snr_db,
                           std::size_t n_bits, std::uint64_t seed, BerMethod method,
                           unsigned threads) {
  rx.validate();
  if (n_bits < 10000) throw ValidationError("simulate_egc_ber: n_bits must be >= 10^4");
  const std::vector<double> sums = sample_sum(rx.ensemble, n_bits, seed, threads);
  const double l = static_cast<double>(rx.ensemble.branch_count());
  const double nd = static_cast<double>(n_bits);
  PerfCurve out;
  for (std::size_t p = 0; p < snr_db.size(); ++p) {
    const double n0 = noise_for_snr(rx.ensemble, snr_db[p]);
    double s1 = 0.0;
    double s2 = 0.0;
    if (method == BerMethod::ConditionalError) {
      for (double z : sums) {
        const double gamma = z * z / (l * n0);
        const double pe = rx.modulation == Modulation::BpskCoherent
                              ? 0.5 * std::erfc(std::sqrt(gamma))
                              : 0.5 * std::exp(-0.5 * gamma);
        s1 += pe;
        s2 += pe * pe;
      }
      const double mean = s1 / nd;
      const double var = std::max(0.0, s2 / nd - mean * mean) * nd / (nd - 1.0);
      out.points.push_back({snr_db[p], mean, std::sqrt(var / nd)});
    } else {
      std::mt19937_64 eng(derive_seed(seed ^ 0x5bd1e995ULL, p));
      // Unit symbol energy against complex noise of variance N0 per symbol.
      std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
      std::size_t errors = 0;
      for (double z : sums) {
        const double amp = std::sqrt(z * z / (l * n0));
        bool err = false;
        if (rx.modulation == Modulation::BpskCoherent) {
          err = amp + noise(eng) < 0.0;
        } else {
          const double i1 = amp + noise(eng);
          const double q1 = noise(eng);
          const double i0 = noise(eng);
          const double q0 = noise(eng);
          err = i0 * i0 + q0 * q0 > i1 * i1 + q1 * q1;
        }
        errors += err ? 1 : 0;
      }
      const double pe = static_cast<double>(errors) / nd;
      out.points.push_back({snr_db[p], pe, std::sqrt(pe * (1.0 - pe) / nd)});
    }
  }
  return out;
}

void write_batch_binary(std::ostream& os, const SampleBatch& batch) {
  os.write(kBatchMagic, 8);
  put_u64(os, batch.n);
  put_u64(os, batch.branches);
  put_u64(os, batch.seed);
  for (std::size_t k = 0; k < batch.branches; ++k) {
    for (std::size_t i = 0; i < batch.n; ++i) put_u64(os, std::bit_cast<std::uint64_t>(batch.at(i, k)));
  }
  if (!os) throw IoError("failed to write sample batch");
}

SampleBatch read_batch_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kBatchMagic, 8) != 0) {
    throw IoError("not a sample batch file");
  }
  SampleBatch batch;
  batch.n = get_u64(is);
  batch.branches = get_u64(is);
  batch.seed = get_u64(is);
  batch.data.resize(batch.n * batch.branches);
  for (std::size_t k = 0; k < batch.branches; ++k) {
    for (std::size_t i = 0; i < batch.n; ++i) {
      batch.data[i * batch.branches + k] = std::bit_cast<double>(get_u64(is));
    }
  }
  return batch;
}

void write_batch_csv(std::ostream& os, const SampleBatch& batch) {
  for (std::size_t k = 0; k < batch.branches; ++k) os << (k ? "," : "") << 'z' << k + 1;
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < batch.n; ++i) {
    for (std::size_t k = 0; k < batch.branches; ++k) os << (k ? "," : "") << batch.at(i, k);
    os << '\n';
  }
  if (!os) throw IoError("failed to write sample batch");
}

}  // namespace nakasum
