#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nakasum/egc.hpp"
#include "nakasum/moments.hpp"

namespace nakasum {

// Row-major n x L envelope samples.
struct SampleBatch {
  std::size_t n = 0;
  std::size_t branches = 0;
  std::vector<double> data;
  std::uint64_t seed = 0;
  EnsembleSpec spec;

  double at(std::size_t i, std::size_t k) const { return data[i * branches + k]; }
};

// Samples are produced in fixed blocks, each with its own generator seeded
// from (seed, block). Output does not depend on `threads`.
inline constexpr std::size_t kSampleBlock = 4096;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Gaussian-layer construction: m_z independent complex Gaussian vectors with
// correlation matrix Lambda (through cholesky_psd), Z_k^2 the scaled sum of
// their squared magnitudes.
SampleBatch sample_correlated_nakagami(const EnsembleSpec& spec, std::size_t n,
                                       std::uint64_t seed, unsigned threads = 1);

// Row sums of sample_correlated_nakagami without storing the batch.
std::vector<double> sample_sum(const EnsembleSpec& spec, std::size_t n,
                               std::uint64_t seed, unsigned threads = 1);

enum class BerMethod { ConditionalError, BitCounting };

// Monte-Carlo EGC error rate over per-branch average SNR. One set of
// envelope draws is shared by all grid points. Standard errors land in
// PerfPoint::std_error.
PerfCurve simulate_egc_ber(const ReceiverSpec& rx, const std::vector<double>& snr_db,
                           std::size_t n_bits, std::uint64_t seed,
                           BerMethod method = BerMethod::ConditionalError,
                           unsigned threads = 1);

// Little-endian binary: 8-byte magic, n, L, seed as uint64, then the samples
// as float64 column by column.
inline constexpr char kBatchMagic[9] = "NAKASUM1";
void write_batch_binary(std::ostream& os, const SampleBatch& batch);
SampleBatch read_batch_binary(std::istream& is);
void write_batch_csv(std::ostream& os, const SampleBatch& batch);

}  // namespace nakasum
