#pragma once

#include <cstdint>
#include <random>

namespace pmwls {

using Rng = std::mt19937_64;

/// Independent random streams within one replication.
enum class Stream : std::uint64_t { covariates = 1, errors = 2, restarts = 3 };

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for (master seed, index, stream); distinct keys give unrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, Stream stream);

Rng make_rng(std::uint64_t master, std::uint64_t index, Stream stream);

}  // namespace pmwls
