#pragma once

// Polynomial products modulo m. Three back ends:
//   schoolbook for short inputs,
//   multi-prime NTT with Garner reconstruction when m < 2^64,
//   Kronecker substitution through GMP otherwise.

#include <gmp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <vector>

#include "trisqrt/arith.hpp"

namespace trisqrt {

namespace ntt {

struct Prime {
  uint32_t mod;
  uint32_t root;  // generator of the multiplicative group
};

// p - 1 is divisible by 2^23 or more for every entry.
inline constexpr std::array<Prime, 7> kPrimes{{{998244353u, 3u},
                                               {167772161u, 3u},
                                               {469762049u, 3u},
                                               {754974721u, 11u},
                                               {2113929217u, 5u},
                                               {1811939329u, 13u},
                                               {2013265921u, 31u}}};

inline constexpr size_t kMaxLog = 23;

constexpr uint32_t pow_mod(uint64_t b, uint64_t e, uint32_t m) {
  uint64_t r = 1;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return static_cast<uint32_t>(r);
}

inline void transform(std::vector<uint32_t>& a, bool invert, const Prime& pr) {
  const size_t n = a.size();
  const uint32_t m = pr.mod;
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    uint32_t w = pow_mod(pr.root, (m - 1) / len, m);
    if (invert) w = pow_mod(w, m - 2, m);
    std::vector<uint32_t> tw(len / 2);
    tw[0] = 1;
    for (size_t i = 1; i < len / 2; ++i) tw[i] = static_cast<uint32_t>(uint64_t(tw[i - 1]) * w % m);
    for (size_t i = 0; i < n; i += len)
      for (size_t j = 0; j < len / 2; ++j) {
        uint32_t u = a[i + j];
        uint32_t v = static_cast<uint32_t>(uint64_t(a[i + j + len / 2]) * tw[j] % m);
        uint32_t s = u + v;
        a[i + j] = s >= m ? s - m : s;
        a[i + j + len / 2] = u >= v ? u - v : u + m - v;
      }
  }
  if (invert) {
    uint32_t ninv = pow_mod(n, m - 2, m);
    for (auto& x : a) x = static_cast<uint32_t>(uint64_t(x) * ninv % m);
  }
}

/// Cyclic-free product of a and b modulo one NTT prime, first n_out terms.
inline std::vector<uint32_t> convolve_prime(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b, size_t n_out,
                                            const Prime& pr) {
  size_t need = std::min(n_out, a.size() + b.size() - 1);
  size_t n = 1;
  while (n < a.size() + b.size() - 1) n <<= 1;
  std::vector<uint32_t> fa(n, 0), fb(n, 0);
  for (size_t i = 0; i < a.size(); ++i) fa[i] = static_cast<uint32_t>(a[i] % pr.mod);
  for (size_t i = 0; i < b.size(); ++i) fb[i] = static_cast<uint32_t>(b[i] % pr.mod);
  transform(fa, false, pr);
  transform(fb, false, pr);
  for (size_t i = 0; i < n; ++i) fa[i] = static_cast<uint32_t>(uint64_t(fa[i]) * fb[i] % pr.mod);
  transform(fa, true, pr);
  fa.resize(need);
  return fa;
}

inline unsigned thread_cap() {
  if (const char* env = std::getenv("TRISQRT_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 4;
}

inline size_t primes_needed(size_t terms, uint64_t m) {
  // need prod(primes) > terms * (m-1)^2
  Int bound = Int(static_cast<unsigned long>(terms)) * Int(static_cast<unsigned long>(m - 1)) *
              Int(static_cast<unsigned long>(m - 1));
  Int prod = 1;
  for (size_t i = 0; i < kPrimes.size(); ++i) {
    prod *= static_cast<unsigned long>(kPrimes[i].mod);
    if (prod > bound) return i + 1;
  }
  fail(ErrorCode::Unsupported, "NTT prime table too small for this modulus");
}

}  // namespace ntt

/// Product mod m (m < 2^64) of coefficient vectors with entries in [0, m),
/// truncated to n_out terms.
inline std::vector<uint64_t> mul_mod_ntt(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b, uint64_t m,
                                         size_t n_out) {
  if (a.empty() || b.empty() || n_out == 0) return {};
  std::vector<uint64_t> a_cut(a.begin(), a.begin() + std::min(a.size(), n_out));
  std::vector<uint64_t> b_cut(b.begin(), b.begin() + std::min(b.size(), n_out));
  require(a_cut.size() + b_cut.size() - 1 <= (size_t(1) << ntt::kMaxLog), ErrorCode::Unsupported,
          "NTT length exceeds 2^23");
  const size_t k = ntt::primes_needed(std::min(a_cut.size(), b_cut.size()), m);
  std::vector<std::vector<uint32_t>> res(k);
  if (ntt::thread_cap() > 1 && a_cut.size() + b_cut.size() > 4096) {
    std::vector<std::future<std::vector<uint32_t>>> jobs;
    for (size_t i = 0; i < k; ++i)
      jobs.push_back(std::async(std::launch::async, ntt::convolve_prime, std::cref(a_cut), std::cref(b_cut), n_out,
                                std::cref(ntt::kPrimes[i])));
    for (size_t i = 0; i < k; ++i) res[i] = jobs[i].get();
  } else {
    for (size_t i = 0; i < k; ++i) res[i] = ntt::convolve_prime(a_cut, b_cut, n_out, ntt::kPrimes[i]);
  }
  const size_t len = res[0].size();

  // Garner: x = t_0 + p_0 (t_1 + p_1 (t_2 + ...)), then reduce x mod m.
  std::array<std::array<uint32_t, 7>, 7> inv{};
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < i; ++j)
      inv[j][i] = ntt::pow_mod(ntt::kPrimes[j].mod, ntt::kPrimes[i].mod - 2, ntt::kPrimes[i].mod);
  std::array<uint64_t, 7> prefix_mod_m{};
  {
    unsigned __int128 acc = 1 % m;
    for (size_t i = 0; i < k; ++i) {
      prefix_mod_m[i] = static_cast<uint64_t>(acc);
      acc = acc * ntt::kPrimes[i].mod % m;
    }
  }
  std::vector<uint64_t> out(len);
  std::array<uint32_t, 7> t{};
  for (size_t n = 0; n < len; ++n) {
    for (size_t i = 0; i < k; ++i) {
      const uint32_t pi = ntt::kPrimes[i].mod;
      uint64_t v = res[i][n];
      for (size_t j = 0; j < i; ++j) {
        uint64_t diff = (v + pi - t[j] % pi) % pi;
        v = diff * inv[j][i] % pi;
      }
      t[i] = static_cast<uint32_t>(v);
    }
    unsigned __int128 x = 0;
    for (size_t i = 0; i < k; ++i) x = (x + (unsigned __int128)t[i] * prefix_mod_m[i]) % m;
    out[n] = static_cast<uint64_t>(x);
  }
  return out;
}

/// Product mod m of nonnegative residues via one big-integer multiplication.
inline std::vector<Int> mul_mod_kronecker(const std::vector<Int>& a, const std::vector<Int>& b, const Int& m,
                                          size_t n_out) {
  if (a.empty() || b.empty() || n_out == 0) return {};
  const size_t la = std::min(a.size(), n_out), lb = std::min(b.size(), n_out);
  const size_t bits = 2 * mpz_sizeinbase(m.get_mpz_t(), 2) + 64;
  const size_t slot = (bits + 63) / 64;  // limbs per coefficient
  auto pack = [&](const std::vector<Int>& v, size_t len) {
    std::vector<uint64_t> limbs(len * slot, 0);
    for (size_t i = 0; i < len; ++i) {
      size_t count = 0;
      mpz_export(limbs.data() + i * slot, &count, -1, sizeof(uint64_t), 0, 0, v[i].get_mpz_t());
    }
    Int z;
    mpz_import(z.get_mpz_t(), limbs.size(), -1, sizeof(uint64_t), 0, 0, limbs.data());
    return z;
  };
  Int prod = pack(a, la) * pack(b, lb);
  const size_t total = std::min(n_out, la + lb - 1);
  std::vector<uint64_t> limbs(std::max<size_t>((la + lb) * slot, mpz_size(prod.get_mpz_t())), 0);
  size_t count = 0;
  mpz_export(limbs.data(), &count, -1, sizeof(uint64_t), 0, 0, prod.get_mpz_t());
  std::vector<Int> out(total);
  for (size_t i = 0; i < total; ++i) {
    mpz_import(out[i].get_mpz_t(), slot, -1, sizeof(uint64_t), 0, 0, limbs.data() + i * slot);
    mpz_mod(out[i].get_mpz_t(), out[i].get_mpz_t(), m.get_mpz_t());
  }
  return out;
}

/// Schoolbook product over any ring descriptor.
template <class Ring>
std::vector<typename Ring::value_type> mul_schoolbook(const Ring& ring, const std::vector<typename Ring::value_type>& a,
                                                      const std::vector<typename Ring::value_type>& b, size_t n_out) {
  using V = typename Ring::value_type;
  if (a.empty() || b.empty()) return {};
  const size_t len = std::min(n_out, a.size() + b.size() - 1);
  std::vector<V> out(len, ring.zero());
  for (size_t i = 0; i < std::min(a.size(), len); ++i) {
    if (ring.is_zero(a[i])) continue;
    for (size_t j = 0; j < b.size() && i + j < len; ++j) {
      if (ring.is_zero(b[j])) continue;
      out[i + j] = ring.add(out[i + j], ring.mul(a[i], b[j]));
    }
  }
  return out;
}

}  // namespace trisqrt
