#include "cirf/params.hpp"

#include <numeric>
#include <string>

namespace cirf {

namespace {

// Products in the Miller-Rabin witnesses can exceed 64 bits for general n.
std::uint64_t mul_mod_wide(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod_wide(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t acc = 1 % m, b = base % m;
  while (e) {
    if (e & 1) acc = mul_mod_wide(acc, b, m);
    b = mul_mod_wide(b, b, m);
    e >>= 1;
  }
  return acc;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // Deterministic witness set for the full 64-bit range.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod_wide(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod_wide(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> fs;
  for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d == 0) {
      fs.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) fs.push_back(n);
  return fs;
}

bool has_exact_order(Elem root, std::uint64_t n, Elem p) {
  if (root % p == 0) return false;
  if (pow_mod(root, n, p) != 1) return false;
  for (std::uint64_t q : prime_factors(n)) {
    if (pow_mod(root, n / q, p) == 1) return false;
  }
  return true;
}

GFParams validate_params(Elem p, Elem alpha, Elem beta, std::uint32_t h, std::uint32_t w,
                         Elem correlation_bound) {
  if (h == 0 || w == 0) fail(Errc::bad_argument, "zero image dimension");
  if (p >= (1ULL << 32))
    fail(Errc::width_overflow, "modulus must fit 32 bits so products stay in 64");
  if (!is_prime_u64(p)) fail(Errc::not_prime, "p = " + std::to_string(p));
  if ((p - 1) % h != 0)
    fail(Errc::divisibility_violation, "h = " + std::to_string(h) + " does not divide p-1");
  if ((p - 1) % w != 0)
    fail(Errc::divisibility_violation, "w = " + std::to_string(w) + " does not divide p-1");
  if (!has_exact_order(alpha, h, p))
    fail(Errc::order_mismatch, "alpha = " + std::to_string(alpha) + " does not have order " +
                                   std::to_string(h));
  if (!has_exact_order(beta, w, p))
    fail(Errc::order_mismatch,
         "beta = " + std::to_string(beta) + " does not have order " + std::to_string(w));
  Elem bound = correlation_bound ? correlation_bound : static_cast<Elem>(h) * w;
  if (p <= bound)
    fail(Errc::correlation_bound_violation, "p = " + std::to_string(p) +
                                                " does not exceed correlation bound " +
                                                std::to_string(bound));
  return GFParams{p, alpha % p, beta % p, h, w};
}

GFParams find_params(std::uint32_t h, std::uint32_t w, Elem correlation_bound) {
  if (h == 0 || w == 0) fail(Errc::bad_argument, "zero image dimension");
  if (correlation_bound == 0) correlation_bound = static_cast<Elem>(h) * w;
  std::uint64_t l = std::lcm<std::uint64_t>(h, w);
  // Start at the first candidate ≡ 1 (mod l) strictly above the bound.
  std::uint64_t p = (correlation_bound / l) * l + 1;
  if (p <= correlation_bound) p += l;
  while (p < 2 || !is_prime_u64(p)) {
    p += l;
    if (p >= (1ULL << 32)) fail(Errc::width_overflow, "no qualifying prime below 2^32");
  }
  // A generator of the full multiplicative group yields roots of any order
  // dividing p-1 by powering.
  Elem g = 1;
  if (p > 2) {
    auto qs = prime_factors(p - 1);
    for (g = 2; g < p; ++g) {
      bool ok = true;
      for (std::uint64_t q : qs) {
        if (pow_mod(g, (p - 1) / q, p) == 1) {
          ok = false;
          break;
        }
      }
      if (ok) break;
    }
  }
  Elem alpha = pow_mod(g, (p - 1) / h, p);
  Elem beta = pow_mod(g, (p - 1) / w, p);
  return validate_params(p, alpha, beta, h, w, correlation_bound);
}

GFParams reference_params() { return validate_params(8641, 40, 948, 32, 64); }

}  // namespace cirf
