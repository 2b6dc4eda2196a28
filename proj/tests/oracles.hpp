#pragma once

// Brute-force reference computations used as independent oracles. Nothing
// here calls into the library beyond its value types.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qkdlab/cloner.hpp"
#include "qkdlab/qudit.hpp"

namespace oracle {

using qkdlab::cplx;
using qkdlab::CMatrix;
using qkdlab::CVector;

inline cplx omega(long long k)
{
    const long long r = ((k % 3) + 3) % 3;
    return std::polar(1.0, 2.0 * M_PI * static_cast<double>(r) / 3.0);
}

inline CVector phi_state(double phi, int l)
{
    CVector v(3);
    for (int k = 0; k < 3; ++k)
        v(k) = std::polar(1.0 / std::sqrt(3.0), k * (2.0 * M_PI * l / 3.0 + phi));
    return v;
}

// rho_A[i,j] = sum_{rest} psi[i,rest] conj(psi[j,rest]) for a register of
// size d at position `pos` in a product of `dims`.
inline CMatrix reduce(const CVector& psi, const std::vector<int>& dims, int pos)
{
    int total = 1;
    for (int d : dims)
        total *= d;
    const int d = dims[static_cast<std::size_t>(pos)];
    CMatrix rho = CMatrix::Zero(d, d);
    std::vector<int> digits(dims.size());
    for (int a = 0; a < total; ++a) {
        for (int b = 0; b < total; ++b) {
            // Split both flat indices into digits and require all but `pos` to match.
            int ra = a, rb = b;
            bool same = true;
            int ia = 0, ib = 0;
            for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
                const int da = ra % dims[static_cast<std::size_t>(k)];
                const int db = rb % dims[static_cast<std::size_t>(k)];
                ra /= dims[static_cast<std::size_t>(k)];
                rb /= dims[static_cast<std::size_t>(k)];
                if (k == pos) {
                    ia = da;
                    ib = db;
                } else if (da != db) {
                    same = false;
                }
            }
            if (same)
                rho(ia, ib) += psi(a) * std::conj(psi(b));
        }
    }
    return rho;
}

// Explicit three-register cloner output, built term by term from the
// definition sum a_{mn} (U_{mn} psi)_A |B_{m,-n}>_{BC}.
inline CVector clone_output(const CMatrix& a, const CVector& psi)
{
    CVector out = CVector::Zero(27);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n) {
            CVector upsi = CVector::Zero(3);
            for (int k = 0; k < 3; ++k)
                upsi((k + m) % 3) += omega(static_cast<long long>(k) * n) * psi(k);
            const int nn = (3 - n) % 3;
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 3; ++k)
                    out(i * 9 + k * 3 + (k + m) % 3) += a(m, n) * upsi(i) * omega(static_cast<long long>(k) * nn) / std::sqrt(3.0);
        }
    return out;
}

// b_{m,n} = (1/3) sum_{x,y} w^{n x - m y} a_{x,y}, by direct summation.
inline CMatrix dual(const CMatrix& a)
{
    CMatrix b = CMatrix::Zero(3, 3);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
            for (int x = 0; x < 3; ++x)
                for (int y = 0; y < 3; ++y)
                    b(m, n) += omega(static_cast<long long>(n) * x - static_cast<long long>(m) * y) * a(x, y) / 3.0;
    return b;
}

inline long double entropy_bits(const std::vector<long double>& p)
{
    long double h = 0.0L;
    for (long double x : p)
        if (x > 0.0L)
            h -= x * std::log2(x);
    return h;
}

// Uniform point on the unit sphere v^2 + 2x^2 + 6y^2 = 1 (the y = z surface).
inline qkdlab::ClonerParams random_symmetric(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    const double u = g(rng), w = g(rng), s = g(rng);
    const double r = std::sqrt(u * u + w * w + s * s);
    const double y = s / r / std::sqrt(6.0);
    return {u / r, w / r / std::sqrt(2.0), y, y};
}

inline qkdlab::ClonerParams random_general(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    const double v = g(rng), x = g(rng), y = g(rng), z = g(rng);
    const double r = std::sqrt(v * v + 2 * x * x + 3 * y * y + 3 * z * z);
    return {v / r, x / r, y / r, z / r};
}

inline CMatrix random_matrix(std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    CMatrix a(3, 3);
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
            a(m, n) = cplx(g(rng), g(rng));
    return a / a.norm();
}

}  // namespace oracle
